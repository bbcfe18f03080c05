"""Hot-kernel dispatch: compiled Cython core when available, numpy otherwise.

Set NFKIT_PURE_PYTHON=1 to force the numpy fallback (used by the
benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import fallback

if os.environ.get("NFKIT_PURE_PYTHON", "") == "1":
    _impl = fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = fallback
        BACKEND = "python"

pattern_gain_grid = _impl.pattern_gain_grid
projection_gain_grid = _impl.projection_gain_grid

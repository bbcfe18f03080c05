"""Free-space channel models: planar-wave, spherical-wave (NUSW), Green's operator."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, SingularGeometryError
from .geometry import ApertureSurface, ArrayGeometry, Carrier

MODEL_FARFIELD = "farfield_planar"
MODEL_NUSW = "nusw"
MODEL_GREEN = "green_operator"

_MIN_DISTANCE = 1e-12


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex transfer coefficients, shape (N_rx, N_tx)."""

    entries: np.ndarray
    carrier: Carrier
    model: str

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.size == 0:
            raise InvalidArgumentError("entries must be a nonempty 2D complex array")
        if not np.all(np.isfinite(entries)):
            raise InvalidArgumentError("channel entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def vector(self) -> np.ndarray:
        """Flatten an N x 1 channel to shape (N,)."""
        if self.entries.shape[1] != 1:
            raise InvalidArgumentError("channel is not a column vector")
        return self.entries[:, 0]


@dataclass(frozen=True)
class WidebandChannelSet:
    frequencies_hz: np.ndarray
    channels: tuple[ChannelMatrix, ...]

    def __post_init__(self):
        freqs = np.asarray(self.frequencies_hz, dtype=float)
        if freqs.ndim != 1 or freqs.size < 1:
            raise InvalidArgumentError("need at least one subcarrier")
        # strictly increasing comb; the all-equal case covers zero bandwidth
        if freqs.size > 1 and not (np.all(np.diff(freqs) > 0) or np.all(freqs == freqs[0])):
            raise InvalidArgumentError("subcarrier frequencies must be strictly increasing")
        if len(self.channels) != freqs.size:
            raise InvalidArgumentError("one channel per subcarrier required")
        freqs.setflags(write=False)
        object.__setattr__(self, "frequencies_hz", freqs)


def direction_unit(theta: float) -> np.ndarray:
    """Unit propagation direction for a polar angle (see geometry conventions)."""
    return np.array([math.sin(theta), math.cos(theta), 0.0])


def _distances(points_a: np.ndarray, points_b: np.ndarray) -> np.ndarray:
    """Pairwise distances, shape (len(a), len(b))."""
    diff = points_a[:, None, :] - points_b[None, :, :]
    return np.sqrt(np.sum(diff**2, axis=-1))


def farfield_channel(array: ArrayGeometry, theta: float, carrier: Carrier) -> ChannelMatrix:
    """Planar-wave channel toward a far receiver at polar angle theta.

    entry_n = exp(-j*k*<u, p_n>) with u the propagation direction of the
    incoming plane wave; since the receiver sits along +direction_unit(theta),
    u = -direction_unit(theta), which matches the r -> inf limit of the
    spherical-wave phase exp(-j*k*d_n) up to a common factor.
    """
    u = direction_unit(theta)
    phase = carrier.wavenumber * (array.elements @ u)
    entries = np.exp(1j * phase)[:, None]
    return ChannelMatrix(entries=entries, carrier=carrier, model=MODEL_FARFIELD)


def nusw_channel(array: ArrayGeometry, receiver_point: np.ndarray, carrier: Carrier) -> ChannelMatrix:
    """Spherical-wave channel: per-element Friis amplitude and exact phase."""
    receiver_point = np.asarray(receiver_point, dtype=float)
    d = np.linalg.norm(array.elements - receiver_point[None, :], axis=1)
    if np.any(d <= _MIN_DISTANCE):
        raise SingularGeometryError("receiver coincides with an array element")
    lam = carrier.wavelength
    entries = (lam / (4.0 * np.pi * d)) * np.exp(-1j * carrier.wavenumber * d)
    return ChannelMatrix(entries=entries[:, None], carrier=carrier, model=MODEL_NUSW)


def nusw_mimo_channel(tx: ArrayGeometry, rx: ArrayGeometry, carrier: Carrier) -> ChannelMatrix:
    """Spherical-wave MIMO channel between two discrete arrays."""
    d = _distances(rx.elements, tx.elements)
    if np.any(d <= _MIN_DISTANCE):
        raise SingularGeometryError("tx and rx arrays share an element position")
    lam = carrier.wavelength
    entries = (lam / (4.0 * np.pi * d)) * np.exp(-1j * carrier.wavenumber * d)
    return ChannelMatrix(entries=entries, carrier=carrier, model=MODEL_NUSW)


def unit_spherical_response(
    array: ArrayGeometry, point: np.ndarray, carrier: Carrier
) -> np.ndarray:
    """Phase-only unit-norm response exp(-j*k*d_n)/sqrt(N), shape (N,)."""
    point = np.asarray(point, dtype=float)
    d = np.linalg.norm(array.elements - point[None, :], axis=1)
    if np.any(d <= _MIN_DISTANCE):
        raise SingularGeometryError("point coincides with an array element")
    return np.exp(-1j * carrier.wavenumber * d) / math.sqrt(array.n)


def greens_function(src: np.ndarray, dst: np.ndarray, carrier: Carrier) -> complex:
    """Scalar free-space Green's function exp(-jkd)/(4*pi*d)."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    d = float(np.linalg.norm(dst - src))
    if d <= _MIN_DISTANCE:
        raise SingularGeometryError("source and destination coincide")
    return complex(np.exp(-1j * carrier.wavenumber * d) / (4.0 * np.pi * d))


def greens_operator(tx: ApertureSurface, rx: ApertureSurface, carrier: Carrier) -> ChannelMatrix:
    """Patch-sampled aperture-to-aperture operator.

    Symmetric sqrt(area) weighting makes the discrete singular values
    approximate those of the continuous kernel.
    """
    tx_pts = tx.patch_centers()
    rx_pts = rx.patch_centers()
    d = _distances(rx_pts, tx_pts)
    if np.any(d <= _MIN_DISTANCE):
        raise SingularGeometryError("apertures overlap (zero patch distance)")
    g = np.exp(-1j * carrier.wavenumber * d) / (4.0 * np.pi * d)
    entries = g * math.sqrt(tx.patch_area * rx.patch_area)
    return ChannelMatrix(entries=entries, carrier=carrier, model=MODEL_GREEN)


def wideband_channels(
    array: ArrayGeometry,
    receiver_point: np.ndarray,
    center_hz: float,
    bandwidth_hz: float,
    m_subcarriers: int,
) -> WidebandChannelSet:
    """NUSW channels on a uniform subcarrier comb around the center frequency."""
    if m_subcarriers < 1:
        raise InvalidArgumentError(f"subcarrier count must be >= 1, got {m_subcarriers}")
    if bandwidth_hz < 0:
        raise InvalidArgumentError(f"bandwidth must be nonnegative, got {bandwidth_hz}")
    if center_hz - bandwidth_hz / 2.0 <= 0:
        raise InvalidArgumentError("band edge frequency must stay positive")
    if m_subcarriers == 1 or bandwidth_hz == 0.0:
        freqs = np.full(m_subcarriers, center_hz)
    else:
        freqs = center_hz - bandwidth_hz / 2.0 + np.arange(m_subcarriers) * (
            bandwidth_hz / (m_subcarriers - 1)
        )
    channels = tuple(
        nusw_channel(array, receiver_point, Carrier(frequency_hz=float(f))) for f in freqs
    )
    return WidebandChannelSet(frequencies_hz=freqs, channels=channels)


def write_channel_csv(channel: ChannelMatrix, path: str | Path) -> None:
    """Dump entries as (row, col, re, im) rows for external cross-checks."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "col", "re", "im"])
        for r in range(channel.entries.shape[0]):
            for c in range(channel.entries.shape[1]):
                v = channel.entries[r, c]
                writer.writerow([r, c, repr(float(v.real)), repr(float(v.imag))])

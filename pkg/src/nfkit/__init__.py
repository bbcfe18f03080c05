"""nfkit: a desk-scale near-field wireless simulation toolkit.

Channel models (planar, spherical-wave, Green's operator), power-scaling
and degrees-of-freedom analysis, beamfocusing and TTD hybrid beamformers,
near-field MUSIC sensing, and secrecy-rate experiments, plus the ``nfkit``
scenario CLI.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .geometry import (
    ApertureSurface,
    ArrayGeometry,
    Carrier,
    FieldRegion,
    FieldRegionReport,
    SPEED_OF_LIGHT,
    classify_point,
    fresnel_boundary,
    make_uniform_linear_array,
    make_uniform_planar_array,
    polar_to_cartesian,
    rayleigh_distance,
)

__version__ = "0.1.0"

__all__ = [
    "ApertureSurface",
    "ArrayGeometry",
    "Carrier",
    "FieldRegion",
    "FieldRegionReport",
    "KERNEL_BACKEND",
    "SPEED_OF_LIGHT",
    "classify_point",
    "fresnel_boundary",
    "make_uniform_linear_array",
    "make_uniform_planar_array",
    "polar_to_cartesian",
    "rayleigh_distance",
    "__version__",
]

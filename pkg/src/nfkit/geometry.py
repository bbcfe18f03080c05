"""Array/aperture geometry and field-region boundaries.

Conventions used throughout the toolkit:

* discrete arrays lie along the y-axis (planar arrays in the y-z plane),
  broadside pointing along +x;
* a polar point (r, theta) maps to cartesian
  ``(r*sin(theta), r*cos(theta), 0)``, i.e. theta is measured from the
  array axis, so broadside is theta = pi/2;
* all lengths are meters, all angles radians unless a name says otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class Carrier:
    """Carrier frequency with derived wavelength and wavenumber."""

    frequency_hz: float

    def __post_init__(self):
        if not (self.frequency_hz > 0.0 and math.isfinite(self.frequency_hz)):
            raise InvalidArgumentError(f"frequency_hz must be positive, got {self.frequency_hz}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


def polar_to_cartesian(distance_m: float, angle_rad: float) -> np.ndarray:
    """Map a polar point to 3D cartesian (array axis = y, broadside = +x)."""
    return np.array(
        [distance_m * math.sin(angle_rad), distance_m * math.cos(angle_rad), 0.0]
    )


class FieldRegion(enum.Enum):
    REACTIVE_NEAR = "reactive_near"
    RADIATING_NEAR = "radiating_near"
    FAR = "far"


@dataclass(frozen=True)
class FieldRegionReport:
    fresnel_boundary_m: float
    rayleigh_distance_m: float
    region: FieldRegion


@dataclass(frozen=True)
class ArrayGeometry:
    """Discrete antenna array given by its element positions (meters)."""

    elements: np.ndarray
    spacing: float | None = None

    def __post_init__(self):
        elements = np.asarray(self.elements, dtype=float)
        if elements.ndim != 2 or elements.shape[1] != 3 or elements.shape[0] < 1:
            raise InvalidArgumentError("elements must be an (N, 3) array with N >= 1")
        if not np.all(np.isfinite(elements)):
            raise InvalidArgumentError("element positions must be finite")
        elements.setflags(write=False)
        object.__setattr__(self, "elements", elements)

    @property
    def n(self) -> int:
        return self.elements.shape[0]

    @property
    def centroid(self) -> np.ndarray:
        return self.elements.mean(axis=0)

    @property
    def aperture_diameter(self) -> float:
        """Maximum pairwise element distance (chunked to bound memory)."""
        pts = self.elements
        if pts.shape[0] == 1:
            return 0.0
        best = 0.0
        chunk = 512
        for i in range(0, pts.shape[0], chunk):
            block = pts[i : i + chunk]
            d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
            best = max(best, float(d2.max()))
        return math.sqrt(best)


@dataclass(frozen=True)
class ApertureSurface:
    """Continuous radiating surface in a plane x = const, with a patch grid.

    The surface spans ``extent_y`` by ``extent_z`` centered on ``origin``.
    ``volume`` follows the unit-depth bookkeeping convention: the surface
    stands in for a slab of depth 1 m.
    """

    origin: np.ndarray
    extent_y: float
    extent_z: float
    patches_y: int
    patches_z: int
    unit_depth: float = field(default=1.0)

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        if origin.shape != (3,) or not np.all(np.isfinite(origin)):
            raise InvalidArgumentError("origin must be a finite 3-vector")
        origin.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        if not (self.extent_y > 0 and self.extent_z > 0):
            raise InvalidArgumentError("extents must be positive")
        if not (self.patches_y >= 1 and self.patches_z >= 1):
            raise InvalidArgumentError("patch counts must be >= 1")

    @property
    def patch_area(self) -> float:
        return (self.extent_y / self.patches_y) * (self.extent_z / self.patches_z)

    @property
    def volume(self) -> float:
        return self.extent_y * self.extent_z * self.unit_depth

    @property
    def width_z(self) -> float:
        return self.extent_z

    def patch_centers(self) -> np.ndarray:
        """Centers of the quadrature patches, shape (patches_y*patches_z, 3)."""
        ys = (np.arange(self.patches_y) + 0.5) / self.patches_y - 0.5
        zs = (np.arange(self.patches_z) + 0.5) / self.patches_z - 0.5
        yy, zz = np.meshgrid(ys * self.extent_y, zs * self.extent_z, indexing="ij")
        pts = np.zeros((yy.size, 3))
        pts[:, 1] = yy.ravel()
        pts[:, 2] = zz.ravel()
        return pts + self.origin


def make_uniform_linear_array(
    n: int, spacing: float | None = None, carrier: Carrier | None = None
) -> ArrayGeometry:
    """Centered ULA on the y-axis; spacing defaults to half a wavelength."""
    if n < 1:
        raise InvalidArgumentError(f"element count must be >= 1, got {n}")
    if spacing is None:
        if carrier is None:
            raise InvalidArgumentError("either spacing or carrier must be given")
        spacing = carrier.wavelength / 2.0
    if not (spacing > 0):
        raise InvalidArgumentError(f"spacing must be positive, got {spacing}")
    y = (np.arange(n) - (n - 1) / 2.0) * spacing
    elements = np.zeros((n, 3))
    elements[:, 1] = y
    return ArrayGeometry(elements=elements, spacing=float(spacing))


def make_uniform_planar_array(
    n_y: int, n_z: int, spacing: float | None = None, carrier: Carrier | None = None
) -> ArrayGeometry:
    """Centered UPA in the y-z plane. Aperture diameter is the diagonal."""
    if n_y < 1 or n_z < 1:
        raise InvalidArgumentError("planar array needs n_y >= 1 and n_z >= 1")
    if spacing is None:
        if carrier is None:
            raise InvalidArgumentError("either spacing or carrier must be given")
        spacing = carrier.wavelength / 2.0
    if not (spacing > 0):
        raise InvalidArgumentError(f"spacing must be positive, got {spacing}")
    y = (np.arange(n_y) - (n_y - 1) / 2.0) * spacing
    z = (np.arange(n_z) - (n_z - 1) / 2.0) * spacing
    yy, zz = np.meshgrid(y, z, indexing="ij")
    elements = np.zeros((yy.size, 3))
    elements[:, 1] = yy.ravel()
    elements[:, 2] = zz.ravel()
    return ArrayGeometry(elements=elements, spacing=float(spacing))


def rayleigh_distance(aperture_d: float, wavelength: float) -> float:
    """Near/far boundary 2*D^2/lambda."""
    if not (wavelength > 0):
        raise InvalidArgumentError(f"wavelength must be positive, got {wavelength}")
    if aperture_d < 0:
        raise InvalidArgumentError(f"aperture must be nonnegative, got {aperture_d}")
    return 2.0 * aperture_d**2 / wavelength


def fresnel_boundary(aperture_d: float, wavelength: float) -> float:
    """Start of the Fresnel (radiating near-field) region, 0.62*sqrt(D^3/lambda)."""
    if not (wavelength > 0):
        raise InvalidArgumentError(f"wavelength must be positive, got {wavelength}")
    if aperture_d < 0:
        raise InvalidArgumentError(f"aperture must be nonnegative, got {aperture_d}")
    return 0.62 * math.sqrt(aperture_d**3 / wavelength)


def classify_point(array: ArrayGeometry, point: np.ndarray, carrier: Carrier) -> FieldRegionReport:
    """Classify an observation point relative to the whole-array boundaries.

    The reference point is the array centroid.  When the two boundaries
    flip order (sub-wavelength apertures), the larger one is used as the
    near/far threshold.
    """
    point = np.asarray(point, dtype=float)
    if point.shape != (3,) or not np.all(np.isfinite(point)):
        raise InvalidArgumentError("point must be a finite 3-vector")
    lam = carrier.wavelength
    d_aperture = array.aperture_diameter
    fres = fresnel_boundary(d_aperture, lam)
    rayl = rayleigh_distance(d_aperture, lam)
    dist = float(np.linalg.norm(point - array.centroid))
    far_threshold = max(fres, rayl)
    if dist >= far_threshold:
        region = FieldRegion.FAR
    elif dist < fres:
        region = FieldRegion.REACTIVE_NEAR
    else:
        region = FieldRegion.RADIATING_NEAR
    return FieldRegionReport(fresnel_boundary_m=fres, rayleigh_distance_m=rayl, region=region)

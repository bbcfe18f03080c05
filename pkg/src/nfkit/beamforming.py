"""Beamsteering/beamfocusing vectors, polar radiation patterns, wideband
beam split, and TTD-based hybrid beamformer structures (FC / SC / HFN)."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .channel import WidebandChannelSet, direction_unit, unit_spherical_response
from .errors import ConfigurationError, InvalidArgumentError
from .geometry import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    Carrier,
    FieldRegion,
    classify_point,
    polar_to_cartesian,
    rayleigh_distance,
)

KIND_STEERING = "steering"
KIND_FOCUSING = "focusing"
KIND_HYBRID = "hybrid"

STRUCTURE_FC = "fc"
STRUCTURE_SC = "sc"
STRUCTURE_HFN = "hfn"

QOS_DELAY_SENSITIVE = "delay_sensitive"
QOS_HIGH_RATE = "high_rate"

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Beamformer:
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=complex)
        if w.ndim != 1 or w.size < 1:
            raise InvalidArgumentError("weights must be a nonempty 1D complex vector")
        norm = float(np.linalg.norm(w))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidArgumentError(f"weights must be unit-norm, got ||w|| = {norm}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class PolarGrid:
    """Values sampled on an (angle, distance) grid; values[i, j] is
    (distances_m[i], angles_rad[j])."""

    angles_rad: np.ndarray
    distances_m: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles_rad, dtype=float)
        dists = np.asarray(self.distances_m, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if angles.ndim != 1 or dists.ndim != 1:
            raise InvalidArgumentError("axes must be 1D")
        if angles.size > 1 and not np.all(np.diff(angles) > 0):
            raise InvalidArgumentError("angles must be ascending")
        if dists.size > 1 and not np.all(np.diff(dists) > 0):
            raise InvalidArgumentError("distances must be ascending")
        if values.shape != (dists.size, angles.size):
            raise InvalidArgumentError("values shape must be (n_dist, n_angle)")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidArgumentError("values must be finite and nonnegative")
        for arr in (angles, dists, values):
            arr.setflags(write=False)
        object.__setattr__(self, "angles_rad", angles)
        object.__setattr__(self, "distances_m", dists)
        object.__setattr__(self, "values", values)

    def argmax_cell(self) -> tuple[int, int]:
        flat = int(np.argmax(self.values))
        return np.unravel_index(flat, self.values.shape)  # type: ignore[return-value]


@dataclass(frozen=True)
class HardwareCost:
    n_rf: int
    n_ttd: int
    n_ps: int
    total_power_w: float


@dataclass(frozen=True)
class HybridStructure:
    """Analog beamforming network: per-RF-chain PS phases plus TTD delays.

    ``subarrays[r]`` is the half-open antenna index range driven by RF
    chain ``r``; within it the antennas split evenly into
    ``n_ttd_per_rf`` contiguous TTD segments.
    """

    kind: str
    n_antennas: int
    n_rf: int
    n_ttd_per_rf: int
    subarrays: tuple[tuple[int, int], ...]
    ttd_delays_s: np.ndarray
    ps_phases_rad: np.ndarray
    max_delay_s: float
    center_hz: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in (STRUCTURE_FC, STRUCTURE_SC, STRUCTURE_HFN):
            raise InvalidArgumentError(f"unknown structure kind {self.kind!r}")
        delays = np.asarray(self.ttd_delays_s, dtype=float)
        phases = np.asarray(self.ps_phases_rad, dtype=float)
        if delays.shape != (self.n_rf, self.n_ttd_per_rf):
            raise InvalidArgumentError("ttd_delays_s must be (n_rf, n_ttd_per_rf)")
        if phases.shape != (self.n_rf, self.n_antennas):
            raise InvalidArgumentError("ps_phases_rad must be (n_rf, n_antennas)")
        if np.any(delays < 0) or np.any(delays > self.max_delay_s + 1e-18):
            raise ConfigurationError("TTD delays outside [0, max_delay]")
        if np.any(phases < 0) or np.any(phases >= TWO_PI):
            raise InvalidArgumentError("PS phases must lie in [0, 2*pi)")
        if len(self.subarrays) != self.n_rf:
            raise InvalidArgumentError("one antenna range per RF chain required")
        if self.kind in (STRUCTURE_SC, STRUCTURE_HFN):
            covered = sorted(self.subarrays)
            if covered[0][0] != 0 or covered[-1][1] != self.n_antennas:
                raise ConfigurationError("subarrays must cover the whole array")
            for (_, stop), (start, _) in zip(covered, covered[1:]):
                if stop != start:
                    raise ConfigurationError("subarrays must not overlap or leave gaps")
        for start, stop in self.subarrays:
            if not (0 <= start < stop <= self.n_antennas):
                raise ConfigurationError("invalid subarray range")
            if (stop - start) % self.n_ttd_per_rf != 0:
                raise ConfigurationError("TTD count must divide the subarray evenly")
        delays.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "ttd_delays_s", delays)
        object.__setattr__(self, "ps_phases_rad", phases)

    @property
    def n_ps(self) -> int:
        """PS count per the wiring rule: FC duplicates per chain, SC/HFN do not."""
        if self.kind == STRUCTURE_FC:
            return self.n_antennas * self.n_rf
        return self.n_antennas

    @property
    def n_ttd(self) -> int:
        return self.n_ttd_per_rf * self.n_rf

    def effective_weights(self, frequency_hz: float, rf_chain: int = 0) -> np.ndarray:
        """Unit-norm analog weight vector of one RF chain at one frequency."""
        if not (0 <= rf_chain < self.n_rf):
            raise InvalidArgumentError(f"rf_chain out of range: {rf_chain}")
        start, stop = self.subarrays[rf_chain]
        seg_len = (stop - start) // self.n_ttd_per_rf
        w = np.zeros(self.n_antennas, dtype=complex)
        idx = np.arange(start, stop)
        seg = (idx - start) // seg_len
        phase = self.ps_phases_rad[rf_chain, idx] - TWO_PI * frequency_hz * self.ttd_delays_s[rf_chain, seg]
        w[idx] = np.exp(1j * phase) / math.sqrt(stop - start)
        return w


def beamsteering_vector(array: ArrayGeometry, theta: float, carrier: Carrier) -> Beamformer:
    """Angle-only conjugate of the planar-wave phases."""
    u = direction_unit(theta)
    phase = -carrier.wavenumber * (array.elements @ u)
    w = np.exp(1j * phase) / math.sqrt(array.n)
    return Beamformer(weights=w, kind=KIND_STEERING)


def beamfocusing_vector(
    array: ArrayGeometry, distance_m: float, theta: float, carrier: Carrier
) -> Beamformer:
    """(angle, distance) conjugate of the spherical-wave phases."""
    point = polar_to_cartesian(distance_m, theta)
    a = unit_spherical_response(array, point, carrier)
    return Beamformer(weights=np.conj(a), kind=KIND_FOCUSING)


def _grid_chunks(n: int, width: int = 16):
    for lo in range(0, n, width):
        yield lo, min(lo + width, n)


def radiation_pattern(
    beamformer: Beamformer,
    array: ArrayGeometry,
    angles_rad: Sequence[float],
    distances_m: Sequence[float],
    carrier: Carrier,
    normalize: bool = True,
    threads: int = 1,
) -> PolarGrid:
    """|a(r, theta)^H w|^2 over the polar grid, optionally peak-normalized.

    The angle axis is split into fixed chunks regardless of thread count,
    so outputs are bitwise independent of ``threads``.
    """
    angles = np.asarray(angles_rad, dtype=float)
    dists = np.asarray(distances_m, dtype=float)
    if angles.size == 0 or dists.size == 0:
        raise InvalidArgumentError("grid axes must be nonempty")
    w = beamformer.weights
    k = carrier.wavenumber

    def run(chunk):
        lo, hi = chunk
        return _kernels.pattern_gain_grid(array.elements, w, angles[lo:hi], dists, k)

    chunks = list(_grid_chunks(angles.size))
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, chunks))
    else:
        blocks = [run(c) for c in chunks]
    values = np.hstack(blocks)
    if normalize:
        peak = values.max()
        if peak > 0:
            values = values / peak
    return PolarGrid(angles_rad=angles, distances_m=dists, values=values)


def asymptotic_orthogonality(
    sizes: Sequence[int],
    p1: tuple[float, float],
    p2: tuple[float, float],
    carrier: Carrier,
    spacing: float | None = None,
) -> np.ndarray:
    """|a_N(p1)^H a_N(p2)| for growing ULAs; p1/p2 are (distance, angle)."""
    from .geometry import make_uniform_linear_array

    if tuple(p1) == tuple(p2):
        pass  # correlation is identically 1; still computed below
    out = []
    for n in sizes:
        array = make_uniform_linear_array(n, spacing=spacing, carrier=carrier)
        a1 = unit_spherical_response(array, polar_to_cartesian(*p1), carrier)
        a2 = unit_spherical_response(array, polar_to_cartesian(*p2), carrier)
        out.append(abs(np.vdot(a1, a2)))
    return np.array(out)


def _subcarrier_comb(center_hz: float, bandwidth_hz: float, m: int) -> np.ndarray:
    if m == 1 or bandwidth_hz == 0.0:
        return np.full(m, center_hz)
    return center_hz - bandwidth_hz / 2.0 + np.arange(m) * (bandwidth_hz / (m - 1))


def _design_structure(
    kind: str,
    array: ArrayGeometry,
    users: Sequence[tuple[float, float]],
    n_rf: int,
    n_ttd_per_rf: int,
    center_hz: float,
    bandwidth_hz: float,
    m_subcarriers: int,
    max_delay_s: float | None,
    subarrays: Sequence[tuple[int, int]],
    farfield_chains: Sequence[bool],
) -> HybridStructure:
    """Shared FC/SC/HFN designer.

    PS phases conjugate the per-user response at the center frequency
    (far-field linearized about the subarray center when
    ``farfield_chains[r]``).  TTD delays come from a least-squares fit of
    the per-segment mean residual phase against the subcarrier
    frequencies, shifted to be nonnegative and clipped to ``max_delay``.
    """
    n = array.n
    if max_delay_s is None:
        max_delay_s = 2.0 * array.aperture_diameter / SPEED_OF_LIGHT
    freqs = _subcarrier_comb(center_hz, bandwidth_hz, m_subcarriers)
    fc = center_hz
    delays = np.zeros((n_rf, n_ttd_per_rf))
    phases = np.zeros((n_rf, n))
    for r in range(n_rf):
        user = users[r % len(users)]
        point = polar_to_cartesian(*user)
        start, stop = subarrays[r]
        cov = np.arange(start, stop)
        if (stop - start) % n_ttd_per_rf != 0:
            raise ConfigurationError(
                f"{n_ttd_per_rf} TTDs cannot evenly drive {stop - start} antennas"
            )
        if farfield_chains[r]:
            center = array.elements[cov].mean(axis=0)
            r_center = float(np.linalg.norm(point - center))
            u = (point - center) / r_center
            d = r_center - (array.elements[cov] - center) @ u
        else:
            d = np.linalg.norm(array.elements[cov] - point[None, :], axis=1)
        seg_len = (stop - start) // n_ttd_per_rf
        seg = np.arange(stop - start) // seg_len
        if bandwidth_hz > 0.0 and m_subcarriers > 1 and n_ttd_per_rf > 1:
            raw = np.empty(n_ttd_per_rf)
            for s in range(n_ttd_per_rf):
                d_mean = d[seg == s].mean()
                # residual phase left by center-frequency PSs, averaged over the segment
                rho = TWO_PI * (freqs - fc) * d_mean / SPEED_OF_LIGHT
                slope = np.polyfit(freqs, rho, 1)[0]
                raw[s] = -slope / TWO_PI
            raw -= raw.min()
            delays[r] = np.clip(raw, 0.0, max_delay_s)
        phases[r, cov] = np.mod(TWO_PI * fc * (d / SPEED_OF_LIGHT + delays[r][seg]), TWO_PI)
    return HybridStructure(
        kind=kind,
        n_antennas=n,
        n_rf=n_rf,
        n_ttd_per_rf=n_ttd_per_rf,
        subarrays=tuple(subarrays),
        ttd_delays_s=delays,
        ps_phases_rad=phases,
        max_delay_s=max_delay_s,
        center_hz=center_hz,
    )


def design_ttd_hybrid(
    kind: str,
    array: ArrayGeometry,
    users: Sequence[tuple[float, float]],
    n_rf: int,
    n_ttd_per_rf: int = 16,
    center_hz: float = 100e9,
    bandwidth_hz: float = 0.0,
    m_subcarriers: int = 1,
    max_delay_s: float | None = None,
) -> HybridStructure:
    """Design an FC or SC TTD hybrid beamformer for the given users."""
    if kind not in (STRUCTURE_FC, STRUCTURE_SC):
        raise InvalidArgumentError(f"kind must be 'fc' or 'sc', got {kind!r}")
    if len(users) < 1:
        raise InvalidArgumentError("at least one user required")
    if n_rf < len(users):
        raise ConfigurationError(f"need n_rf >= {len(users)} for dedicated beams, got {n_rf}")
    n = array.n
    if kind == STRUCTURE_FC:
        subarrays = [(0, n)] * n_rf
        farfield = [False] * n_rf
    else:
        if n % n_rf != 0:
            raise ConfigurationError(f"{n_rf} subarrays cannot evenly split {n} antennas")
        block = n // n_rf
        subarrays = [(r * block, (r + 1) * block) for r in range(n_rf)]
        farfield = [True] * n_rf
    return _design_structure(
        kind, array, users, n_rf, n_ttd_per_rf, center_hz, bandwidth_hz,
        m_subcarriers, max_delay_s, subarrays, farfield,
    )


def design_ps_only(
    array: ArrayGeometry,
    focus: tuple[float, float],
    center_hz: float,
) -> HybridStructure:
    """Frequency-flat phase-shifter focusing (the beam-split baseline)."""
    return _design_structure(
        STRUCTURE_FC, array, [focus], 1, 1, center_hz, 0.0, 1, None,
        [(0, array.n)], [False],
    )


def beam_split_gain(
    structure: HybridStructure, wideband: WidebandChannelSet, rf_chain: int = 0
) -> np.ndarray:
    """Normalized array gain |h_m^H w(f_m)|^2 / ||h_m||^2 per subcarrier."""
    gains = np.empty(len(wideband.channels))
    for m, (f, ch) in enumerate(zip(wideband.frequencies_hz, wideband.channels)):
        h = ch.vector
        w = structure.effective_weights(float(f), rf_chain)
        gains[m] = abs(np.dot(h, w)) ** 2 / float(np.vdot(h, h).real)
    return gains


def partition_hfn(
    array: ArrayGeometry,
    users: Sequence[tuple[tuple[float, float], str]],
    n_rf: int,
    carrier: Carrier,
    n_ttd_per_rf: int = 1,
) -> HybridStructure:
    """Split the array into a far-field block plus a beamfocusing block.

    The small block (one RF chain, top edge of the array) is the largest
    contiguous block, capped at half the array, whose Rayleigh distance
    stays below every delay-sensitive user distance; the remaining
    antennas and RF chains serve the high-rate users with focusing.
    """
    if len(users) < 1:
        raise InvalidArgumentError("at least one user required")
    if n_rf < 1:
        raise InvalidArgumentError("need at least one RF chain")
    if array.spacing is None:
        raise InvalidArgumentError("partitioning needs a uniform-layout array")
    ds_users = [loc for loc, qos in users if qos == QOS_DELAY_SENSITIVE]
    hr_users = [loc for loc, qos in users if qos == QOS_HIGH_RATE]
    for _, qos in users:
        if qos not in (QOS_DELAY_SENSITIVE, QOS_HIGH_RATE):
            raise InvalidArgumentError(f"unknown qos class {qos!r}")
    n = array.n
    spacing = array.spacing
    lam = carrier.wavelength
    if not ds_users:
        # degenerate single-class fallback: everything focuses
        block = n // n_rf
        if n % n_rf != 0:
            raise ConfigurationError(f"{n_rf} chains cannot evenly split {n} antennas")
        subarrays = [(r * block, (r + 1) * block) for r in range(n_rf)]
        return _design_structure(
            STRUCTURE_HFN, array, hr_users, n_rf, n_ttd_per_rf,
            carrier.frequency_hz, 0.0, 1, None, subarrays, [False] * n_rf,
        )
    r_min = min(loc[0] for loc in ds_users)
    # block length whose aperture stays a strict step below sqrt(r_min*lam/2),
    # so rayleigh((m-1)*spacing) <= r_min with margin
    m_feasible = int(math.floor(math.sqrt(r_min * lam / 2.0) / spacing))
    if m_feasible < 2:
        raise ConfigurationError(
            f"delay-sensitive user at {r_min} m sits inside even a 2-element "
            f"subarray's near field (spacing {spacing} m)"
        )
    m_small = min(m_feasible, n // 2 if hr_users else n)
    small = (n - m_small, n)  # top edge of the array
    small_array = ArrayGeometry(elements=array.elements[small[0]:small[1]], spacing=spacing)
    for loc in ds_users:
        report = classify_point(small_array, polar_to_cartesian(*loc), carrier)
        if report.region != FieldRegion.FAR:
            raise ConfigurationError(
                f"delay-sensitive user at {loc} not in the far field of the small subarray"
            )
    if not hr_users:
        return _design_structure(
            STRUCTURE_HFN, array, ds_users, 1, n_ttd_per_rf,
            carrier.frequency_hz, 0.0, 1, None,
            [(0, n)], [True],
        )
    if n_rf < 2:
        raise ConfigurationError("serving both qos classes needs n_rf >= 2")
    n_large_chains = n_rf - 1
    large_len = small[0]
    if large_len % n_large_chains != 0:
        raise ConfigurationError(
            f"{n_large_chains} chains cannot evenly split the {large_len}-antenna large subarray"
        )
    block = large_len // n_large_chains
    subarrays = [(r * block, (r + 1) * block) for r in range(n_large_chains)] + [small]
    chain_users = [hr_users[r % len(hr_users)] for r in range(n_large_chains)] + [ds_users[0]]
    farfield = [False] * n_large_chains + [True]
    return _design_structure(
        STRUCTURE_HFN, array, chain_users, n_rf, n_ttd_per_rf,
        carrier.frequency_hz, 0.0, 1, None, subarrays, farfield,
    )


def hardware_cost(
    structure: HybridStructure,
    ps_power_w: float = 0.0,
    ttd_power_w: float = 0.0,
    rf_power_w: float = 0.0,
) -> HardwareCost:
    """Component counts per the wiring rule plus total power draw."""
    for name, v in (("ps_power_w", ps_power_w), ("ttd_power_w", ttd_power_w), ("rf_power_w", rf_power_w)):
        if v < 0:
            raise InvalidArgumentError(f"{name} must be nonnegative, got {v}")
    n_ps = structure.n_ps
    n_ttd = structure.n_ttd
    total = n_ps * ps_power_w + n_ttd * ttd_power_w + structure.n_rf * rf_power_w
    return HardwareCost(n_rf=structure.n_rf, n_ttd=n_ttd, n_ps=n_ps, total_power_w=total)


def write_polar_csv(grid: PolarGrid, path: str | Path, value_name: str = "value") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["angle_deg", "distance_m", value_name])
        for i, r in enumerate(grid.distances_m):
            for j, theta in enumerate(grid.angles_rad):
                writer.writerow(
                    [repr(math.degrees(theta)), repr(float(r)), repr(float(grid.values[i, j]))]
                )

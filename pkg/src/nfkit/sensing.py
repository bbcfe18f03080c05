"""Near-field target echo simulation and joint (angle, distance) MUSIC."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .beamforming import PolarGrid
from .channel import unit_spherical_response
from .errors import EstimationError, InvalidArgumentError
from .geometry import ArrayGeometry, Carrier, polar_to_cartesian


@dataclass(frozen=True)
class Target:
    range_m: float
    angle_rad: float
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not (self.range_m > 0):
            raise InvalidArgumentError(f"target range must be positive, got {self.range_m}")
        if abs(self.amplitude) == 0:
            raise InvalidArgumentError("target amplitude must be nonzero")


@dataclass(frozen=True)
class SnapshotSet:
    """N x L array observations plus the noise level and seed that made them."""

    samples: np.ndarray
    noise_power_w: float
    seed: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 2 or samples.shape[1] < 1:
            raise InvalidArgumentError("samples must be (N, L) with L >= 1")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError("snapshots must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)


def simulate_snapshots(
    array: ArrayGeometry,
    targets: Sequence[Target],
    carrier: Carrier,
    n_snapshots: int,
    snr_db: float = 10.0,
    seed: int = 0,
    noise_power_w: float = 1.0,
) -> SnapshotSet:
    """Superpose unit-norm spherical responses with Gaussian symbols and noise.

    SNR is defined per element: total per-element signal power over the
    noise power.  Deterministic for a fixed seed.
    """
    if n_snapshots < 1:
        raise InvalidArgumentError(f"snapshot count must be >= 1, got {n_snapshots}")
    rng = np.random.default_rng(seed)
    n = array.n
    noise_scale = math.sqrt(noise_power_w / 2.0)
    noise = noise_scale * (
        rng.standard_normal((n, n_snapshots)) + 1j * rng.standard_normal((n, n_snapshots))
    )
    if not targets:
        return SnapshotSet(samples=noise, noise_power_w=noise_power_w, seed=seed)
    steering = np.stack(
        [
            t.amplitude * unit_spherical_response(array, polar_to_cartesian(t.range_m, t.angle_rad), carrier)
            for t in targets
        ],
        axis=1,
    )
    snr_lin = 10.0 ** (snr_db / 10.0)
    # per-element signal power of one source is sigma_s^2 / N
    sigma_s = math.sqrt(snr_lin * noise_power_w * n / len(targets))
    symbols = (sigma_s / math.sqrt(2.0)) * (
        rng.standard_normal((len(targets), n_snapshots))
        + 1j * rng.standard_normal((len(targets), n_snapshots))
    )
    samples = steering @ symbols + noise
    return SnapshotSet(samples=samples, noise_power_w=noise_power_w, seed=seed)


def music_spectrum(
    snapshots: SnapshotSet,
    k_targets: int,
    angles_rad: Sequence[float],
    distances_m: Sequence[float],
    array: ArrayGeometry,
    carrier: Carrier,
    threads: int = 1,
) -> PolarGrid:
    """Noise-subspace pseudospectrum 1 / ||E_n^H a(r, theta)||^2.

    Uses the orthonormal-basis identity ||E_n^H a||^2 = ||a||^2 - ||E_s^H a||^2
    so only the k-dimensional signal subspace is evaluated on the grid.
    """
    n, n_snap = snapshots.samples.shape
    if not (1 <= k_targets < n):
        raise InvalidArgumentError(f"k_targets must satisfy 1 <= k < {n}, got {k_targets}")
    angles = np.asarray(angles_rad, dtype=float)
    dists = np.asarray(distances_m, dtype=float)
    if angles.size == 0 or dists.size == 0:
        raise InvalidArgumentError("grid axes must be nonempty")
    cov = snapshots.samples @ snapshots.samples.conj().T / n_snap
    eigvals, eigvecs = np.linalg.eigh(cov)
    # eigh returns ascending order: the top k eigenvectors span the signal subspace
    if k_targets > np.linalg.matrix_rank(cov):
        raise EstimationError(
            f"covariance rank {np.linalg.matrix_rank(cov)} below requested k = {k_targets}"
        )
    signal_basis = np.ascontiguousarray(eigvecs[:, -k_targets:])
    k_wave = carrier.wavenumber

    def run(chunk):
        lo, hi = chunk
        return _kernels.projection_gain_grid(array.elements, signal_basis, angles[lo:hi], dists, k_wave)

    chunks = [(lo, min(lo + 16, angles.size)) for lo in range(0, angles.size, 16)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, chunks))
    else:
        blocks = [run(c) for c in chunks]
    signal_power = np.hstack(blocks)
    denominator = np.clip(1.0 - signal_power, 1e-18, None)
    return PolarGrid(angles_rad=angles, distances_m=dists, values=1.0 / denominator)


def estimate_targets(spectrum: PolarGrid, k: int) -> list[tuple[float, float]]:
    """k strongest strict 8-neighborhood local maxima as (range, angle) pairs.

    Ties break toward smaller range, then smaller angle; output sorted by range.
    """
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    v = spectrum.values
    n_r, n_a = v.shape
    padded = np.full((n_r + 2, n_a + 2), -np.inf)
    padded[1:-1, 1:-1] = v
    is_max = np.ones_like(v, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbor = padded[1 + di : 1 + di + n_r, 1 + dj : 1 + dj + n_a]
            # strict dominance over real neighbors only
            is_max &= (v > neighbor) | np.isneginf(neighbor)
    peaks = np.argwhere(is_max)
    if len(peaks) < k:
        raise EstimationError(f"found only {len(peaks)} local maxima, need {k}")
    order = sorted(
        (float(-v[i, j]), i, j) for i, j in peaks
    )  # strongest first; (i, j) ascending breaks ties toward smaller range/angle
    chosen = order[:k]
    result = [
        (float(spectrum.distances_m[i]), float(spectrum.angles_rad[j])) for _, i, j in chosen
    ]
    return sorted(result)


def write_spectrum_csv(spectrum: PolarGrid, path: str | Path) -> None:
    """Heatmap export in dB, columns (angle_deg, distance_m, value_db)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["angle_deg", "distance_m", "value_db"])
        for i, r in enumerate(spectrum.distances_m):
            for j, theta in enumerate(spectrum.angles_rad):
                db = 10.0 * math.log10(max(spectrum.values[i, j], 1e-300))
                writer.writerow([repr(math.degrees(theta)), repr(float(r)), repr(db)])


def write_estimates_csv(estimates: Sequence[tuple[float, float]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "range_m", "angle_deg"])
        for i, (r, theta) in enumerate(estimates):
            writer.writerow([i, repr(float(r)), repr(math.degrees(theta))])

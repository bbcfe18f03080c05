"""Power scaling laws, degrees of freedom, and communication modes."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .channel import (
    MODEL_GREEN,
    ChannelMatrix,
    greens_operator,
    nusw_channel,
)
from .errors import DegenerateChannelError, InvalidArgumentError
from .geometry import ApertureSurface, ArrayGeometry, Carrier, make_uniform_linear_array


@dataclass(frozen=True)
class ScalingCurve:
    sizes: np.ndarray
    received_power_w: np.ndarray
    model: str

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=float)
        power = np.asarray(self.received_power_w, dtype=float)
        if sizes.shape != power.shape or sizes.ndim != 1:
            raise InvalidArgumentError("sizes and powers must be equal-length 1D arrays")
        if np.any(power < 0):
            raise InvalidArgumentError("received power must be nonnegative")
        sizes.setflags(write=False)
        power.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "received_power_w", power)


@dataclass(frozen=True)
class DofReport:
    empirical_dof: int
    bound_dof: float
    singular_values: np.ndarray

    def __post_init__(self):
        sv = np.asarray(self.singular_values, dtype=float)
        if self.empirical_dof < 1:
            raise InvalidArgumentError("empirical DoF must be >= 1")
        if np.any(sv < 0) or np.any(np.diff(sv) > 1e-12):
            raise InvalidArgumentError("singular values must be nonnegative and descending")
        sv.setflags(write=False)
        object.__setattr__(self, "singular_values", sv)


class CharacteristicVolume(NamedTuple):
    side_m: float
    volume_m3: float


def received_power_mrt(channel: ChannelMatrix, transmit_power_w: float = 1.0) -> float:
    """Received power under maximum-ratio transmission: P * ||h||^2."""
    h = channel.vector
    norm2 = float(np.vdot(h, h).real)
    if norm2 == 0.0:
        raise DegenerateChannelError("all-zero channel")
    return transmit_power_w * norm2


def power_scaling_curve(
    receiver_point: np.ndarray,
    carrier: Carrier,
    sizes: Sequence[int],
    spacing: float | None = None,
    transmit_power_w: float = 1.0,
) -> ScalingCurve:
    """Received MRT power for a family of centered ULAs that grow edge-outward.

    Sizes must be increasing and share parity so each array contains its
    predecessors (new elements appear symmetrically at both edges).
    """
    sizes = list(sizes)
    if len(sizes) < 1 or any(s < 1 for s in sizes):
        raise InvalidArgumentError("sizes must be positive")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidArgumentError("sizes must be strictly increasing")
    if len({s % 2 for s in sizes}) > 1:
        raise InvalidArgumentError("sizes must share parity so growth keeps prior elements")
    powers = []
    for n in sizes:
        array = make_uniform_linear_array(n, spacing=spacing, carrier=carrier)
        powers.append(received_power_mrt(nusw_channel(array, receiver_point, carrier), transmit_power_w))
    return ScalingCurve(sizes=np.array(sizes, dtype=float), received_power_w=np.array(powers), model="nusw_discrete")


def characteristic_volume(distance_m: float, carrier: Carrier) -> CharacteristicVolume:
    """Largest transmitter cube keeping the receiver in its far field.

    The side solves rayleigh_distance(side) = distance, i.e.
    side = sqrt(distance * lambda / 2).
    """
    if not (distance_m > 0):
        raise InvalidArgumentError(f"distance must be positive, got {distance_m}")
    side = math.sqrt(distance_m * carrier.wavelength / 2.0)
    return CharacteristicVolume(side_m=side, volume_m3=side**3)


def continuous_power_scaling(
    receiver_point: np.ndarray,
    carrier: Carrier,
    side_lengths_m: Sequence[float],
    normalization: str = "characteristic",
    transmit_power_w: float = 1.0,
    patches_per_side: int = 32,
) -> ScalingCurve:
    """Received power for growing square apertures, via |G|^2 patch quadrature.

    Each patch contributes transmit_power * (lambda/(4*pi*d))^2 * area/A_ref.
    The reference cell area fixes how much aperture counts as "one antenna":

    * "characteristic": A_ref = side^2 of the characteristic volume at the
      receiver's nominal distance, so a single characteristic-volume
      transmitter reproduces the Friis power;
    * "halfwave": A_ref = (lambda/2)^2, so the quadrature reproduces a
      half-wavelength-spaced discrete array occupying the same box.
    """
    side_lengths = [float(s) for s in side_lengths_m]
    if len(side_lengths) < 1 or any(s < 0 for s in side_lengths):
        raise InvalidArgumentError("aperture sides must be nonnegative")
    if any(b <= a for a, b in zip(side_lengths, side_lengths[1:])):
        raise InvalidArgumentError("aperture sides must be strictly increasing")
    receiver_point = np.asarray(receiver_point, dtype=float)
    lam = carrier.wavelength
    if normalization == "characteristic":
        d_nominal = float(np.linalg.norm(receiver_point))
        a_ref = characteristic_volume(d_nominal, carrier).side_m ** 2
    elif normalization == "halfwave":
        a_ref = (lam / 2.0) ** 2
    else:
        raise InvalidArgumentError(f"unknown normalization {normalization!r}")
    powers = []
    for side in side_lengths:
        if side == 0.0:
            powers.append(0.0)
            continue
        aperture = ApertureSurface(
            origin=np.zeros(3),
            extent_y=side,
            extent_z=side,
            patches_y=patches_per_side,
            patches_z=patches_per_side,
        )
        d = np.linalg.norm(aperture.patch_centers() - receiver_point[None, :], axis=1)
        per_patch = (lam / (4.0 * np.pi * d)) ** 2 * (aperture.patch_area / a_ref)
        powers.append(transmit_power_w * float(np.sum(per_patch)))
    return ScalingCurve(
        sizes=np.array(side_lengths), received_power_w=np.array(powers), model=f"green_{normalization}"
    )


def effective_dof(channel: ChannelMatrix, threshold: float = 0.01, bound: float = float("nan")) -> DofReport:
    """Count singular values above threshold * sigma_1."""
    if not (0.0 < threshold < 1.0):
        raise InvalidArgumentError(f"threshold must be in (0, 1), got {threshold}")
    sv = np.linalg.svd(channel.entries, compute_uv=False)
    if sv[0] == 0.0:
        raise DegenerateChannelError("all-zero channel")
    dof = int(np.count_nonzero(sv >= threshold * sv[0]))
    return DofReport(empirical_dof=max(1, dof), bound_dof=bound, singular_values=sv)


def dof_bound_discrete(n_t: int, n_r: int, l_t: float, l_r: float, d: float, wavelength: float) -> float:
    """min(N_T, N_R, 2*L_T^2*L_R^2/(d*lambda)^2)."""
    for name, v in (("n_t", n_t), ("n_r", n_r), ("l_t", l_t), ("l_r", l_r), ("d", d), ("wavelength", wavelength)):
        if not (v > 0):
            raise InvalidArgumentError(f"{name} must be positive, got {v}")
    geometric = 2.0 * l_t**2 * l_r**2 / (d * wavelength) ** 2
    return min(float(n_t), float(n_r), geometric)


def dof_bound_continuous(v_t: float, v_r: float, d: float, wavelength: float, dz_t: float, dz_r: float) -> float:
    """2*V_T*V_R / ((d*lambda)^2 * dz_T * dz_R)."""
    for name, v in (("v_t", v_t), ("v_r", v_r), ("d", d), ("wavelength", wavelength), ("dz_t", dz_t), ("dz_r", dz_r)):
        if not (v > 0):
            raise InvalidArgumentError(f"{name} must be positive, got {v}")
    return 2.0 * v_t * v_r / ((d * wavelength) ** 2 * dz_t * dz_r)


def integer_dof(bound: float) -> int:
    """Real-valued bound to a usable mode count: at least one mode survives."""
    return max(1, math.floor(bound))


def communication_modes(op: ChannelMatrix, threshold: float = 0.01, bound: float = float("nan")) -> DofReport:
    """Effective mode count of a Green's-operator channel."""
    if op.model != MODEL_GREEN:
        raise InvalidArgumentError("communication_modes expects a Green's-operator channel")
    return effective_dof(op, threshold=threshold, bound=bound)


def write_scaling_csv(curve: ScalingCurve, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["size", "received_power_w", "model"])
        for s, p in zip(curve.sizes, curve.received_power_w):
            writer.writerow([repr(float(s)), repr(float(p)), curve.model])


def write_dof_csv(report: DofReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "sigma"])
        for i, s in enumerate(report.singular_values):
            writer.writerow([i, repr(float(s))])

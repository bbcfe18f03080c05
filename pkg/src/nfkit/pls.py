"""Physical-layer security: secrecy rates under focusing vs. steering."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .beamforming import Beamformer, beamfocusing_vector, beamsteering_vector
from .channel import nusw_channel
from .errors import InvalidArgumentError
from .geometry import ArrayGeometry, Carrier, polar_to_cartesian

MODE_NEAR_FOCUS = "near_focus"
MODE_FAR_STEER = "far_steer"


@dataclass(frozen=True)
class PlsScenario:
    array: ArrayGeometry
    carrier: Carrier
    bob: tuple[float, float]
    eve: tuple[float, float]
    transmit_power_w: float
    noise_power_w: float

    def __post_init__(self):
        if not (self.bob[0] > 0 and self.eve[0] > 0):
            raise InvalidArgumentError("user distances must be positive")
        if not (self.transmit_power_w > 0 and self.noise_power_w > 0):
            raise InvalidArgumentError("powers must be positive")


def _rate(power_gain: float, p: float, sigma2: float) -> float:
    return math.log2(1.0 + p * power_gain / sigma2)


def secrecy_rate(scenario: PlsScenario, beamformer: Beamformer) -> float:
    """max(0, Bob's rate - Eve's rate) with amplitude-true NUSW channels."""
    h_b = nusw_channel(scenario.array, polar_to_cartesian(*scenario.bob), scenario.carrier).vector
    h_e = nusw_channel(scenario.array, polar_to_cartesian(*scenario.eve), scenario.carrier).vector
    w = beamformer.weights
    # physical received amplitude is sum_n h_n w_n (weights are conjugate-phase)
    gain_b = abs(np.dot(h_b, w)) ** 2
    gain_e = abs(np.dot(h_e, w)) ** 2
    rate_b = _rate(gain_b, scenario.transmit_power_w, scenario.noise_power_w)
    rate_e = _rate(gain_e, scenario.transmit_power_w, scenario.noise_power_w)
    return max(0.0, rate_b - rate_e)


def secrecy_sweep(
    array: ArrayGeometry,
    carrier: Carrier,
    bob: tuple[float, float],
    eve_distances_m: Sequence[float],
    mode: str,
    transmit_power_w: float = 1.0,
    noise_power_w: float = 1e-12,
    eve_angle_rad: float | None = None,
) -> np.ndarray:
    """Secrecy rate per eavesdropper distance (same angle as Bob by default)."""
    if mode == MODE_NEAR_FOCUS:
        beamformer = beamfocusing_vector(array, bob[0], bob[1], carrier)
    elif mode == MODE_FAR_STEER:
        beamformer = beamsteering_vector(array, bob[1], carrier)
    else:
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    angle = bob[1] if eve_angle_rad is None else eve_angle_rad
    rates = []
    for d in eve_distances_m:
        if not (d > 0):
            raise InvalidArgumentError(f"eavesdropper distance must be positive, got {d}")
        scenario = PlsScenario(
            array=array,
            carrier=carrier,
            bob=bob,
            eve=(float(d), angle),
            transmit_power_w=transmit_power_w,
            noise_power_w=noise_power_w,
        )
        rates.append(secrecy_rate(scenario, beamformer))
    return np.array(rates)


def noise_for_target_snr(
    array: ArrayGeometry,
    carrier: Carrier,
    bob: tuple[float, float],
    transmit_power_w: float,
    snr_db: float,
) -> float:
    """Noise power putting Bob's focused SNR at the requested level."""
    h_b = nusw_channel(array, polar_to_cartesian(*bob), carrier).vector
    w = beamfocusing_vector(array, bob[0], bob[1], carrier).weights
    gain = abs(np.dot(h_b, w)) ** 2
    return transmit_power_w * gain / 10.0 ** (snr_db / 10.0)


def write_secrecy_csv(
    eve_distances_m: Sequence[float], rates: np.ndarray, mode: str, path: str | Path
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["eve_distance_m", "secrecy_bps_hz", "mode"])
        for d, r in zip(eve_distances_m, rates):
            writer.writerow([repr(float(d)), repr(float(r)), mode])

"""Scenario-driven command line: parse a YAML config, run one experiment,
write CSVs plus a manifest with content digests.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import __version__
from .analysis import (
    communication_modes,
    dof_bound_continuous,
    dof_bound_discrete,
    effective_dof,
    power_scaling_curve,
    write_scaling_csv,
)
from .beamforming import (
    STRUCTURE_FC,
    STRUCTURE_SC,
    beam_split_gain,
    beamfocusing_vector,
    beamsteering_vector,
    design_ps_only,
    design_ttd_hybrid,
    hardware_cost,
    partition_hfn,
    radiation_pattern,
    write_polar_csv,
)
from .channel import greens_operator, nusw_mimo_channel, wideband_channels
from .errors import ConfigError, NfkitError
from .geometry import (
    ApertureSurface,
    ArrayGeometry,
    Carrier,
    classify_point,
    make_uniform_linear_array,
    polar_to_cartesian,
)
from .pls import (
    MODE_FAR_STEER,
    MODE_NEAR_FOCUS,
    noise_for_target_snr,
    secrecy_sweep,
    write_secrecy_csv,
)
from .sensing import (
    Target,
    estimate_targets,
    music_spectrum,
    simulate_snapshots,
    write_estimates_csv,
    write_spectrum_csv,
)

EXPERIMENT_KINDS = (
    "regions",
    "pattern",
    "scaling",
    "dof",
    "modes",
    "beamsplit",
    "hfn",
    "sense",
    "secrecy",
)

# exit codes per error category (also echoed as JSON on stderr)
_EXIT_CONFIG = 3
_EXIT_IO = 4
_EXIT_EXPERIMENT = 5


# ---------------------------------------------------------------------------
# config schema


@dataclass(frozen=True)
class _Field:
    """Scalar config leaf: type, default, and admissible range/choices."""

    kind: str  # "int" | "float" | "str" | "null_or_float"
    default: Any = None
    required: bool = False
    ge: float | None = None
    gt: float | None = None
    le: float | None = None
    lt: float | None = None
    choices: tuple[str, ...] | None = None


@dataclass(frozen=True)
class _ListOf:
    """Homogeneous list; item is a _Field or a nested schema dict."""

    item: Any
    default: Any = ()


_GRID_SCHEMA = {
    "angle_start_deg": _Field("float", 0.0, ge=0.0, le=180.0),
    "angle_step_deg": _Field("float", 0.9, gt=0.0, le=180.0),
    "n_angles": _Field("int", 200, ge=1, le=100000),
    "distance_start_m": _Field("float", 5.0, gt=0.0),
    "distance_step_m": _Field("float", 5.0, gt=0.0),
    "n_distances": _Field("int", 200, ge=1, le=100000),
}

_POINT_SCHEMA = {
    "distance_m": _Field("float", required=True, gt=0.0),
    "angle_deg": _Field("float", required=True, ge=0.0, le=180.0),
}

_SENSE_GRID_SCHEMA = {
    "angle_start_deg": _Field("float", 40.0, ge=0.0, le=180.0),
    "angle_step_deg": _Field("float", 0.5, gt=0.0, le=180.0),
    "n_angles": _Field("int", 21, ge=1, le=100000),
    "distance_start_m": _Field("float", 5.0, gt=0.0),
    "distance_step_m": _Field("float", 0.5, gt=0.0),
    "n_distances": _Field("int", 91, ge=1, le=100000),
}

_KIND_SCHEMAS: dict[str, dict[str, Any]] = {
    "regions": {
        "points": _ListOf(_POINT_SCHEMA),
    },
    "pattern": {
        "focus_distance_m": _Field("float", 20.0, gt=0.0),
        "focus_angle_deg": _Field("float", 90.0, ge=0.0, le=180.0),
        "grid": _GRID_SCHEMA,
    },
    "scaling": {
        "receiver_distance_m": _Field("float", 500.0, gt=0.0),
        "receiver_angle_deg": _Field("float", 90.0, ge=0.0, le=180.0),
        "sizes": _ListOf(_Field("int", ge=1, le=10**7), default=(2, 4, 8, 16, 32, 64)),
        "transmit_power_w": _Field("float", 1.0, gt=0.0),
    },
    "dof": {
        "n_tx": _Field("int", 8, ge=1, le=10**6),
        "n_rx": _Field("int", 8, ge=1, le=10**6),
        "spacing_m": _Field("float", 0.354, gt=0.0),
        "distances_m": _ListOf(
            _Field("float", gt=0.0),
            default=(5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0),
        ),
        "threshold": _Field("float", 0.01, gt=0.0, lt=1.0),
    },
    "modes": {
        "aperture_side_m": _Field("float", 1.0, gt=0.0),
        "distances_m": _ListOf(
            _Field("float", gt=0.0), default=(2.0, 4.0, 8.0, 16.0)
        ),
        "patches_per_side": _Field("int", 32, ge=2, le=512),
        "threshold": _Field("float", 0.01, gt=0.0, lt=1.0),
    },
    "beamsplit": {
        "focus_distance_m": _Field("float", 10.0, gt=0.0),
        "focus_angle_deg": _Field("float", 45.0, ge=0.0, le=180.0),
        "bandwidth_hz": _Field("float", 10e9, ge=0.0),
        "n_subcarriers": _Field("int", 33, ge=1, le=10**5),
        "n_rf": _Field("int", 1, ge=1, le=1024),
        "n_ttd_per_rf": _Field("int", 16, ge=1, le=10**6),
    },
    "hfn": {
        "users": _ListOf(
            {
                "distance_m": _Field("float", required=True, gt=0.0),
                "angle_deg": _Field("float", required=True, ge=0.0, le=180.0),
                "qos": _Field(
                    "str", required=True, choices=("delay_sensitive", "high_rate")
                ),
            },
            default=(
                {"distance_m": 30.0, "angle_deg": 60.0, "qos": "delay_sensitive"},
                {"distance_m": 10.0, "angle_deg": 90.0, "qos": "high_rate"},
            ),
        ),
        "n_rf": _Field("int", 2, ge=1, le=1024),
        "n_ttd_per_rf": _Field("int", 1, ge=1, le=10**6),
    },
    "sense": {
        "targets": _ListOf(
            _POINT_SCHEMA,
            default=(
                {"distance_m": 10.0, "angle_deg": 45.0},
                {"distance_m": 25.0, "angle_deg": 45.0},
                {"distance_m": 40.0, "angle_deg": 45.0},
            ),
        ),
        "n_snapshots": _Field("int", 100, ge=1, le=10**6),
        "snr_db": _Field("float", 10.0, ge=-100.0, le=200.0),
        "grid": _SENSE_GRID_SCHEMA,
    },
    "secrecy": {
        "bob_distance_m": _Field("float", 25.0, gt=0.0),
        "bob_angle_deg": _Field("float", 90.0, ge=0.0, le=180.0),
        "eve_start_m": _Field("float", 5.0, gt=0.0),
        "eve_step_m": _Field("float", 1.0, gt=0.0),
        "n_eve": _Field("int", 46, ge=1, le=10**6),
        "transmit_power_w": _Field("float", 1.0, gt=0.0),
        "snr_db": _Field("float", 10.0, ge=-100.0, le=200.0),
    },
}

_COMMON_SCHEMA: dict[str, Any] = {
    "kind": _Field("str", required=True, choices=EXPERIMENT_KINDS),
    "seed": _Field("int", 0, ge=0, le=2**63 - 1),
    "threads": _Field("int", 1, ge=1, le=256),
    "out_dir": _Field("str", "."),
    "carrier": {
        "frequency_hz": _Field("float", required=True, gt=0.0, le=1e15),
    },
    "array": {
        "n": _Field("int", 128, ge=1, le=10**7),
        "spacing_m": _Field("null_or_float", None, gt=0.0),
    },
}


def _check_scalar(field: _Field, value: Any, path: str) -> Any:
    if field.kind == "null_or_float" and value is None:
        return None
    if field.kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"at {path}: expected an integer, got {value!r}")
        out: Any = value
    elif field.kind in ("float", "null_or_float"):
        if isinstance(value, str):
            # YAML 1.1 reads "3.0e9" (no signed exponent) as a string
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"at {path}: expected a number, got {value!r}")
        out = float(value)
    elif field.kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"at {path}: expected a string, got {value!r}")
        out = value
    else:  # pragma: no cover - schema bug
        raise ConfigError(f"at {path}: unhandled field kind {field.kind}")
    if field.choices is not None and out not in field.choices:
        raise ConfigError(
            f"at {path}: {out!r} is not one of {sorted(field.choices)}"
        )
    for ok, text in (
        (field.ge is None or out >= field.ge, f">= {field.ge}"),
        (field.gt is None or out > field.gt, f"> {field.gt}"),
        (field.le is None or out <= field.le, f"<= {field.le}"),
        (field.lt is None or out < field.lt, f"< {field.lt}"),
    ):
        if not ok:
            raise ConfigError(f"at {path}: {out} out of range (must be {text})")
    return out


def _resolve(schema: dict[str, Any], value: Any, path: str) -> dict[str, Any]:
    if value is None:
        value = {}
    if not isinstance(value, dict):
        raise ConfigError(f"at {path or '<root>'}: expected a mapping, got {value!r}")
    for key in value:
        if key not in schema:
            where = f"{path}.{key}" if path else str(key)
            raise ConfigError(f"unknown key {where!r}")
    out: dict[str, Any] = {}
    for key, node in schema.items():
        sub_path = f"{path}.{key}" if path else str(key)
        present = key in value
        if isinstance(node, dict):
            out[key] = _resolve(node, value.get(key), sub_path)
        elif isinstance(node, _ListOf):
            if not present:
                raw = [dict(item) if isinstance(item, dict) else item for item in node.default]
            else:
                raw = value[key]
            if not isinstance(raw, list):
                raise ConfigError(f"at {sub_path}: expected a list, got {raw!r}")
            items = []
            for i, item in enumerate(raw):
                item_path = f"{sub_path}[{i}]"
                if isinstance(node.item, dict):
                    items.append(_resolve(node.item, item, item_path))
                else:
                    items.append(_check_scalar(node.item, item, item_path))
            out[key] = items
        else:
            if not present:
                if node.required:
                    raise ConfigError(f"missing required key {sub_path!r}")
                out[key] = node.default
            else:
                out[key] = _check_scalar(node, value[key], sub_path)
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated experiment description with every default filled in."""

    kind: str
    resolved: dict[str, Any]


def parse_config(text: str) -> ScenarioConfig:
    """Validate YAML config text; raises ConfigError on any problem."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"syntax error{where}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"top level must be a mapping, got {type(raw).__name__}")
    kind = raw.get("kind")
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"at kind: {kind!r} is not one of {sorted(EXPERIMENT_KINDS)}"
        )
    schema = dict(_COMMON_SCHEMA)
    schema[kind] = _KIND_SCHEMAS[kind]
    resolved = _resolve(schema, raw, "")
    return ScenarioConfig(kind=kind, resolved=resolved)


def serialize_config(config: ScenarioConfig) -> str:
    """YAML dump of the resolved config; reparses to an equal config."""
    return yaml.safe_dump(config.resolved, sort_keys=True)


# ---------------------------------------------------------------------------
# experiment runners


def _carrier(cfg: dict[str, Any]) -> Carrier:
    return Carrier(cfg["carrier"]["frequency_hz"])


def _array(cfg: dict[str, Any], carrier: Carrier) -> ArrayGeometry:
    return make_uniform_linear_array(
        cfg["array"]["n"], spacing=cfg["array"]["spacing_m"], carrier=carrier
    )


def _axis(start: float, step: float, n: int) -> np.ndarray:
    return start + step * np.arange(n)


def _write_rows(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _run_regions(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    array = _array(cfg, carrier)
    probe = classify_point(array, polar_to_cartesian(1e12, math.pi / 2), carrier)
    summary = out_dir / "regions_summary.csv"
    _write_rows(
        summary,
        ["aperture_m", "fresnel_boundary_m", "rayleigh_distance_m"],
        [[repr(array.aperture_diameter), repr(probe.fresnel_boundary_m),
          repr(probe.rayleigh_distance_m)]],
    )
    written = [summary]
    points = cfg["regions"]["points"]
    if points:
        rows = []
        for p in points:
            report = classify_point(
                array,
                polar_to_cartesian(p["distance_m"], math.radians(p["angle_deg"])),
                carrier,
            )
            rows.append([repr(p["distance_m"]), repr(p["angle_deg"]), report.region.value])
        path = out_dir / "regions_points.csv"
        _write_rows(path, ["distance_m", "angle_deg", "region"], rows)
        written.append(path)
    return written


def _run_pattern(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    array = _array(cfg, carrier)
    block = cfg["pattern"]
    g = block["grid"]
    angles = np.radians(_axis(g["angle_start_deg"], g["angle_step_deg"], g["n_angles"]))
    dists = _axis(g["distance_start_m"], g["distance_step_m"], g["n_distances"])
    focus_angle = math.radians(block["focus_angle_deg"])
    steer = beamsteering_vector(array, focus_angle, carrier)
    focus = beamfocusing_vector(array, block["focus_distance_m"], focus_angle, carrier)
    written = []
    for label, bf in (("steering", steer), ("focusing", focus)):
        grid = radiation_pattern(bf, array, angles, dists, carrier, threads=threads)
        path = out_dir / f"pattern_{label}.csv"
        write_polar_csv(grid, path)
        written.append(path)
    return written


def _run_scaling(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    block = cfg["scaling"]
    receiver = polar_to_cartesian(
        block["receiver_distance_m"], math.radians(block["receiver_angle_deg"])
    )
    curve = power_scaling_curve(
        receiver,
        carrier,
        block["sizes"],
        spacing=cfg["array"]["spacing_m"],
        transmit_power_w=block["transmit_power_w"],
    )
    path = out_dir / "scaling_curve.csv"
    write_scaling_csv(curve, path)
    return [path]


def _run_dof(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    block = cfg["dof"]
    tx = make_uniform_linear_array(block["n_tx"], spacing=block["spacing_m"])
    aperture_tx = (block["n_tx"] - 1) * block["spacing_m"]
    aperture_rx = (block["n_rx"] - 1) * block["spacing_m"]
    rows = []
    for d in block["distances_m"]:
        rx_elements = make_uniform_linear_array(
            block["n_rx"], spacing=block["spacing_m"]
        ).elements + np.array([d, 0.0, 0.0])
        rx = ArrayGeometry(elements=rx_elements, spacing=block["spacing_m"])
        channel = nusw_mimo_channel(tx, rx, carrier)
        bound = dof_bound_discrete(
            block["n_tx"], block["n_rx"], aperture_tx, aperture_rx, d, carrier.wavelength
        )
        report = effective_dof(channel, threshold=block["threshold"], bound=bound)
        rows.append([repr(float(d)), report.empirical_dof, repr(bound)])
    path = out_dir / "dof_sweep.csv"
    _write_rows(path, ["distance_m", "empirical_dof", "bound_dof"], rows)
    return [path]


def _run_modes(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    block = cfg["modes"]
    side = block["aperture_side_m"]
    p = block["patches_per_side"]
    rows = []
    for d in block["distances_m"]:
        tx = ApertureSurface(
            origin=np.zeros(3), extent_y=side, extent_z=side, patches_y=p, patches_z=p
        )
        rx = ApertureSurface(
            origin=np.array([d, 0.0, 0.0]),
            extent_y=side,
            extent_z=side,
            patches_y=p,
            patches_z=p,
        )
        op = greens_operator(tx, rx, carrier)
        bound = dof_bound_continuous(
            tx.volume, rx.volume, d, carrier.wavelength, side, side
        )
        report = communication_modes(op, threshold=block["threshold"], bound=bound)
        rows.append([repr(float(d)), report.empirical_dof, repr(bound)])
    path = out_dir / "modes_counts.csv"
    _write_rows(path, ["distance_m", "mode_count", "bound_dof"], rows)
    return [path]


def _run_beamsplit(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    array = _array(cfg, carrier)
    block = cfg["beamsplit"]
    focus = (block["focus_distance_m"], math.radians(block["focus_angle_deg"]))
    wideband = wideband_channels(
        array,
        polar_to_cartesian(*focus),
        carrier.frequency_hz,
        block["bandwidth_hz"],
        block["n_subcarriers"],
    )
    designs = {
        "ps_only": design_ps_only(array, focus, carrier.frequency_hz),
        "fc": design_ttd_hybrid(
            STRUCTURE_FC,
            array,
            [focus],
            block["n_rf"],
            n_ttd_per_rf=block["n_ttd_per_rf"],
            center_hz=carrier.frequency_hz,
            bandwidth_hz=block["bandwidth_hz"],
            m_subcarriers=block["n_subcarriers"],
        ),
        "sc": design_ttd_hybrid(
            STRUCTURE_SC,
            array,
            [focus],
            block["n_rf"],
            n_ttd_per_rf=block["n_ttd_per_rf"],
            center_hz=carrier.frequency_hz,
            bandwidth_hz=block["bandwidth_hz"],
            m_subcarriers=block["n_subcarriers"],
        ),
    }
    rows = []
    for label, structure in designs.items():
        gains = beam_split_gain(structure, wideband)
        for f, gain in zip(wideband.frequencies_hz, gains):
            rows.append([repr(float(f)), repr(float(gain)), label])
    path = out_dir / "beamsplit_gains.csv"
    _write_rows(path, ["frequency_hz", "gain", "design"], rows)
    return [path]


def _run_hfn(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    array = _array(cfg, carrier)
    block = cfg["hfn"]
    users = [
        ((u["distance_m"], math.radians(u["angle_deg"])), u["qos"])
        for u in block["users"]
    ]
    structure = partition_hfn(
        array, users, block["n_rf"], carrier, n_ttd_per_rf=block["n_ttd_per_rf"]
    )
    part_path = out_dir / "hfn_partition.csv"
    _write_rows(
        part_path,
        ["chain", "start", "stop", "n_elements"],
        [[i, a, b, b - a] for i, (a, b) in enumerate(structure.subarrays)],
    )
    cost = hardware_cost(structure)
    cost_path = out_dir / "hfn_cost.csv"
    _write_rows(
        cost_path,
        ["n_rf", "n_ttd", "n_ps", "total_power_w"],
        [[cost.n_rf, cost.n_ttd, cost.n_ps, repr(cost.total_power_w)]],
    )
    return [part_path, cost_path]


def _run_sense(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    array = _array(cfg, carrier)
    block = cfg["sense"]
    targets = [
        Target(t["distance_m"], math.radians(t["angle_deg"])) for t in block["targets"]
    ]
    snapshots = simulate_snapshots(
        array,
        targets,
        carrier,
        block["n_snapshots"],
        snr_db=block["snr_db"],
        seed=cfg["seed"],
    )
    g = block["grid"]
    angles = np.radians(_axis(g["angle_start_deg"], g["angle_step_deg"], g["n_angles"]))
    dists = _axis(g["distance_start_m"], g["distance_step_m"], g["n_distances"])
    spectrum = music_spectrum(
        snapshots, len(targets), angles, dists, array, carrier, threads=threads
    )
    estimates = estimate_targets(spectrum, len(targets))
    spec_path = out_dir / "sense_spectrum.csv"
    est_path = out_dir / "sense_estimates.csv"
    write_spectrum_csv(spectrum, spec_path)
    write_estimates_csv(estimates, est_path)
    return [spec_path, est_path]


def _run_secrecy(cfg, out_dir: Path, threads: int) -> list[Path]:
    carrier = _carrier(cfg)
    array = _array(cfg, carrier)
    block = cfg["secrecy"]
    bob = (block["bob_distance_m"], math.radians(block["bob_angle_deg"]))
    eve_distances = _axis(block["eve_start_m"], block["eve_step_m"], block["n_eve"])
    noise = noise_for_target_snr(
        array, carrier, bob, block["transmit_power_w"], block["snr_db"]
    )
    written = []
    for mode in (MODE_NEAR_FOCUS, MODE_FAR_STEER):
        rates = secrecy_sweep(
            array,
            carrier,
            bob,
            eve_distances,
            mode,
            transmit_power_w=block["transmit_power_w"],
            noise_power_w=noise,
        )
        path = out_dir / f"secrecy_{mode}.csv"
        write_secrecy_csv(eve_distances, rates, mode, path)
        written.append(path)
    return written


_RUNNERS = {
    "regions": _run_regions,
    "pattern": _run_pattern,
    "scaling": _run_scaling,
    "dof": _run_dof,
    "modes": _run_modes,
    "beamsplit": _run_beamsplit,
    "hfn": _run_hfn,
    "sense": _run_sense,
    "secrecy": _run_secrecy,
}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def run_scenario(config: ScenarioConfig) -> dict[str, Any]:
    """Execute one experiment; returns the manifest dict (also written to disk)."""
    cfg = config.resolved
    out_dir = Path(cfg["out_dir"])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    start = time.monotonic()
    written = _RUNNERS[config.kind](cfg, out_dir, cfg["threads"])
    duration = time.monotonic() - start
    manifest = {
        "toolkit_version": __version__,
        "experiment": config.kind,
        "config": cfg,
        "duration_s": duration,
        "outputs": [
            {"file": p.name, "sha256": _sha256(p)} for p in written
        ],
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


# ---------------------------------------------------------------------------
# entry point


def _fail(category: str, message: str, code: int) -> int:
    print(json.dumps({"category": category, "message": message}), file=sys.stderr)
    return code


def _load_config(path: str) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nfkit", description="Near-field communications experiment runner."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment from a config file")
    run_p.add_argument("config")
    run_p.add_argument("--out", help="override the output directory")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--threads", type=int, help="override the thread count")
    val_p = sub.add_parser("validate", help="check a config and print it resolved")
    val_p.add_argument("config")
    sub.add_parser("list-experiments", help="list available experiment kinds")
    args = parser.parse_args(argv)

    if args.command == "list-experiments":
        for kind in EXPERIMENT_KINDS:
            print(kind)
        return 0

    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        return _fail("config", str(exc), _EXIT_CONFIG)
    except OSError as exc:
        return _fail("io", str(exc), _EXIT_IO)

    if args.command == "validate":
        sys.stdout.write(serialize_config(config))
        return 0

    resolved = dict(config.resolved)
    if args.out is not None:
        resolved["out_dir"] = args.out
    if args.seed is not None:
        resolved["seed"] = args.seed
    threads = resolved["threads"]
    if os.environ.get("NFKIT_THREADS"):
        try:
            threads = int(os.environ["NFKIT_THREADS"])
        except ValueError:
            return _fail("config", "NFKIT_THREADS must be an integer", _EXIT_CONFIG)
    if args.threads is not None:
        threads = args.threads
    resolved["threads"] = threads
    config = ScenarioConfig(kind=config.kind, resolved=resolved)

    try:
        run_scenario(config)
    except OSError as exc:
        return _fail("io", str(exc), _EXIT_IO)
    except NfkitError as exc:
        return _fail(
            "experiment", f"{config.kind}: {type(exc).__name__}: {exc}", _EXIT_EXPERIMENT
        )
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

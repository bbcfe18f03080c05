import json
import math

import pytest
import yaml

from nfkit.cli import (
    EXPERIMENT_KINDS,
    ScenarioConfig,
    main,
    parse_config,
    run_scenario,
    serialize_config,
)
from nfkit.errors import ConfigError

MINIMAL = "kind: regions\ncarrier:\n  frequency_hz: 3.0e+9\n"


def test_parse_minimal_config_fills_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.kind == "regions"
    assert cfg.resolved["seed"] == 0
    assert cfg.resolved["threads"] == 1
    assert cfg.resolved["array"] == {"n": 128, "spacing_m": None}
    assert cfg.resolved["carrier"]["frequency_hz"] == 3.0e9
    assert cfg.resolved["regions"] == {"points": []}


def test_unknown_key_rejected_with_path():
    with pytest.raises(ConfigError, match="anttennas"):
        parse_config(MINIMAL + "anttennas: 4\n")
    with pytest.raises(ConfigError, match="pattern.grid.n_angels"):
        parse_config(
            "kind: pattern\ncarrier: {frequency_hz: 3.0e+9}\n"
            "pattern:\n  grid: {n_angels: 3}\n"
        )


def test_out_of_range_reports_bounds():
    with pytest.raises(ConfigError, match="must be > 0"):
        parse_config("kind: regions\ncarrier: {frequency_hz: -1}\n")
    with pytest.raises(ConfigError, match="must be >= 1"):
        parse_config(MINIMAL + "array: {n: 0}\n")


def test_syntax_error_has_position():
    with pytest.raises(ConfigError, match="line"):
        parse_config("kind: [unclosed\n")


def test_missing_required_key():
    with pytest.raises(ConfigError, match="carrier.frequency_hz"):
        parse_config("kind: regions\n")
    with pytest.raises(ConfigError, match="kind"):
        parse_config("carrier: {frequency_hz: 1.0e+9}\n")


def test_round_trip():
    cfg = parse_config(
        "kind: sense\ncarrier: {frequency_hz: 28.0e+9}\narray: {n: 64}\n"
        "sense: {n_snapshots: 20}\n"
    )
    text = serialize_config(cfg)
    again = parse_config(text)
    assert again == cfg


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out.split()
    assert out == list(EXPERIMENT_KINDS)


def test_validate_command(tmp_path, capsys):
    path = tmp_path / "cfg.yaml"
    path.write_text(MINIMAL)
    assert main(["validate", str(path)]) == 0
    resolved = yaml.safe_load(capsys.readouterr().out)
    assert resolved["array"]["n"] == 128


def test_run_regions_values(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(MINIMAL + "regions:\n  points:\n    - {distance_m: 20.0, angle_deg: 90.0}\n")
    out = tmp_path / "out"
    assert main(["run", str(path), "--out", str(out)]) == 0
    header, row = (out / "regions_summary.csv").read_text().strip().split("\n")
    assert header == "aperture_m,fresnel_boundary_m,rayleigh_distance_m"
    _, fresnel, rayleigh = (float(v) for v in row.split(","))
    assert fresnel == pytest.approx(31.3, abs=0.1)
    assert rayleigh == pytest.approx(806, abs=1.0)
    points = (out / "regions_points.csv").read_text().strip().split("\n")
    assert points[1].endswith(",reactive_near")

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "regions"
    assert {o["file"] for o in manifest["outputs"]} == {
        "regions_summary.csv",
        "regions_points.csv",
    }
    # no hidden defaults: the resolved config in the manifest reparses equal
    assert parse_config(yaml.safe_dump(manifest["config"])).resolved == manifest["config"]


def test_run_determinism_and_digests(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(
        "kind: sense\ncarrier: {frequency_hz: 28.0e+9}\narray: {n: 128}\n"
        "sense:\n  n_snapshots: 30\n  targets: [{distance_m: 10.0, angle_deg: 45.0}]\n"
        "  grid: {n_angles: 5, angle_start_deg: 44.0, n_distances: 31}\n"
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(path), "--out", str(out1)]) == 0
    assert main(["run", str(path), "--out", str(out2), "--threads", "8"]) == 0
    for name in ("sense_spectrum.csv", "sense_estimates.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert {o["file"]: o["sha256"] for o in m1["outputs"]} == {
        o["file"]: o["sha256"] for o in m2["outputs"]
    }


def test_seed_changes_output(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(
        "kind: sense\ncarrier: {frequency_hz: 28.0e+9}\narray: {n: 64}\n"
        "sense:\n  n_snapshots: 20\n  targets: [{distance_m: 10.0, angle_deg: 45.0}]\n"
        "  grid: {n_angles: 3, angle_start_deg: 44.0, n_distances: 21}\n"
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(path), "--out", str(out1)]) == 0
    assert main(["run", str(path), "--out", str(out2), "--seed", "9"]) == 0
    assert (out1 / "sense_spectrum.csv").read_bytes() != (out2 / "sense_spectrum.csv").read_bytes()


def test_error_exit_codes(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.yaml")]) == 4
    err = json.loads(capsys.readouterr().err)
    assert err["category"] == "io"

    bad = tmp_path / "bad.yaml"
    bad.write_text(MINIMAL + "anttennas: 4\n")
    assert main(["run", str(bad)]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["category"] == "config"
    assert "anttennas" in err["message"]

    # experiment-level failure: HFN with a user inside any subarray's near field
    infeasible = tmp_path / "hfn.yaml"
    infeasible.write_text(
        "kind: hfn\ncarrier: {frequency_hz: 28.0e+9}\narray: {n: 512}\n"
        "hfn:\n  users:\n    - {distance_m: 1.0e-4, angle_deg: 90.0, qos: delay_sensitive}\n"
        "  n_rf: 1\n"
    )
    assert main(["run", str(infeasible), "--out", str(tmp_path / "o")]) == 5
    err = json.loads(capsys.readouterr().err)
    assert err["category"] == "experiment"
    assert "hfn" in err["message"]


def test_threads_env_override(tmp_path, monkeypatch):
    path = tmp_path / "cfg.yaml"
    path.write_text(MINIMAL)
    out = tmp_path / "out"
    monkeypatch.setenv("NFKIT_THREADS", "4")
    assert main(["run", str(path), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["threads"] == 4


def test_run_scenario_api(tmp_path):
    cfg = parse_config(MINIMAL)
    resolved = dict(cfg.resolved)
    resolved["out_dir"] = str(tmp_path / "api")
    manifest = run_scenario(ScenarioConfig(kind=cfg.kind, resolved=resolved))
    assert (tmp_path / "api" / "manifest.json").exists()
    assert manifest["outputs"][0]["file"] == "regions_summary.csv"

import copy
import hashlib
import json
from pathlib import Path

import pytest

from pointdefects.cli import main
from pointdefects.core import ConfigError
from pointdefects.runner import (KINDS, default_threads, emit_report, load_config,
                                 run_scenario, validate_config)

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def scenario(name):
    return load_config(SCENARIOS / f"{name}.json")


def test_every_shipped_scenario_validates():
    files = sorted(SCENARIOS.glob("*.json"))
    assert len(files) >= len(KINDS)
    kinds = {load_config(f)["kind"] for f in files}
    assert kinds == set(KINDS)


def test_unknown_key_is_rejected_with_pointer():
    cfg = copy.deepcopy(scenario("motion_gyration"))
    cfg["params"]["dtt"] = cfg["params"].pop("dt")
    with pytest.raises(ConfigError, match=r"/params.*dtt"):
        validate_config(cfg)


@pytest.mark.parametrize("cfg, pointer", [
    ({"kind": "nope"}, "/kind"),
    ({"kind": "constants", "seed": -1}, "/seed"),
    ({"kind": "constants", "constants": {"overrides": {"b": 0}}}, "/constants/overrides/b"),
    ({}, "/"),
])
def test_schema_errors(cfg, pointer):
    with pytest.raises(ConfigError) as info:
        validate_config(cfg)
    assert f"at {pointer}" in str(info.value)


def test_bad_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


def test_constants_table(tmp_path):
    art = run_scenario(scenario("constants"), tmp_path)
    rows = dict(line.split(",") for line in (tmp_path / "constants.csv").read_text().split()[1:])
    assert float(rows["born_energy_coefficient"]) == pytest.approx(1.2361, abs=1e-4)
    assert float(rows["b_born"]) == pytest.approx(0.65453, abs=1e-5)
    assert art.passed


def _digest(out: Path):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(out.iterdir()) if p.name != "timings.json"}


@pytest.mark.parametrize("name", ["kg_ensemble", "hj_static", "lw_uniform"])
def test_rerun_is_byte_identical(tmp_path, name):
    cfg = scenario(name)
    run_scenario(cfg, tmp_path / "a", threads=1)
    run_scenario(cfg, tmp_path / "b", threads=3)
    a, b = _digest(tmp_path / "a"), _digest(tmp_path / "b")
    assert a == b and "manifest.json" in a


def test_hydrogen_sweep_thread_independent(tmp_path):
    cfg = scenario("hydrogen_sweep")
    run_scenario(cfg, tmp_path / "a", threads=1)
    run_scenario(cfg, tmp_path / "b", threads=4)
    assert _digest(tmp_path / "a") == _digest(tmp_path / "b")


def test_manifest_contents(tmp_path):
    cfg = scenario("kg_ensemble")
    art = run_scenario(cfg, tmp_path)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["config"] == cfg
    assert man["timings"] == "timings.json"
    for name, meta in man["files"].items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == meta["sha256"]
        assert meta["producer"]
    assert {"python", "numpy", "scipy"} <= set(man["versions"])
    timings = json.loads((tmp_path / "timings.json").read_text())
    assert timings["threads"] == art.threads and timings["total_seconds"] >= 0


def test_report_strings(tmp_path):
    static = emit_report(run_scenario(scenario("hj_static"), tmp_path / "s"))
    assert "4/4 checks passed" in static
    ald = emit_report(run_scenario(scenario("motion_ald_runaway"), tmp_path / "a"))
    assert "runaway (expected)" in ald
    hyd = emit_report(run_scenario(scenario("hydrogen_sweep"), tmp_path / "h"))
    assert "E1(b) strictly monotone in b: yes" in hyd


def test_threads_env(monkeypatch):
    monkeypatch.setenv("POINTDEFECTS_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("POINTDEFECTS_THREADS", "x")
    with pytest.raises(ConfigError):
        default_threads()


def test_cli_exit_codes(tmp_path, capsys):
    good = SCENARIOS / "constants.json"
    assert main(["run", str(good), "--check", "--out", str(tmp_path / "ok")]) == 0
    assert "checks: 3/3 passed" in capsys.readouterr().out

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "motion", "params": {"dtt": 1}}))
    assert main(["run", str(bad)]) == 2
    assert "/params" in capsys.readouterr().err

    # grid too coarse for the Coulomb levels: the run completes but its checks fail
    coarse = tmp_path / "coarse.json"
    coarse.write_text(json.dumps({"kind": "hydrogen-sweep", "constants": {"preset": "atomic-units"},
                                  "params": {"bs": [1.0, 10.0], "h": 0.5}}))
    assert main(["run", str(coarse), "--out", str(tmp_path / "c")]) == 0
    assert main(["run", str(coarse), "--check", "--out", str(tmp_path / "c")]) == 1
    assert "[FAIL] coulomb_levels" in capsys.readouterr().out

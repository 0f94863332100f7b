import csv
import io
import json

import pytest

from ringveil.sim import ConfigError, ScenarioConfig, keyupdate_sizes, linear_fit, load_config, run_scenario
from ringveil.sim.bench import CSV_FIELDS, KU_FIELDS, BenchRecord, Fixture, bench_batch, bench_sign, bench_verify
from ringveil.sim.cli import main
from ringveil.sim.scenario import report_json

SMALL = dict(suite="bn254", height=4, vehicles=12, rsus=2, ring_sizes=(3, 5), batch_sizes=(4,))


def test_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(loss=1.0)
    with pytest.raises(ConfigError):
        ScenarioConfig(vehicles=0)
    with pytest.raises(ConfigError):
        ScenarioConfig(suite="ss512")
    with pytest.raises(ConfigError):
        ScenarioConfig(height=3, vehicles=9)


def test_config_file_env_and_overrides(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# comment\nvehicles = 20\nring_sizes = 2, 4\nloss = 0.25\nsuite = bn254\n")
    cfg = load_config(str(f), environ={"RINGVEIL_VEHICLES": "30", "RINGVEIL_SEED": "9", "OTHER": "x"})
    assert cfg.vehicles == 30 and cfg.ring_sizes == (2, 4) and cfg.loss == 0.25 and cfg.seed == 9
    cfg = load_config(str(f), overrides={"vehicles": 5}, environ={"RINGVEIL_VEHICLES": "30"})
    assert cfg.vehicles == 5
    f.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        load_config(str(f), environ={})


def test_default_scenario_life_cycle():
    """Setup, 50 vehicles and 2 RSUs, requests, broadcasts, batches, tracing, revocation."""
    rep = run_scenario(ScenarioConfig(suite="bn254"))
    ph = rep["phases"]
    assert rep["violations"] == [] and rep["false_rejects"] == 0
    assert ph["registration"]["vehicles"] == 50 and ph["registration"]["rsus"] == 2
    assert ph["ring_request"]["granted"] == 50
    assert ph["verification"]["accept"] == 50
    assert ph["verification"]["pairings"] == 2 * ph["verification"]["batches"]
    assert ph["trace"]["success_rate"] == 1.0
    assert ph["replay"] == {"within_window": "duplicate", "after_window": "stale"}
    assert ph["revocation"]["after_refresh"]["rejected:revoked"] == 1
    assert ph["revocation"]["control"]["granted"] == 1


def test_lossy_scenario():
    rep = run_scenario(ScenarioConfig(loss=0.3, seed=4, **SMALL))
    assert rep["channel"]["frames_dropped"] > 0
    assert rep["violations"] == []
    assert rep["phases"]["broadcast"]["delivered"] <= rep["phases"]["broadcast"]["signed"]


def test_scenario_deterministic():
    a = report_json(run_scenario(ScenarioConfig(seed=3, loss=0.1, **SMALL)))
    b = report_json(run_scenario(ScenarioConfig(seed=3, loss=0.1, **SMALL)))
    c = report_json(run_scenario(ScenarioConfig(seed=4, loss=0.1, **SMALL)))
    assert a == b
    assert json.loads(a)["transcript_sha256"] != json.loads(c)["transcript_sha256"]


def test_bench_record_needs_30_reps():
    with pytest.raises(ValueError):
        BenchRecord("sign", "bn254", 2, 1, 29, 0, 0, 0, 0, 2, 0)


def test_bench_csv_header_golden():
    assert CSV_FIELDS == ["op", "suite", "ring_size", "eta", "reps", "mean_wall_ms", "median_wall_ms",
                          "mean_cpu_ms", "median_cpu_ms", "pairings", "bytes"]
    assert KU_FIELDS == ["n_leaves", "revoked", "cover_size", "baseline", "bound"]


def test_bench_rows():
    fx = Fixture("bn254", 6)
    rows = bench_sign(fx, [2, 6], 30) + bench_verify(fx, [2, 6], 30) + bench_batch(fx, [3], [4], 30)
    assert [r.op for r in rows] == ["sign", "sign", "verify", "verify", "batch-verify", "single-verify"]
    assert all(r.pairings == 2 for r in rows if r.op in ("sign", "verify", "batch-verify"))
    assert rows[-1].pairings == 8
    assert rows[1].bytes - rows[0].bytes == 4 * fx.suite.g1.size


def test_linear_fit_oracle():
    slope, icpt, r2 = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert slope == pytest.approx(2) and icpt == pytest.approx(1) and r2 == pytest.approx(1)


def test_keyupdate_examples():
    rows = {r["revoked"]: r for r in keyupdate_sizes(1024, [0, 1, 1024])}
    assert rows[0]["cover_size"] == 1
    assert rows[1]["cover_size"] == 10
    assert rows[1024]["cover_size"] == 0 and rows[1024]["baseline"] == 0
    with pytest.raises(ValueError):
        keyupdate_sizes(1000, [1])
    with pytest.raises(ValueError):
        keyupdate_sizes(8, [9])


def test_cli_keyupdate_size(capsys):
    assert main(["keyupdate-size", "--n", "64", "--revoked", "0,1,2"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [int(r["cover_size"]) for r in rows] == [1, 6, int(rows[2]["cover_size"])]
    assert main(["keyupdate-size", "--n", "100"]) == 2


def test_cli_setup(tmp_path, capsys):
    assert main(["setup", "--suite", "bn254", "--seed", "1"]) == 0
    hex_out = capsys.readouterr().out.strip()
    out = tmp_path / "pp.bin"
    assert main(["setup", "--suite", "bn254", "--seed", "1", "--out", str(out)]) == 0
    assert out.read_bytes().hex() == hex_out
    from ringveil import wire
    assert wire.decode(out.read_bytes()).is_consistent()


def test_cli_scenario(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("vehicles = 8\nrsus = 1\nring_sizes = 3\nbatch_sizes = 4\n")
    out = tmp_path / "r.json"
    assert main(["scenario", "--suite", "bn254", "--height", "3", "--config", str(cfg), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["phases"]["trace"]["success_rate"] == 1.0
    assert main(["scenario", "--loss", "1.5"]) == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_cli_env_override(monkeypatch, capsys):
    monkeypatch.setenv("RINGVEIL_VEHICLES", "6")
    assert main(["scenario", "--suite", "bn254", "--height", "3", "--rsus", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["vehicles"] == 6


def test_cli_trace_demo(capsys):
    assert main(["trace-demo", "--suite", "bn254", "--ring-size", "5", "--height", "3"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["match"] and res["signer_vid"] == res["traced_vid"]


def test_cli_bench(capsys):
    assert main(["bench", "--suite", "bn254", "--op", "verify", "--ring-sizes", "2-4", "--reps", "30"]) == 0
    cap = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(cap.out)))
    assert [int(r["ring_size"]) for r in rows] == [2, 3, 4]
    assert "R^2" in cap.err
    assert main(["bench", "--reps", "5"]) == 2

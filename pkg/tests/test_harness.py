import json
import math
import os

import pytest

from advisearch import cli
from advisearch.errors import ConfigError, UnsupportedEngine
from advisearch.harness import (
    REPORT_CSV_HEADER,
    SWEEP_CSV_HEADER,
    ExperimentConfig,
    RunReport,
    coerce,
    emit_report,
    load_config_file,
    parse_grid,
    report_csv,
    report_json,
    report_text,
    run,
    run_bounds,
    run_exact,
    run_monte_carlo,
    run_sweep,
    trial_rng,
)


def test_config_validation_names_field():
    for kwargs, name in [
        ({"N": 0}, "N"),
        ({"delta": 0.5}, "delta"),
        ({"p": 0.1, "corollary_q": 1.0}, "p"),
        ({"p": 1.5}, "p"),
        ({"channel": "amplitude"}, "channel"),
        ({"epsilon": 0.7}, "epsilon"),
        ({"engine": "gpu"}, "engine"),
        ({"mode": "sweep"}, "grid"),
        ({"threads": 0}, "threads"),
    ]:
        with pytest.raises(ConfigError) as info:
            ExperimentConfig(**kwargs)
        assert info.value.field == name


def test_trial_rng_streams_are_independent_of_order():
    a = [trial_rng(5, t).random() for t in range(4)]
    b = [trial_rng(5, t).random() for t in reversed(range(4))][::-1]
    assert a == b
    assert len(set(a)) == 4


def test_monte_carlo_single_element():
    rep = run_monte_carlo(ExperimentConfig(N=1, advice="uniform", trials=50))
    assert rep.results["T_measured_mean"] == 1.0
    assert rep.results["T_measured_stderr"] == 0.0
    assert rep.ledger["total"] == 50
    assert rep.passed


def test_monte_carlo_agrees_with_exact():
    cfg = ExperimentConfig(N=300, delta=0.25, p=0.2, trials=4000, seed=3, max_rounds=20)
    rep = run_monte_carlo(cfg)
    assert rep.engine == "reduced"
    diff = rep.results["T_measured_mean"] - rep.results["T_exact"]
    assert abs(diff) <= 3 * rep.results["T_measured_stderr"]
    assert rep.results["invalid_results"] == 0
    assert rep.ledger["total"] == sum(rep.ledger[k] for k in rep.ledger if k != "total")


def test_monte_carlo_threads_do_not_change_results():
    cfg = ExperimentConfig(N=512, p=0.1, trials=300, seed=42)
    one = run_monte_carlo(cfg).to_dict(timing=False)
    many = run_monte_carlo(ExperimentConfig(N=512, p=0.1, trials=300, seed=42, threads=4)).to_dict(timing=False)
    assert one == many
    other_seed = run_monte_carlo(ExperimentConfig(N=512, p=0.1, trials=300, seed=43)).to_dict(timing=False)
    assert other_seed["results"] != one["results"]


def test_dephasing_runs_on_full_engine():
    cfg = ExperimentConfig(N=150, delta=0.25, p=0.1, channel="dephasing", trials=30, max_rounds=5)
    rep = run_monte_carlo(cfg)
    assert rep.engine == "full" and rep.results["invalid_results"] == 0
    with pytest.raises(UnsupportedEngine):
        run_monte_carlo(ExperimentConfig(N=150, p=0.1, channel="dephasing", engine="reduced", trials=5))


def test_run_exact():
    assert run_exact(ExperimentConfig(N=1, advice="uniform", mode="exact")).results["T_exact"] == 1.0
    rep = run_exact(ExperimentConfig(N=512, p=0.0, mode="exact"))
    r = rep.results
    assert r["T_exact"] <= r["lemma1_bound"]
    assert r["D_mu"] >= r["c3_lnN"]
    assert r["delta_regime"] == "corollary"
    assert rep.passed
    assert {c["name"] for c in rep.checks} >= {"lemma1_T_upper", "theorem2_T_upper", "corollary_D_lower"}


def test_run_bounds_has_no_engine_work():
    rep = run_bounds(ExperimentConfig(N=2981, mode="bounds"))
    assert rep.engine == "none"
    assert rep.results["theorem2_quantum_upper"] == pytest.approx(3600 * math.e**2, rel=1e-14)
    assert "T_exact" not in rep.results


def test_sweep_rows():
    cfg = ExperimentConfig(mode="sweep", grid=(2**10, 2**7, 2**8), corollary_q=1.0)
    rep = run_sweep(cfg)
    assert [row["N"] for row in rep.rows] == [128, 256, 1024]
    for row in rep.rows:
        assert row["p"] == pytest.approx(1 / math.log(row["N"]))
        assert row["T_kind"] == "exact"
    D = [row["D_mu"] for row in rep.rows]
    assert D == sorted(D)
    assert rep.results["T_max"] == max(row["T"] for row in rep.rows)
    assert rep.passed
    threaded = run_sweep(ExperimentConfig(mode="sweep", grid=(2**10, 2**7, 2**8), corollary_q=1.0, threads=3))
    assert threaded.to_dict(timing=False) == rep.to_dict(timing=False)


def test_sweep_monte_carlo_rows():
    rep = run_sweep(ExperimentConfig(mode="sweep", grid=(128, 256), p=0.2, sweep_trials=100))
    assert all(row["T_kind"] == "monte_carlo" and row["T_stderr"] > 0 for row in rep.rows)
    assert any("validity" in c["name"] for c in rep.checks)


def test_json_roundtrip_and_schema():
    rep = run_exact(ExperimentConfig(N=256, p=0.1, mode="exact"))
    d = json.loads(report_json(rep))
    assert list(d)[:2] == ["schema", "mode"] and "wall_time_s" in d
    back = RunReport.from_dict(d)
    assert back.to_dict() == rep.to_dict()
    assert "threads" not in d["config"]
    assert "wall_time_s" not in json.loads(report_json(rep, timing=False))


def test_csv_and_text_outputs():
    rep = run_exact(ExperimentConfig(N=256, p=0.1, mode="exact"))
    lines = report_csv(rep).splitlines()
    assert lines[0] == REPORT_CSV_HEADER
    assert all(len(line.split(",")) == 7 for line in lines)
    assert any(line.startswith("check,lemma1_T_upper,") and line.endswith(",true") for line in lines)
    text = report_text(rep)
    assert "[PASS] lemma1_T_upper" in text and "FAIL" not in text
    sweep = run_sweep(ExperimentConfig(mode="sweep", grid=(128,)))
    assert report_csv(sweep).splitlines()[0] == SWEEP_CSV_HEADER


def test_emit_report_unwritable(tmp_path):
    rep = run_bounds(ExperimentConfig(N=128, mode="bounds"))
    with pytest.raises(OSError):
        emit_report(rep, "json", str(tmp_path / "missing" / "out.json"))
    target = tmp_path / "out.json"
    text = emit_report(rep, "json", str(target))
    assert target.read_text() == text


def test_parsing_helpers(tmp_path):
    assert parse_grid("2^7, 2^10,100") == (128, 1024, 100)
    with pytest.raises(ConfigError):
        parse_grid("2^x")
    assert coerce("delta", "1/512") == ("delta", 1 / 512)
    assert coerce("max-rounds", "7") == ("max_rounds", 7)
    assert coerce("p", "none") == ("p", None)
    with pytest.raises(ConfigError):
        coerce("colour", "blue")
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nN = 300\ndelta = 1/4  # inline\ngrid = 2^7,2^8\n")
    assert load_config_file(str(path)) == {"N": 300, "delta": 0.25, "grid": (128, 256)}


def test_run_dispatch():
    assert run(ExperimentConfig(N=128, mode="bounds")).mode == "bounds"


# -- CLI -----------------------------------------------------------------------


def test_cli_bounds_and_exit_codes(capsys, tmp_path):
    assert cli.main(["bounds", "--n", "512", "--corollary-q", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "bounds" and out["config"]["corollary_q"] == 1.0
    assert cli.main(["exact", "--n", "0"]) == 2
    assert "N" in capsys.readouterr().err
    assert cli.main(["simulate", "--n", "150", "--channel", "dephasing", "--engine", "reduced", "--p", "0.1"]) == 2
    assert cli.main(["bounds", "--n", "128", "--out", str(tmp_path / "nope" / "x.json")]) == 3
    with pytest.raises(SystemExit) as info:
        cli.main(["bounds", "--p", "0.1", "--corollary-q", "1"])
    assert info.value.code == 2


def test_cli_assert_bounds_failure(monkeypatch, capsys):
    def failing(config):
        rep = RunReport("exact", "reduced", config.echo())
        rep.add_check("forced", 2.0, 1.0, "<=")
        return rep

    monkeypatch.setattr(cli, "run", failing)
    assert cli.main(["exact", "--n", "128", "--assert-bounds", "--format", "text"]) == 1
    assert "[FAIL] forced" in capsys.readouterr().out
    assert cli.main(["exact", "--n", "128"]) == 0


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("N = 300\np = 0.2\ntrials = 20\nseed = 9\n")
    assert cli.main(["simulate", "--config", str(cfg), "--corollary-q", "0.5", "--seed", "4"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["config"]["N"] == 300 and d["config"]["seed"] == 4
    assert d["config"]["p"] is None and d["config"]["corollary_q"] == 0.5
    assert d["results"]["p"] == pytest.approx(1 / math.sqrt(math.log(300)))


def test_cli_plan(capsys, tmp_path):
    assert cli.main(["plan", "--n", "300", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "start,end,size,mode"
    assert lines[-2:] == ["85,232,148,quantum", "233,300,68,classical"]
    out = tmp_path / "plan.json"
    assert cli.main(["plan", "--n", "10", "--out", str(out)]) == 0
    assert [b["end"] for b in json.loads(out.read_text())["blocks"]] == [1, 3, 10]


def test_cli_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--grid", "2^7,2^8", "--corollary-q", "1", "--format", "csv", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == SWEEP_CSV_HEADER and len(rows) == 3
    assert os.path.getsize(out) > 0

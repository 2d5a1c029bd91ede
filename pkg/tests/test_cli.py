import json
import random

import numpy as np
import pytest

from porcellio import SolverConfig, penalized_cost, pressure_vessel, himmelblau
from porcellio.campaign import (_timed_solve, parse_comparison_csv, render_comparison,
                                run_batch, run_single, summarize)
from porcellio.cli import EXIT_AUDIT, EXIT_EVAL, EXIT_OK, EXIT_USAGE, main

SHORT = SolverConfig(max_steps=150)


def test_run_single_report_columns():
    result, report = run_single("pressure_vessel", SolverConfig(max_steps=100, seed=7))
    lines = dict(line.split(None, 1) for line in report.splitlines())
    assert {"g1", "g2", "g3", "g4", "f", "x4"} <= set(lines)
    assert result.steps_taken == 100


def test_run_single_himmelblau_zero_steps():
    result, report = run_single("himmelblau", SolverConfig(max_steps=0, seed=1))
    assert result.steps_taken == 0
    assert sum(line.startswith("g") for line in report.splitlines()) == 3


def test_batch_single_run_stats():
    s = run_batch("pressure_vessel", 1, 3, SHORT)
    if s.feasibility_rate == 1:
        assert s.best == s.worst == s.mean and s.std == 0


def test_batch_deterministic_and_recomputable():
    a = run_batch("pressure_vessel", 4, 10, SHORT)
    b = run_batch("pressure_vessel", 4, 10, SHORT)
    assert a.to_dict(with_runs=False) == b.to_dict(with_runs=False)
    assert [r.seed for r in a.results] == [10, 11, 12, 13]
    feasible = [r.objective for r in a.results if r.feasible]
    assert a.best == min(feasible)
    assert a.best <= a.mean <= a.worst
    assert 0 <= a.feasibility_rate <= 1


def test_summary_independent_of_completion_order():
    outcomes = [_timed_solve(pressure_vessel(), SolverConfig(max_steps=60, seed=s))
                for s in range(6)]
    ref = summarize(outcomes).to_dict(with_runs=False)
    shuffled = outcomes[:]
    random.Random(0).shuffle(shuffled)
    assert summarize(shuffled).to_dict(with_runs=False) == ref


def test_batch_parallel_matches_sequential():
    seq = run_batch("himmelblau", 3, 0, SHORT)
    par = run_batch("himmelblau", 3, 0, SHORT, workers=2)
    assert seq.to_dict(with_runs=False) == par.to_dict(with_runs=False)


def test_batch_records_failures_without_aborting(tmp_path):
    p = tmp_path / "bad.cop"
    p.write_text("dimension 1\nminimize 1 / (x1 - 0.5)\nx1 in {0..2} * 0.5\n")
    s = run_batch(str(p), 3, 0, SolverConfig(max_steps=5))
    assert len(s.failures) + len(s.results) == 3
    assert s.runs == 3


def test_batch_rejects_zero_runs():
    with pytest.raises(ValueError):
        run_batch("himmelblau", 0)


@pytest.mark.parametrize("name, n_ref", [("pressure_vessel", 15), ("himmelblau", 6)])
def test_render_comparison_row_counts(name, n_ref):
    best = run_batch(name, 1, 0, SHORT).best_run
    rows = parse_comparison_csv(render_comparison(name, best, "csv"))
    assert len(rows) == n_ref + 1
    assert len(json.loads(render_comparison(name, best, "json"))) == n_ref + 1
    text = render_comparison(name, best, "text")
    assert len(text.splitlines()) == n_ref + 3


def test_comparison_csv_round_trip():
    best = run_batch("pressure_vessel", 1, 0, SHORT).best_run
    rows = parse_comparison_csv(render_comparison("pressure_vessel", best, "csv"))
    assert rows == json.loads(render_comparison("pressure_vessel", best, "json"))
    fastf = next(r for r in rows if r["source"] == "fastf")
    assert fastf["violated"] == [1, 2]


# -- command line


def test_cli_solve_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    trace = tmp_path / "t.csv"
    code = main(["solve", "--problem", "pressure_vessel", "--seed", "7",
                 "--max-steps", "50", "--format", "json", "--out", str(out),
                 "--trace", str(trace)])
    assert code == EXIT_OK
    rec = json.loads(out.read_text())
    assert len(rec["g"]) == 4 and rec["steps_taken"] == 50
    x = np.array(rec["best_x"])
    assert penalized_cost(pressure_vessel(), x) == rec["best_f"]
    assert len(trace.read_text().splitlines()) == 52


def test_cli_printed_cost_matches_printed_point(capsys):
    assert main(["solve", "--problem", "himmelblau", "--seed", "3",
                 "--max-steps", "80"]) == EXIT_OK
    lines = dict(line.split(None, 1) for line in capsys.readouterr().out.splitlines())
    x = np.array([float(lines[f"x{i}"]) for i in range(1, 6)])
    cost = float(lines["cost"])
    assert abs(penalized_cost(himmelblau(), x) - cost) <= 1e-6


def test_cli_env_default_seed(monkeypatch, capsys):
    monkeypatch.setenv("PSA_DEFAULT_SEED", "5")
    main(["solve", "--problem", "himmelblau", "--max-steps", "3"])
    assert "seed       5" in capsys.readouterr().out


def test_cli_custom_problem(tmp_path, capsys):
    p = tmp_path / "my.cop"
    p.write_text("dimension 2\nminimize x1^2 + x2^2\nx1 + x2 >= 1\n", encoding="utf-8")
    assert main(["solve", "--problem", str(p)]) == EXIT_USAGE
    assert "line 3" in capsys.readouterr().err
    p.write_text("dimension 2\nminimize x1^2 + x2^2\n1 <= x1 + x2 <= 5\n"
                 "x1 in [-2, 2]\nx2 in [-2, 2]\n", encoding="utf-8")
    assert main(["solve", "--problem", str(p), "--max-steps", "300"]) == EXIT_OK


def test_cli_usage_errors(capsys):
    assert main(["solve", "--problem", "nope"]) == EXIT_USAGE
    assert main(["solve", "--problem", "himmelblau", "--lambda", "1.5"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == EXIT_USAGE


def test_cli_evaluation_failure(tmp_path, capsys):
    p = tmp_path / "bad.cop"
    p.write_text("dimension 1\nminimize 1 / x1\nx1 in {0..2} * 0.5\n")
    code = None
    for seed in range(20):
        code = main(["solve", "--problem", str(p), "--max-steps", "2", "--seed", str(seed)])
        if code != EXIT_OK:
            break
    assert code == EXIT_EVAL
    assert "individual" in capsys.readouterr().err


def test_cli_audit(capsys):
    assert main(["audit", "--problem", "himmelblau"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "covga" in out and "MISMATCH" in out
    # printed tables contain rows that do not reproduce; strict mode reports that
    assert main(["audit", "--problem", "pressure_vessel", "--strict"]) == EXIT_AUDIT


def test_cli_audit_json(capsys):
    main(["audit", "--problem", "himmelblau", "--format", "json"])
    rows = json.loads(capsys.readouterr().out)
    covga = next(r for r in rows if r["source"] == "covga")
    assert covga["recomputed_violations"] == [3] and covga["flags_match"]


def test_cli_bench_and_compare(tmp_path, capsys):
    out = tmp_path / "bench.json"
    assert main(["bench", "--problem", "himmelblau", "--runs", "2", "--max-steps", "40",
                 "--format", "json", "--out", str(out)]) == EXIT_OK
    rec = json.loads(out.read_text())
    assert rec["runs"] == 2 and len(rec["per_run"]) == 2
    assert main(["compare", "--problem", "himmelblau", "--runs", "1",
                 "--max-steps", "40", "--format", "csv"]) == EXIT_OK
    assert len(capsys.readouterr().out.strip().splitlines()) == 1 + 6 + 1

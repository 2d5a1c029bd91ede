"""Single runs, seeded batch campaigns and comparison tables."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import benchmarks, dsl
from .engine import RunResult, SolverConfig, solve
from .problem import EvaluationError, Problem

DAGGER = "†"


def resolve_problem(source) -> Problem:
    """A builtin name, a path to a ``.cop`` file, or a Problem."""
    if isinstance(source, Problem):
        return source
    source = str(source)
    if source in benchmarks.BUILTINS:
        return benchmarks.builtin(source)
    path = Path(source)
    if path.suffix == ".cop" or path.exists():
        return dsl.load(path)
    raise KeyError(f"unknown problem {source!r}: not a builtin "
                   f"({', '.join(sorted(benchmarks.BUILTINS))}) or a .cop file")


def format_report(problem: Problem, result: RunResult) -> str:
    """Best point, cost and every constraint clause with violation marks."""
    x = np.asarray(result.best_x)
    values = problem.clause_values(x)
    lines = [f"problem    {problem.name}",
             f"seed       {result.seed}",
             f"steps      {result.steps_taken}"]
    for i, v in enumerate(x, start=1):
        lines.append(f"x{i:<9d} {float(v)!r}")
    for clause, v in zip(problem.clauses, values):
        mark = f" {DAGGER}" if clause.violated(v) else ""
        lines.append(f"{clause.label:<10} {float(v):.6g}{mark}")
    lines.append(f"f          {result.objective:.6f}")
    lines.append(f"cost       {result.best_f:.6f}")
    lines.append(f"feasible   {result.feasible}")
    return "\n".join(lines)


def run_single(problem_source, config: SolverConfig = SolverConfig(), trace=None):
    """Solve once; returns the result and its printable report."""
    problem = resolve_problem(problem_source)
    result = solve(problem, config, trace=trace)
    return result, format_report(problem, result)


@dataclass
class BatchSummary:
    runs: int
    best: float
    worst: float
    mean: float
    std: float
    feasibility_rate: float
    best_run: Optional[RunResult]
    results: list = field(repr=False, default_factory=list)
    wall_times: list = field(repr=False, default_factory=list)
    failures: list = field(default_factory=list)

    def to_dict(self, with_runs=True) -> dict:
        out = {
            "runs": self.runs,
            "best": self.best,
            "worst": self.worst,
            "mean": self.mean,
            "std": self.std,
            "feasibility_rate": self.feasibility_rate,
            "best_run": self.best_run.to_dict() if self.best_run else None,
            "failures": [{"seed": s, "error": e} for s, e in self.failures],
        }
        if with_runs:
            out["per_run"] = [dict(r.to_dict(), wall_time=t)
                              for r, t in zip(self.results, self.wall_times)]
        return out


def _timed_solve(problem, config):
    t0 = time.perf_counter()
    try:
        result = solve(problem, config)
    except EvaluationError as exc:
        return config.seed, None, str(exc), time.perf_counter() - t0
    return config.seed, result, None, time.perf_counter() - t0


def summarize(outcomes) -> BatchSummary:
    """Fold ``(seed, result or None, error or None, wall_time)`` tuples.

    Outcomes are ordered by seed first, so completion order never matters.
    Infeasible runs count toward the feasibility rate only.
    """
    outcomes = sorted(outcomes, key=lambda o: o[0])
    results = [o[1] for o in outcomes if o[1] is not None]
    times = [o[3] for o in outcomes if o[1] is not None]
    failures = [(o[0], o[2]) for o in outcomes if o[1] is None]
    feasible = [r for r in results if r.feasible]
    runs = len(outcomes)
    if feasible:
        fs = np.array([r.objective for r in feasible])
        best_run = feasible[int(np.argmin(fs))]
        stats = (float(fs.min()), float(fs.max()), float(fs.mean()), float(fs.std()))
    else:
        best_run = min(results, key=lambda r: r.best_f) if results else None
        stats = (math.nan,) * 4
    return BatchSummary(runs, *stats, len(feasible) / runs if runs else 0.0,
                        best_run, results, times, failures)


def run_batch(problem_source, runs: int, base_seed: int = 0,
              config: SolverConfig = SolverConfig(), workers: int = 1) -> BatchSummary:
    """Independent solves with seeds ``base_seed .. base_seed + runs - 1``."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    problem = resolve_problem(problem_source)
    configs = [replace(config, seed=base_seed + r) for r in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_timed_solve, [problem] * runs, configs))
    else:
        outcomes = [_timed_solve(problem, c) for c in configs]
    return summarize(outcomes)


def format_summary(problem: Problem, summary: BatchSummary) -> str:
    lines = [f"problem           {problem.name}",
             f"runs              {summary.runs}",
             f"feasibility rate  {summary.feasibility_rate:.3f}",
             f"best f            {summary.best:.6f}",
             f"mean f            {summary.mean:.6f}",
             f"std f             {summary.std:.6f}",
             f"worst f           {summary.worst:.6f}"]
    if summary.wall_times:
        lines.append(f"mean wall time    {np.mean(summary.wall_times):.3f} s")
    for seed, err in summary.failures:
        lines.append(f"FAILED seed {seed}: {err}")
    if summary.best_run is not None:
        lines += ["", "best run:", format_report(problem, summary.best_run)]
    return "\n".join(lines)


# -- comparison tables


def comparison_rows(problem_name: str, our_best: RunResult,
                    label: str = "this run") -> list:
    """Reference rows (reported values, recomputed violation marks) plus ours."""
    problem = benchmarks.builtin(problem_name)
    rows = []
    for ref in benchmarks.reference_rows(problem_name):
        verdict = benchmarks.audit_row(problem, ref)
        rows.append({"source": ref.source, "x": list(ref.x),
                     "g": list(ref.reported_g), "f": ref.reported_f,
                     "violated": sorted(verdict.recomputed_violations)})
    values = problem.clause_values(np.asarray(our_best.best_x))
    rows.append({"source": label,
                 "x": [float(v) for v in our_best.best_x],
                 "g": [float(v) for v in values],
                 "f": float(our_best.objective),
                 "violated": [j for j, (c, v) in enumerate(zip(problem.clauses, values))
                              if c.violated(v)]})
    return rows


def render_comparison(problem_name: str, our_best: RunResult, fmt: str = "text") -> str:
    rows = comparison_rows(problem_name, our_best)
    d = len(rows[0]["x"])
    m = len(rows[0]["g"])
    if fmt == "json":
        return json.dumps(rows, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source"] + [f"x{i + 1}" for i in range(d)]
                   + [f"g{j + 1}" for j in range(m)] + ["f", "violated"])
        for r in rows:
            w.writerow([r["source"], *map(repr, r["x"]), *map(repr, r["g"]),
                        repr(r["f"]), ";".join(str(j + 1) for j in r["violated"])])
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    header = ["source"] + [f"x{i + 1}" for i in range(d)] \
        + [f"g{j + 1}" for j in range(m)] + ["f"]
    table = [header]
    for r in rows:
        g = [f"{v:.6g}" + (DAGGER if j in r["violated"] else "")
             for j, v in enumerate(r["g"])]
        table.append([r["source"], *(f"{v:.4f}" for v in r["x"]), *g, f"{r['f']:.4f}"])
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]
    out = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
    out.append(f"{DAGGER} recomputed constraint violation")
    return "\n".join(out)


def parse_comparison_csv(text: str) -> list:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({
            "source": rec["source"],
            "x": [float(v) for k, v in rec.items() if k.startswith("x")],
            "g": [float(v) for k, v in rec.items() if k.startswith("g")],
            "f": float(rec["f"]),
            "violated": [int(s) - 1 for s in rec["violated"].split(";") if s],
        })
    return rows

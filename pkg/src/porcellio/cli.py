"""Command line front end: ``psa solve|bench|audit|compare``.

Exit codes: 0 success, 1 usage or parse error, 2 evaluation failure,
3 audit mismatch (``audit --strict``).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from . import benchmarks
from .campaign import (format_report, format_summary, render_comparison,
                       resolve_problem, run_batch)
from .dsl import DSLError
from .engine import SolverConfig, solve
from .problem import EvaluationError

EXIT_OK, EXIT_USAGE, EXIT_EVAL, EXIT_AUDIT = 0, 1, 2, 3
DESK_MAX_STEPS = 5000
DESK_RUNS = 30


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    return int(os.environ.get("PSA_DEFAULT_SEED", "0"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="psa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(p, runs=False):
        p.add_argument("--problem", required=True,
                       help="builtin name (pressure_vessel, himmelblau) or .cop path")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: $PSA_DEFAULT_SEED or 0)")
        p.add_argument("--lambda", dest="lam", type=float, default=0.6)
        p.add_argument("--swarm", type=int, default=40)
        p.add_argument("--max-steps", type=int, default=DESK_MAX_STEPS)
        p.add_argument("--gamma", type=float, default=1e12)
        p.add_argument("--tau-std", type=float, default=0.1)
        p.add_argument("--format", choices=("text", "csv", "json"), default="text")
        p.add_argument("--out", help="write output here instead of stdout")
        if runs:
            p.add_argument("--runs", type=int, default=DESK_RUNS)
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("solve", help="one seeded run")
    solver_flags(p)
    p.add_argument("--trace", help="CSV file for per-step (k, best_f, feasible_count)")

    p = sub.add_parser("bench", help="seeded batch campaign with statistics")
    solver_flags(p, runs=True)

    p = sub.add_parser("audit", help="recompute the published reference rows")
    p.add_argument("--problem", required=True, choices=sorted(benchmarks.BUILTINS))
    p.add_argument("--tolerance", type=float, default=1.0)
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when any row fails its audit")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("compare", help="reference rows plus a fresh best result")
    solver_flags(p, runs=True)
    return parser


def _config(args) -> SolverConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return SolverConfig(swarm_size=args.swarm, lam=args.lam,
                        max_steps=args.max_steps, tau_std=args.tau_std,
                        gamma=args.gamma, seed=seed)


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _result_csv(problem, result) -> str:
    rows = [["name", "value"]]
    rows += [[f"x{i}", repr(float(v))] for i, v in enumerate(result.best_x, 1)]
    rows += [[c.label, repr(float(v))]
             for c, v in zip(problem.clauses, problem.clause_values(result.best_x))]
    rows += [["f", repr(result.objective)], ["cost", repr(result.best_f)],
             ["feasible", str(result.feasible)]]
    return "\n".join(",".join(r) for r in rows)


def _cmd_solve(args) -> int:
    problem = resolve_problem(args.problem)
    config = _config(args)
    trace_fh = open(args.trace, "w", newline="", encoding="utf-8") if args.trace else None
    try:
        sink = None
        if trace_fh:
            writer = csv.writer(trace_fh)
            writer.writerow(["k", "best_f", "feasible_count"])
            sink = lambda k, f, n: writer.writerow([k, repr(f), n])  # noqa: E731
        result = solve(problem, config, trace=sink)
    finally:
        if trace_fh:
            trace_fh.close()
    if args.format == "json":
        text = json.dumps(dict(result.to_dict(), problem=problem.name), indent=2)
    elif args.format == "csv":
        text = _result_csv(problem, result)
    else:
        text = format_report(problem, result)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    problem = resolve_problem(args.problem)
    config = _config(args)
    summary = run_batch(problem, args.runs, config.seed, config, workers=args.workers)
    if args.format == "json":
        text = json.dumps(summary.to_dict(), indent=2)
    elif args.format == "csv":
        lines = ["seed,best_f,objective,feasible,wall_time"]
        lines += [f"{r.seed},{r.best_f!r},{r.objective!r},{r.feasible},{t:.4f}"
                  for r, t in zip(summary.results, summary.wall_times)]
        text = "\n".join(lines)
    else:
        text = format_summary(problem, summary)
    _emit(text, args.out)
    return EXIT_EVAL if summary.failures and not summary.results else EXIT_OK


def _cmd_audit(args) -> int:
    problem = benchmarks.builtin(args.problem)
    verdicts = [benchmarks.audit_row(problem, row, args.tolerance)
                for row in benchmarks.reference_rows(args.problem)]
    records = []
    for v in verdicts:
        known = benchmarks.KNOWN_MISMATCHES.get((args.problem, v.source))
        records.append({
            "source": v.source, "recomputed_f": v.recomputed_f, "f_error": v.f_error,
            "f_ok": v.f_ok, "recomputed_g": v.recomputed_g,
            "recomputed_violations": [j + 1 for j in sorted(v.recomputed_violations)],
            "flagged_violations": [j + 1 for j in sorted(v.flagged_violations)],
            "flags_match": v.flags_match, "known_mismatch": known,
        })
    if args.format == "json":
        text = json.dumps(records, indent=2)
    elif args.format == "csv":
        keys = ["source", "recomputed_f", "f_error", "f_ok", "recomputed_violations",
                "flagged_violations", "flags_match"]
        lines = [",".join(keys)]
        for r in records:
            lines.append(",".join(
                ";".join(map(str, r[k])) if isinstance(r[k], list) else str(r[k])
                for k in keys))
        text = "\n".join(lines)
    else:
        lines = [f"{'source':>8}  {'recomputed f':>14}  {'delta f':>10}  "
                 f"{'recomputed':>10}  {'flagged':>8}  verdict"]
        for r in records:
            ok = r["f_ok"] and r["flags_match"]
            verdict = "ok" if ok else ("known mismatch" if r["known_mismatch"] else "MISMATCH")
            lines.append(
                f"{r['source']:>8}  {r['recomputed_f']:14.4f}  {r['f_error']:10.4f}  "
                f"{','.join(map(str, r['recomputed_violations'])) or '-':>10}  "
                f"{','.join(map(str, r['flagged_violations'])) or '-':>8}  {verdict}")
        text = "\n".join(lines)
    _emit(text, args.out)
    if args.strict and not all(r["f_ok"] and r["flags_match"] for r in records):
        return EXIT_AUDIT
    return EXIT_OK


def _cmd_compare(args) -> int:
    if args.problem not in benchmarks.BUILTINS:
        raise KeyError(f"no reference table for {args.problem!r}")
    config = _config(args)
    summary = run_batch(args.problem, args.runs, config.seed, config,
                        workers=args.workers)
    if summary.best_run is None:
        print("every run failed", file=sys.stderr)
        return EXIT_EVAL
    _emit(render_comparison(args.problem, summary.best_run, args.format), args.out)
    return EXIT_OK


_COMMANDS = {"solve": _cmd_solve, "bench": _cmd_bench,
             "audit": _cmd_audit, "compare": _cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (DSLError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"psa: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except EvaluationError as exc:
        print(f"psa: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())

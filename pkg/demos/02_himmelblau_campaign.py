# Himmelblau's problem: a seeded batch campaign
#
# Every double-sided constraint (e.g. 90 <= g2 <= 110) is handed to the
# solver as two single-sided ones. A batch runs seeds base..base+runs-1.

from porcellio import SolverConfig, himmelblau
from porcellio.campaign import format_summary, run_batch

problem = himmelblau()
print(len(problem.clauses), "clauses ->", len(problem.constraints), "penalized constraints")

summary = run_batch(problem, runs=10, base_seed=100, config=SolverConfig(max_steps=3000))
print(format_summary(problem, summary))

# Per-run records are plain data and reproduce the summary.
finals = sorted(r.objective for r in summary.results if r.feasible)
print("per-run feasible finals:", [round(f, 2) for f in finals])
assert finals[0] == summary.best

# Writing your own problem as a .cop file
#
# The text format covers polynomial objectives and constraints, box and
# grid domains, and double-sided constraints.

import tempfile
from pathlib import Path

from porcellio import SolverConfig, dsl, solve

SOURCE = """\
name ring
dimension 3
minimize (x1 - 1)^2 + (x2 + 0.5)^2 + x3^2

# stay in a ring around the origin
1 <= x1^2 + x2^2 <= 4
x1 + x3 <= 1.5

x1 in [-3, 3]
x2 in [-3, 3]
x3 in {-10..10} * 0.25
"""

spec = dsl.parse(SOURCE)
print(dsl.to_source(spec))          # fully parenthesized, parses back to the same spec

problem = dsl.compile_spec(spec)
result = solve(problem, SolverConfig(max_steps=2000, seed=3))
print("x* =", result.best_x, " f* =", round(result.objective, 6), " feasible:", result.feasible)

# Files work the same way, and errors point at the offending line.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "broken.cop"
    path.write_text(SOURCE.replace("x3 in {-10..10} * 0.25\n", ""))
    try:
        dsl.load(path)
    except dsl.ValidationError as exc:
        print("rejected:", exc)

"""Porcellio scaber swarm optimizer for constrained problems."""

from .benchmarks import (ReferenceRow, audit_row, himmelblau, pressure_vessel,
                         reference_rows)
from .campaign import BatchSummary, render_comparison, run_batch, run_single
from .dsl import compile_spec, load, parse
from .engine import (RunResult, SolverConfig, SwarmState, exploration_weight,
                     init_positions, initialize, solve, step)
from .problem import (ConstraintReport, Continuous, EvaluationError, Grid,
                      PenaltyParams, Problem, evaluate_constraints, indicator,
                      penalized_cost, split_double_sided)
from .projection import project_box, project_domain, project_grid

__version__ = "0.1.0"

__all__ = [
    "BatchSummary", "ConstraintReport", "Continuous", "EvaluationError", "Grid",
    "PenaltyParams", "Problem", "ReferenceRow", "RunResult", "SolverConfig",
    "SwarmState", "audit_row", "compile_spec", "evaluate_constraints",
    "exploration_weight", "himmelblau", "indicator", "init_positions", "initialize",
    "load", "parse", "penalized_cost", "pressure_vessel", "project_box",
    "project_domain", "project_grid", "reference_rows", "render_comparison",
    "run_batch", "run_single", "solve", "split_double_sided", "step",
]

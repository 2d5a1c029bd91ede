"""Porcellio scaber swarm for constrained problems.

Each step draws one random direction ``tau`` shared by the whole swarm,
probes the penalized cost at ``x_i + tau`` for every individual, and moves

    x_i <- P(x_i - (1 - lam) * (x_i - x_best_now) - lam * p_i * tau)

where ``p_i`` ranks individual ``i``'s probe between the best and the worst
probe of the swarm and ``P`` projects onto the variable domains. The best
penalized cost ever seen is tracked across steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .problem import (DEFAULT_GAMMA, ConstraintReport, EvaluationError, Grid,
                      Problem, evaluate_constraints, penalty_from_values)
from .projection import project_domain

log = logging.getLogger(__name__)

TraceSink = Callable[[int, float, int], None]


@dataclass(frozen=True)
class SolverConfig:
    swarm_size: int = 40
    lam: float = 0.6
    max_steps: int = 100_000
    tau_std: float = 0.1
    gamma: float = DEFAULT_GAMMA
    seed: int = 0
    # "normal" or "uniform"; both zero-mean with standard deviation tau_std
    tau_dist: str = "normal"

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam}")
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")
        if not self.tau_std > 0:
            raise ValueError("tau_std must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.tau_dist not in ("normal", "uniform"):
            raise ValueError(f"unknown tau distribution {self.tau_dist!r}")


@dataclass
class SwarmState:
    positions: np.ndarray
    costs: np.ndarray
    step: int
    best_x: np.ndarray
    best_f: float
    rng: np.random.Generator
    feasible_count: int = 0


@dataclass
class RunResult:
    best_x: np.ndarray
    best_f: float
    objective: float
    constraint_report: ConstraintReport
    steps_taken: int
    seed: int = 0
    history: Optional[list] = None

    @property
    def feasible(self) -> bool:
        return self.constraint_report.feasible

    def to_dict(self) -> dict:
        rep = self.constraint_report
        out = {
            "seed": self.seed,
            "best_x": [float(v) for v in self.best_x],
            "best_f": float(self.best_f),
            "objective": float(self.objective),
            "g": rep.values,
            "violated": rep.violated,
            "feasible": rep.feasible,
            "steps_taken": self.steps_taken,
        }
        if self.history is not None:
            out["history"] = [[k, float(f)] for k, f in self.history]
        return out


class StepError(EvaluationError):
    def __init__(self, step: int, individual: int, what: str, cause: str):
        self.step = step
        self.individual = individual
        super().__init__(
            f"step {step}: evaluation of {what} for individual {individual} "
            f"failed: {cause}")


def init_positions(domains, N: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform initial swarm over the domains (full grid for grid variables)."""
    if N < 2:
        raise ValueError("need at least two individuals")
    X = np.empty((N, len(domains)))
    for j, dom in enumerate(domains):
        if isinstance(dom, Grid):
            m = rng.integers(dom.min_multiple, dom.max_multiple + 1, size=N)
            X[:, j] = m * dom.step
        else:
            X[:, j] = dom.lower + (dom.upper - dom.lower) * rng.random(N)
    return X


def exploration_weight(detected, i=None):
    """Normalized rank of probe ``i`` between the swarm's best and worst.

    With ``i=None`` returns the weights of all individuals. A flat probe
    landscape (max == min) gives zero weight everywhere.
    """
    detected = np.asarray(detected, dtype=float)
    lo, hi = detected.min(), detected.max()
    span = hi - lo
    if span > 0:
        p = (detected - lo) / span
    else:
        p = np.zeros_like(detected)
    return p if i is None else float(p[i])


def draw_tau(rng: np.random.Generator, d: int, config: SolverConfig) -> np.ndarray:
    if config.tau_dist == "uniform":
        a = config.tau_std * np.sqrt(3.0)
        return rng.uniform(-a, a, size=d)
    return rng.normal(0.0, config.tau_std, size=d)


def _swarm_costs(problem: Problem, X, gamma, step, what):
    """Penalized costs and feasibility mask, or a StepError naming the culprit."""
    try:
        with np.errstate(all="ignore"):
            f, G = problem.evaluate(X)
            cost = penalty_from_values(f, G, gamma)
    except Exception as exc:
        for i, row in enumerate(X):
            try:
                problem.evaluate(row)
            except Exception as row_exc:
                raise StepError(step, i, what, repr(row_exc)) from row_exc
        raise StepError(step, -1, what, repr(exc)) from exc
    bad = ~np.isfinite(cost)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise StepError(step, i, what, f"non-finite cost {cost[i]!r}")
    return cost, np.all(G <= 0, axis=-1)


def initialize(problem: Problem, config: SolverConfig) -> SwarmState:
    rng = np.random.default_rng(config.seed)
    X = init_positions(problem.domains, config.swarm_size, rng)
    costs, feas = _swarm_costs(problem, X, config.gamma, 0, "initial position")
    b = int(np.argmin(costs))
    return SwarmState(X, costs, 0, X[b].copy(), float(costs[b]), rng,
                      int(feas.sum()))


def step(state: SwarmState, problem: Problem, config: SolverConfig,
         tau=None) -> SwarmState:
    """Advance the swarm by one move. ``tau`` overrides the random direction."""
    X, k = state.positions, state.step
    if tau is None:
        tau = draw_tau(state.rng, X.shape[1], config)
    tau = np.asarray(tau, dtype=float)

    x_b = X[int(np.argmin(state.costs))]
    detected, _ = _swarm_costs(problem, X + tau, config.gamma, k, "probe")
    p = exploration_weight(detected)

    moved = X - (1 - config.lam) * (X - x_b) - config.lam * p[:, None] * tau
    moved = project_domain(problem.domains, moved)
    costs, feas = _swarm_costs(problem, moved, config.gamma, k + 1, "position")

    best_x, best_f = state.best_x, state.best_f
    b = int(np.argmin(costs))
    if costs[b] < best_f:
        best_x, best_f = moved[b].copy(), float(costs[b])
    return replace(state, positions=moved, costs=costs, step=k + 1,
                   best_x=best_x, best_f=best_f, feasible_count=int(feas.sum()))


def solve(problem: Problem, config: SolverConfig = SolverConfig(),
          trace: TraceSink | None = None, record_history=False) -> RunResult:
    state = initialize(problem, config)
    history = [(0, state.best_f)] if record_history else None
    if trace is not None:
        trace(0, state.best_f, state.feasible_count)
    for _ in range(config.max_steps):
        state = step(state, problem, config)
        if history is not None:
            history.append((state.step, state.best_f))
        if trace is not None:
            trace(state.step, state.best_f, state.feasible_count)
    f, _ = problem.evaluate(state.best_x)
    report = evaluate_constraints(problem, state.best_x)
    log.debug("%s seed=%d: best_f=%.6g feasible=%s", problem.name,
              config.seed, state.best_f, report.feasible)
    return RunResult(state.best_x, state.best_f, float(f), report, state.step,
                     config.seed, history)

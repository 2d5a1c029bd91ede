"""Constrained problem model and the quadratic penalty transform.

A :class:`Problem` minimizes ``objective(x)`` subject to ``g_j(x) <= 0`` and
per-variable domains. Objective and constraint callables take an array whose
last axis has length ``d`` and return one value per leading index, so the
same function serves a single point ``(d,)`` and a whole swarm ``(n, d)``.
Scalar-only callables are accepted with ``vectorized=False``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

Evaluable = Callable[[np.ndarray], Union[float, np.ndarray]]

DEFAULT_GAMMA = 1e12


class EvaluationError(RuntimeError):
    """Objective or constraint evaluation failed."""


@dataclass(frozen=True)
class Continuous:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")


@dataclass(frozen=True)
class Grid:
    """Admissible values ``m * step`` for ``min_multiple <= m <= max_multiple``."""

    step: float
    min_multiple: int
    max_multiple: int

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if self.min_multiple > self.max_multiple:
            raise ValueError(
                f"empty grid {{{self.min_multiple}..{self.max_multiple}}}")

    @property
    def lower(self) -> float:
        return self.min_multiple * self.step

    @property
    def upper(self) -> float:
        return self.max_multiple * self.step


VariableDomain = Union[Continuous, Grid]


@dataclass(frozen=True)
class Clause:
    """A constraint as the user wrote it: ``lower <= func(x) <= upper``.

    Used for reporting in the natural form (one column per clause); the
    solver only ever sees the single-sided constraints derived from it.
    """

    label: str
    func: Evaluable
    lower: float = -np.inf
    upper: float = 0.0

    def violated(self, value):
        return (value < self.lower) | (value > self.upper)


@dataclass(frozen=True)
class Problem:
    objective: Evaluable
    constraints: tuple
    domains: tuple
    name: str = "problem"
    clauses: tuple = ()
    vectorized: bool = True

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "domains", tuple(self.domains))
        if not self.domains:
            raise ValueError("a problem needs at least one variable")
        if not self.clauses:
            object.__setattr__(self, "clauses", tuple(
                Clause(f"g{j + 1}", g) for j, g in enumerate(self.constraints)))
        else:
            object.__setattr__(self, "clauses", tuple(self.clauses))

    @property
    def dimension(self) -> int:
        return len(self.domains)

    @property
    def lower(self) -> np.ndarray:
        return np.array([dom.lower for dom in self.domains], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([dom.upper for dom in self.domains], dtype=float)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dimension:
            raise ValueError(
                f"{self.name}: expected vectors of length {self.dimension}, "
                f"got shape {x.shape}")
        return x

    def _apply(self, func, x):
        if self.vectorized:
            out = func(x)
        else:
            out = np.apply_along_axis(lambda row: float(func(row)), -1, x)
        out = np.asarray(out, dtype=float)
        if out.shape != x.shape[:-1]:
            out = np.broadcast_to(out, x.shape[:-1])
        return out

    def evaluate(self, x):
        """Return ``(f, G)``; ``G`` has a trailing axis of length ``m``."""
        x = self._check(x)
        f = self._apply(self.objective, x)
        if self.constraints:
            G = np.stack([self._apply(g, x) for g in self.constraints], axis=-1)
        else:
            G = np.zeros(x.shape[:-1] + (0,))
        return f, G

    def clause_values(self, x) -> np.ndarray:
        x = self._check(x)
        return np.stack([self._apply(c.func, x) for c in self.clauses], axis=-1) \
            if self.clauses else np.zeros(x.shape[:-1] + (0,))


@dataclass(frozen=True)
class PenaltyParams:
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("penalty gamma must be positive")


@dataclass
class ConstraintReport:
    values: list
    violated: list
    feasible: bool
    admissible: bool = True


def indicator(g_value):
    """1 where the constraint value is strictly positive, else 0."""
    if np.ndim(g_value):
        return np.where(np.asarray(g_value) > 0, 1.0, 0.0)
    return 1.0 if g_value > 0 else 0.0


def penalty_from_values(f, G, gamma: float):
    """Penalized cost from precomputed objective and constraint values.

    The penalty sum is exactly 0.0 when no constraint is positive, so the
    result is bit-identical to ``f`` on feasible points.
    """
    G = np.asarray(G, dtype=float)
    viol = np.where(G > 0, G, 0.0)
    return f + gamma * np.sum(viol * viol, axis=-1)


def penalized_cost(problem: Problem, x, params: PenaltyParams | None = None):
    params = params or PenaltyParams()
    f, G = problem.evaluate(x)
    out = penalty_from_values(f, G, params.gamma)
    return float(out) if np.ndim(out) == 0 else out


def is_admissible(domains: Sequence[VariableDomain], x) -> bool:
    from .projection import project_domain

    x = np.asarray(x, dtype=float)
    return bool(np.array_equal(project_domain(domains, x), x))


def evaluate_constraints(problem: Problem, x) -> ConstraintReport:
    x = problem._check(x)
    if x.ndim != 1:
        raise ValueError("evaluate_constraints takes a single point")
    _, G = problem.evaluate(x)
    values = [float(v) for v in G]
    violated = [v > 0 for v in values]
    admissible = is_admissible(problem.domains, x)
    return ConstraintReport(values, violated, admissible and not any(violated),
                            admissible)


class _BoundSide:
    """``bound - g(x)`` (lower side) or ``g(x) - bound`` (upper side)."""

    def __init__(self, g, bound, upper):
        self.g, self.bound, self.upper = g, bound, upper

    def __call__(self, x):
        v = self.g(x)
        return v - self.bound if self.upper else self.bound - v

    def __repr__(self):
        rel = "<=" if self.upper else ">="
        return f"<{getattr(self.g, '__name__', self.g)} {rel} {self.bound}>"


def split_double_sided(g: Evaluable, lower: float, upper: float):
    """Replace ``lower <= g(x) <= upper`` with two ``<= 0`` constraints."""
    if lower > upper:
        raise ValueError(f"lower bound {lower} exceeds upper bound {upper}")
    return _BoundSide(g, lower, False), _BoundSide(g, upper, True)

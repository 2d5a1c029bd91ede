"""Projection onto simple bounds and mixed grid/box domains."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .problem import Continuous, Grid, VariableDomain


def _round_half_away(v):
    return np.sign(v) * np.floor(np.abs(v) + 0.5)


def project_box(lower, upper, x):
    """Clamp ``x`` coordinate-wise into ``[lower, upper]``.

    For a box this is the Euclidean-nearest point. Works on a single vector
    or on a stack of vectors along the last axis.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x = np.asarray(x, dtype=float)
    if lower.shape != upper.shape or x.shape[-1:] != lower.shape[-1:]:
        raise ValueError(
            f"dimension mismatch: bounds {lower.shape}/{upper.shape}, x {x.shape}")
    if np.any(lower > upper):
        raise ValueError("lower bound exceeds upper bound")
    return np.minimum(np.maximum(x, lower), upper)


def project_grid(step: float, min_multiple: int, max_multiple: int, x):
    """Round to the nearest multiple of ``step`` and clamp to the grid ends.

    Ties round away from zero.
    """
    m = np.clip(_round_half_away(np.asarray(x, dtype=float) / step),
                min_multiple, max_multiple)
    out = m * step
    return float(out) if np.ndim(out) == 0 else out


def project_domain(domains: Sequence[VariableDomain], x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != len(domains):
        raise ValueError(
            f"dimension mismatch: {len(domains)} domains, x has shape {x.shape}")
    out = np.empty_like(x)
    for i, dom in enumerate(domains):
        if isinstance(dom, Grid):
            out[..., i] = project_grid(dom.step, dom.min_multiple,
                                       dom.max_multiple, x[..., i])
        elif isinstance(dom, Continuous):
            out[..., i] = np.minimum(np.maximum(x[..., i], dom.lower), dom.upper)
        else:
            raise TypeError(f"unknown domain type {type(dom).__name__}")
    return out

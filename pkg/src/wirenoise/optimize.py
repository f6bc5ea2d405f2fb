"""One-dimensional minimization: coarse periodic grid plus golden-section refinement.

The objectives minimized here have point singularities and several local
minima, so a pure local search is unsafe.  The grid localizes candidate
basins; the best few brackets are refined by golden section.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MinimizeResult:
    x: float
    fun: float
    evals: int


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float):
    """Golden-section search on [lo, hi]; returns (x, f(x), evals).

    Tolerates +inf objective values: an infinite probe simply loses its
    comparisons, shrinking the bracket toward finite territory.
    """
    a, b = lo, hi
    h = b - a
    c = b - INV_PHI * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    evals = 2
    while h > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - INV_PHI * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INV_PHI * h
            fd = f(d)
        evals += 1
    if fc <= fd:
        return c, fc, evals
    return d, fd, evals


def minimize_on_interval(
    f_scalar: Callable[[float], float],
    lo: float,
    hi: float,
    grid_points: int = 720,
    refine_brackets: int = 3,
    tol: float = 1e-10,
    f_grid: Callable[[np.ndarray], np.ndarray] | None = None,
) -> MinimizeResult:
    """Global scan on (lo, hi) followed by local refinement.

    Grid nodes are offset half a step from the endpoints so open-interval
    singularities at the boundary are never probed.  ``f_grid``, when
    given, evaluates the whole grid in one vectorized call.
    """
    step = (hi - lo) / grid_points
    xs = lo + step * (np.arange(grid_points) + 0.5)
    if f_grid is not None:
        vals = np.asarray(f_grid(xs), dtype=float)
    else:
        vals = np.array([f_scalar(x) for x in xs], dtype=float)
    vals = np.where(np.isnan(vals), np.inf, vals)
    evals = grid_points

    order = np.argsort(vals, kind="stable")
    best_x = float(xs[order[0]])
    best_f = float(vals[order[0]])

    refined = set()
    for idx in order[:refine_brackets]:
        if not np.isfinite(vals[idx]):
            continue
        lo_i = max(int(idx) - 1, 0)
        hi_i = min(int(idx) + 1, grid_points - 1)
        key = (lo_i, hi_i)
        if key in refined:
            continue
        refined.add(key)
        x, fx, n = golden_section(f_scalar, float(xs[lo_i]), float(xs[hi_i]), tol)
        evals += n
        if fx < best_f:
            best_x, best_f = x, fx
    return MinimizeResult(x=best_x, fun=best_f, evals=evals)

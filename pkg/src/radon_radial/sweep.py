"""Sup of a ratio over a one-dimensional parameter, refined near breakpoints."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = ["breakpoint_grid", "refined_sup"]

UNIFORM_POINTS = 512
OFFSETS_PER_SIDE = 16


def breakpoint_grid(lower, upper, breakpoints, uniform=UNIFORM_POINTS,
                    per_side=OFFSETS_PER_SIDE):
    """Uniform grid on ``[lower, upper]`` plus each breakpoint and geometric offsets around it."""
    span = upper - lower
    pts = [np.linspace(lower, upper, uniform)]
    bps = np.asarray(breakpoints, dtype=float)
    bps = bps[(bps >= lower) & (bps <= upper)]
    if bps.size:
        offsets = span * np.geomspace(1e-10, 1e-2, per_side)
        pts.append(bps)
        pts.append((bps[:, None] - offsets[None, :]).ravel())
        pts.append((bps[:, None] + offsets[None, :]).ravel())
    grid = np.concatenate(pts)
    return np.unique(grid[(grid >= lower) & (grid <= upper)])


def refined_sup(fn, grid):
    """Max of vectorised ``fn`` on ``grid``, polished by a bounded scalar search.

    Returns ``(value, argmax)``; NaN entries of ``fn(grid)`` are ignored.
    """
    vals = np.asarray(fn(grid), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    best = int(np.argmax(vals))
    value, where = float(vals[best]), float(grid[best])
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    if hi > lo:
        def neg(x):
            v = float(np.asarray(fn(np.array([x])), dtype=float)[0])
            return -v if np.isfinite(v) else np.inf

        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13 * max(1.0, abs(hi))})
        if np.isfinite(res.fun) and -res.fun > value:
            value, where = float(-res.fun), float(res.x)
    return value, where

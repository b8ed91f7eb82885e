"""Bounded scalar maximisation: coarse grid, then golden-section refinement."""

import math
from typing import Callable, Tuple

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_maximize(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-8
) -> Tuple[float, float]:
    """Maximise a unimodal f on [a, b] until the bracket is narrower than tol.

    Returns:
        Tuple of (argmax, f(argmax)).
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = f(c)
    fd = f(d)
    while b - a > tol:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
    x = (a + b) / 2.0
    return x, f(x)


def grid_then_golden(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    n_grid: int = 1000,
    tol: float = 1e-8,
) -> Tuple[float, float, float]:
    """Locate the best grid point of a concave f, then refine inside its neighbours.

    Returns:
        Tuple of (argmax, f(argmax), grid resolution).
    """
    grid = np.linspace(lower, upper, n_grid)
    values = np.array([f(float(x)) for x in grid])
    best = int(np.argmax(values))
    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, n_grid - 1)])
    x, fx = golden_section_maximize(f, lo, hi, tol)
    # keep the endpoint if refinement cannot beat it (maximum on the boundary)
    if values[best] > fx:
        x, fx = float(grid[best]), float(values[best])
    return x, fx, float(grid[1] - grid[0]) if n_grid > 1 else 0.0

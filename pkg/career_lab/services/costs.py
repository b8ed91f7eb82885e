"""Effort cost g, marginal cost g' and its inverse for the supported families.

Power{c, p}: g(a) = c a^p / p. For p in (1, 2) g' is continuous at 0 but g''
is unbounded there; p >= 2 keeps g'' finite.
FlatThenPower{k, c, p}: zero on [0, k], then the power family shifted by k.
"""

import math

from career_lab.core.exceptions import NegativeEffort, NegativeTarget
from career_lab.models.params import CostSpec, FlatThenPowerCost


def _excess(c: CostSpec, a: float) -> float:
    """Effort beyond the flat region."""
    if a < 0 or math.isnan(a):
        raise NegativeEffort(f"effort must be nonnegative, got {a}")
    if isinstance(c, FlatThenPowerCost):
        return max(a - c.k, 0.0)
    return a


def cost(c: CostSpec, a: float) -> float:
    """Return g(a)."""
    x = _excess(c, a)
    return c.c * x ** c.p / c.p


def marginal_cost(c: CostSpec, a: float) -> float:
    """Return g'(a); g'(0) = 0 for both families."""
    x = _excess(c, a)
    if x == 0.0:
        return 0.0
    return c.c * x ** (c.p - 1.0)


def marginal_cost_inverse(c: CostSpec, y: float) -> float:
    """Return the smallest a with g'(a) = y.

    The exception is y = 0 under FlatThenPower, which returns k (the right end
    of the zero set) so that the flat-cost limit effort is attained.
    """
    if y < 0 or math.isnan(y):
        raise NegativeTarget(f"marginal cost target must be nonnegative, got {y}")
    x = (y / c.c) ** (1.0 / (c.p - 1.0)) if y > 0 else 0.0
    if isinstance(c, FlatThenPowerCost):
        return c.k + x
    return x

"""Transient comparative statics: b_s coefficients, the transient identity, scans.

Each mu_i inside b_s is a function of the argument, generated from it by
repeated mu_step. The canonical coefficient is

    b_s(mu_t) = (1 - mu_t) prod_{i=t+1}^{t+s-1} mu_i,

so that gamma = sum_k beta^k b_k(mu_1). The older definition
(1 - mu_t) prod_{i=t+1}^{s} mu_i is kept only for the identity residuals.
"""

import logging
import math
from typing import List, Sequence, Union

import numpy as np

from career_lab.core.config import settings
from career_lab.core.exceptions import ConfigError, DivergentSeries
from career_lab.models.params import CostSpec
from career_lab.models.results import FocVariant, MonotonicityReport, PersistencePoint
from career_lab.services.beliefs import belief_dynamics
from career_lab.services.costs import marginal_cost_inverse
from career_lab.services.equilibrium import equilibrium_solver

logger = logging.getLogger(__name__)


class ComparativeStatics:
    """Marginal benefit as a function of the prior weight mu_1 and of persistence."""

    def b_s(self, mu_t: float, s: int, r: float) -> float:
        """(1 - mu_t) times the s - 1 weights that follow mu_t."""
        seq = belief_dynamics.mu_sequence(mu_t, r, s)
        return (1.0 - mu_t) * math.prod(seq[1:])

    def b_s_pre(self, mu_t: float, t: int, s: int, r: float) -> float:
        """Older coefficient (1 - mu_t) prod_{i=t+1}^{s} mu_i with mu_t sitting at index t."""
        seq = belief_dynamics.mu_sequence(mu_t, r, max(s - t + 1, 1))
        return (1.0 - mu_t) * math.prod(seq[1:])

    def transient_identity_residual(self, mu1: float, s: int, r: float) -> float:
        """b_{s+1}(mu_1) - (1 - mu_1)/(1 + r - mu_1) * b_s(mu_2); zero up to rounding."""
        mu2 = belief_dynamics.mu_step(mu1, r)
        return self.b_s(mu1, s + 1, r) - (1.0 - mu1) / (1.0 + r - mu1) * self.b_s(mu2, s, r)

    def unrepaired_identity_residual(self, mu1: float, s: int, r: float) -> float:
        """The published identity b_{s+1}(mu_1) = (1 - mu_1)/(1 - mu_2) mu_2 b_s(mu_2)
        under the older coefficient; nonzero whenever mu_{s+1} != 1."""
        mu2 = belief_dynamics.mu_step(mu1, r)
        return self.b_s(mu1, s + 1, r) - (1.0 - mu1) / (1.0 - mu2) * mu2 * self.b_s_pre(mu2, 2, s, r)

    def alternate_repair_residual(self, mu1: float, s: int, r: float) -> float:
        """Largest residual of both equalities after replacing b_s by b_{s+1} on the right."""
        mu2 = belief_dynamics.mu_step(mu1, r)
        lhs = self.b_s(mu1, s + 1, r)
        rhs_b = self.b_s_pre(mu2, 2, s + 1, r)
        first = lhs - (1.0 - mu1) / (1.0 - mu2) * mu2 * rhs_b
        second = lhs - (1.0 - mu1) / (1.0 + r - mu1) * rhs_b
        return max(abs(first), abs(second))

    def _b_series(self, first: float, mu1: float, beta: float, r: float, tol: float, skip: int) -> float:
        """sum_k beta^k c_k where c_1 = first and c_{k+1} = c_k * mu_{k+1+skip}."""
        if beta == 0.0:
            return 0.0
        if beta == 1.0 and r <= 0.0:
            raise DivergentSeries("gamma series diverges for beta=1 with a persistent type")
        mu_sup = belief_dynamics.stationary_mu(r)
        mu = mu1
        for _ in range(skip):
            mu = belief_dynamics.mu_step(mu, r)
        coeff = first
        discount = beta
        total = 0.0
        for _ in range(settings.max_series_terms):
            total += discount * coeff
            mu = belief_dynamics.mu_step(mu, r)
            rho = beta * max(mu, mu_sup)
            if discount * coeff * rho / (1.0 - rho) < tol:
                return total
            coeff *= mu
            discount *= beta
        raise DivergentSeries(f"b-series not within tol={tol} after {settings.max_series_terms} terms")

    def gamma_from_b(self, mu1: float, beta: float, r: float, tol: float) -> float:
        """gamma_1 = sum_{k>=1} beta^k b_k(mu_1)."""
        return self._b_series(1.0 - mu1, mu1, beta, r, tol, skip=0)

    def gamma_h21_from_b(self, mu1: float, beta: float, r: float, tol: float) -> float:
        """Published left-hand side at t = 1: sum_{k>=1} beta^k b_{k+1}(mu_1)."""
        return self._b_series((1.0 - mu1) * belief_dynamics.mu_step(mu1, r), mu1, beta, r, tol, skip=1)

    def monotonicity_scan(
        self,
        beta: float,
        r: float,
        grid: Sequence[float],
        tol: float,
        variant: Union[FocVariant, str] = FocVariant.CORRECTED,
    ) -> MonotonicityReport:
        """Evaluate gamma(mu_1) on a grid and report whether it strictly decreases.

        The same function of mu_t governs every period, so one scan covers all t.
        A flat zero profile (beta = 0) is reported as not strictly decreasing.
        """
        grid = [float(x) for x in grid]
        if any(not 0.0 < x < 1.0 for x in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("monotonicity grid must be strictly increasing inside (0, 1)")

        variant = FocVariant(variant)
        if variant == FocVariant.H10_AS_PUBLISHED:
            raise ConfigError("the (H10) form has no mu-parameterisation to scan")
        gamma_fn = self.gamma_h21_from_b if variant == FocVariant.H21_AS_PUBLISHED else self.gamma_from_b
        gammas = [gamma_fn(mu1, beta, r, tol) for mu1 in grid]

        diffs = np.diff(gammas)
        worst = float(diffs.max()) if diffs.size else None
        strictly = bool(diffs.size) and bool(np.all(diffs < 0))
        if not strictly:
            logger.info(f"gamma not strictly decreasing for beta={beta}, r={r} (worst step {worst})")
        return MonotonicityReport(
            grid=grid, gamma=gammas, strictly_decreasing=strictly, worst_adjacent_difference=worst
        )

    def persistence_limit_scan(
        self, beta: float, cost: CostSpec, r_seq: Sequence[float]
    ) -> List[PersistencePoint]:
        """Stationary effort as h_eps/h_delta shrinks.

        Effort tends to 0 when g'(a) = 0 only at a = 0, and to k under a flat cost.
        """
        points = []
        for r in r_seq:
            mu_star = belief_dynamics.stationary_mu(float(r))
            gamma = equilibrium_solver.steady_state_gamma(mu_star, beta)
            points.append(
                PersistencePoint(
                    r=float(r), mu_star=mu_star, gamma=gamma, a_star=marginal_cost_inverse(cost, gamma)
                )
            )
        return points


comparative_statics = ComparativeStatics()

"""Marginal benefit of effort, equilibrium effort and the divergent regime.

Every series is truncated with a certified tail bound. Consecutive terms of
the marginal-benefit series have ratio beta * mu_s, and mu_s is monotone
toward mu* (finite h_delta) or 1 (persistent type), so after the last summed
term T_S the remainder is at most T_S * rho / (1 - rho) with
rho = beta * max(mu_S, mu*).
"""

import logging
from typing import Iterator, Optional

import numpy as np

from career_lab.core.config import settings
from career_lab.core.exceptions import (
    BetaOutOfRange,
    DivergentSeries,
    NotDivergentRegime,
    VariantRequiresPersistentType,
)
from career_lab.models.params import CostSpec, ModelParams
from career_lab.models.results import (
    EquilibriumPath,
    FocVariant,
    PrecisionPath,
    SeriesValue,
)
from career_lab.services.beliefs import belief_dynamics
from career_lab.services.costs import marginal_cost_inverse

logger = logging.getLogger(__name__)


class EquilibriumSolver:
    """Corrected and published first-order conditions, solved period by period."""

    def __init__(self, max_series_terms: Optional[int] = None, witness_chunk: int = 1 << 16):
        self._max_series_terms = max_series_terms
        self.witness_chunk = witness_chunk

    @property
    def max_series_terms(self) -> int:
        if self._max_series_terms is not None:
            return self._max_series_terms
        return settings.max_series_terms

    def _mu_sup(self, params: ModelParams) -> float:
        """Limit of mu_t, which bounds the tail of any path."""
        if params.persistent:
            return 1.0
        return belief_dynamics.steady_state(params).mu_star

    @staticmethod
    def _check_convergent(params: ModelParams, beta: float) -> None:
        if not 0.0 <= beta <= 1.0:
            raise BetaOutOfRange(f"beta must lie in [0, 1], got {beta}")
        if beta == 1.0 and params.persistent:
            raise DivergentSeries()

    @staticmethod
    def _mu_stream(path: PrecisionPath, start: int) -> Iterator[float]:
        """mu_start, mu_start+1, ... read from the path and continued by mu_step."""
        r = path.params.r
        i = start
        while i <= path.T:
            yield path.mu(i)
            i += 1
        mu = path.mu(path.T)
        for _ in range(path.T, i - 1):
            mu = belief_dynamics.mu_step(mu, r)
        while True:
            mu = belief_dynamics.mu_step(mu, r)
            yield mu

    def _ratio_series(
        self,
        first: float,
        multipliers: Iterator[float],
        beta: float,
        mu_sup: float,
        tol: float,
    ) -> SeriesValue:
        """Sum term_1 = first, term_{n+1} = term_n * beta * multiplier_n to a certified tail < tol."""
        total = 0.0
        term = first
        terms_used = 0
        for multiplier in multipliers:
            total += term
            terms_used += 1
            rho = beta * max(multiplier, mu_sup)
            tail = term * rho / (1.0 - rho)
            if tail < tol:
                return SeriesValue(gamma=total, tail_bound=tail, terms_used=terms_used)
            if terms_used >= self.max_series_terms:
                raise DivergentSeries(
                    f"series not within tol={tol} after {terms_used} terms (tail bound {tail:.3g})"
                )
            term *= beta * multiplier
        raise AssertionError("multiplier stream ended")

    def marginal_benefit(self, t: int, path: PrecisionPath, beta: float, tol: float) -> SeriesValue:
        """gamma_t in precision form.

        sum_{s>t} beta^{s-t} h_eps/(h_{s-1}+h_eps) prod_{j=t}^{s-2} h_{j+1}/(h_j+h_eps)
        """
        params = path.params
        self._check_convergent(params, beta)
        h_prev = path.h(t)
        if beta == 0.0:
            return SeriesValue(gamma=0.0, tail_bound=0.0, terms_used=0)

        mu_sup = self._mu_sup(params)
        h_eps = params.h_eps
        total = 0.0
        product = 1.0
        discount = beta
        s = t + 1
        while True:
            term = discount * h_eps / (h_prev + h_eps) * product
            total += term
            mu_prev = h_prev / (h_prev + h_eps)
            rho = beta * max(mu_prev, mu_sup)
            tail = term * rho / (1.0 - rho)
            terms_used = s - t
            if tail < tol:
                break
            if terms_used >= self.max_series_terms:
                raise DivergentSeries(
                    f"gamma_{t} not within tol={tol} after {terms_used} terms (tail bound {tail:.3g})"
                )
            h_next = path.h(s) if s <= path.T else belief_dynamics.precision_step(h_prev, params)
            product *= h_next / (h_prev + h_eps)
            h_prev = h_next
            discount *= beta
            s += 1

        logger.debug(f"gamma_{t}={total:.12g} terms={terms_used} tail={tail:.3g}")
        return SeriesValue(gamma=total, tail_bound=tail, terms_used=terms_used)

    def marginal_benefit_mu_form(self, t: int, path: PrecisionPath, beta: float, tol: float) -> SeriesValue:
        """gamma_t as (1 - mu_t) sum_{s>t} beta^{s-t} prod_{i=t+1}^{s-1} mu_i."""
        params = path.params
        self._check_convergent(params, beta)
        mu_t = path.mu(t)
        if beta == 0.0:
            return SeriesValue(gamma=0.0, tail_bound=0.0, terms_used=0)
        return self._ratio_series(
            beta * (1.0 - mu_t), self._mu_stream(path, t + 1), beta, self._mu_sup(params), tol
        )

    def marginal_benefit_erratum(
        self, variant: FocVariant, t: int, path: PrecisionPath, beta: float, tol: float
    ) -> float:
        """Marginal benefit under a published FOC, for contrast with the corrected one.

        H10_AS_PUBLISHED sums beta^{s-t} h_eps/h_s from s = t (persistent type only);
        H21_AS_PUBLISHED runs the mu product up to s instead of s - 1.
        """
        variant = FocVariant(variant)
        params = path.params
        if variant == FocVariant.CORRECTED:
            return self.marginal_benefit(t, path, beta, tol).gamma
        if not 0.0 <= beta < 1.0:
            raise BetaOutOfRange(f"published variants are compared only for beta < 1, got {beta}")
        if variant == FocVariant.H10_AS_PUBLISHED:
            if not params.persistent:
                raise VariantRequiresPersistentType(
                    "the published (H10) form is the h_delta=inf special case"
                )
            first = params.h_eps / path.h(t)
            if beta == 0.0:
                return first
            # h_s/h_{s+1} = mu_s when h_delta is infinite
            return self._ratio_series(first, self._mu_stream(path, t), beta, 1.0, tol).gamma

        if beta == 0.0:
            return 0.0
        mus = self._mu_stream(path, t + 1)
        mu_next = next(mus)
        first = beta * (1.0 - path.mu(t)) * mu_next
        return self._ratio_series(first, mus, beta, self._mu_sup(params), tol).gamma

    @staticmethod
    def steady_state_gamma(mu_star: float, beta: float) -> float:
        """Stationary marginal benefit beta(1 - mu)/(1 - beta mu)."""
        return beta * (1.0 - mu_star) / (1.0 - beta * mu_star)

    @staticmethod
    def steady_state_gamma_h21(mu_star: float, beta: float) -> float:
        """Stationary value of the published (H21) left-hand side, beta mu (1 - mu)/(1 - beta mu)."""
        return beta * mu_star * (1.0 - mu_star) / (1.0 - beta * mu_star)

    def equilibrium_effort(
        self, t: int, path: PrecisionPath, params: ModelParams, cost: CostSpec, tol: float
    ) -> float:
        """a_t* = (g')^{-1}(gamma_t); the SOC holds because g is convex."""
        gamma = self.marginal_benefit(t, path, params.beta, tol).gamma
        return marginal_cost_inverse(cost, gamma)

    def equilibrium_path(self, params: ModelParams, cost: CostSpec, T: int, tol: float) -> EquilibriumPath:
        """Marginal benefits and efforts for t = 1..T."""
        self._check_convergent(params, params.beta)
        path = belief_dynamics.precision_path(params, T)
        values = [self.marginal_benefit(t, path, params.beta, tol) for t in range(1, T + 1)]
        efforts = [marginal_cost_inverse(cost, v.gamma) for v in values]
        logger.info(f"Equilibrium path computed for T={T}, max terms {max(v.terms_used for v in values)}")
        return EquilibriumPath(
            precision=path,
            gamma_seq=tuple(v.gamma for v in values),
            effort_seq=tuple(efforts),
            trunc_report=tuple(values),
            tol=tol,
        )

    def steady_state_effort(self, params: ModelParams, cost: CostSpec) -> float:
        """Stationary labour supply solving beta(1 - mu*)/(1 - beta mu*) = g'(a*)."""
        ss = belief_dynamics.steady_state(params)
        return marginal_cost_inverse(cost, self.steady_state_gamma(ss.mu_star, params.beta))

    def effort_upper_bound(self, params: ModelParams, cost: CostSpec, gamma: Optional[float] = None) -> float:
        """Upper end of any effort search: gamma_t never exceeds beta/(1 - beta)."""
        if params.beta < 1.0:
            cap = params.beta / (1.0 - params.beta)
        else:
            cap = gamma if gamma is not None else 1.0 / (1.0 - self._mu_sup(params))
        return marginal_cost_inverse(cost, cap) + 1.0

    def divergence_witness(self, params: ModelParams, bound: float) -> int:
        """Smallest summation index T at which the undiscounted gamma_1 series exceeds bound.

        With beta = 1 and h_delta = inf the terms are h_eps/(h_1 + (s-1) h_eps),
        a harmonic series, so T always exists.
        """
        if not (params.beta == 1.0 and params.persistent):
            raise NotDivergentRegime("divergence witness needs beta=1 and h_delta=inf")
        if bound < 0:
            return 1
        chunk = self.witness_chunk
        running = 0.0
        start = 2
        while True:
            s = np.arange(start, start + chunk, dtype=float)
            partial = running + np.cumsum(params.h_eps / (params.h1 + (s - 1.0) * params.h_eps))
            hits = np.nonzero(partial > bound)[0]
            if hits.size:
                T = start + int(hits[0])
                logger.info(f"gamma series exceeds {bound} at T={T}")
                return T
            running = float(partial[-1])
            start += chunk


equilibrium_solver = EquilibriumSolver()

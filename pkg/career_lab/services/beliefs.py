"""Belief dynamics: precision recursion, mean updating, steady state, impulse responses."""

import logging
import math
from typing import List, Union

import numpy as np

from career_lab.core.exceptions import NonFiniteSignal, NoSteadyState, PathTooShort
from career_lab.models.params import ModelParams
from career_lab.models.results import BeliefState, PrecisionPath, SteadyState

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class BeliefDynamics:
    """The market's normal filter on ability and its deterministic precisions."""

    def __init__(self, fixed_point_tol: float = 1e-14, max_fixed_point_iter: int = 1_000_000):
        self.fixed_point_tol = fixed_point_tol
        self.max_fixed_point_iter = max_fixed_point_iter

    def precision_step(self, h: float, params: ModelParams) -> float:
        """Next-period precision h_{t+1} = (h_t + h_eps) h_delta / (h_t + h_eps + h_delta)."""
        posterior = self.posterior_precision(h, params)
        if params.persistent:
            return posterior
        return posterior * params.h_delta / (posterior + params.h_delta)

    def posterior_precision(self, h: float, params: ModelParams) -> float:
        """Precision after observing y_t and before the ability shock."""
        return h + params.h_eps

    @staticmethod
    def mu_of(h: ArrayLike, h_eps: float) -> ArrayLike:
        """Weight on the prior mean, h/(h + h_eps)."""
        return h / (h + h_eps)

    @staticmethod
    def mu_step(mu: float, r: float) -> float:
        """mu_{t+1} = 1/(2 + r - mu_t); r = 0 is the persistent type."""
        return 1.0 / (2.0 + r - mu)

    def mu_sequence(self, mu1: float, r: float, n: int) -> List[float]:
        """mu_1..mu_n generated from mu1 by repeated mu_step."""
        seq = [mu1]
        for _ in range(n - 1):
            seq.append(self.mu_step(seq[-1], r))
        return seq

    @staticmethod
    def update_mean(m: ArrayLike, h: ArrayLike, z: ArrayLike, h_eps: float) -> ArrayLike:
        """Conjugate normal update of the mean, vectorised over replications."""
        return (h * m + h_eps * z) / (h + h_eps)

    def mean_update(self, state: BeliefState, z: float, params: ModelParams) -> BeliefState:
        """Update (m, h) after the de-biased signal z."""
        if not math.isfinite(z):
            raise NonFiniteSignal(f"signal must be finite, got {z}")
        return BeliefState(
            m=self.update_mean(state.m, state.h, z, params.h_eps),
            h=self.precision_step(state.h, params),
        )

    def precision_path(self, params: ModelParams, T: int) -> PrecisionPath:
        """h_1..h_T from h_1 by precision_step, with the matching mu weights."""
        if T < 1:
            raise PathTooShort(f"path length must be at least 1, got {T}")
        h_seq = [params.h1]
        for _ in range(T - 1):
            h_seq.append(self.precision_step(h_seq[-1], params))
        mu_seq = [self.mu_of(h, params.h_eps) for h in h_seq]
        return PrecisionPath(h_seq=tuple(h_seq), mu_seq=tuple(mu_seq), params=params)

    @staticmethod
    def stationary_mu(r: float) -> float:
        """Root in (0, 1] of mu^2 - (2+r)mu + 1 = 0, the fixed point of mu_step.

        Written as 2/(2 + r + s) with s = sqrt(r(4 + r)) to stay accurate as r -> 0.
        """
        return 2.0 / (2.0 + r + math.sqrt(r * (4.0 + r)))

    def steady_state(self, params: ModelParams) -> SteadyState:
        """Stationary precision h* and weight mu*.

        h* = h_eps mu*/(1 - mu*) = 2 h_eps/(r + s), s = sqrt(r(4 + r)).
        """
        if params.persistent:
            raise NoSteadyState("a stationary precision requires finite h_delta")
        r = params.r
        s = math.sqrt(r * (4.0 + r))
        mu_star = self.stationary_mu(r)
        h_star = params.h_eps * 2.0 / (r + s)
        residual = abs(self.precision_step(h_star, params) - h_star)
        logger.debug(f"steady state r={r:.6g}: mu*={mu_star:.12g} h*={h_star:.12g} residual={residual:.3g}")
        return SteadyState(h_star=h_star, mu_star=mu_star, r=r, residual=residual)

    def iterate_to_fixed_point(self, mu: float, r: float) -> float:
        """Fixed point of mu_step by plain iteration; a cross-check for steady_state."""
        for _ in range(self.max_fixed_point_iter):
            nxt = self.mu_step(mu, r)
            if abs(nxt - mu) <= self.fixed_point_tol:
                return nxt
            mu = nxt
        logger.warning(
            f"mu iteration did not reach {self.fixed_point_tol} after {self.max_fixed_point_iter} steps (r={r})"
        )
        return mu

    def impulse_response(self, t: int, k: int, path: PrecisionPath) -> float:
        """Response of m_{t+k} to one extra unit of effort at t.

        (h_eps/(h_t + h_eps)) * prod_{i=1}^{k-1} mu_{t+i}
        """
        if t < 1 or k < 1 or t + k - 1 > path.T:
            raise PathTooShort(f"impulse response at t={t}, k={k} needs {t + k - 1} periods, path has {path.T}")
        response = 1.0 - path.mu(t)
        for i in range(1, k):
            response *= path.mu(t + i)
        return response

    def impulse_response_path(self, t: int, K: int, path: PrecisionPath) -> List[float]:
        """Responses of m_{t+1}..m_{t+K}."""
        if t < 1 or K < 1 or t + K - 1 > path.T:
            raise PathTooShort(f"impulse responses at t={t} up to K={K} exceed path length {path.T}")
        responses = [1.0 - path.mu(t)]
        for i in range(1, K):
            responses.append(responses[-1] * path.mu(t + i))
        return responses


belief_dynamics = BeliefDynamics()

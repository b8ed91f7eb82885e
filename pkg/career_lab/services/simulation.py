"""Monte-Carlo play of the game and deviation oracles.

Replications are grouped in blocks of ``settings.block_size``. Block b draws
from ``default_rng(SeedSequence([master_seed, b]))`` so every replication's
randomness depends only on (master_seed, replication index); blocks run under
joblib and are concatenated in block order, so results do not depend on the
worker count.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from career_lab.core.config import settings
from career_lab.core.exceptions import DivergentSeries, TooFewReplications
from career_lab.models.params import CostSpec, FlatThenPowerCost, ModelParams
from career_lab.models.results import (
    CalibrationReport,
    DeviationReport,
    PrecisionPath,
    SimConfig,
    SimStats,
)
from career_lab.services.beliefs import belief_dynamics
from career_lab.services.costs import cost as effort_cost
from career_lab.services.costs import marginal_cost, marginal_cost_inverse
from career_lab.services.equilibrium import equilibrium_solver
from career_lab.services.optimizer import grid_then_golden

logger = logging.getLogger(__name__)

FD_STEP = 1e-5


def _blocks(n_reps: int, block_size: int) -> List[Tuple[int, int]]:
    """(block index, replications in block) covering n_reps."""
    return [
        (b, min(block_size, n_reps - b * block_size))
        for b in range(math.ceil(n_reps / block_size))
    ]


def _block_rng(master_seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, block]))


def _shock_sd(params: ModelParams) -> float:
    return 0.0 if params.persistent else 1.0 / math.sqrt(params.h_delta)


def _simulate_block(
    params: ModelParams,
    efforts: np.ndarray,
    freeze_beliefs: bool,
    n: int,
    master_seed: int,
    block: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Play T periods for n replications; returns (y - w, eta - m), each n x T."""
    rng = _block_rng(master_seed, block)
    T = len(efforts)
    eps_sd = 1.0 / math.sqrt(params.h_eps)
    delta_sd = _shock_sd(params)

    eta = rng.normal(params.m1, 1.0 / math.sqrt(params.h1), n)
    m = np.full(n, params.m1)
    h = params.h1
    resid = np.empty((n, T))
    eta_minus_m = np.empty((n, T))

    for t in range(T):
        eps = rng.normal(0.0, eps_sd, n)
        delta = rng.normal(0.0, delta_sd, n) if delta_sd > 0 else 0.0
        a = efforts[t]
        y = eta + a + eps
        w = m + a
        resid[:, t] = y - w
        eta_minus_m[:, t] = eta - m
        if not freeze_beliefs:
            z = y - a
            m = belief_dynamics.update_mean(m, h, z, params.h_eps)
            h = belief_dynamics.precision_step(h, params)
        eta = eta + delta

    return resid, eta_minus_m


def _deviation_block(
    params: ModelParams,
    efforts: np.ndarray,
    t: int,
    a_hats: Sequence[float],
    n: int,
    master_seed: int,
    block: int,
) -> np.ndarray:
    """Discounted wages after t, one row per a_hat, on common random numbers."""
    rng = _block_rng(master_seed, block)
    eps_sd = 1.0 / math.sqrt(params.h_eps)
    delta_sd = _shock_sd(params)
    beta = params.beta
    V = len(a_hats)

    eta = rng.normal(params.m1, 1.0 / math.sqrt(params.h1), n)
    m = np.full((V, n), params.m1)
    h = params.h1
    total = np.zeros((V, n))
    played = np.array(a_hats, dtype=float)[:, None]

    for tau in range(1, len(efforts) + 1):
        eps = rng.normal(0.0, eps_sd, n)
        delta = rng.normal(0.0, delta_sd, n) if delta_sd > 0 else 0.0
        a_star = efforts[tau - 1]
        if tau > t:
            total += beta ** (tau - t) * (m + a_star)
        a = played if tau == t else a_star
        y = eta + a + eps
        m = belief_dynamics.update_mean(m, h, y - a_star, params.h_eps)
        h = belief_dynamics.precision_step(h, params)
        eta = eta + delta

    return total


def _mean_se(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = x.shape[0]
    mean = x.mean(axis=0)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, x.std(axis=0, ddof=1) / math.sqrt(n)


def _objective(a_hat: float, gamma: float, a_star: float, cost: CostSpec) -> float:
    return -effort_cost(cost, a_hat) + (a_hat - a_star) * gamma


def _fd_derivative(f, x: float, step: float = FD_STEP, right_sided: bool = False) -> float:
    """Central difference, or the second-order right-sided one at a kink or the boundary."""
    if x >= step and not right_sided:
        return (f(x + step) - f(x - step)) / (2.0 * step)
    return (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step)


def _wage_bound(params: ModelParams, a_max: float, period: int) -> float:
    """|m| + effort bound + 6 prior standard deviations of ability at the given period."""
    var = 1.0 / params.h1
    if not params.persistent:
        var += (period - 1) / params.h_delta
    return abs(params.m1) + a_max + 6.0 * math.sqrt(var)


class MonteCarloSimulator:
    """Plays the game under equilibrium strategies and checks the market's beliefs."""

    def __init__(self, grid_points: int = 1000, golden_tol: float = 1e-8):
        self.grid_points = grid_points
        self.golden_tol = golden_tol

    def _run_blocks(self, fn, config: SimConfig, *args) -> list:
        blocks = _blocks(config.n_reps, settings.block_size)
        logger.debug(f"Running {len(blocks)} blocks on {config.workers} worker(s)")
        return Parallel(n_jobs=config.workers)(
            delayed(fn)(*args, n, config.master_seed, b) for b, n in blocks
        )

    def simulate(self, config: SimConfig) -> SimStats:
        """Simulate the game under the equilibrium strategy and aggregate per period."""
        params = config.params
        eq = equilibrium_solver.equilibrium_path(params, config.cost, config.T, config.tol)
        efforts = np.array(eq.effort_seq)

        logger.info(f"Simulating {config.n_reps} replications over T={config.T}")
        results = self._run_blocks(_simulate_block, config, params, efforts, config.freeze_beliefs)
        resid = np.concatenate([r for r, _ in results])
        eta_minus_m = np.concatenate([e for _, e in results])

        mean_resid, se_resid = _mean_se(resid)
        mean_em, se_em = _mean_se(eta_minus_m)
        n = config.n_reps
        var_em = eta_minus_m.var(axis=0, ddof=1) if n > 1 else np.zeros(config.T)

        return SimStats(
            n_reps=n,
            mean_resid=mean_resid.tolist(),
            se_resid=se_resid.tolist(),
            mean_eta_minus_m=mean_em.tolist(),
            se_eta_minus_m=se_em.tolist(),
            var_eta_minus_m=var_em.tolist(),
            theory_var=[1.0 / h for h in eq.precision.h_seq],
        )

    @staticmethod
    def wage_consistency(stats: SimStats, z: float = 3.0) -> List[int]:
        """Periods where mean(y_t - w_t) is more than z standard errors from 0."""
        return [
            t
            for t, (mean, se) in enumerate(zip(stats.mean_resid, stats.se_resid), start=1)
            if abs(mean) > z * se
        ]

    @staticmethod
    def filter_calibration(stats: SimStats, z: float = 5.0, min_reps: Optional[int] = None) -> CalibrationReport:
        """Compare the sample variance of eta_t - m_t with 1/h_t.

        The relative standard error of a normal sample variance is sqrt(2/(n-1)),
        so at least two replications are needed whatever min_reps says.
        """
        min_reps = settings.min_calibration_reps if min_reps is None else min_reps
        needed = max(min_reps, 2)
        if stats.n_reps < needed:
            raise TooFewReplications(
                f"calibration needs at least {needed} replications, got {stats.n_reps}"
            )
        rel_se = math.sqrt(2.0 / (stats.n_reps - 1))
        z_scores = [
            (var - theory) / (theory * rel_se)
            for var, theory in zip(stats.var_eta_minus_m, stats.theory_var)
        ]
        flagged = [t for t, score in enumerate(z_scores, start=1) if abs(score) > z]
        if flagged:
            logger.warning(f"Filter calibration flagged periods {flagged}")
        return CalibrationReport(
            n_reps=stats.n_reps, relative_se=rel_se, flagged_periods=flagged, z_scores=z_scores
        )

    def deviation_objective(
        self, t: int, a_hat: float, path: PrecisionPath, params: ModelParams, cost: CostSpec, tol: float
    ) -> float:
        """Part of the period-t objective that depends on a_hat: -g(a_hat) + (a_hat - a_t*) gamma_t.

        The current wage, the m_t terms and future effort terms do not move with
        a_hat and are left out.
        """
        gamma = equilibrium_solver.marginal_benefit(t, path, params.beta, tol).gamma
        return _objective(a_hat, gamma, marginal_cost_inverse(cost, gamma), cost)

    def best_response(
        self, t: int, path: PrecisionPath, params: ModelParams, cost: CostSpec, tol: float
    ) -> DeviationReport:
        """Maximise the deviation objective over [0, effort bound] and compare with a_t*."""
        gamma = equilibrium_solver.marginal_benefit(t, path, params.beta, tol).gamma
        a_star = marginal_cost_inverse(cost, gamma)

        def objective(a_hat: float) -> float:
            return _objective(a_hat, gamma, a_star, cost)

        upper = equilibrium_solver.effort_upper_bound(params, cost, gamma)
        argmax, _, resolution = grid_then_golden(
            objective, 0.0, upper, n_grid=self.grid_points, tol=self.golden_tol
        )
        flat = isinstance(cost, FlatThenPowerCost) and gamma == 0.0
        near_kink = isinstance(cost, FlatThenPowerCost) and a_star - cost.k < FD_STEP
        if flat:
            # every effort in [0, k] is optimal; report the convention value
            argmax = cost.k

        report = DeviationReport(
            t=t,
            a_star_t=a_star,
            argmax=argmax,
            fd_derivative=_fd_derivative(objective, a_star, right_sided=near_kink),
            foc_gap=gamma - marginal_cost(cost, a_star),
            grid_resolution=resolution,
            flat_argmax=flat,
        )
        logger.debug(f"best response t={t}: argmax={argmax:.10g} a*={a_star:.10g}")
        return report

    def deviation_horizon(self, t: int, params: ModelParams, cost: CostSpec, tol: float) -> int:
        """Periods after t needed so that beta^H/(1 - beta) * wage bound < tol."""
        beta = params.beta
        a_max = equilibrium_solver.effort_upper_bound(params, cost)
        H = 1
        while beta ** H / (1.0 - beta) * _wage_bound(params, a_max, t + H) >= tol:
            H += 1
        logger.debug(f"deviation horizon t={t}: H={H}")
        return H

    def _discounted_wages(self, t: int, a_hats: Sequence[float], config: SimConfig, tol: float) -> np.ndarray:
        params = config.params
        if params.beta >= 1.0:
            raise DivergentSeries("the discounted wage stream is infinite when beta=1")
        H = self.deviation_horizon(t, params, config.cost, tol)
        eq = equilibrium_solver.equilibrium_path(params, config.cost, t + H, tol)
        efforts = np.array(eq.effort_seq)
        results = self._run_blocks(_deviation_block, config, params, efforts, t, list(a_hats))
        return np.concatenate(results, axis=1)

    def mc_deviation_value(self, t: int, a_hat: float, config: SimConfig, tol: float) -> Tuple[float, float]:
        """Monte-Carlo value of sum_{tau>t} beta^{tau-t} E[w_tau] when a_hat is played at t.

        The market still de-biases period-t output by a_t*; equilibrium play
        resumes from t + 1.

        Returns:
            Tuple of (estimate, standard error).
        """
        if config.params.beta == 0.0:
            return 0.0, 0.0
        values = self._discounted_wages(t, [a_hat], config, tol)[0]
        mean, se = _mean_se(values[:, None])
        return float(mean[0]), float(se[0])

    def mc_deviation_slope(
        self, t: int, a_hat: float, config: SimConfig, tol: float
    ) -> Tuple[float, float, float]:
        """Paired value difference between playing a_hat and a_t* at t.

        Returns:
            Tuple of (difference, standard error of the difference, a_t*).
        """
        params = config.params
        path = belief_dynamics.precision_path(params, t)
        gamma = equilibrium_solver.marginal_benefit(t, path, params.beta, tol).gamma
        a_star = marginal_cost_inverse(config.cost, gamma)
        if params.beta == 0.0:
            return 0.0, 0.0, a_star
        values = self._discounted_wages(t, [a_star, a_hat], config, tol)
        mean, se = _mean_se((values[1] - values[0])[:, None])
        return float(mean[0]), float(se[0]), a_star


simulator = MonteCarloSimulator()

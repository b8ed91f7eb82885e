"""The property suite behind the `verify` command."""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from career_lab.core.config import settings
from career_lab.core.exceptions import DivergentSeries, TooFewReplications
from career_lab.models.requests import RunConfig
from career_lab.models.results import CalibrationReport, SimStats
from career_lab.services.beliefs import belief_dynamics
from career_lab.services.costs import marginal_cost, marginal_cost_inverse
from career_lab.services.equilibrium import equilibrium_solver
from career_lab.services.simulation import simulator
from career_lab.services.statics import comparative_statics

logger = logging.getLogger(__name__)

MU_GRID_99 = [i / 100 for i in range(1, 100)]
IDENTITY_MU = [i / 20 for i in range(1, 20)]
IDENTITY_R = (0.1, 1.0, 10.0)


class VerificationSuite:
    """Named pass/fail checks of the solver against the simulated game."""

    def __init__(self, argmax_tol: float = 1e-6, foc_tol: float = 1e-10, identity_tol: float = 1e-12):
        self.argmax_tol = argmax_tol
        self.foc_tol = foc_tol
        self.identity_tol = identity_tol

    @staticmethod
    def _check(name: str, passed: bool, **detail: Any) -> Dict[str, Any]:
        if not passed:
            logger.error(f"Verification check failed: {name} {detail}")
        return {"name": name, "passed": bool(passed), "detail": detail}

    def run(self, config: RunConfig) -> Dict[str, Any]:
        """Run every check at the configured sizes and return a JSON-ready report."""
        report, _, _ = self.run_with_stats(config)
        return report

    def run_with_stats(self, config: RunConfig) -> Tuple[Dict[str, Any], SimStats, CalibrationReport]:
        """Like run, also returning the per-period simulation statistics behind the report."""
        validated = config.validated()
        params, cost, tol = validated.params, validated.cost, config.tol
        if config.n_reps < settings.min_calibration_reps:
            raise TooFewReplications(
                f"verification needs at least {settings.min_calibration_reps} replications, got {config.n_reps}"
            )
        if validated.divergent_regime:
            raise DivergentSeries()

        beta = params.beta
        path = belief_dynamics.precision_path(params, config.T)
        gammas = [equilibrium_solver.marginal_benefit(t, path, beta, tol).gamma for t in range(1, config.T + 1)]
        checks: List[Dict[str, Any]] = []

        # Wages equal expected output; beliefs match the conjugate filter
        stats = simulator.simulate(config.sim_config())
        bad = simulator.wage_consistency(stats)
        checks.append(self._check("wage_consistency", not bad, failing_periods=bad, n_reps=stats.n_reps))
        calibration = simulator.filter_calibration(stats)
        checks.append(
            self._check(
                "filter_calibration",
                calibration.calibrated,
                flagged_periods=calibration.flagged_periods,
                max_abs_z=max(abs(z) for z in calibration.z_scores),
            )
        )

        # Argmax of the deviation objective is the solver's effort
        for t in sorted({1, min(3, config.T), config.T}):
            deviation = simulator.best_response(t, path, params, cost, tol)
            solver_gamma = equilibrium_solver.marginal_benefit_erratum(config.solver_variant, t, path, beta, tol)
            solver_effort = marginal_cost_inverse(cost, solver_gamma)
            slack = deviation.grid_resolution if deviation.flat_argmax else 0.0
            passed = (
                abs(deviation.argmax - solver_effort) <= self.argmax_tol + slack
                and abs(deviation.fd_derivative) <= self.argmax_tol
                and abs(gammas[t - 1] - marginal_cost(cost, solver_effort)) <= self.foc_tol
            )
            checks.append(
                self._check(
                    f"foc_certificate_t{t}",
                    passed,
                    solver_effort=solver_effort,
                    deviation_report=deviation.model_dump(),
                )
            )

        gaps = [
            abs(g - equilibrium_solver.marginal_benefit_mu_form(t, path, beta, tol).gamma)
            for t, g in enumerate(gammas, start=1)
        ]
        checks.append(self._check("form_equivalence", max(gaps) <= 2 * tol, max_gap=max(gaps)))

        if beta < 1.0:
            cap = beta / (1.0 - beta) + tol
            checks.append(self._check("gamma_bound", all(0.0 <= g <= cap for g in gammas), cap=cap))

        if 0.0 < beta < 1.0:
            gamma_1 = gammas[0]
            a_hat = marginal_cost_inverse(cost, gamma_1) + 1.0
            diff, se, _ = simulator.mc_deviation_slope(1, a_hat, config.sim_config(), tol)
            # unit deviation: the expected difference is gamma_1 itself
            allowed = 3.0 * se + 3.0 * tol + 1e-9
            checks.append(
                self._check(
                    "deviation_slope",
                    abs(diff - gamma_1) <= allowed,
                    mc_difference=diff,
                    se=se,
                    gamma_1=gamma_1,
                )
            )

        if beta > 0.0:
            scan = comparative_statics.monotonicity_scan(beta, params.r, MU_GRID_99, tol)
            checks.append(
                self._check(
                    "gamma_decreasing_in_mu1",
                    scan.strictly_decreasing,
                    worst_adjacent_difference=scan.worst_adjacent_difference,
                )
            )

        residuals = [
            abs(comparative_statics.transient_identity_residual(mu1, s, r))
            for mu1 in IDENTITY_MU
            for s in range(1, 21)
            for r in IDENTITY_R
        ]
        published = abs(comparative_statics.unrepaired_identity_residual(0.5, 3, 1.0))
        checks.append(
            self._check(
                "transient_identity",
                max(residuals) <= self.identity_tol and published > 1e-3,
                max_repaired_residual=float(np.max(residuals)),
                published_residual=published,
            )
        )

        if not params.persistent:
            ss = belief_dynamics.steady_state(params)
            iterated = belief_dynamics.iterate_to_fixed_point(0.5, ss.r)
            checks.append(
                self._check(
                    "steady_state",
                    ss.residual <= self.foc_tol and abs(iterated - ss.mu_star) <= self.foc_tol,
                    mu_star=ss.mu_star,
                    h_star=ss.h_star,
                    residual=ss.residual,
                )
            )

        passed = all(c["passed"] for c in checks)
        logger.info(f"Verification finished: {sum(c['passed'] for c in checks)}/{len(checks)} checks passed")
        report = {
            "passed": passed,
            "config": config.model_dump(mode="json", exclude={"workers", "output_format"}),
            "checks": checks,
        }
        return report, stats, calibration


verification_suite = VerificationSuite()

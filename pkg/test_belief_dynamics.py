"""Precision recursion, conjugate updating and the stationary precision."""

import itertools
import math

import numpy as np
import pytest
from scipy import integrate, stats

from career_lab.core.exceptions import NonFiniteSignal, NoSteadyState, PathTooShort
from career_lab.models.params import ModelParams
from career_lab.models.results import BeliefState
from career_lab.services.beliefs import belief_dynamics
from career_lab.services.equilibrium import equilibrium_solver

GRID = (0.01, 0.1, 1.0, 10.0, 100.0)


def _bayes_oracle(m, h, z, h_eps):
    """Posterior mean and variance of ability by direct integration."""
    sd = 1.0 / math.sqrt(h)
    prior = stats.norm(m, sd)
    likelihood = stats.norm(0.0, 1.0 / math.sqrt(h_eps))

    def weight(eta):
        return prior.pdf(eta) * likelihood.pdf(z - eta)

    lo, hi = m - 12 * sd, m + 12 * sd

    def quad(f):
        return integrate.quad(f, lo, hi, points=[z], limit=200, epsabs=1e-13, epsrel=1e-12)[0]

    norm = quad(weight)
    mean = quad(lambda e: e * weight(e)) / norm
    var = quad(lambda e: (e - mean) ** 2 * weight(e)) / norm
    return mean, var


class TestPrecisionStep:
    def test_persistent_adds_signal_precision(self, persistent_params):
        assert belief_dynamics.precision_step(3.0, persistent_params) == 4.0

    def test_shock_discounts_precision(self):
        params = ModelParams(h1=1.0, h_eps=1.0, h_delta=1.0)
        assert belief_dynamics.precision_step(1.0, params) == pytest.approx(2.0 / 3.0)

    def test_posterior_precision(self, unit_ratio_params):
        assert belief_dynamics.posterior_precision(2.0, unit_ratio_params) == 3.0

    def test_persistent_closed_form(self):
        params = ModelParams(h1=2.0, h_eps=0.5, h_delta="inf")
        path = belief_dynamics.precision_path(params, 50)
        for t in range(1, 51):
            assert path.h(t) == pytest.approx(2.0 + (t - 1) * 0.5, rel=1e-14)

    def test_path_converges_monotonically(self):
        for h1 in (0.1, 5.0):
            params = ModelParams(h1=h1, h_eps=1.0, h_delta=1.0)
            h_star = belief_dynamics.steady_state(params).h_star
            path = belief_dynamics.precision_path(params, 60)
            gaps = [abs(h - h_star) for h in path.h_seq]
            assert all(b < a for a, b in zip(gaps[:12], gaps[1:12]))
            assert gaps[-1] < 1e-12

    def test_mu_recursion_matches_precision_path(self):
        params = ModelParams(h1=0.3, h_eps=2.0, h_delta=4.0)
        path = belief_dynamics.precision_path(params, 30)
        for t in range(1, 30):
            next_mu = belief_dynamics.mu_step(path.mu(t), params.r)
            assert path.mu(t + 1) == pytest.approx(next_mu, abs=1e-12)
            assert path.mu(t) == pytest.approx(belief_dynamics.mu_of(path.h(t), params.h_eps))

    def test_mu_sequence(self):
        assert belief_dynamics.mu_sequence(0.5, 1.0, 3) == pytest.approx([0.5, 0.4, 1.0 / 2.6])

    @pytest.mark.parametrize("h,h_eps,h_delta", list(itertools.product(GRID, repeat=3)))
    def test_variance_adds_shock_variance(self, h, h_eps, h_delta):
        params = ModelParams(h1=h, h_eps=h_eps, h_delta=h_delta)
        expected = 1.0 / (h + h_eps) + 1.0 / h_delta
        assert 1.0 / belief_dynamics.precision_step(h, params) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("h1,r", list(itertools.product(GRID, GRID)))
    def test_weight_recursion_agrees_with_precisions(self, h1, r):
        params = ModelParams(h1=h1, h_eps=1.0, h_delta=1.0 / r)
        path = belief_dynamics.precision_path(params, 40)
        recursed = belief_dynamics.mu_sequence(path.mu(1), params.r, 40)
        np.testing.assert_allclose(recursed, path.mu_seq, rtol=0, atol=1e-12)

    def test_path_too_short(self, persistent_params):
        with pytest.raises(PathTooShort):
            belief_dynamics.precision_path(persistent_params, 0)
        path = belief_dynamics.precision_path(persistent_params, 3)
        with pytest.raises(PathTooShort):
            path.h(4)
        with pytest.raises(PathTooShort):
            path.mu(0)


class TestMeanUpdate:
    @pytest.mark.parametrize(
        "m,h,z,h_eps",
        [(0.0, 1.0, 1.5, 1.0), (2.0, 0.5, -1.0, 3.0), (-1.0, 4.0, 0.2, 0.25)],
    )
    def test_matches_bayes_rule(self, m, h, z, h_eps):
        mean, var = _bayes_oracle(m, h, z, h_eps)
        assert belief_dynamics.update_mean(m, h, z, h_eps) == pytest.approx(mean, abs=1e-10)
        assert 1.0 / (h + h_eps) == pytest.approx(var, rel=1e-6)

    def test_vectorised(self):
        m = np.array([0.0, 1.0, 2.0])
        z = np.array([1.0, 1.0, 1.0])
        np.testing.assert_allclose(belief_dynamics.update_mean(m, 1.0, z, 1.0), [0.5, 1.0, 1.5])

    def test_state_update(self, unit_ratio_params):
        state = belief_dynamics.mean_update(BeliefState(m=0.0, h=1.0), 2.0, unit_ratio_params)
        assert state.m == pytest.approx(1.0)
        assert state.h == pytest.approx(2.0 / 3.0)

    @pytest.mark.parametrize("z", [float("nan"), float("inf")])
    def test_non_finite_signal(self, unit_ratio_params, z):
        with pytest.raises(NonFiniteSignal):
            belief_dynamics.mean_update(BeliefState(m=0.0, h=1.0), z, unit_ratio_params)


class TestSteadyState:
    def test_unit_ratio(self, unit_ratio_params):
        ss = belief_dynamics.steady_state(unit_ratio_params)
        assert ss.mu_star == pytest.approx(0.3819660113, abs=1e-9)
        assert ss.h_star == pytest.approx(0.6180339887, abs=1e-9)
        assert ss.residual <= 1e-10
        assert ss.posterior_precision == pytest.approx(ss.h_star + 1.0)

    @pytest.mark.parametrize("r", [1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3])
    def test_closed_form_is_the_fixed_point(self, r):
        mu_star = belief_dynamics.stationary_mu(r)
        assert mu_star ** 2 - (2.0 + r) * mu_star + 1.0 == pytest.approx(0.0, abs=1e-12)
        assert belief_dynamics.mu_step(mu_star, r) == pytest.approx(mu_star, abs=1e-14)
        params = ModelParams(h_eps=1.0, h_delta=1.0 / r)
        ss = belief_dynamics.steady_state(params)
        assert ss.residual <= 1e-10 * max(1.0, ss.h_star)

    @pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
    def test_iteration_agrees(self, r):
        iterated = belief_dynamics.iterate_to_fixed_point(0.5, r)
        assert iterated == pytest.approx(belief_dynamics.stationary_mu(r), abs=1e-10)

    def test_persistent_type_has_no_steady_state(self, persistent_params):
        with pytest.raises(NoSteadyState):
            belief_dynamics.steady_state(persistent_params)


class TestImpulseResponse:
    def test_first_response(self, persistent_params):
        path = belief_dynamics.precision_path(persistent_params, 5)
        assert belief_dynamics.impulse_response(1, 1, path) == pytest.approx(0.5)
        assert belief_dynamics.impulse_response(2, 2, path) == pytest.approx((1.0 / 3.0) * 0.75)

    def test_path_matches_pointwise(self, unit_ratio_params):
        path = belief_dynamics.precision_path(unit_ratio_params, 20)
        responses = belief_dynamics.impulse_response_path(3, 10, path)
        for k, value in enumerate(responses, start=1):
            assert value == pytest.approx(belief_dynamics.impulse_response(3, k, path), rel=1e-14)

    def test_discounted_responses_sum_to_marginal_benefit(self, persistent_params):
        path = belief_dynamics.precision_path(persistent_params, 200)
        beta = persistent_params.beta
        for t in (1, 4):
            responses = belief_dynamics.impulse_response_path(t, 150, path)
            total = math.fsum(beta ** k * v for k, v in enumerate(responses, start=1))
            gamma = equilibrium_solver.marginal_benefit(t, path, beta, 1e-12).gamma
            assert total == pytest.approx(gamma, abs=1e-9)

    def test_past_the_path(self, persistent_params):
        path = belief_dynamics.precision_path(persistent_params, 5)
        with pytest.raises(PathTooShort):
            belief_dynamics.impulse_response(3, 4, path)
        with pytest.raises(PathTooShort):
            belief_dynamics.impulse_response_path(5, 2, path)

"""b_s coefficients, the transient identity and the monotonicity scan over mu_1."""

import itertools

import pytest

from career_lab.core.exceptions import ConfigError
from career_lab.models.params import ModelParams
from career_lab.models.results import FocVariant
from career_lab.services.beliefs import belief_dynamics
from career_lab.services.equilibrium import equilibrium_solver
from career_lab.services.statics import comparative_statics

MU_GRID = [i / 20 for i in range(1, 20)]
R_VALUES = (0.1, 1.0, 10.0)
GRID_99 = [i / 100 for i in range(1, 100)]


class TestCoefficients:
    def test_first_coefficient(self):
        assert comparative_statics.b_s(0.3, 1, 1.0) == pytest.approx(0.7)

    def test_product_of_following_weights(self):
        mu2 = belief_dynamics.mu_step(0.5, 1.0)
        mu3 = belief_dynamics.mu_step(mu2, 1.0)
        assert comparative_statics.b_s(0.5, 3, 1.0) == pytest.approx(0.5 * mu2 * mu3)

    def test_older_definition_coincides_at_t1(self):
        for mu, s, r in itertools.product((0.2, 0.7), (1, 4, 9), R_VALUES):
            expected = comparative_statics.b_s(mu, s, r)
            assert comparative_statics.b_s_pre(mu, 1, s, r) == pytest.approx(expected, rel=1e-14)

    def test_gamma_is_the_discounted_b_series(self):
        for mu1, r, beta in itertools.product((0.1, 0.5, 0.9), (0.5, 2.0), (0.5, 0.95)):
            h_eps = 1.0
            params = ModelParams(h1=h_eps * mu1 / (1 - mu1), h_eps=h_eps, h_delta=h_eps / r, beta=beta)
            path = belief_dynamics.precision_path(params, 1)
            assert comparative_statics.gamma_from_b(mu1, beta, r, 1e-12) == pytest.approx(
                equilibrium_solver.marginal_benefit(1, path, beta, 1e-12).gamma, abs=1e-9
            )


class TestTransientIdentity:
    def test_repaired_identity_holds(self):
        residuals = [
            abs(comparative_statics.transient_identity_residual(mu1, s, r))
            for mu1, s, r in itertools.product(MU_GRID, range(1, 21), R_VALUES)
        ]
        assert max(residuals) <= 1e-12

    def test_published_identity_fails(self):
        assert abs(comparative_statics.unrepaired_identity_residual(0.5, 3, 1.0)) > 1e-3

    def test_published_identity_fails_across_the_grid(self):
        for mu1, r in itertools.product((0.2, 0.5, 0.8), R_VALUES):
            assert abs(comparative_statics.unrepaired_identity_residual(mu1, 2, r)) > 1e-6

    def test_alternate_repair_also_holds(self):
        for mu1, s, r in itertools.product(MU_GRID, (1, 5, 15), R_VALUES):
            assert comparative_statics.alternate_repair_residual(mu1, s, r) <= 1e-12


class TestMonotonicityScan:
    @pytest.mark.parametrize("beta,r", list(itertools.product((0.1, 0.5, 0.9, 0.99), R_VALUES)))
    def test_gamma_strictly_decreasing_in_mu1(self, beta, r):
        report = comparative_statics.monotonicity_scan(beta, r, GRID_99, 1e-10)
        assert report.strictly_decreasing
        assert report.worst_adjacent_difference < 0
        assert len(report.gamma) == 99

    def test_persistent_type(self):
        assert comparative_statics.monotonicity_scan(0.9, 0.0, GRID_99, 1e-10).strictly_decreasing

    def test_published_left_hand_side_also_decreases(self):
        report = comparative_statics.monotonicity_scan(
            0.9, 1.0, GRID_99, 1e-10, variant=FocVariant.H21_AS_PUBLISHED
        )
        assert report.strictly_decreasing

    def test_published_left_hand_side_from_b(self):
        mu1, beta, r = 0.4, 0.9, 1.0
        mu2 = belief_dynamics.mu_step(mu1, r)
        published = comparative_statics.gamma_h21_from_b(mu1, beta, r, 1e-12)
        assert published < comparative_statics.gamma_from_b(mu1, beta, r, 1e-12)
        # first term of the published form carries one extra weight
        assert published > beta * (1 - mu1) * mu2

    def test_zero_discount_is_flat(self):
        report = comparative_statics.monotonicity_scan(0.0, 1.0, GRID_99, 1e-10)
        assert not report.strictly_decreasing
        assert set(report.gamma) == {0.0}

    @pytest.mark.parametrize("grid", [[0.5, 0.4], [0.0, 0.5], [0.5, 1.0], [0.2, 0.2]])
    def test_bad_grid(self, grid):
        with pytest.raises(ConfigError):
            comparative_statics.monotonicity_scan(0.9, 1.0, grid, 1e-10)

    def test_h10_has_no_mu_form(self):
        with pytest.raises(ConfigError):
            comparative_statics.monotonicity_scan(0.9, 1.0, GRID_99, 1e-10, variant="h10")

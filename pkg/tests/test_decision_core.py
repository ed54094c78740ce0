"""Closed-form quantities: pinned examples, identities, and properties."""

import math

import pytest
from hypothesis import given, strategies as st

from udecide.decision_core import (
    ActionLabel,
    DecisionProblem,
    NoiseSpec,
    bayes_action,
    delta,
    expected_increase,
    min_loss,
    p_err,
    var_delta_hat,
)

from _oracles import normal_cdf_oracle

EXACT = 1e-12

# Frozen reference values, computed with the series/continued-fraction
# normal-CDF oracle on the worked examples.
P_ERR_REF_1 = 0.043173910491831224        # Phi(-0.10 / sqrt(0.0034))
P_ERR_REF_2 = 0.21743827558956025         # Phi(-0.26 / sqrt(0.1225 * 0.905))
NORM_INC_REF_1 = 0.028782606994554148     # 0.10 * P_ERR_REF_1 / 0.15
NORM_INC_REF_2 = 2.2613580661314265       # 0.26 * P_ERR_REF_2 / 0.025

costs = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)
probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
sigmas = st.floats(min_value=0.0, max_value=2.0, allow_nan=False)


def noise(sp=0.0, sc=0.0, delta_mode=False):
    return NoiseSpec(
        sigma_p0=sp, sigma_c01=sc, sigma_c10=sc,
        family_p="beta" if sp > 0 else "exact",
        family_c="uniform-truncated" if sc > 0 else "exact",
        delta_mode=delta_mode,
    )


class TestDelta:
    def test_worked_examples(self):
        assert delta(DecisionProblem(0.5, 0.3, 0.5)) == pytest.approx(-0.10, abs=EXACT)
        assert delta(DecisionProblem(0.05, 0.3, 0.5)) == pytest.approx(0.26, abs=EXACT)

    @given(probs.filter(lambda p: p == 0.5), costs)
    def test_symmetric_costs_cancel(self, p0, c):
        assert delta(DecisionProblem(0.5, c, c)) == pytest.approx(0.0, abs=EXACT)

    def test_general_diagonal(self):
        problem = DecisionProblem(0.3, c01=0.9, c10=0.7, c00=0.2, c11=0.4)
        expected = (0.9 - 0.4) * 0.7 - (0.7 - 0.2) * 0.3
        assert delta(problem) == pytest.approx(expected, abs=EXACT)

    @given(probs, costs, costs)
    def test_zero_diagonal_reduction_is_bitwise(self, p0, c01, c10):
        general = DecisionProblem(p0, c01, c10, c00=0.0, c11=0.0)
        assert delta(general) == c01 * (1.0 - p0) - c10 * p0


class TestBayesAction:
    def test_worked_examples(self):
        assert bayes_action(DecisionProblem(0.5, 0.3, 0.5)) is ActionLabel.A0
        assert bayes_action(DecisionProblem(0.05, 0.3, 0.5)) is ActionLabel.A1

    def test_tie_goes_to_a1(self):
        assert bayes_action(DecisionProblem(0.5, 0.4, 0.4)) is ActionLabel.A1

    def test_exactly_two_actions_exist(self):
        assert len(ActionLabel) == 2

    @given(probs, costs, costs, st.floats(min_value=0.01, max_value=100.0))
    def test_invariant_under_cost_scaling(self, p0, c01, c10, k):
        base = DecisionProblem(p0, c01, c10)
        scaled = DecisionProblem(p0, k * c01, k * c10)
        assert bayes_action(base) is bayes_action(scaled)


class TestMinLoss:
    def test_worked_examples(self):
        assert min_loss(DecisionProblem(0.5, 0.3, 0.5)) == pytest.approx(0.15, abs=EXACT)
        assert min_loss(DecisionProblem(0.05, 0.3, 0.5)) == pytest.approx(0.025, abs=EXACT)

    @given(costs, costs)
    def test_degenerate_prior(self, c01, c10):
        assert min_loss(DecisionProblem(0.0, c01, c10)) == 0.0

    @given(probs, costs, costs)
    def test_never_exceeds_either_action(self, p0, c01, c10):
        problem = DecisionProblem(p0, c01, c10)
        assert min_loss(problem) <= c01 * (1.0 - p0) + EXACT
        assert min_loss(problem) <= c10 * p0 + EXACT


class TestVarDeltaHat:
    def test_probability_noise_only(self):
        problem = DecisionProblem(0.5, 0.3, 0.5)
        assert var_delta_hat(problem, noise(sp=0.1)) == pytest.approx(0.0034, abs=EXACT)

    def test_cost_noise_only(self):
        problem = DecisionProblem(0.5, 0.3, 0.5)
        assert var_delta_hat(problem, noise(sc=0.1)) == pytest.approx(0.005, abs=EXACT)

    def test_no_noise(self):
        assert var_delta_hat(DecisionProblem(0.5, 0.3, 0.5), noise()) == 0.0

    def test_diagonal_costs_shift_effective_means(self):
        shifted = DecisionProblem(0.5, c01=0.4, c10=0.6, c00=0.1, c11=0.1)
        plain = DecisionProblem(0.5, 0.3, 0.5)
        spec = noise(sp=0.1, sc=0.2)
        assert var_delta_hat(shifted, spec) == pytest.approx(
            var_delta_hat(plain, spec), abs=EXACT
        )


class TestPErr:
    def test_reference_value(self):
        assert p_err(-0.10, 0.0034) == pytest.approx(P_ERR_REF_1, abs=5e-7)

    def test_zero_variance(self):
        assert p_err(0.26, 0.0) == 0.0

    def test_zero_gap(self):
        assert p_err(0.0, 0.01) == 0.5

    def test_both_zero(self):
        assert p_err(0.0, 0.0) == 0.0

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            p_err(0.1, -1e-9)

    @given(
        st.floats(min_value=-10.0, max_value=10.0, allow_nan=False),
        st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
    )
    def test_bounds(self, d, v):
        assert 0.0 <= p_err(d, v) <= 0.5

    def test_matches_oracle_normal_tail(self):
        for d, v in [(-0.1, 0.0034), (0.26, 0.11), (0.05, 0.0009), (1.0, 2.0)]:
            assert p_err(d, v) == pytest.approx(
                normal_cdf_oracle(-abs(d) / math.sqrt(v)), abs=5e-7
            )


class TestExpectedIncrease:
    def test_probability_noise_example(self):
        result = expected_increase(DecisionProblem(0.5, 0.3, 0.5), noise(sp=0.1))
        assert result.delta_inc == pytest.approx(0.10 * P_ERR_REF_1, abs=1e-6)
        assert result.norm_inc == pytest.approx(NORM_INC_REF_1, abs=1e-6)

    def test_cost_noise_example(self):
        result = expected_increase(DecisionProblem(0.05, 0.3, 0.5), noise(sc=0.35))
        assert result.var_delta_hat == pytest.approx(0.1225 * 0.905, abs=EXACT)
        assert result.delta_inc == pytest.approx(0.26 * P_ERR_REF_2, abs=2e-6)
        assert result.norm_inc == pytest.approx(NORM_INC_REF_2, abs=2e-5)

    def test_no_noise_means_no_increase(self):
        result = expected_increase(DecisionProblem(0.3, 0.8, 0.2), noise())
        assert result.p_err == 0.0
        assert result.delta_inc == 0.0
        assert result.norm_inc == 0.0

    def test_undefined_marker_at_zero_min_loss(self):
        result = expected_increase(DecisionProblem(0.0, 0.3, 0.5), noise(sc=0.1))
        assert result.l_star == 0.0
        assert result.norm_inc is None

    @given(probs, costs, costs, sigmas, sigmas)
    def test_identity_is_exact(self, p0, c01, c10, sp, sc):
        result = expected_increase(DecisionProblem(p0, c01, c10), noise(sp=sp, sc=sc))
        assert result.delta_inc == result.p_err * abs(result.delta)
        assert result.delta_inc <= abs(result.delta) / 2.0 + EXACT

    def test_strictly_monotone_in_variance(self):
        problem = DecisionProblem(0.3, 0.3, 0.5)
        assert delta(problem) != 0.0
        increases = [
            expected_increase(problem, noise(sp=0.01 + 0.02 * i)).delta_inc
            for i in range(25)
        ]
        assert all(b > a for a, b in zip(increases, increases[1:]))

    def test_vanishing_variance_limit(self):
        problem = DecisionProblem(0.3, 0.3, 0.5)
        assert expected_increase(problem, noise(sp=1e-9)).delta_inc == pytest.approx(0.0, abs=1e-12)

    def test_saturation_limit(self):
        # at var = 1e6 * delta^2 the increase is within 1e-3*|delta| of |delta|/2
        for problem in [DecisionProblem(0.3, 0.3, 0.5), DecisionProblem(0.05, 0.3, 0.5)]:
            d = delta(problem)
            inc = p_err(d, 1e6 * d * d) * abs(d)
            assert abs(inc - abs(d) / 2.0) <= 1e-3 * abs(d)

    @given(
        probs.filter(lambda p: 0.01 < p < 0.99),
        st.floats(min_value=0.05, max_value=5.0),
        st.floats(min_value=0.05, max_value=5.0),
        st.floats(min_value=0.001, max_value=0.5),
        st.floats(min_value=0.1, max_value=20.0),
    )
    def test_scale_equivariance_with_exact_probability(self, p0, c01, c10, sc, k):
        base = expected_increase(DecisionProblem(p0, c01, c10), noise(sc=sc))
        scaled = expected_increase(
            DecisionProblem(p0, k * c01, k * c10), noise(sc=k * sc)
        )
        assert scaled.delta == pytest.approx(k * base.delta, rel=1e-9, abs=1e-12)
        assert scaled.l_star == pytest.approx(k * base.l_star, rel=1e-9, abs=1e-12)
        assert scaled.p_err == pytest.approx(base.p_err, rel=1e-7, abs=1e-9)
        assert scaled.delta_inc == pytest.approx(k * base.delta_inc, rel=1e-6, abs=1e-9)
        if base.norm_inc is not None:
            assert scaled.norm_inc == pytest.approx(base.norm_inc, rel=1e-6, abs=1e-9)

    def test_cost_noise_dominates_probability_noise(self):
        # for c01=0.3, c10=0.5: (1-p0)^2 + p0^2 >= 1/2 > 0.34 = c01^2 + c10^2
        for i in range(21):
            p0 = i / 20.0
            problem = DecisionProblem(p0, 0.3, 0.5)
            for s in (0.05, 0.1, 0.2, 0.4):
                cost_only = expected_increase(problem, noise(sc=s))
                prob_only = expected_increase(problem, noise(sp=s))
                assert cost_only.var_delta_hat >= prob_only.var_delta_hat
                assert cost_only.delta_inc >= prob_only.delta_inc


class TestValidation:
    @pytest.mark.parametrize("p0", [-0.01, 1.01, float("nan")])
    def test_probability_out_of_range(self, p0):
        with pytest.raises(ValueError):
            DecisionProblem(p0, 0.3, 0.5)

    def test_negative_cost(self):
        with pytest.raises(ValueError):
            DecisionProblem(0.5, -0.3, 0.5)

    def test_default_diagonal_is_zero(self):
        problem = DecisionProblem(0.5, 0.3, 0.5)
        assert problem.c00 == 0.0 and problem.c11 == 0.0

    def test_noise_family_membership(self):
        with pytest.raises(ValueError):
            NoiseSpec(sigma_p0=0.1, family_p="gamma")
        with pytest.raises(ValueError):
            NoiseSpec(sigma_c01=0.1, sigma_c10=0.1, family_c="lognormal")

    def test_sigma_zero_iff_exact(self):
        with pytest.raises(ValueError):
            NoiseSpec(sigma_p0=0.1, family_p="exact")
        with pytest.raises(ValueError):
            NoiseSpec(sigma_p0=0.0, family_p="beta")
        with pytest.raises(ValueError):
            NoiseSpec(sigma_c01=0.1, sigma_c10=0.0, family_c="exact")
        # one noisy cost is enough to require a sampling family
        NoiseSpec(sigma_c01=0.1, sigma_c10=0.0, family_c="uniform-truncated")

    def test_negative_sigma(self):
        with pytest.raises(ValueError):
            NoiseSpec(sigma_p0=-0.1, family_p="normal")

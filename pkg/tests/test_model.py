import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as orc
import trap_tail as tt
from trap_tail.errors import DomainError
from trap_tail.model import INFINITE, Infinite, WalkKind


class TestParams:
    def test_rho_value(self, params_half, params_quarter):
        assert params_half.rho == pytest.approx(1.0, rel=1e-15)
        assert params_quarter.rho == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("alpha", [-0.1, 0.0, 1.0, 1.5])
    def test_alpha_out_of_range(self, alpha):
        with pytest.raises(DomainError):
            tt.make_params(alpha, 2.0)

    @pytest.mark.parametrize("beta", [0.5, 1.0, -2.0])
    def test_beta_out_of_range(self, beta):
        with pytest.raises(DomainError):
            tt.make_params(0.5, beta)

    def test_inconsistent_rho_rejected(self):
        with pytest.raises(DomainError):
            tt.ModelParams(alpha=0.5, beta=2.0, rho=1.5)

    def test_frozen(self, params_half):
        with pytest.raises(Exception):
            params_half.alpha = 0.3  # type: ignore[misc]

    @given(alpha=st.floats(0.01, 0.99), beta=st.floats(1.01, 50.0))
    def test_rho_consistency(self, alpha, beta):
        p = tt.make_params(alpha, beta)
        assert math.isclose(beta ** -p.rho, alpha, rel_tol=1e-9)


class TestInfinite:
    def test_singleton(self):
        assert Infinite() is INFINITE
        assert repr(INFINITE)

    def test_not_a_float(self):
        assert not isinstance(INFINITE, float)


class TestFixedExpectations:
    @pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
    def test_expected_excursion_fixed_vs_solve(self, beta, k):
        # E_k[T] = 1 + (mean hitting time of 0 from site 1)
        m, _ = orc.solve_hit_zero_moments(beta, k)
        assert tt.expected_excursion_fixed(beta, k) == pytest.approx(
            1.0 + m[0], rel=1e-12)

    def test_k_zero(self):
        assert tt.expected_excursion_fixed(2.0, 0) == 0.0

    def test_monotone_in_k(self):
        vals = [tt.expected_excursion_fixed(2.0, k) for k in range(1, 12)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestMixtureExpectation:
    def test_finite_value(self, params_quarter):
        # direct geometric-weight series as the oracle
        a, b = params_quarter.alpha, params_quarter.beta
        series = math.fsum((1 - a) * a ** k * tt.expected_excursion_fixed(b, k)
                           for k in range(200))
        val = tt.expected_excursion(params_quarter)
        assert not isinstance(val, Infinite)
        assert val == pytest.approx(series, rel=1e-12)

    def test_infinite_at_critical_and_beyond(self, params_half):
        assert tt.expected_excursion(params_half) is INFINITE
        assert tt.expected_excursion(tt.make_params(0.7, 2.0)) is INFINITE

    @given(alpha=st.floats(0.02, 0.95), beta=st.floats(1.1, 8.0))
    @settings(max_examples=40)
    def test_finiteness_boundary(self, alpha, beta):
        p = tt.make_params(alpha, beta)
        val = tt.expected_excursion(p)
        if alpha * beta < 1.0 - 1e-9:
            assert isinstance(val, float) and val > 0.0
        elif alpha * beta > 1.0 + 1e-9:
            assert val is INFINITE

    def test_second_moment_boundary(self):
        assert tt.second_moment_finite(tt.make_params(0.2, 2.0))
        assert not tt.second_moment_finite(tt.make_params(0.3, 2.0))


class TestHittingProbabilities:
    @pytest.mark.parametrize("beta", [1.5, 2.0, 4.0])
    @pytest.mark.parametrize("k", [1, 2, 3, 5, 7])
    def test_reach_far_end_vs_solve(self, beta, k):
        assert tt.reach_far_end_prob(beta, k) == pytest.approx(
            orc.solve_reach_far_end(beta, k), rel=1e-12)

    def test_return_before_zero_complementarity(self):
        # from site k the walk returns to k before 0 or not; compare against
        # a direct absorption solve on the two-boundary chain
        beta, k = 2.0, 5
        r = tt.return_before_zero_prob(beta, k)
        up = beta / (1.0 + beta)
        # start at k-1 (forced first step down), absorb at 0 and k
        a = np.zeros((k - 1, k - 1))
        b = np.zeros(k - 1)
        for i in range(1, k):
            a[i - 1, i - 1] = 1.0
            if i + 1 == k:
                b[i - 1] += up
            else:
                a[i - 1, i] = -up
            if i - 1 >= 1:
                a[i - 1, i - 2] = -(1.0 - up)
        h = np.linalg.solve(a, b)
        assert r == pytest.approx(h[k - 2], rel=1e-12)

    def test_excursion_count_mean_fixed(self):
        beta, k = 2.0, 4
        # E_k[N | A] for a geometric count with success (beta-1)/(beta^k - 1)
        p = (beta - 1.0) / (beta ** k - 1.0)
        assert tt.excursion_count_mean(beta, k) == pytest.approx(
            (1.0 - p) / p, rel=1e-12)

    def test_excursion_count_mean_mixture(self, params_quarter):
        a, b = params_quarter.alpha, params_quarter.beta
        series = math.fsum(
            (1 - a) * a ** k * tt.excursion_count_mean(b, k)
            for k in range(1, 400))
        assert tt.excursion_count_mean(params_quarter) == pytest.approx(
            series, rel=1e-12)
        assert tt.excursion_count_mean(params_quarter) == pytest.approx(
            a * a * b / (1 - a * b), rel=1e-12)

    def test_excursion_count_mean_infinite(self, params_half):
        assert tt.excursion_count_mean(params_half) is INFINITE


class TestFreeWalkReturnTime:
    def test_mgf_at_zero(self):
        assert tt.FreeWalkReturnTime(2.0).mgf(0.0) == pytest.approx(1.0)

    def test_mean_variance(self):
        d = tt.FreeWalkReturnTime(2.0)
        assert d.mean() == pytest.approx(4.0)
        assert d.variance() == pytest.approx(24.0)

    def test_mean_is_mgf_derivative(self):
        d = tt.FreeWalkReturnTime(3.0)
        h = 1e-6
        num = (d.mgf(h) - d.mgf(-h)) / (2 * h)
        assert num == pytest.approx(d.mean(), rel=1e-4)

    def test_variance_is_second_derivative(self):
        d = tt.FreeWalkReturnTime(3.0)
        h = 1e-4
        m2 = (d.mgf(h) - 2 * d.mgf(0.0) + d.mgf(-h)) / h ** 2
        assert m2 - d.mean() ** 2 == pytest.approx(d.variance(), rel=1e-3)

    def test_lambda_max_boundary(self):
        d = tt.FreeWalkReturnTime(2.0)
        lm = d.lambda_max
        assert lm == pytest.approx(math.log((2.0 + 1.0) / (2.0 * math.sqrt(2.0))))
        assert math.isfinite(d.mgf(lm))  # boundary itself is attained
        with pytest.raises(DomainError):
            d.mgf(lm + 1e-9)

    def test_module_level_alias(self):
        assert tt.free_walk_return_mgf(2.0, -0.1) == pytest.approx(
            tt.FreeWalkReturnTime(2.0).mgf(-0.1))

    @given(beta=st.floats(1.05, 10.0), lam=st.floats(-2.0, -1e-3))
    @settings(max_examples=50)
    def test_mgf_in_unit_interval_for_negative_lambda(self, beta, lam):
        v = tt.FreeWalkReturnTime(beta).mgf(lam)
        assert 0.0 < v < 1.0


class TestConditionedUpProb:
    @pytest.mark.parametrize("k", [2, 3, 6])
    def test_to_k_probabilities_valid(self, k):
        for l in range(1, k):
            p = tt.conditioned_up_prob(WalkKind.ConditionedToK, 2.0, k, l)
            assert 0.0 < p <= 1.0

    def test_to_k_forced_up_next_to_origin(self):
        # conditioned to reach the far end before 0, site 1 cannot step down
        p = tt.conditioned_up_prob(WalkKind.ConditionedToK, 2.0, 5, 1)
        free = 2.0 / 3.0
        assert p > free

    def test_to_zero_below_free_drift(self):
        for l in range(1, 5):
            p = tt.conditioned_up_prob(WalkKind.ConditionedToZero, 2.0, 5, l)
            assert p < 2.0 / 3.0

    def test_h_transform_consistency(self):
        # Doob h-transform identity: p~(l) = p * h(l+1) / h(l) with h the
        # probability of reaching k before 0, computed by linear solve
        beta, k = 2.0, 5
        up = beta / (1.0 + beta)
        h = [0.0] + [0.0] * k
        # h(l) = P_l[hit k before 0]
        for l in range(1, k + 1):
            if l == k:
                h[l] = 1.0
            else:
                # reuse the absorption solve from the oracle with start l
                a = np.zeros((k - 1, k - 1))
                b = np.zeros(k - 1)
                for i in range(1, k):
                    a[i - 1, i - 1] = 1.0
                    if i + 1 == k:
                        b[i - 1] += up
                    else:
                        a[i - 1, i] = -up
                    if i - 1 >= 1:
                        a[i - 1, i - 2] = -(1.0 - up)
                h[l] = float(np.linalg.solve(a, b)[l - 1])
        for l in range(1, k):
            expect = up * h[l + 1] / h[l]
            got = tt.conditioned_up_prob(WalkKind.ConditionedToK, beta, k, l)
            assert got == pytest.approx(expect, rel=1e-12)

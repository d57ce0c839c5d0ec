import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as orc
import trap_tail as tt
from trap_tail import exact
from trap_tail.errors import DomainError


class TestFixedKDistribution:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_matches_path_enumeration(self, k):
        dist = exact.fixed_k_return_distribution(2.0, k, 16)
        pmf, remainder = orc.enum_return_pmf(Fraction(2), k, 16)
        for t in range(17):
            assert dist.pmf[t] == pytest.approx(
                float(pmf.get(t, Fraction(0))), abs=1e-12)
        assert dist.remainder == pytest.approx(float(remainder), abs=1e-12)

    @pytest.mark.parametrize("beta", [Fraction(3, 2), Fraction(5, 2)])
    def test_non_integer_beta_enumeration(self, beta):
        dist = exact.fixed_k_return_distribution(float(beta), 3, 14)
        pmf, remainder = orc.enum_return_pmf(beta, 3, 14)
        for t in range(15):
            assert dist.pmf[t] == pytest.approx(
                float(pmf.get(t, Fraction(0))), abs=1e-12)
        assert dist.remainder == pytest.approx(float(remainder), abs=1e-12)

    def test_mass_conservation(self):
        dist = exact.fixed_k_return_distribution(2.0, 5, 200)
        assert math.fsum(dist.pmf) + dist.remainder == pytest.approx(1.0,
                                                                     abs=1e-14)

    def test_survival_endpoints(self):
        dist = exact.fixed_k_return_distribution(2.0, 3, 50)
        assert dist.survival(-1.0) == 1.0
        assert dist.survival(0.0) == pytest.approx(1.0)
        assert dist.survival(dist.t_max) == dist.remainder
        assert dist.survival(1e9) == dist.remainder

    def test_survival_monotone(self):
        dist = exact.fixed_k_return_distribution(2.0, 4, 100)
        vals = [dist.survival(t) for t in range(101)]
        # independent partial sums may wobble by one rounding unit
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_parity(self):
        # returns to the origin take an even number of steps
        dist = exact.fixed_k_return_distribution(2.0, 4, 99)
        assert np.all(dist.pmf[1::2] == 0.0)

    def test_k1_deterministic(self):
        dist = exact.fixed_k_return_distribution(2.0, 1, 10)
        assert dist.pmf[2] == pytest.approx(1.0)
        assert dist.remainder == 0.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            exact.fixed_k_return_distribution(1.0, 2, 10)
        with pytest.raises(DomainError):
            exact.fixed_k_return_distribution(2.0, -1, 10)
        with pytest.raises(OverflowError):
            exact.fixed_k_return_distribution(2.0, 2000, 10)


class TestMixtureTail:
    def test_matches_enumeration(self, params_half):
        grid = np.array([2.0, 4.0, 8.0, 16.0])
        table = exact.mixture_tail(params_half, grid, eps=1e-15)
        for t, s in zip([2, 4, 8, 16], table.survival):
            oracle = orc.enum_mixture_survival(Fraction(1, 2), Fraction(2),
                                               t, 16)
            assert s == pytest.approx(oracle, abs=1e-13)

    def test_matches_enumeration_quarter(self, params_quarter):
        grid = np.array([2.0, 6.0, 12.0])
        table = exact.mixture_tail(params_quarter, grid, eps=1e-15)
        for t, s in zip([2, 6, 12], table.survival):
            oracle = orc.enum_mixture_survival(Fraction(1, 4), Fraction(2),
                                               t, 12)
            assert s == pytest.approx(oracle, abs=1e-13)

    def test_truncation_bound_honest(self, params_half):
        grid = np.array([10.0, 100.0])
        loose = exact.mixture_tail(params_half, grid, eps=1e-6)
        tight = exact.mixture_tail(params_half, grid, eps=1e-14)
        assert loose.truncation_bound > tight.truncation_bound
        assert np.all(np.abs(loose.survival - tight.survival)
                      <= loose.truncation_bound)

    def test_range_shorthand(self, params_half):
        table = exact.mixture_tail(params_half, (10.0, 1000.0), eps=1e-10)
        assert table.t_grid[0] == pytest.approx(10.0)
        assert table.t_grid[-1] >= 1000.0
        assert table.provenance == exact.PROVENANCE_EXACT

    def test_non_integer_grid_times(self, params_half):
        # survival is a step function between integers
        t_int = exact.mixture_tail(params_half, np.array([8.0]), eps=1e-12)
        t_frac = exact.mixture_tail(params_half, np.array([8.7]), eps=1e-12)
        assert t_frac.survival[0] == pytest.approx(t_int.survival[0], rel=1e-12)


class TestLogGrid:
    def test_spacing_and_endpoints(self):
        g = exact.log_grid(10.0, 1e4, 2.0, 8)
        assert g[0] == pytest.approx(10.0)
        assert g[-1] >= 1e4
        ratios = g[1:] / g[:-1]
        assert np.allclose(ratios, 2.0 ** (1.0 / 8.0), rtol=1e-12)

    def test_points_per_period_count(self):
        g = exact.log_grid(1.0, 2.0 ** 3, 2.0, 16)
        assert len(g) == 3 * 16 + 1


class TestTailTable:
    def test_csv_round_trip(self, params_half, tmp_path):
        table = exact.mixture_tail(params_half, (10.0, 300.0), eps=1e-10)
        path = tmp_path / "tail.csv"
        table.to_csv(path)
        back = exact.TailTable.from_csv(path)
        assert back.provenance == table.provenance
        np.testing.assert_allclose(back.t_grid, table.t_grid, rtol=1e-15)
        np.testing.assert_allclose(back.survival, table.survival, rtol=1e-15)

    def test_csv_header(self, params_half, tmp_path):
        table = exact.mixture_tail(params_half, (10.0, 50.0), eps=1e-8)
        path = tmp_path / "tail.csv"
        table.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "t,survival,provenance,bound"

    def test_csv_full_precision(self, params_half, tmp_path):
        table = exact.mixture_tail(params_half, (10.0, 50.0), eps=1e-10)
        path = tmp_path / "tail.csv"
        table.to_csv(path)
        row = path.read_text().splitlines()[1].split(",")
        assert float(row[1]) == table.survival[0]  # 17 significant digits

    def test_rejects_increasing_survival(self):
        with pytest.raises(DomainError):
            exact.TailTable(np.array([1.0, 2.0]), np.array([0.1, 0.2]),
                            exact.PROVENANCE_EXACT)

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            exact.TailTable(np.array([1.0]), np.array([1.5]),
                            exact.PROVENANCE_EXACT)

    def test_simulated_requires_ci(self):
        with pytest.raises(DomainError):
            exact.TailTable(np.array([1.0]), np.array([0.5]),
                            exact.PROVENANCE_SIMULATED)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,p\n1,0.5\n")
        with pytest.raises(DomainError):
            exact.TailTable.from_csv(path)


class TestHitZeroMoments:
    @pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("k", [1, 2, 4, 7])
    def test_vs_linear_solve(self, beta, k):
        m, s = exact.hit_zero_time_moments(beta, k)
        mo, so = orc.solve_hit_zero_moments(beta, k)
        np.testing.assert_allclose(m[1:], mo, rtol=1e-10)
        np.testing.assert_allclose(s[1:], so, rtol=1e-7)


class TestTruncatedMoments:
    @pytest.mark.parametrize("k", [1, 2, 4, 6, 10])
    def test_first_moment_exact(self, k):
        dist = exact.fixed_k_return_distribution(2.0, k, 2000)
        val, bound = exact.truncated_moment(dist, 1)
        assert abs(val - tt.expected_excursion_fixed(2.0, k)) <= max(bound,
                                                                     1e-9)

    def test_second_moment_vs_enumeration(self):
        # short horizon where enumeration gives the exact truncated answer,
        # tail-corrected by the same closed forms under test elsewhere
        beta, k = 2.0, 2
        dist = exact.fixed_k_return_distribution(beta, k, 4000)
        val, bound = exact.truncated_moment(dist, 2)
        # brute-force second moment from a long, effectively exhaustive pmf
        long = exact.fixed_k_return_distribution(beta, k, 200_000)
        brute = math.fsum(t * t * p for t, p in enumerate(long.pmf))
        assert val == pytest.approx(brute, rel=1e-9)

    def test_mixture_moment_first(self, params_quarter):
        val, bound = exact.mixture_moment(params_quarter, 1, 100_000)
        closed = 2 * 0.25 / (1 - 0.5)
        assert abs(val - closed) <= max(bound, 1e-6)

    def test_mixture_moment_requires_convergence(self, params_half):
        with pytest.raises(DomainError):
            exact.mixture_moment(params_half, 1, 1000)  # alpha*beta = 1


@given(k=st.integers(1, 3), t=st.integers(2, 14))
@settings(max_examples=25, deadline=None)
def test_fixed_k_survival_matches_enumeration(k, t):
    dist = exact.fixed_k_return_distribution(2.0, k, 14)
    oracle = orc.enum_survival(Fraction(2), k, t, 14)
    assert dist.survival(t) == pytest.approx(float(oracle), abs=1e-12)

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tritstream.errors import DegenerateInterval, NonPositiveSigma
from tritstream.gaussian_stats import (
    Interval,
    degenerate_level,
    interval_prob,
    neg_log2_interval_prob,
    neg_log2_interval_prob_hp,
    prob_z,
    stats_z,
    truncated_mean,
    truncated_second_moment_about,
)

from oracles import oracle_mean, oracle_moment_about, oracle_prob

INF = math.inf

# Oracle grid: boundaries as multiples of sigma, spanning bulk and far tail.
SIGMAS = [0.05, 0.3, 1.0, 3.0, 8.0]
BOUND_MULTIPLES = [-20.0, -7.5, -2.0, -0.5, 0.0, 0.3, 1.0, 2.5, 6.0, 13.0, 20.0]


def grid_intervals(sigma):
    bounds = [m * sigma for m in BOUND_MULTIPLES]
    for i in range(len(bounds)):
        for j in range(i + 1, len(bounds)):
            yield bounds[i], bounds[j]


class TestIntervalProb:
    def test_total_probability(self):
        assert interval_prob(Interval(-INF, INF), 1.0) == 1.0

    def test_half_line_symmetry(self):
        assert interval_prob(Interval(0.0, INF), 3.0) == 0.5

    def test_central_interval_frozen_oracle_value(self):
        # oracle: Simpson rule on the density, 1e6 panels
        assert interval_prob(Interval(-0.5, 0.5), 1.0) == pytest.approx(
            0.3829249225480263, rel=1e-12
        )

    def test_against_simpson_oracle_on_grid(self):
        for sigma in SIGMAS:
            for lo, hi in grid_intervals(sigma):
                got = interval_prob(Interval(lo, hi), sigma)
                want = oracle_prob(lo, hi, sigma, panels=200_000)
                if want > 1e-300:
                    assert got == pytest.approx(want, rel=1e-8), (lo, hi, sigma)

    def test_deep_tail_does_not_collapse_to_zero(self):
        p = interval_prob(Interval(20.0, 30.0), 0.6)  # z in [33, 50]
        assert 0.0 < p < 1e-230

    def test_invalid_sigma(self):
        for bad in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(NonPositiveSigma):
                interval_prob(Interval(0.0, 1.0), bad)

    @given(
        lo=st.floats(-30, 29, allow_nan=False),
        width=st.floats(0.01, 20),
        cut=st.floats(0.01, 0.99),
        sigma=st.floats(0.05, 8),
    )
    @settings(max_examples=200, deadline=None)
    def test_splitting_additivity(self, lo, width, cut, sigma):
        hi = lo + width
        mid = lo + cut * width
        if not (lo < mid < hi):
            return
        whole = interval_prob(Interval(lo, hi), sigma)
        parts = interval_prob(Interval(lo, mid), sigma) + interval_prob(Interval(mid, hi), sigma)
        assert abs(whole - parts) <= 1e-12


class TestTruncatedMean:
    def test_symmetric_interval_is_exactly_zero(self):
        for a in (0.5, 1.5, 4.5, 13.5, 121.5):
            for sigma in SIGMAS:
                assert truncated_mean(Interval(-a, a), sigma, floor=0.0) == 0.0

    def test_bounded_frozen_oracle_value(self):
        # oracle: Simpson integration of x * density, 1e6 panels
        assert truncated_mean(Interval(0.5, 1.5), 1.0) == pytest.approx(
            0.9206446052220351, rel=1e-10
        )

    def test_tail_interval_exceeds_boundary_and_matches_mills_ratio(self):
        m = truncated_mean(Interval(4.5, INF), 1.0)
        assert m > 4.5
        assert m == pytest.approx(4.704319844827743, rel=1e-10)  # phi(4.5)/Phi_c(4.5)
        assert m == pytest.approx(oracle_mean(4.5, INF, 1.0), rel=1e-10)

    def test_against_simpson_oracle_on_grid(self):
        for sigma in SIGMAS:
            for lo, hi in grid_intervals(sigma):
                if oracle_prob(lo, hi, sigma, panels=50_000) < 1e-290:
                    continue
                got = truncated_mean(Interval(lo, hi), sigma, floor=0.0)
                want = oracle_mean(lo, hi, sigma, panels=200_000)
                assert got == pytest.approx(want, rel=1e-8, abs=1e-8 * sigma), (lo, hi, sigma)

    def test_mean_inside_interval_closure(self):
        for sigma in SIGMAS:
            for lo, hi in grid_intervals(sigma):
                try:
                    m = truncated_mean(Interval(lo, hi), sigma)
                except DegenerateInterval:
                    continue
                assert lo <= m <= hi

    def test_degenerate_raises_and_fallback_levels(self):
        with pytest.raises(DegenerateInterval):
            truncated_mean(Interval(100.0, 101.0), 1.0)
        assert degenerate_level(Interval(100.0, 101.0)) == 100.5
        assert degenerate_level(Interval(100.0, INF)) == 100.0
        assert degenerate_level(Interval(-INF, -100.0)) == -100.0
        assert degenerate_level(Interval(-INF, INF)) == 0.0


class TestSecondMoment:
    def test_full_line_recovers_variance(self):
        assert truncated_second_moment_about(Interval(-INF, INF), 2.0, 0.0) == pytest.approx(
            4.0, rel=1e-12
        )

    def test_central_frozen_oracle_value(self):
        # oracle: Simpson integration of x^2 * density, 1e6 panels
        got = truncated_second_moment_about(Interval(-0.5, 0.5), 1.0, 0.0)
        assert got == pytest.approx(0.08058915460081167, rel=1e-10)
        assert got < 1.0 / 12.0  # tighter than the uniform-on-unit-bin bound

    def test_mmse_optimality_of_conditional_mean(self):
        rng = np.random.default_rng(11)
        iv, sigma = Interval(1.5, 2.5), 1.0
        m = truncated_mean(iv, sigma)
        base = truncated_second_moment_about(iv, sigma, m)
        assert base < truncated_second_moment_about(iv, sigma, 2.0)
        for c in rng.normal(m, 1.0, size=100):
            assert base <= truncated_second_moment_about(iv, sigma, float(c))

    def test_against_simpson_oracle_on_grid(self):
        for sigma in SIGMAS:
            for lo, hi in grid_intervals(sigma):
                if oracle_prob(lo, hi, sigma, panels=50_000) < 1e-290:
                    continue
                m = truncated_mean(Interval(lo, hi), sigma, floor=0.0)
                c = m + 0.37 * sigma
                got = truncated_second_moment_about(Interval(lo, hi), sigma, c, floor=0.0)
                want = oracle_moment_about(lo, hi, sigma, c, panels=200_000)
                assert got == pytest.approx(want, rel=1e-8), (lo, hi, sigma)


class TestBitCosts:
    def test_matches_linear_domain_when_representable(self):
        for sigma in (0.3, 1.0, 8.0):
            for lo, hi in ((-0.5, 0.5), (1.5, 4.5), (6.0, INF)):
                p = interval_prob(Interval(lo, hi), sigma)
                assert neg_log2_interval_prob(Interval(lo, hi), sigma) == pytest.approx(
                    -math.log2(p), rel=1e-12
                )

    def test_finite_beyond_float64_underflow(self):
        bits = neg_log2_interval_prob(Interval(363.5, INF), 0.05)
        assert math.isfinite(bits) and bits > 3e7

    def test_agrees_with_hp_path(self):
        cases = [(-0.5, 0.5, 1.0), (12.5, 13.5, 1.0), (1.5, 2.5, 0.05), (363.5, INF, 0.05)]
        for lo, hi, sigma in cases:
            f = neg_log2_interval_prob(Interval(lo, hi), sigma)
            h = float(neg_log2_interval_prob_hp(Interval(lo, hi), sigma))
            assert f == pytest.approx(h, rel=1e-12)

    def test_hp_values_are_high_precision(self):
        with mpmath.workdps(45):
            h = neg_log2_interval_prob_hp(Interval(-0.5, 0.5), 1.0)
            ref = -mpmath.log(mpmath.erf(mpmath.mpf(1) / 2 / mpmath.sqrt(2))) / mpmath.log(2)
            assert abs(h - ref) < mpmath.mpf(10) ** -35


class TestArrayApi:
    def test_scalar_and_array_paths_are_identical(self):
        lo = np.array([-0.5, 1.5, -4.0, 20.0])
        hi = np.array([0.5, 4.5, -1.0, INF])
        p = prob_z(lo, hi)
        for i in range(lo.size):
            assert p[i] == interval_prob(Interval(lo[i], hi[i]), 1.0)

    def test_stats_nan_lanes_where_mass_underflows(self):
        p, m, v = stats_z(np.array([500.0]), np.array([501.0]))
        assert p[0] == 0.0
        assert not np.isfinite(m[0]) or not np.isfinite(v[0])

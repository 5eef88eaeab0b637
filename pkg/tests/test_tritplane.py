import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tritstream.errors import InvalidTrit
from tritstream.gaussian_stats import Interval
from tritstream.tritplane import (
    BinInterval,
    PlaneConfig,
    TritState,
    choose_num_planes,
    direct_bit_cost,
    direct_bit_cost_hp,
    encode_trits,
    encode_trits_array,
    initial_interval,
    partition,
    quantize,
    quantize_array,
    reconstruct,
    refine,
    trit_bit_costs,
    trit_bit_costs_hp,
)

from oracles import oracle_mean


def bounds(iv: BinInterval) -> tuple[float, float]:
    return iv.lo, iv.hi


class TestConfigAndRoot:
    def test_root_interval_for_three_planes(self):
        assert bounds(initial_interval(PlaneConfig(3))) == (-13.5, 13.5)

    def test_root_interval_single_plane(self):
        assert bounds(initial_interval(PlaneConfig(1))) == (-1.5, 1.5)

    def test_root_interval_five_planes(self):
        # (3^5 - 1)/2 = 121 representable magnitudes
        assert PlaneConfig(5).max_magnitude == 121
        assert bounds(initial_interval(PlaneConfig(5))) == (-121.5, 121.5)

    def test_plane_count_limits(self):
        with pytest.raises(ValueError):
            PlaneConfig(0)
        with pytest.raises(ValueError):
            PlaneConfig(39)


class TestPartition:
    def test_root_split(self):
        kids = partition(BinInterval(-27, 27))
        assert [bounds(k) for k in kids] == [(-13.5, -4.5), (-4.5, 4.5), (4.5, 13.5)]

    def test_middle_split(self):
        kids = partition(BinInterval(-9, 9))
        assert [bounds(k) for k in kids] == [(-4.5, -1.5), (-1.5, 1.5), (1.5, 4.5)]

    def test_leaf_level_split(self):
        kids = partition(BinInterval(3, 9))
        assert [bounds(k) for k in kids] == [(1.5, 2.5), (2.5, 3.5), (3.5, 4.5)]

    def test_unit_bin_not_partitionable(self):
        with pytest.raises(ValueError):
            partition(BinInterval(3, 5))

    @given(depth=st.integers(0, 7), path=st.lists(st.integers(0, 2), min_size=0, max_size=7))
    @settings(max_examples=200, deadline=None)
    def test_nesting_shrinks_width_exactly_threefold(self, depth, path):
        cfg = PlaneConfig(8)
        iv = initial_interval(cfg)
        for t in path[:depth]:
            kids = partition(iv)
            assert all(k.width2 * 3 == iv.width2 for k in kids)
            assert kids[0].lo2 == iv.lo2 and kids[2].hi2 == iv.hi2
            assert kids[0].hi2 == kids[1].lo2 and kids[1].hi2 == kids[2].lo2
            iv = kids[t]


class TestQuantize:
    def test_plain_rounding(self):
        assert quantize(2.3, PlaneConfig(3)) == 2

    def test_clamps_to_max_magnitude(self):
        assert quantize(200.0, PlaneConfig(3)) == 13
        assert quantize(-200.0, PlaneConfig(3)) == -13

    def test_half_away_from_zero(self):
        cfg = PlaneConfig(4)
        assert quantize(-4.5, cfg) == -5
        assert quantize(4.5, cfg) == 5
        assert quantize(0.5, cfg) == 1
        assert quantize(-0.5, cfg) == -1

    def test_array_matches_scalar(self):
        cfg = PlaneConfig(3)
        ys = np.array([2.3, -4.5, 200.0, -0.5, 0.49, 13.49, 13.5])
        got = quantize_array(ys, cfg)
        assert got.tolist() == [quantize(float(y), cfg) for y in ys]


class TestTritEncoding:
    def test_fig3_walkthrough_value(self):
        assert encode_trits(2, PlaneConfig(3)) == (1, 2, 0)

    def test_zero_stays_middle_at_every_depth(self):
        for num_planes in range(1, 9):
            assert encode_trits(0, PlaneConfig(num_planes)) == (1,) * num_planes

    def test_leftmost_value(self):
        # re-derived by an interval membership walk
        cfg = PlaneConfig(3)
        trits = encode_trits(-13, cfg)
        iv = initial_interval(cfg)
        walk = []
        for _ in range(3):
            kids = partition(iv)
            t = next(k for k in range(3) if kids[k].lo <= -13 < kids[k].hi)
            walk.append(t)
            iv = kids[t]
        assert trits == tuple(walk) == (0, 0, 0)

    def test_array_matches_scalar(self):
        cfg = PlaneConfig(4)
        qs = np.arange(-cfg.max_magnitude, cfg.max_magnitude + 1)
        mat = encode_trits_array(qs, cfg)
        for q, row in zip(qs.tolist(), mat.tolist()):
            assert tuple(row) == encode_trits(q, cfg)

    @given(num_planes=st.integers(1, 8), q=st.integers())
    @settings(max_examples=300, deadline=None)
    def test_membership_walk_inverts_encode(self, num_planes, q):
        cfg = PlaneConfig(num_planes)
        q = q % (2 * cfg.max_magnitude + 1) - cfg.max_magnitude
        state = TritState.root(cfg, sigma=1.0)
        for t in encode_trits(q, cfg):
            state = refine(state, t)
        assert state.interval.lo <= q < state.interval.hi
        assert state.interval.width2 == 2


class TestRefine:
    def test_fig3_first_refinement(self):
        cfg = PlaneConfig(3)
        state = refine(TritState.root(cfg, 1.0), 1)
        assert bounds(state.interval) == (-4.5, 4.5)
        assert state.depth == 1 and state.trits == (1,)

    def test_fig3_full_chain(self):
        cfg = PlaneConfig(3)
        state = TritState.root(cfg, 1.0)
        for t in (1, 2, 0):
            state = refine(state, t)
        assert bounds(state.interval) == (1.5, 2.5)

    def test_invalid_trit(self):
        with pytest.raises(InvalidTrit):
            refine(TritState.root(PlaneConfig(2), 1.0), 3)

    def test_depth_limit(self):
        cfg = PlaneConfig(1)
        state = refine(TritState.root(cfg, 1.0), 0)
        with pytest.raises(ValueError):
            refine(state, 0)


class TestReconstruct:
    def test_depth_zero_is_zero(self):
        for sigma in (0.05, 1.0, 8.0):
            assert reconstruct(TritState.root(PlaneConfig(4), sigma)) == 0.0

    def test_zero_element_is_exactly_zero_at_every_depth(self):
        cfg = PlaneConfig(6)
        for sigma in (0.05, 0.7, 8.0):
            state = TritState.root(cfg, sigma)
            for t in encode_trits(0, cfg):
                state = refine(state, t)
                assert reconstruct(state) == 0.0

    def test_unit_bin_matches_integration_oracle(self):
        cfg = PlaneConfig(3)
        state = TritState.root(cfg, 1.0)
        for t in (1, 2, 0):
            state = refine(state, t)
        assert reconstruct(state) == pytest.approx(1.8480833160858643, rel=1e-9)
        assert reconstruct(state) == pytest.approx(oracle_mean(1.5, 2.5, 1.0), rel=1e-9)

    def test_outer_bin_uses_tail_mass(self):
        cfg = PlaneConfig(2)
        state = TritState.root(cfg, 3.0)
        for t in encode_trits(4, cfg):
            state = refine(state, t)
        # nominal bin [3.5, 4.5) but the rightmost bin absorbs the tail
        assert state.interval.prob_interval(cfg) == Interval(3.5, math.inf)
        assert reconstruct(state) == pytest.approx(oracle_mean(3.5, math.inf, 3.0), rel=1e-9)

    def test_degenerate_falls_back_to_midpoint(self):
        cfg = PlaneConfig(5)
        state = TritState.root(cfg, 0.05)
        for t in encode_trits(100, cfg):
            state = refine(state, t)
        assert reconstruct(state) == 100.0  # midpoint of the [99.5, 100.5) bin

    def test_full_round_trip_requantizes(self):
        cfg = PlaneConfig(4)
        for sigma in (0.3, 1.0, 8.0):
            for q in range(-cfg.max_magnitude, cfg.max_magnitude + 1):
                state = TritState.root(cfg, sigma)
                for t in encode_trits(q, cfg):
                    state = refine(state, t)
                assert quantize(reconstruct(state), cfg) == q


class TestChooseNumPlanes:
    def test_covers_max_magnitude(self):
        assert choose_num_planes(np.array([0])) == 1
        assert choose_num_planes(np.array([1])) == 1
        assert choose_num_planes(np.array([2])) == 2
        assert choose_num_planes(np.array([13])) == 3
        assert choose_num_planes(np.array([14])) == 4

    def test_percentile_clipping(self):
        q = np.array([1] * 99 + [1000])
        assert choose_num_planes(q) == 7  # covers 1000
        assert choose_num_planes(q, clip_pct=95.0) == 1


class TestBitEquivalence:
    def test_float_path_small_grid(self):
        for sigma in (0.3, 1.0, 3.0, 8.0):
            for num_planes in (1, 2, 3, 4):
                cfg = PlaneConfig(num_planes)
                for q in range(-cfg.max_magnitude, cfg.max_magnitude + 1):
                    total = math.fsum(trit_bit_costs(q, sigma, cfg))
                    direct = direct_bit_cost(q, sigma, cfg)
                    assert abs(total - direct) <= 1e-9, (q, sigma, num_planes)

    def test_hp_path_extreme_corner(self):
        cfg = PlaneConfig(6)
        with mpmath.workdps(45):
            for q in (-364, -100, -1, 0, 2, 50, 364):
                total = sum(trit_bit_costs_hp(q, 0.05, cfg), mpmath.mpf(0))
                direct = direct_bit_cost_hp(q, 0.05, cfg)
                assert abs(total - direct) < mpmath.mpf("1e-9")

    def test_chain_rule_probability_product(self):
        # product of conditional trit probabilities == unit-bin probability
        from tritstream.gaussian_stats import interval_prob
        from tritstream.tritplane import _interval_walk

        cfg = PlaneConfig(4)
        for sigma in (0.3, 1.0, 8.0):
            for q in range(-40, 41):
                chain = _interval_walk(q, cfg)
                direct = interval_prob(chain[-1].prob_interval(cfg), sigma)
                if direct < 1e-290:  # below float64's working range
                    continue
                prod = 1.0
                for parent, child in zip(chain, chain[1:]):
                    prod *= interval_prob(child.prob_interval(cfg), sigma) / interval_prob(
                        parent.prob_interval(cfg), sigma
                    )
                assert prod == pytest.approx(direct, rel=1e-12)

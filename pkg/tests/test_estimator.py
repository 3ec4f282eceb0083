import math
from dataclasses import replace
from fractions import Fraction

import pytest

from core.engine import deal_random, make_params, random_playout, stream_rng
from core.errors import IncompleteTrace, ParamsError
from core.estimator import (
    MODE_NO_TRUMP,
    MODE_TRUMP,
    BranchingProfile,
    branching_profile,
    estimate_tree_size,
    knuth_estimate,
    leader_degree_product,
    paired_trump_nt_profile,
    params_for_mode,
)
from core.moments import MomentAccumulator, merge_all


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

# Published mean follower branching per bridge trick under uniform random play
BRIDGE_NO_TRUMP_SERIES = (3.28053, 3.31925, 3.35428, 3.38003, 3.38596, 3.36102, 3.29322,
                          3.16902, 2.97278, 2.68588, 2.28497, 1.73835, 1.00)
BRIDGE_TRUMP_SERIES = (3.28053, 3.30582, 3.33294, 3.35223, 3.35367, 3.32641, 3.25848,
                       3.13636, 2.94431, 2.66348, 2.26999, 1.73138, 1.00)


def sample_trace(params, seed=0):
    deal = deal_random(params, stream_rng(seed, 0))
    return random_playout(deal, params, 0, stream_rng(seed, 1))


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

class TestMomentAccumulator:
    def test_mean_and_variance_are_exact(self):
        acc = MomentAccumulator().extend([1, 2, 3, 4])
        assert acc.mean == Fraction(5, 2)
        assert acc.variance == Fraction(5, 3)
        assert (acc.min, acc.max) == (1, 4)

    def test_single_sample_has_no_spread(self):
        acc = MomentAccumulator().extend([7])
        assert acc.variance == 0
        assert acc.stderr() == 0

    def test_merge_is_order_independent(self):
        parts = [MomentAccumulator().extend(chunk) for chunk in ([1, 5], [2], [9, 3, 3])]
        assert merge_all(parts) == merge_all(reversed(parts))
        assert merge_all(parts) == MomentAccumulator().extend([1, 5, 2, 9, 3, 3])

    def test_huge_values_stay_exact(self):
        big = math.factorial(13) ** 4
        acc = MomentAccumulator().extend([big, big + 2])
        assert acc.mean == big + 1
        assert acc.variance == 2

    def test_empty_mean(self):
        with pytest.raises(ValueError):
            MomentAccumulator().mean


# ---------------------------------------------------------------------------
# Knuth estimate
# ---------------------------------------------------------------------------

class TestKnuthEstimate:
    def test_product_of_degrees(self, tiny):
        trace = sample_trace(tiny)
        assert knuth_estimate(trace) == math.prod(trace.degrees)

    def test_incomplete_trace(self, tiny):
        trace = sample_trace(tiny)
        with pytest.raises(IncompleteTrace):
            knuth_estimate(replace(trace, degrees=trace.degrees[:-1]))

    def test_bridge_samples_within_tree_bounds(self, bridge):
        for seed in range(20):
            x = knuth_estimate(sample_trace(bridge.with_trump(0), seed))
            assert math.factorial(13) <= x <= math.factorial(13) ** 4

    def test_leader_product_is_k_factorial(self, bridge):
        assert leader_degree_product(sample_trace(bridge, 4)) == math.factorial(13)

    def test_single_suit_is_degenerate(self, one_suit):
        for seed in range(5):
            assert knuth_estimate(sample_trace(one_suit, seed)) == math.factorial(3) ** 2


# ---------------------------------------------------------------------------
# Tree size estimation
# ---------------------------------------------------------------------------

class TestEstimateTreeSize:
    def test_single_suit_zero_variance(self, one_suit):
        report = estimate_tree_size(one_suit, 20, seed=1)
        assert report.mean == 36
        assert report.stderr == 0
        assert report.min == report.max == 36

    def test_single_card_hands(self):
        report = estimate_tree_size(make_params(4, 1, 4, 1), 10)
        assert report.mean == 1

    def test_needs_two_samples(self, tiny):
        with pytest.raises(ParamsError):
            estimate_tree_size(tiny, 1)

    def test_samples_within_bounds(self, tiny):
        report = estimate_tree_size(tiny, 300, seed=2)
        assert report.min >= math.factorial(3)
        assert report.max <= math.factorial(3) ** 4
        assert report.n == 300

    def test_reproducible(self, tiny):
        a = estimate_tree_size(tiny, 50, seed=8)
        b = estimate_tree_size(tiny, 50, seed=8)
        assert a.moments == b.moments

    def test_worker_count_does_not_matter(self, tiny):
        one = estimate_tree_size(tiny, 60, seed=5, workers=1)
        three = estimate_tree_size(tiny, 60, seed=5, workers=3)
        assert one.moments == three.moments

    def test_playouts_per_deal(self, tiny):
        report = estimate_tree_size(tiny, 10, seed=5, playouts_per_deal=3)
        assert report.n == 30

    def test_mode_follows_trump(self, tiny):
        report = estimate_tree_size(params_for_mode(tiny, MODE_TRUMP), 5)
        assert report.mode == MODE_TRUMP
        assert report.params.trump == 0


# ---------------------------------------------------------------------------
# Branching profile
# ---------------------------------------------------------------------------

class TestBranchingProfile:
    def test_last_trick_is_forced(self, tiny):
        profile = branching_profile(tiny, 100, seed=1)
        assert profile.mean(3) == 1
        assert profile.stderr(3) == 0

    def test_seat_means_average_to_trick_mean(self, tiny):
        profile = branching_profile(tiny, 100, seed=2)
        for trick in (1, 2, 3):
            seats = [profile.seat_mean(trick, offset) for offset in (1, 2, 3)]
            assert sum(seats) / 3 == profile.mean(trick)

    def test_leader_degree(self, bridge):
        profile = BranchingProfile.empty(bridge)
        assert [profile.leader_degree(t) for t in (1, 13)] == [13, 1]

    def test_rows(self, tiny):
        profile = branching_profile(tiny, 40, seed=3)
        rows = profile.rows()
        assert [row[0] for row in rows] == [1, 2, 3]
        assert all(row[3] == 40 for row in rows)

    def test_worker_count_does_not_matter(self, tiny):
        one = branching_profile(tiny, 50, seed=4, workers=1)
        two = branching_profile(tiny, 50, seed=4, workers=2)
        assert one.tricks == two.tricks
        assert one.seats == two.seats

    def test_bridge_first_trick(self, bridge):
        profile = branching_profile(bridge, 3000, seed=7)
        assert float(profile.mean(1)) == pytest.approx(3.28, abs=0.1)
        assert profile.mean(13) == 1

    def test_rejects_empty_run(self, tiny):
        with pytest.raises(ParamsError):
            branching_profile(tiny, 0)

    def test_stderr_shrinks_with_games(self, tiny):
        small = branching_profile(tiny, 2000, seed=11)
        large = branching_profile(tiny, 4000, seed=11)
        for trick in (1, 2):
            ratio = float(small.stderr(trick)) / float(large.stderr(trick))
            assert ratio == pytest.approx(math.sqrt(2), rel=0.2)


class TestPairedProfile:
    def test_first_trick_identical(self, tiny):
        nt, trump = paired_trump_nt_profile(tiny, 200, seed=6)
        assert nt.mode == MODE_NO_TRUMP
        assert trump.mode == MODE_TRUMP
        assert nt.tricks[0] == trump.tricks[0]

    def test_no_trump_half_matches_single_run(self, tiny):
        nt, _ = paired_trump_nt_profile(tiny, 80, seed=9)
        single = branching_profile(params_for_mode(tiny, MODE_NO_TRUMP), 80, seed=9)
        assert nt.tricks == single.tricks

    def test_bridge_first_trick_equal(self, bridge):
        nt, trump = paired_trump_nt_profile(bridge, 200, seed=1, workers=2)
        assert nt.mean(1) == trump.mean(1)
        assert nt.mean(13) == trump.mean(13) == 1

    @pytest.mark.slow
    def test_bridge_matches_published_series(self, bridge):
        nt, trump = paired_trump_nt_profile(bridge, 200_000, seed=2024, workers=4)
        for trick, (nt_mean, trump_mean) in enumerate(zip(BRIDGE_NO_TRUMP_SERIES, BRIDGE_TRUMP_SERIES), 1):
            assert float(nt.mean(trick)) == pytest.approx(nt_mean, abs=0.01)
            assert float(trump.mean(trick)) == pytest.approx(trump_mean, abs=0.01)

    def test_unknown_mode(self, tiny):
        with pytest.raises(ParamsError):
            params_for_mode(tiny, "misere")

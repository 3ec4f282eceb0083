import math

import pytest

from core.bounds import frank_lower_bound, state_space_upper_bound, tree_size_upper_bound
from core.engine import (
    Card,
    Deal,
    apply_move,
    deal_random,
    enumerate_deals,
    initial_state,
    legal_moves,
    make_params,
    stream_rng,
)
from core.errors import GuardExceeded
from core.oracle import (
    EnumerationGuard,
    count_leaves,
    count_reachable_states,
    exact_estimator_moments,
    verify_unbiasedness,
)


# ---------------------------------------------------------------------------
# Leaf counting
# ---------------------------------------------------------------------------

class TestCountLeaves:
    def test_single_card_hands(self):
        params = make_params(4, 1, 4, 1)
        deal = deal_random(params, stream_rng(0, 0))
        assert count_leaves(deal) == 1

    @pytest.mark.parametrize("dims", [(2, 3, 1, 6), (3, 2, 1, 6), (4, 2, 1, 8)])
    def test_single_suit_is_the_upper_bound(self, dims):
        params = make_params(*dims)
        deal = deal_random(params, stream_rng(1, 0))
        assert count_leaves(deal) == math.factorial(params.cards_per_hand) ** params.hands

    def test_crossed_deal_by_hand(self, crossed_deal):
        # lead the high card: 1 line; lead the low card: 1 line; both end in one forced trick
        assert count_leaves(crossed_deal) == 2

    def test_sandwich_over_a_whole_family(self):
        params = make_params(2, 3, 2, 3)
        for deal in enumerate_deals(params):
            leaves = count_leaves(deal)
            assert frank_lower_bound(deal, params) <= leaves <= tree_size_upper_bound(params)

    def test_sandwich_on_random_tiny_deals(self, tiny):
        for seed in range(10):
            deal = deal_random(tiny, stream_rng(seed, 0))
            for params in (tiny, tiny.with_trump(0)):
                leaves = count_leaves(deal, params)
                assert frank_lower_bound(deal, params) <= leaves <= tree_size_upper_bound(params)

    def test_every_leader(self, tiny):
        deal = deal_random(tiny, stream_rng(2, 0))
        for leader in range(4):
            assert count_leaves(deal, leader0=leader) >= frank_lower_bound(deal, tiny)

    def test_guard_precheck(self, bridge):
        deal = deal_random(bridge, stream_rng(0, 0))
        with pytest.raises(GuardExceeded) as info:
            count_leaves(deal)
        assert info.value.limit == 10**8

    def test_state_guard(self, tiny):
        deal = deal_random(tiny, stream_rng(0, 0))
        with pytest.raises(GuardExceeded):
            count_leaves(deal, guard=EnumerationGuard(max_states=3))


# ---------------------------------------------------------------------------
# Reachable states
# ---------------------------------------------------------------------------

class TestReachableStates:
    def test_two_hands_one_card(self):
        params = make_params(2, 1, 1, 2)
        counts = count_reachable_states(params, include_scores=False)
        assert counts.deals == 2
        # each deal: initial, after the lead, terminal
        assert counts.max_per_deal == 3
        # terminal leaders differ between the two deals
        assert counts.family_union == 6
        assert counts.max_per_deal <= state_space_upper_bound(params, with_scores=False) == 4

    @pytest.mark.parametrize("dims", [(2, 1, 2, 1), (2, 2, 2, 2), (2, 2, 1, 4), (2, 3, 2, 3), (2, 3, 1, 6)])
    def test_per_deal_counts_within_bounds(self, dims):
        params = make_params(*dims)
        scored = count_reachable_states(params, include_scores=True)
        scoreless = count_reachable_states(params, include_scores=False)
        assert scored.max_per_deal <= state_space_upper_bound(params, with_scores=True)
        assert scoreless.max_per_deal <= state_space_upper_bound(params, with_scores=False)
        assert scoreless.max_per_deal <= scored.max_per_deal
        assert scoreless.family_union <= scored.family_union

    @pytest.mark.slow
    @pytest.mark.parametrize("dims", [(4, 2, 2, 4), (4, 2, 4, 2)])
    def test_four_hands_within_bounds(self, dims):
        params = make_params(*dims)
        for include_scores in (True, False):
            counts = count_reachable_states(params, include_scores)
            assert counts.max_per_deal <= state_space_upper_bound(params, include_scores)

    def test_guard(self, tiny):
        with pytest.raises(GuardExceeded):
            count_reachable_states(tiny, guard=EnumerationGuard(max_states=50))


# ---------------------------------------------------------------------------
# Estimator checks
# ---------------------------------------------------------------------------

class TestExactEstimatorMoments:
    def test_mean_is_the_leaf_count(self, tiny):
        for seed in range(5):
            deal = deal_random(tiny, stream_rng(seed, 0))
            moments = exact_estimator_moments(deal, tiny.with_trump(0))
            assert moments.mean == count_leaves(deal, tiny.with_trump(0))
            assert moments.variance >= 0

    def test_degenerate_variance(self, one_suit):
        deal = deal_random(one_suit, stream_rng(0, 0))
        moments = exact_estimator_moments(deal)
        assert moments.mean == 36
        assert moments.variance == 0

    def test_crossed_deal(self, crossed_deal):
        # two leaves, each reached with probability 1/2 and estimate 2
        moments = exact_estimator_moments(crossed_deal)
        assert moments.leaves == 2
        assert moments.second_moment == 4
        assert moments.variance == 0

    def test_second_moment_matches_leaf_walk(self, tiny):
        def products(state, product):
            if state.is_terminal:
                yield product
                return
            moves = legal_moves(state)
            for card in moves:
                yield from products(apply_move(state, card), product * len(moves))

        for seed in range(3):
            deal = deal_random(tiny, stream_rng(seed, 0))
            params = tiny.with_trump(1)
            moments = exact_estimator_moments(deal, params)
            assert moments.second_moment == sum(products(initial_state(deal, params), 1))

    def test_seven_card_single_suit(self):
        # 5040^2 leaves, but few distinct positions
        params = make_params(2, 7, 1, 14)
        moments = exact_estimator_moments(deal_random(params, stream_rng(0, 0)))
        assert moments.leaves == math.factorial(7) ** 2
        assert moments.variance == 0


class TestVerifyUnbiasedness:
    def test_forced_play(self):
        params = make_params(4, 1, 4, 1)
        report = verify_unbiasedness(deal_random(params, stream_rng(0, 0)), n_playouts=10)
        assert report.exact_leaves == 1
        assert report.sample_mean == 1
        assert report.stderr == 0
        assert report.z_score == 0
        assert report.passed

    def test_single_suit(self, one_suit):
        report = verify_unbiasedness(deal_random(one_suit, stream_rng(0, 0)), n_playouts=50)
        assert report.sample_mean == report.exact_leaves == 36
        assert report.z_score == 0

    def test_reproducible(self, tiny):
        deal = deal_random(tiny, stream_rng(4, 0))
        a = verify_unbiasedness(deal, n_playouts=200, seed=2)
        b = verify_unbiasedness(deal, n_playouts=200, seed=2)
        assert a.moments == b.moments

    def test_random_tiny_deals(self, tiny):
        passed = 0
        for seed in range(6):
            deal = deal_random(tiny, stream_rng(seed, 0, salt=1))
            passed += verify_unbiasedness(deal, n_playouts=3000, seed=seed).passed
        assert passed >= 5

    @pytest.mark.slow
    def test_twenty_deals_full_sample(self, tiny):
        passed = 0
        for seed in range(20):
            deal = deal_random(tiny, stream_rng(seed, 0, salt=1))
            passed += verify_unbiasedness(deal, tiny, n_playouts=10**5, seed=seed).passed
        assert passed >= 19

    def test_guard(self, bridge):
        with pytest.raises(GuardExceeded):
            verify_unbiasedness(deal_random(bridge, stream_rng(0, 0)), n_playouts=2)


def test_hand_built_deal_in_trump():
    params = make_params(2, 2, 2, 2, trump=1)
    deal = Deal.from_hands(params, [[Card(0, 1), Card(0, 0)], [Card(1, 1), Card(1, 0)]])
    # hand 1 is void in the led suit at both tricks and chooses among both trumps
    assert count_leaves(deal) == 2 * 2 * 1 * 1

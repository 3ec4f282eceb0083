import math
from fractions import Fraction

import pytest

from core.bounds import (
    ShapeTable,
    bound_table,
    count_shape_tables,
    deal_count,
    expected_frank_bound_closed_form,
    expected_frank_bound_exact,
    expected_frank_bound_mc,
    f,
    f_p,
    frank_lower_bound,
    log10_summary,
    min_frank_bound,
    most_balanced_shape,
    shape_of,
    state_space_upper_bound,
    tree_size_upper_bound,
    tree_size_weak_lower_bound,
)
from core.engine import enumerate_deals, make_params
from core.errors import BadShape, OutOfRange, TooLarge
from core.numbers import to_scientific
from storage.deal_files import parse_deal_text


BALANCED_FRANK = 722204136308736


def brute_force_expected_frank(params):
    total = 0
    count = 0
    for deal in enumerate_deals(params):
        total += frank_lower_bound(deal, params)
        count += 1
    return Fraction(total, count)


# ---------------------------------------------------------------------------
# Position counts
# ---------------------------------------------------------------------------

class TestPositionCounts:
    def test_f_zero_is_one(self, bridge):
        assert f(bridge, 0) == 1
        assert f_p(bridge, 0) == bridge.cards_per_hand + 1

    def test_f_full_hands(self, bridge):
        # C(13,13)^4 * (1 + 4 * (13 + 13^2 + 13^3))
        assert f(bridge, 13) == 9517
        assert f_p(bridge, 13) == 9517

    def test_f_matches_formula(self, tiny):
        for k in range(1, 4):
            trick = 1 + 4 * (k + k ** 2 + k ** 3)
            assert f(tiny, k) == math.comb(3, k) ** 4 * trick
            assert f_p(tiny, k) == (3 - k + 1) * f(tiny, k)

    def test_k_out_of_range(self, bridge):
        with pytest.raises(OutOfRange):
            f(bridge, 14)
        with pytest.raises(OutOfRange):
            f_p(bridge, -1)

    def test_bridge_state_space_magnitudes(self, bridge):
        assert to_scientific(state_space_upper_bound(bridge, with_scores=True), 1) == "2e+17"
        assert to_scientific(state_space_upper_bound(bridge, with_scores=False), 1) == "3e+16"

    def test_scored_bound_dominates(self, tiny):
        assert state_space_upper_bound(tiny, False) < state_space_upper_bound(tiny, True)

    def test_bound_table_rows(self, tiny):
        rows = bound_table(tiny)
        assert [k for k, _, _ in rows] == [0, 1, 2, 3]
        assert sum(fk for _, fk, _ in rows) == state_space_upper_bound(tiny, False)


# ---------------------------------------------------------------------------
# Tree size
# ---------------------------------------------------------------------------

class TestTreeSize:
    def test_bridge_upper_bound(self, bridge):
        assert tree_size_upper_bound(bridge) == math.factorial(13) ** 4
        assert to_scientific(tree_size_upper_bound(bridge), 2) == "1.5e+39"

    def test_bridge_weak_lower_bound(self, bridge):
        assert tree_size_weak_lower_bound(bridge) == 6227020800

    def test_log10_summary(self, bridge):
        summary = log10_summary(bridge)
        assert summary["tree_size_upper"] == pytest.approx(39.177, abs=1e-3)
        assert summary["state_space_with_scores"] == pytest.approx(17.36, abs=0.01)


# ---------------------------------------------------------------------------
# Frank bound
# ---------------------------------------------------------------------------

class TestFrankBound:
    def test_balanced_bridge_deal(self, bridge, balanced_bridge_text):
        deal = parse_deal_text(balanced_bridge_text, bridge)
        assert frank_lower_bound(deal, bridge) == BALANCED_FRANK
        assert to_scientific(BALANCED_FRANK, 2) == "7.2e+14"

    def test_shape_of_deal(self, bridge, balanced_bridge_text):
        shape = shape_of(parse_deal_text(balanced_bridge_text, bridge))
        assert shape.rows[0] == (4, 3, 3, 3)
        assert shape.rows[3] == (3, 3, 3, 4)
        assert shape.hand_pattern(2) == "4-3-3-3"

    def test_most_balanced_bridge_shape(self, bridge):
        shape = most_balanced_shape(bridge)
        assert all(shape.hand_pattern(h) == "4-3-3-3" for h in range(4))
        assert min_frank_bound(bridge) == BALANCED_FRANK

    def test_shape_table_validation(self, two_by_two):
        with pytest.raises(BadShape):
            ShapeTable.of([[2, 0], [2, 0]], two_by_two)
        with pytest.raises(BadShape):
            ShapeTable.of([[2, 0, 0], [0, 2, 0]], two_by_two)

    def test_shape_table_bound(self, two_by_two):
        assert frank_lower_bound(ShapeTable.of([[2, 0], [0, 2]], two_by_two), two_by_two) == 4

    @pytest.mark.parametrize("dims", [(2, 3, 2, 3), (3, 2, 2, 3), (2, 2, 2, 2), (2, 4, 2, 4)])
    def test_balanced_shape_is_the_minimum(self, dims):
        params = make_params(*dims)
        smallest = min(frank_lower_bound(deal, params) for deal in enumerate_deals(params))
        assert min_frank_bound(params) == smallest


# ---------------------------------------------------------------------------
# Expected Frank bound
# ---------------------------------------------------------------------------

class TestExpectedFrank:
    def test_two_by_two_by_hand(self, two_by_two):
        # 2 one-suited deals with bound 4, 4 mixed deals with bound 1
        assert count_shape_tables(two_by_two) == 3
        assert expected_frank_bound_exact(two_by_two) == 2
        assert expected_frank_bound_closed_form(two_by_two) == 2

    @pytest.mark.parametrize("dims", [(2, 3, 2, 3), (3, 2, 2, 3), (2, 4, 2, 4), (2, 3, 3, 2)])
    def test_exact_matches_brute_force(self, dims):
        params = make_params(*dims)
        expected = brute_force_expected_frank(params)
        assert expected_frank_bound_exact(params) == expected
        assert expected_frank_bound_closed_form(params) == expected

    def test_deal_count(self, bridge):
        assert deal_count(bridge) == 53644737765488792839237440000

    def test_shape_cap(self, bridge):
        with pytest.raises(TooLarge):
            expected_frank_bound_exact(bridge, max_shapes=100)

    def test_monte_carlo_is_reproducible(self, tiny):
        a = expected_frank_bound_mc(tiny, 200, seed=11)
        b = expected_frank_bound_mc(tiny, 200, seed=11)
        assert a.moments == b.moments
        assert a.moments.n == 200

    def test_monte_carlo_near_exact(self, tiny):
        exact = expected_frank_bound_exact(tiny)
        estimate = expected_frank_bound_mc(tiny, 4000, seed=3)
        stderr = float(estimate.moments.stderr())
        assert abs(float(estimate.mean) - float(exact)) <= 4 * stderr

    @pytest.mark.slow
    def test_monte_carlo_over_many_seeds(self, tiny):
        exact = float(expected_frank_bound_exact(tiny))
        seeds = range(100)
        within = 0
        for seed in seeds:
            estimate = expected_frank_bound_mc(tiny, 2000, seed=seed)
            within += abs(float(estimate.mean) - exact) <= 3 * float(estimate.moments.stderr())
        assert within >= 0.99 * len(seeds)

    def test_monte_carlo_needs_deals(self, tiny):
        with pytest.raises(ValueError):
            expected_frank_bound_mc(tiny, 0, seed=1)

    @pytest.mark.slow
    def test_bridge_expectation(self, bridge):
        exact = expected_frank_bound_exact(bridge)
        assert to_scientific(exact, 3) == "1.05e+18"
        assert expected_frank_bound_closed_form(bridge) == exact

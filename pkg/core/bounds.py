"""
Complexity Bounds Module

Closed-form bounds on the state space and game tree of double-dummy play, computed in
exact integer arithmetic:

- f(k), f_p(k) and their sums: upper bounds on the number of positions,
- K!^R and K!: upper and weak lower bounds on the number of complete play lines,
- the per-deal product of suit-length factorials (Frank's lower bound) and its
  expectation over uniformly random deals, exact and by Monte Carlo.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple, Union

from core.engine import BRIDGE, Deal, GameParams, deal_random, stream_rng
from core.errors import BadShape, OutOfRange, TooLarge
from core.moments import MomentAccumulator
from core.numbers import log10

logger = logging.getLogger(__name__)

# --- Configurable limits ---
DEFAULT_MAX_SHAPES = 10**7


# === POSITION COUNTS ===

def _check_k(params: GameParams, k: int) -> None:
    if not 0 <= k <= params.cards_per_hand:
        raise OutOfRange(f"k={k} is not in [0, {params.cards_per_hand}]")


def f(params: GameParams, k: int) -> int:
    """
    Upper bound on card distributions where one hand holds k cards and every other k or
    k-1 (the latter having contributed to the current trick).

    C(K,k)^R counts the k-subsets of each hand; 1 + R * sum_{h=1}^{R-1} k^h counts the
    empty trick plus the choice of leader and contributed cards for h cards in the
    trick. f(0) = 1.

    Raises:
        OutOfRange: If k is not in [0, K].
    """
    _check_k(params, k)
    if k == 0:
        return 1
    r = params.hands
    trick_choices = 1 + r * sum(k ** h for h in range(1, r))
    return math.comb(params.cards_per_hand, k) ** r * trick_choices


def f_p(params: GameParams, k: int) -> int:
    """f(k) times the K-k+1 possible splits of the tricks already won."""
    _check_k(params, k)
    return (params.cards_per_hand - k + 1) * f(params, k)


def state_space_upper_bound(params: GameParams, with_scores: bool = True) -> int:
    """Sum of f_p(k) (with_scores) or of f(k) over k = 0..K."""
    term = f_p if with_scores else f
    return sum(term(params, k) for k in range(params.cards_per_hand + 1))


# === TREE SIZE ===

def tree_size_upper_bound(params: GameParams) -> int:
    """K!^R: every hand free to play any card at every turn."""
    return math.factorial(params.cards_per_hand) ** params.hands


def tree_size_weak_lower_bound(params: GameParams) -> int:
    """K!: only the leader ever has a choice."""
    return math.factorial(params.cards_per_hand)


# === SHAPES ===

@dataclass(frozen=True)
class ShapeTable:
    """
    s[r][k] = number of cards of suit k held by hand r.

    Rows sum to K and columns to NR.
    """
    rows: Tuple[Tuple[int, ...], ...]

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], params: GameParams) -> "ShapeTable":
        table = cls(tuple(tuple(int(x) for x in row) for row in rows))
        table.validate(params)
        return table

    def validate(self, params: GameParams) -> None:
        if len(self.rows) != params.hands or any(len(row) != params.num_suits for row in self.rows):
            raise BadShape(f"shape table must be {params.hands} x {params.num_suits}")
        if any(x < 0 for row in self.rows for x in row):
            raise BadShape("shape entries must be nonnegative")
        if any(sum(row) != params.cards_per_hand for row in self.rows):
            raise BadShape(f"every hand must hold {params.cards_per_hand} cards")
        for suit in range(params.num_suits):
            if sum(row[suit] for row in self.rows) != params.ranks_per_suit:
                raise BadShape(f"suit {suit} must total {params.ranks_per_suit} cards")

    def hand_pattern(self, hand: int) -> str:
        """Suit lengths of one hand, longest first, e.g. '4-3-3-3'."""
        return "-".join(str(x) for x in sorted(self.rows[hand], reverse=True))


def shape_of(deal: Deal) -> ShapeTable:
    params = deal.params
    rows = []
    for hand in deal.hands:
        counts = [0] * params.num_suits
        for card in hand:
            counts[card.suit] += 1
        rows.append(tuple(counts))
    return ShapeTable(tuple(rows))


def hand_frank_factor(suit_lengths: Sequence[int]) -> int:
    """Plays available to a hand that never leads and always follows suit."""
    return math.prod(math.factorial(x) for x in suit_lengths)


def frank_lower_bound(deal_or_shape: Union[Deal, ShapeTable], params: GameParams) -> int:
    """
    Product over hands and suits of s_rk!: the number of play lines in which no hand
    ever has more freedom than following suit.

    Raises:
        BadShape: If the shape table does not fit the parameters.
    """
    if isinstance(deal_or_shape, Deal):
        shape = shape_of(deal_or_shape)
    else:
        shape = deal_or_shape
    shape.validate(params)
    return math.prod(hand_frank_factor(row) for row in shape.rows)


def most_balanced_shape(params: GameParams) -> ShapeTable:
    """
    A shape table where every hand's suit lengths differ by at most one, placed
    cyclically so column sums are NR (4-3-3-3 in every bridge hand).
    """
    r, ns, k = params.hands, params.num_suits, params.cards_per_hand
    # card j of the flattened sequence (hand-major) goes to suit j mod NS
    rows = []
    for hand in range(r):
        counts = [0] * ns
        for j in range(hand * k, (hand + 1) * k):
            counts[j % ns] += 1
        rows.append(counts)
    return ShapeTable.of(rows, params)


def min_frank_bound(params: GameParams) -> int:
    return frank_lower_bound(most_balanced_shape(params), params)


# === EXPECTED FRANK BOUND ===

def _compositions(total: int, caps: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
    """Vectors with 0 <= x_i <= caps[i] summing to total."""
    if len(caps) == 1:
        if total <= caps[0]:
            yield (total,)
        return
    room = sum(caps[1:])
    for first in range(max(0, total - room), min(total, caps[0]) + 1):
        for rest in _compositions(total - first, caps[1:]):
            yield (first,) + rest


def deal_count(params: GameParams) -> int:
    """Number of distinct deals: (RK)! / (K!)^R."""
    return math.factorial(params.deck_size) // math.factorial(params.cards_per_hand) ** params.hands


class _ShapeEnumerator:
    """Hand-by-hand shape recursion memoized on the remaining suit counts."""

    def __init__(self, params: GameParams, max_shapes: int):
        self.params = params
        self.max_shapes = max_shapes
        self.visited = 0
        self.memo: Dict[Tuple[int, Tuple[int, ...]], int] = {}

    def weighted_sum(self, hand: int, remaining: Tuple[int, ...]) -> int:
        """Sum over shape completions of prod_k C(rem_k, s_k) * s_k!, i.e. falling factorials."""
        if hand == self.params.hands:
            return 1
        key = (hand, remaining)
        if key in self.memo:
            return self.memo[key]
        total = 0
        for shape in _compositions(self.params.cards_per_hand, remaining):
            self.visited += 1
            if self.visited > self.max_shapes:
                raise TooLarge(
                    f"shape enumeration exceeded {self.max_shapes} shapes", limit=self.max_shapes
                )
            weight = math.prod(math.perm(rem, s) for rem, s in zip(remaining, shape))
            rest = tuple(rem - s for rem, s in zip(remaining, shape))
            total += weight * self.weighted_sum(hand + 1, rest)
        self.memo[key] = total
        return total


def expected_frank_bound_exact(params: GameParams, max_shapes: int = DEFAULT_MAX_SHAPES) -> Fraction:
    """
    Exact expectation of frank_lower_bound over uniformly random deals.

    Each shape table s occurs in prod_k NR! / prod_r s_rk! deals, so the sum of the
    bound over all deals is the sum, over hand-by-hand shape assignments, of
    prod_r prod_k C(remaining_k, s_rk) * s_rk!; dividing by the deal count gives the
    expectation.

    Raises:
        TooLarge: If more than max_shapes hand shapes would be visited.
    """
    enumerator = _ShapeEnumerator(params, max_shapes)
    start = tuple([params.ranks_per_suit] * params.num_suits)
    total = enumerator.weighted_sum(0, start)
    logger.info("Expected Frank bound: %d hand shapes visited, %d memo entries",
                enumerator.visited, len(enumerator.memo))
    return Fraction(total, deal_count(params))


def count_shape_tables(params: GameParams, max_shapes: int = DEFAULT_MAX_SHAPES) -> int:
    """Number of R x NS tables with row sums K and column sums NR."""
    visited = 0

    @lru_cache(maxsize=None)
    def count(hand: int, remaining: Tuple[int, ...]) -> int:
        nonlocal visited
        if hand == params.hands:
            return 1
        total = 0
        for shape in _compositions(params.cards_per_hand, remaining):
            visited += 1
            if visited > max_shapes:
                raise TooLarge(f"shape enumeration exceeded {max_shapes} shapes", limit=max_shapes)
            total += count(hand + 1, tuple(rem - s for rem, s in zip(remaining, shape)))
        return total

    return count(0, tuple([params.ranks_per_suit] * params.num_suits))


def expected_frank_bound_closed_form(params: GameParams, max_shapes: int = DEFAULT_MAX_SHAPES) -> Fraction:
    """T * (NR!)^NS * (K!)^R / (RK)! with T the number of shape tables."""
    tables = count_shape_tables(params, max_shapes)
    numerator = (tables * math.factorial(params.ranks_per_suit) ** params.num_suits
                 * math.factorial(params.cards_per_hand) ** params.hands)
    return Fraction(numerator, math.factorial(params.deck_size))


@dataclass(frozen=True)
class FrankEstimate:
    """Monte Carlo estimate of the expected Frank bound."""
    moments: MomentAccumulator
    seed: int

    @property
    def mean(self) -> Fraction:
        return self.moments.mean


def expected_frank_bound_mc(params: GameParams, n_deals: int, seed: int) -> FrankEstimate:
    """
    Sample mean of frank_lower_bound over n_deals uniform deals.

    Deal i is drawn from the stream SeedSequence([seed, i]), so the estimate depends only
    on (params, n_deals, seed).
    """
    if n_deals < 1:
        raise ValueError("n_deals must be at least 1")
    acc = MomentAccumulator()
    for index in range(n_deals):
        rng = stream_rng(seed, index)
        acc.add(frank_lower_bound(deal_random(params, rng), params))
    return FrankEstimate(acc, seed)


# === SUMMARY ===

def bound_table(params: GameParams) -> List[Tuple[int, int, int]]:
    """Rows (k, f(k), f_p(k)) for k = 0..K."""
    return [(k, f(params, k), f_p(params, k)) for k in range(params.cards_per_hand + 1)]


def log10_summary(params: GameParams) -> Dict[str, float]:
    """log10 of the headline bounds, the scale on which games are usually compared."""
    return {
        "state_space_with_scores": log10(state_space_upper_bound(params, True)),
        "state_space_without_scores": log10(state_space_upper_bound(params, False)),
        "tree_size_upper": log10(tree_size_upper_bound(params)),
        "tree_size_weak_lower": log10(tree_size_weak_lower_bound(params)),
        "frank_minimum": log10(min_frank_bound(params)),
    }


if __name__ == "__main__":
    from core.numbers import to_scientific

    print("Bridge bounds:")
    print(f"  sum f_p(k)  = {to_scientific(state_space_upper_bound(BRIDGE, True), 2)}")
    print(f"  sum f(k)    = {to_scientific(state_space_upper_bound(BRIDGE, False), 2)}")
    print(f"  K!^R        = {to_scientific(tree_size_upper_bound(BRIDGE), 2)}")
    print(f"  K!          = {tree_size_weak_lower_bound(BRIDGE)}")
    print(f"  4-3-3-3     = {min_frank_bound(BRIDGE)}")

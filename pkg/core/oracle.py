"""
Enumeration Oracle Module

Exhaustive counting on tiny parametrizations, used to check the closed-form bounds and
the Monte Carlo estimators:

- count_leaves: exact number of complete play lines of one deal,
- count_reachable_states: distinct positions per deal and across the deal family,
- exact_estimator_moments: exact mean and variance of the playout-product estimator,
- verify_unbiasedness: z-score of a sampled estimator mean against the exact count.
"""

import logging
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Dict, Optional, Set, Tuple

from core.bounds import tree_size_upper_bound
from core.engine import (
    Deal,
    GameParams,
    PlayState,
    apply_move,
    enumerate_deals,
    initial_state,
    legal_moves,
    random_playout,
    stream_rng,
)
from core.errors import GuardExceeded
from core.estimator import knuth_estimate
from core.moments import MomentAccumulator
from core.numbers import exact_sqrt

logger = logging.getLogger(__name__)

# --- Default guards ---
DEFAULT_MAX_LEAVES = 10**8
DEFAULT_MAX_STATES = 10**7

Z_THRESHOLD = 3


@dataclass(frozen=True)
class EnumerationGuard:
    """Caps for exhaustive enumeration; exceeding one raises GuardExceeded."""
    max_leaves: int = DEFAULT_MAX_LEAVES
    max_states: int = DEFAULT_MAX_STATES


def _check_leaf_budget(params: GameParams, guard: EnumerationGuard) -> None:
    upper = tree_size_upper_bound(params)
    if upper > guard.max_leaves:
        raise GuardExceeded(
            f"K!^R = {upper} leaves could exceed max_leaves = {guard.max_leaves}",
            limit=guard.max_leaves,
        )


class _SubtreeCounter:
    """
    Depth-first subtree totals memoized on the position (scores do not change the subtree).

    For a position s, count(s) returns (leaves below s, sum over those leaves of the
    product of degrees from s down), with (1, 1) at a terminal position.
    """

    def __init__(self, guard: EnumerationGuard):
        self.guard = guard
        self.memo: Dict[tuple, Tuple[int, int]] = {}

    def count(self, state: PlayState) -> Tuple[int, int]:
        if state.is_terminal:
            return 1, 1
        key = state.key(include_scores=False)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        if len(self.memo) >= self.guard.max_states:
            raise GuardExceeded(
                f"subtree counting exceeded max_states = {self.guard.max_states}",
                limit=self.guard.max_states,
            )
        moves = legal_moves(state)
        leaves = weighted = 0
        for card in moves:
            child_leaves, child_weighted = self.count(apply_move(state, card))
            leaves += child_leaves
            weighted += child_weighted
        totals = (leaves, len(moves) * weighted)
        self.memo[key] = totals
        return totals


def count_leaves(deal: Deal, params: Optional[GameParams] = None, leader0: int = 0,
                 guard: EnumerationGuard = EnumerationGuard()) -> int:
    """
    Exact number of complete play sequences of a deal.

    Raises:
        GuardExceeded: If K!^R exceeds guard.max_leaves, or the memo outgrows max_states.
    """
    params = params or deal.params
    _check_leaf_budget(params, guard)
    leaves, _ = _SubtreeCounter(guard).count(initial_state(deal, params, leader0))
    return leaves


# === REACHABLE STATES ===

@dataclass(frozen=True)
class ReachableStateCounts:
    """
    Distinct positions reachable from the initial positions of a deal family.

    family_union counts the union over all deals; max_per_deal is the largest
    single-deal count, the quantity the closed-form position bounds cover.
    """
    family_union: int
    max_per_deal: int
    deals: int
    include_scores: bool


def _reachable_keys(root: PlayState, include_scores: bool, budget: int) -> Set[tuple]:
    seen: Set[tuple] = {root.key(include_scores)}
    stack = [root]
    while stack:
        state = stack.pop()
        if state.is_terminal:
            continue
        for card in legal_moves(state):
            child = apply_move(state, card)
            key = child.key(include_scores)
            if key not in seen:
                seen.add(key)
                if len(seen) > budget:
                    raise GuardExceeded(f"state enumeration exceeded max_states = {budget}",
                                        limit=budget)
                stack.append(child)
    return seen


def count_reachable_states(params: GameParams, include_scores: bool = True, leader0: int = 0,
                           guard: EnumerationGuard = EnumerationGuard()) -> ReachableStateCounts:
    """
    Enumerate every deal of the family and count distinct reachable positions.

    Raises:
        GuardExceeded: If the union of states grows beyond guard.max_states.
    """
    union: Set[tuple] = set()
    max_per_deal = 0
    deals = 0
    for deal in enumerate_deals(params):
        keys = _reachable_keys(initial_state(deal, params, leader0), include_scores, guard.max_states)
        max_per_deal = max(max_per_deal, len(keys))
        union |= keys
        deals += 1
        if len(union) > guard.max_states:
            raise GuardExceeded(f"state enumeration exceeded max_states = {guard.max_states}",
                                limit=guard.max_states)
    logger.info("Reachable states (scores=%s): %d deals, union %d, per-deal max %d",
                include_scores, deals, len(union), max_per_deal)
    return ReachableStateCounts(len(union), max_per_deal, deals, include_scores)


# === ESTIMATOR CHECKS ===

@dataclass(frozen=True)
class EstimatorMoments:
    """Exact distribution moments of the playout-product estimator X for one deal."""
    leaves: int
    mean: Fraction
    second_moment: Fraction

    @property
    def variance(self) -> Fraction:
        return self.second_moment - self.mean ** 2


def exact_estimator_moments(deal: Deal, params: Optional[GameParams] = None, leader0: int = 0,
                            guard: EnumerationGuard = EnumerationGuard()) -> EstimatorMoments:
    """
    E[X] and E[X^2] over all leaves, each leaf weighted by its probability under
    uniform random play.

    A leaf l is reached with probability 1/X(l), so E[X] is the leaf count and E[X^2]
    is the sum of X over the leaves, which satisfies S(s) = deg(s) * sum of S(child)
    and is computed by the same memoized walk as count_leaves.
    """
    params = params or deal.params
    _check_leaf_budget(params, guard)
    leaves, weighted = _SubtreeCounter(guard).count(initial_state(deal, params, leader0))
    return EstimatorMoments(leaves, Fraction(leaves), Fraction(weighted))


@dataclass(frozen=True)
class UnbiasednessReport:
    """Sampled estimator mean against the exact leaf count."""
    exact_leaves: int
    moments: MomentAccumulator

    @property
    def sample_mean(self) -> Fraction:
        return self.moments.mean

    @property
    def stderr(self) -> Decimal:
        return self.moments.stderr()

    @property
    def z_score(self) -> Decimal:
        """(mean - exact) / stderr; 0 when the sample has no spread and hits the count."""
        diff = self.sample_mean - self.exact_leaves
        if self.moments.mean_variance == 0:
            if diff == 0:
                return Decimal(0)
            return Decimal("Infinity") if diff > 0 else Decimal("-Infinity")
        return (Decimal(diff.numerator) / Decimal(diff.denominator)) / exact_sqrt(self.moments.mean_variance)

    @property
    def passed(self) -> bool:
        return abs(self.z_score) <= Z_THRESHOLD


def verify_unbiasedness(deal: Deal, params: Optional[GameParams] = None, n_playouts: int = 10**5,
                        seed: int = 0, leader0: int = 0,
                        guard: EnumerationGuard = EnumerationGuard()) -> UnbiasednessReport:
    """
    Run n_playouts uniform playouts of one deal and compare the mean playout product
    with the exact leaf count. Playout i uses stream (seed, i).

    Raises:
        GuardExceeded: If the exact count is not feasible under the guard.
    """
    params = params or deal.params
    exact = count_leaves(deal, params, leader0, guard)
    acc = MomentAccumulator()
    for index in range(n_playouts):
        acc.add(knuth_estimate(random_playout(deal, params, leader0, stream_rng(seed, index))))
    report = UnbiasednessReport(exact, acc)
    logger.info("Unbiasedness: exact %d, mean %.6g, z %.3f", exact, float(report.sample_mean),
                float(report.z_score))
    return report

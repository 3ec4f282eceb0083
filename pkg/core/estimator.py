"""
Tree Size Estimator Module

Monte Carlo experiments over random deals with uniformly random play:

1. Per-trick branching profile: the average number of cards the followers may play
   to trick n.
2. Unbiased game-tree size estimation: the product of all branching degrees along one
   random playout (its expectation is the number of leaves).

Every statistic is accumulated in exact integers, sharded by game index and merged, so
a (seed, n_games) pair yields the same digits for any worker count.
"""

import logging
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import List, Optional, Tuple

from core.engine import (
    TRUMP_SUIT,
    GameParams,
    PlayoutTrace,
    deal_random,
    play_with_uniforms,
    playout_uniforms,
    stream_rng,
)
from core.errors import IncompleteTrace, ParamsError
from core.moments import MomentAccumulator, merge_all
from core.parallel import run_sharded, shard_indices

logger = logging.getLogger(__name__)

MODE_NO_TRUMP = "nt"
MODE_TRUMP = "trump"

DEFAULT_GAMES = 10**6
DEFAULT_PLAYOUTS_PER_DEAL = 1


def mode_of(params: GameParams) -> str:
    return MODE_NO_TRUMP if params.trump is None else MODE_TRUMP


def params_for_mode(params: GameParams, mode: str) -> GameParams:
    """Trump experiments play with suit TRUMP_SUIT as trumps."""
    if mode == MODE_NO_TRUMP:
        return params.with_trump(None)
    if mode == MODE_TRUMP:
        return params.with_trump(params.trump if params.trump is not None else TRUMP_SUIT)
    raise ParamsError(f"unknown mode '{mode}'")


# === KNUTH ESTIMATE ===

def knuth_estimate(trace: PlayoutTrace) -> int:
    """
    Product of the branching degrees along a playout: an unbiased estimate of the
    number of leaves of the game tree.

    Raises:
        IncompleteTrace: If the trace does not cover all R*K moves.
    """
    if len(trace.degrees) != trace.params.total_moves:
        raise IncompleteTrace(
            f"trace holds {len(trace.degrees)} of {trace.params.total_moves} degrees"
        )
    product = 1
    for degree in trace.degrees:
        product *= degree
    return product


def leader_degree_product(trace: PlayoutTrace) -> int:
    """Product of the degrees at lead positions; K! for every complete playout."""
    product = 1
    for degree in trace.degrees[::trace.params.hands]:
        product *= degree
    return product


# === BRANCHING PROFILE ===

@dataclass
class BranchingProfile:
    """
    Per-trick follower branching.

    tricks[n-1] accumulates, per playout, the integer sum of the R-1 follower degrees at
    trick n, so deg(n) = mean / (R-1) stays exact. seats[n-1][j-1] accumulates the
    degree of the j-th follower after the leader.
    """
    params: GameParams
    tricks: List[MomentAccumulator] = field(default_factory=list)
    seats: List[List[MomentAccumulator]] = field(default_factory=list)

    @classmethod
    def empty(cls, params: GameParams) -> "BranchingProfile":
        k, followers = params.cards_per_hand, params.hands - 1
        return cls(
            params,
            [MomentAccumulator() for _ in range(k)],
            [[MomentAccumulator() for _ in range(followers)] for _ in range(k)],
        )

    @property
    def mode(self) -> str:
        return mode_of(self.params)

    @property
    def n(self) -> int:
        return self.tricks[0].n if self.tricks else 0

    @property
    def followers(self) -> int:
        return self.params.hands - 1

    def add_trace(self, trace: PlayoutTrace) -> None:
        r = self.params.hands
        degrees = trace.degrees
        for trick in range(self.params.cards_per_hand):
            base = trick * r
            follower = degrees[base + 1:base + r]
            self.tricks[trick].add(sum(follower))
            for offset, degree in enumerate(follower):
                self.seats[trick][offset].add(degree)

    def merge(self, other: "BranchingProfile") -> "BranchingProfile":
        return BranchingProfile(
            self.params,
            [a.merge(b) for a, b in zip(self.tricks, other.tricks)],
            [[a.merge(b) for a, b in zip(ra, rb)] for ra, rb in zip(self.seats, other.seats)],
        )

    def mean(self, trick: int) -> Fraction:
        """deg(trick), 1-based trick number."""
        return self.tricks[trick - 1].mean / self.followers

    def stderr(self, trick: int) -> Decimal:
        return self.tricks[trick - 1].stderr() / self.followers

    def seat_mean(self, trick: int, offset: int) -> Fraction:
        """Mean degree of the follower `offset` seats after the leader (1..R-1)."""
        return self.seats[trick - 1][offset - 1].mean

    def leader_degree(self, trick: int) -> int:
        """The leader always chooses among its whole remaining hand."""
        return self.params.cards_per_hand - trick + 1

    def rows(self) -> List[Tuple[int, Fraction, Decimal, int]]:
        """(trick, mean, stderr, n) for tricks 1..K."""
        return [(t, self.mean(t), self.stderr(t), self.tricks[t - 1].n)
                for t in range(1, self.params.cards_per_hand + 1)]


def _profile_shard(shard: int, workers: int, n_games: int, params: GameParams,
                   leader0: int, seed: int, playouts_per_deal: int) -> BranchingProfile:
    profile = BranchingProfile.empty(params)
    for game in shard_indices(shard, workers, n_games):
        rng = stream_rng(seed, game)
        deal = deal_random(params, rng)
        for _ in range(playouts_per_deal):
            profile.add_trace(play_with_uniforms(deal, params, leader0, playout_uniforms(params, rng)))
    return profile


def _log_rate(label: str, playouts: int, started: float) -> None:
    elapsed = time.perf_counter() - started
    rate = playouts / elapsed if elapsed > 0 else float("inf")
    logger.info("%s: %d playouts in %.2fs (%.0f playouts/s)", label, playouts, elapsed, rate)


def branching_profile(params: GameParams, n_games: int, leader0: int = 0, seed: int = 0,
                      workers: int = 1,
                      playouts_per_deal: int = DEFAULT_PLAYOUTS_PER_DEAL) -> BranchingProfile:
    """
    Average follower branching per trick over random deals with uniform random play.

    Args:
        params: Game parameters; trump set means a trump game.
        n_games: Number of random deals (>= 1).
        leader0: First-trick leader.
        seed: Master seed; game g uses stream (seed, g).
        workers: Worker processes.
        playouts_per_deal: Random playouts per deal.

    Returns:
        The merged BranchingProfile.
    """
    if n_games < 1:
        raise ParamsError("n_games must be at least 1")
    started = time.perf_counter()
    parts = run_sharded(_profile_shard, n_games, workers,
                        (params, leader0, seed, playouts_per_deal))
    profile = parts[0]
    for part in parts[1:]:
        profile = profile.merge(part)
    _log_rate(f"profile[{profile.mode}]", n_games * playouts_per_deal, started)
    return profile


def _paired_shard(shard: int, workers: int, n_games: int, params: GameParams, leader0: int,
                  seed: int, playouts_per_deal: int) -> Tuple[BranchingProfile, BranchingProfile]:
    nt_params = params_for_mode(params, MODE_NO_TRUMP)
    trump_params = params_for_mode(params, MODE_TRUMP)
    nt_profile = BranchingProfile.empty(nt_params)
    trump_profile = BranchingProfile.empty(trump_params)
    for game in shard_indices(shard, workers, n_games):
        rng = stream_rng(seed, game)
        deal = deal_random(params, rng)
        for _ in range(playouts_per_deal):
            uniforms = playout_uniforms(params, rng)
            nt_profile.add_trace(play_with_uniforms(deal, nt_params, leader0, uniforms))
            trump_profile.add_trace(play_with_uniforms(deal, trump_params, leader0, uniforms))
    return nt_profile, trump_profile


def paired_trump_nt_profile(params: GameParams, n_games: int, leader0: int = 0, seed: int = 0,
                            workers: int = 1,
                            playouts_per_deal: int = DEFAULT_PLAYOUTS_PER_DEAL
                            ) -> Tuple[BranchingProfile, BranchingProfile]:
    """
    No-trump and trump profiles on the same deals with the same random draws.

    Trick-1 legal moves do not depend on trumps, so both modes make identical trick-1
    choices and their trick-1 accumulators are equal; later tricks diverge once a trump
    changes a trick winner.

    Returns:
        (no_trump_profile, trump_profile)
    """
    if n_games < 1:
        raise ParamsError("n_games must be at least 1")
    started = time.perf_counter()
    parts = run_sharded(_paired_shard, n_games, workers, (params, leader0, seed, playouts_per_deal))
    nt_profile, trump_profile = parts[0]
    for nt_part, trump_part in parts[1:]:
        nt_profile = nt_profile.merge(nt_part)
        trump_profile = trump_profile.merge(trump_part)
    _log_rate("profile[paired]", 2 * n_games * playouts_per_deal, started)
    return nt_profile, trump_profile


# === TREE SIZE ===

@dataclass(frozen=True)
class TreeSizeReport:
    """Knuth estimates of the game-tree size over a sample of random deals."""
    params: GameParams
    moments: MomentAccumulator
    seed: int
    workers: int
    leader: int = 0

    @property
    def mode(self) -> str:
        return mode_of(self.params)

    @property
    def n(self) -> int:
        return self.moments.n

    @property
    def mean(self) -> Fraction:
        return self.moments.mean

    @property
    def stderr(self) -> Decimal:
        return self.moments.stderr()

    @property
    def stddev(self) -> Decimal:
        return self.moments.stddev()

    @property
    def min(self) -> Optional[int]:
        return self.moments.min

    @property
    def max(self) -> Optional[int]:
        return self.moments.max


def _tree_size_shard(shard: int, workers: int, n_games: int, params: GameParams, leader0: int,
                     seed: int, playouts_per_deal: int) -> MomentAccumulator:
    acc = MomentAccumulator()
    for game in shard_indices(shard, workers, n_games):
        rng = stream_rng(seed, game)
        deal = deal_random(params, rng)
        for _ in range(playouts_per_deal):
            trace = play_with_uniforms(deal, params, leader0, playout_uniforms(params, rng))
            acc.add(knuth_estimate(trace))
    return acc


def estimate_tree_size(params: GameParams, n_games: int, leader0: int = 0, seed: int = 0,
                       workers: int = 1,
                       playouts_per_deal: int = DEFAULT_PLAYOUTS_PER_DEAL) -> TreeSizeReport:
    """
    Mean Knuth estimate of the game-tree size over random deals.

    Raises:
        ParamsError: If fewer than two samples would be drawn (variance undefined).
    """
    if n_games * playouts_per_deal < 2:
        raise ParamsError("tree size estimation needs at least two samples")
    started = time.perf_counter()
    parts = run_sharded(_tree_size_shard, n_games, workers, (params, leader0, seed, playouts_per_deal))
    moments = merge_all(parts)
    _log_rate(f"estimate[{mode_of(params)}]", moments.n, started)
    return TreeSizeReport(params, moments, seed, workers, leader0)

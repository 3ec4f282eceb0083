"""
Trick-Taking Engine Module

Generalized double-dummy card play: a family of games with R hands of K cards dealt
from NS suits of NR ranks, optional trump, follow-suit rule and side scoring by
hand parity. Bridge is the preset (4, 13, 4, 13).

All values are immutable; every operation is a pure function of its inputs plus an
explicit numpy Generator, so states and deals can be shipped to worker processes.
"""

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core.errors import (
    BadTrump,
    DeckMismatch,
    DuplicateCard,
    IllegalMove,
    IncompleteTrick,
    ParamsError,
    PlayError,
    TerminalState,
    WrongHandSize,
)

logger = logging.getLogger(__name__)

# Seat -> side mapping (bridge partnerships generalized)
NUM_SIDES = 2


class Card(NamedTuple):
    """A card; higher rank index beats lower within a suit."""
    suit: int
    rank: int


def card_order(card: Card) -> Tuple[int, int]:
    """Canonical ordering key: suit-major, rank-descending."""
    return card.suit, -card.rank


def canonical(cards) -> Tuple[Card, ...]:
    return tuple(sorted(cards, key=card_order))


@dataclass(frozen=True)
class GameParams:
    """
    One member of the parametric game family.

    Attributes:
        hands: Number of hands R (>= 2).
        cards_per_hand: Cards per hand K (>= 1).
        num_suits: Suits NS (>= 1).
        ranks_per_suit: Ranks per suit NR (>= 1).
        trump: Trump suit index, or None for no-trump play.
    """
    hands: int
    cards_per_hand: int
    num_suits: int
    ranks_per_suit: int
    trump: Optional[int] = None

    def __post_init__(self):
        for name in ("hands", "cards_per_hand", "num_suits", "ranks_per_suit"):
            if getattr(self, name) < 1:
                raise ParamsError(f"{name} must be positive, got {getattr(self, name)}")
        if self.hands < 2:
            raise ParamsError(f"at least two hands are needed, got {self.hands}")
        if self.num_suits * self.ranks_per_suit != self.hands * self.cards_per_hand:
            raise DeckMismatch(
                f"deck of {self.num_suits}x{self.ranks_per_suit}="
                f"{self.num_suits * self.ranks_per_suit} cards does not cover "
                f"{self.hands}x{self.cards_per_hand}={self.hands * self.cards_per_hand}"
            )
        if self.trump is not None and not 0 <= self.trump < self.num_suits:
            raise BadTrump(f"trump suit {self.trump} is not in [0, {self.num_suits})")

    @property
    def deck_size(self) -> int:
        return self.hands * self.cards_per_hand

    @property
    def total_moves(self) -> int:
        return self.deck_size

    def with_trump(self, suit: Optional[int]) -> "GameParams":
        return replace(self, trump=suit)

    def same_deck(self, other: "GameParams") -> bool:
        """True when both parametrizations deal the same deck to the same hands."""
        return (self.hands, self.cards_per_hand, self.num_suits, self.ranks_per_suit) == (
            other.hands, other.cards_per_hand, other.num_suits, other.ranks_per_suit
        )


def make_params(hands: int, cards_per_hand: int, num_suits: int, ranks_per_suit: int,
                trump: Optional[int] = None) -> GameParams:
    """
    Build validated game parameters.

    Raises:
        DeckMismatch: If num_suits * ranks_per_suit != hands * cards_per_hand.
        BadTrump: If trump is not a valid suit index.
        ParamsError: If any count is not positive.
    """
    return GameParams(hands, cards_per_hand, num_suits, ranks_per_suit, trump)


BRIDGE = GameParams(4, 13, 4, 13)

# Suit used for the trump experiments; suits are symmetric under a uniform deal.
TRUMP_SUIT = 0


def make_deck(params: GameParams) -> Tuple[Card, ...]:
    """The full deck in canonical order."""
    return tuple(
        Card(suit, rank)
        for suit in range(params.num_suits)
        for rank in reversed(range(params.ranks_per_suit))
    )


@dataclass(frozen=True)
class Deal:
    """
    Initial assignment of the whole deck to R hands.

    Hands are stored in canonical order; construction validates sizes, coverage and
    disjointness.
    """
    params: GameParams
    hands: Tuple[Tuple[Card, ...], ...]

    def __post_init__(self):
        params = self.params
        hands = tuple(canonical(hand) for hand in self.hands)
        object.__setattr__(self, "hands", hands)
        if len(hands) != params.hands:
            raise WrongHandSize(f"expected {params.hands} hands, got {len(hands)}")
        seen = set()
        for index, hand in enumerate(hands):
            if len(hand) != params.cards_per_hand:
                raise WrongHandSize(
                    f"hand {index} holds {len(hand)} cards, expected {params.cards_per_hand}"
                )
            for card in hand:
                if not (0 <= card.suit < params.num_suits and 0 <= card.rank < params.ranks_per_suit):
                    raise ParamsError(f"card {tuple(card)} is not part of the deck")
                if card in seen:
                    raise DuplicateCard(f"card {tuple(card)} dealt twice")
                seen.add(card)

    @classmethod
    def from_hands(cls, params: GameParams, hands: Sequence[Sequence[Card]]) -> "Deal":
        return cls(params, tuple(tuple(Card(*c) for c in hand) for hand in hands))


def deal_random(params: GameParams, rng: np.random.Generator) -> Deal:
    """
    Deal uniformly at random: a uniform permutation of the canonical deck split into R
    consecutive blocks of K cards.
    """
    deck = make_deck(params)
    order = rng.permutation(params.deck_size).tolist()
    k = params.cards_per_hand
    hands = tuple(
        canonical(deck[i] for i in order[h * k:(h + 1) * k]) for h in range(params.hands)
    )
    return Deal(params, hands)


def enumerate_deals(params: GameParams) -> Iterator[Deal]:
    """Yield every distinct deal of the family, (RK)! / (K!)^R of them."""
    deck = make_deck(params)
    k = params.cards_per_hand

    def assign(remaining: Tuple[Card, ...], hands: List[Tuple[Card, ...]]):
        if len(hands) == params.hands - 1:
            yield Deal(params, tuple(hands) + (remaining,))
            return
        for hand in itertools.combinations(remaining, k):
            chosen = set(hand)
            rest = tuple(c for c in remaining if c not in chosen)
            yield from assign(rest, hands + [hand])

    yield from assign(deck, [])


# --- Play state ---

@dataclass(frozen=True)
class PlayState:
    """
    A position: remaining hands, the partial trick, the leader and side scores.

    `trick` holds (hand, card) pairs in play order; side s owns the hands h with
    h % 2 == s.
    """
    params: GameParams
    remaining: Tuple[Tuple[Card, ...], ...]
    trick: Tuple[Tuple[int, Card], ...] = ()
    leader: int = 0
    side_tricks: Tuple[int, ...] = field(default=(0, 0))

    @property
    def to_move(self) -> int:
        return (self.leader + len(self.trick)) % self.params.hands

    @property
    def is_terminal(self) -> bool:
        return not any(self.remaining)

    @property
    def tricks_played(self) -> int:
        return sum(self.side_tricks)

    def cards_accounted(self) -> int:
        """Left side of the card-conservation identity (equals R*K in every state)."""
        return (sum(len(h) for h in self.remaining) + len(self.trick)
                + self.params.hands * sum(self.side_tricks))

    def key(self, include_scores: bool = True) -> tuple:
        """Canonical, hashable identity of the position."""
        base = (self.remaining, self.trick, self.leader)
        return base + (self.side_tricks,) if include_scores else base


def initial_state(deal: Deal, params: Optional[GameParams] = None, leader0: int = 0) -> PlayState:
    """Root position of a deal; `params` may differ from the deal's only in trump."""
    params = params or deal.params
    if not params.same_deck(deal.params):
        raise ParamsError("play parameters do not match the deal's deck")
    if not 0 <= leader0 < params.hands:
        raise ParamsError(f"leader {leader0} is not in [0, {params.hands})")
    return PlayState(params, deal.hands, (), leader0, (0,) * NUM_SIDES)


def _legal_from_hand(hand: Sequence[Card], led_suit: Optional[int]) -> Sequence[Card]:
    if led_suit is None:
        return hand
    following = [c for c in hand if c.suit == led_suit]
    return following or hand


def legal_moves(state: PlayState) -> Tuple[Card, ...]:
    """
    Successor moves of a position in canonical order.

    The leader may play any card; followers must follow the led suit when able.

    Raises:
        TerminalState: If every hand is empty.
    """
    if state.is_terminal:
        raise TerminalState("no moves remain: all hands are empty")
    hand = state.remaining[state.to_move]
    led_suit = state.trick[0][1].suit if state.trick else None
    return tuple(_legal_from_hand(hand, led_suit))


def trick_winner(trick: Sequence[Tuple[int, Card]], leader: int, params: GameParams) -> int:
    """
    Hand index winning a complete trick.

    The highest trump wins if any trump was played, otherwise the highest card of the
    led suit.

    Raises:
        IncompleteTrick: If the trick does not hold exactly R cards.
    """
    if len(trick) != params.hands:
        raise IncompleteTrick(f"trick holds {len(trick)} of {params.hands} cards")
    if trick[0][0] != leader:
        raise PlayError(f"trick was led by hand {trick[0][0]}, not {leader}")
    trump = params.trump
    best_hand, best = trick[0]
    for hand, card in trick[1:]:
        if card.suit == best.suit:
            if card.rank > best.rank:
                best_hand, best = hand, card
        elif card.suit == trump:
            best_hand, best = hand, card
    return best_hand


def apply_move(state: PlayState, card: Card) -> PlayState:
    """
    Play `card` for the hand to move; completes the trick when it reaches R cards.

    Raises:
        IllegalMove: If the card is not a legal move.
    """
    card = Card(*card)
    if card not in legal_moves(state):
        raise IllegalMove(f"card {tuple(card)} is not legal for hand {state.to_move}")
    seat = state.to_move
    remaining = list(state.remaining)
    remaining[seat] = tuple(c for c in remaining[seat] if c != card)
    trick = state.trick + ((seat, card),)
    if len(trick) < state.params.hands:
        return replace(state, remaining=tuple(remaining), trick=trick)

    winner = trick_winner(trick, state.leader, state.params)
    scores = list(state.side_tricks)
    scores[winner % NUM_SIDES] += 1
    return replace(state, remaining=tuple(remaining), trick=(), leader=winner,
                   side_tricks=tuple(scores))


# --- Random playouts ---

def stream_rng(master_seed: int, index: int, salt: int = 0) -> np.random.Generator:
    """
    Generator for one independent stream: PCG64 seeded by SeedSequence([master_seed, index]).

    The index is the game (or deal) number, never the worker number, so a run gives the
    same samples for any worker count. A nonzero salt is appended to the entropy to
    separate auxiliary draws (e.g. the deal of a single-deal experiment) from the
    indexed streams.
    """
    if master_seed < 0 or index < 0 or salt < 0:
        raise ParamsError("seeds and stream indices must be nonnegative")
    entropy = [master_seed, index] + ([salt] if salt else [])
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class PlayoutTrace:
    """
    One complete random game.

    Attributes:
        params: Parameters the game was played under.
        leader: First-trick leader.
        moves: R*K cards in play order.
        degrees: |N(s_i)| recorded before each move.
    """
    params: GameParams
    leader: int
    moves: Tuple[Card, ...]
    degrees: Tuple[int, ...]


def playout_uniforms(params: GameParams, rng: np.random.Generator) -> List[float]:
    """One uniform in [0, 1) per move; move i picks floor(u_i * |N(s_i)|)."""
    return rng.random(params.total_moves).tolist()


def play_with_uniforms(deal: Deal, params: GameParams, leader0: int,
                       uniforms: Sequence[float]) -> PlayoutTrace:
    """
    Play one game where move i is legal_moves[floor(uniforms[i] * degree)].

    Feeding the same uniforms to trump and no-trump parameters replays identical
    choices for as long as the legal move lists coincide.

    Raises:
        ParamsError: If the deck differs from the deal's or leader0 is not a hand.
    """
    if not params.same_deck(deal.params):
        raise ParamsError("play parameters do not match the deal's deck")
    n_hands = params.hands
    if not 0 <= leader0 < n_hands:
        raise ParamsError(f"leader {leader0} is not in [0, {n_hands})")
    if len(uniforms) < params.total_moves:
        raise ParamsError(f"need {params.total_moves} uniforms, got {len(uniforms)}")
    trump = params.trump
    # hot loop: whole hands plus per-suit views, both in canonical order
    hands = [list(h) for h in deal.hands]
    by_suit = [[[c for c in h if c.suit == s] for s in range(params.num_suits)] for h in deal.hands]
    moves: List[Card] = []
    degrees: List[int] = []
    leader = leader0
    position = 0
    for _ in range(params.cards_per_hand):
        hand = hands[leader]
        degree = len(hand)
        card = hand[min(int(uniforms[position] * degree), degree - 1)]
        position += 1
        hand.remove(card)
        by_suit[leader][card.suit].remove(card)
        moves.append(card)
        degrees.append(degree)
        led_suit = card.suit
        best_seat, best = leader, card
        for offset in range(1, n_hands):
            seat = (leader + offset) % n_hands
            hand = hands[seat]
            legal = by_suit[seat][led_suit] or hand
            degree = len(legal)
            card = legal[min(int(uniforms[position] * degree), degree - 1)]
            position += 1
            hand.remove(card)
            by_suit[seat][card.suit].remove(card)
            moves.append(card)
            degrees.append(degree)
            if card.suit == best.suit:
                if card.rank > best.rank:
                    best_seat, best = seat, card
            elif card.suit == trump:
                best_seat, best = seat, card
        leader = best_seat
    return PlayoutTrace(params, leader0, tuple(moves), tuple(degrees))


def random_playout(deal: Deal, params: GameParams, leader0: int,
                   rng: np.random.Generator) -> PlayoutTrace:
    """
    Play a deal to the end choosing every move uniformly among the legal moves.

    Args:
        deal: The initial card distribution.
        params: Play parameters (same deck as the deal; trump may differ).
        leader0: Hand leading the first trick.
        rng: Seeded numpy Generator; consumes R*K uniforms.

    Returns:
        The trace of moves and branching degrees.
    """
    return play_with_uniforms(deal, params, leader0, playout_uniforms(params, rng))


def replay_degrees(trace: PlayoutTrace, deal: Deal) -> Tuple[int, ...]:
    """Recompute the degrees of a trace by replaying it through apply_move."""
    state = initial_state(deal, trace.params, trace.leader)
    degrees = []
    for card in trace.moves:
        degrees.append(len(legal_moves(state)))
        state = apply_move(state, card)
    return tuple(degrees)

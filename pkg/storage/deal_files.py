"""
Deal Files Module

This module reads and writes deals and result documents.

Two deal formats are accepted:

- Deal text in the PBN style: ``N:AKQ.JT9.876.5432 <hand> <hand> <hand>``. The prefix names
  the seat of the first hand (N, E, S, W for four hands, or a seat number), the remaining
  hands follow in seat order. Each hand lists its suits separated by dots, suit 0 first;
  ranks are written 2..9, T, J, Q, K, A (rank 0 is '2'). A void is empty or '-'.
  The line may also be wrapped in a PBN tag: ``[Deal "N:..."]``.
- A JSON deal document: ``{"params": {...}, "hands": [[[suit, rank], ...], ...]}``.

Result documents are written atomically (temporary file, then os.replace).
"""

import json
import logging
import os
import re
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, ValidationError

from core.engine import Card, Deal, GameParams, make_params
from core.errors import DealFileError, DeckMismatch, ParseError

logger = logging.getLogger(__name__)

RANK_CHARS = "23456789TJQKA"
SEAT_LETTERS = "NESW"
VOID = "-"
COMMENT_PREFIXES = ("%", "#", ";")

_TAG = re.compile(r'\[\s*Deal\s+"([^"]*)"\s*\]')
_TOKEN = re.compile(r"\S+")


# === JSON DOCUMENT MODELS ===

class ParamsDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hands: int
    cards_per_hand: int
    num_suits: int
    ranks_per_suit: int
    trump: Optional[int] = None

    def to_params(self) -> GameParams:
        return make_params(self.hands, self.cards_per_hand, self.num_suits,
                           self.ranks_per_suit, self.trump)


class DealDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    params: ParamsDocument
    hands: List[List[Tuple[int, int]]]


def params_document(params: GameParams) -> Dict[str, Any]:
    return ParamsDocument(
        hands=params.hands,
        cards_per_hand=params.cards_per_hand,
        num_suits=params.num_suits,
        ranks_per_suit=params.ranks_per_suit,
        trump=params.trump,
    ).model_dump()


def deal_document(deal: Deal) -> Dict[str, Any]:
    """JSON-ready form of a deal."""
    return {
        "params": params_document(deal.params),
        "hands": [[[card.suit, card.rank] for card in hand] for hand in deal.hands],
    }


# === TEXT FORMAT ===

def _seat_label(seat: int, n_hands: int) -> str:
    return SEAT_LETTERS[seat] if n_hands == len(SEAT_LETTERS) else str(seat)


def _parse_seat(label: str, n_hands: int, line: int, column: int) -> int:
    if label.upper() in SEAT_LETTERS and len(label) == 1:
        seat = SEAT_LETTERS.index(label.upper())
    elif label.isdigit():
        seat = int(label)
    else:
        raise ParseError(f"unknown seat '{label}'", line, column)
    if seat >= n_hands:
        raise ParseError(f"seat '{label}' does not exist with {n_hands} hands", line, column)
    return seat


def _parse_hand(token: str, line: int, column: int) -> List[Card]:
    cards: List[Card] = []
    offset = 0
    for suit, holding in enumerate(token.split(".")):
        if holding == VOID:
            offset += len(holding) + 1
            continue
        for position, char in enumerate(holding):
            rank = RANK_CHARS.find(char.upper())
            if rank < 0:
                raise ParseError(f"unknown rank '{char}'", line, column + offset + position)
            cards.append(Card(suit, rank))
        offset += len(holding) + 1
    return cards


def _find_record(text: str) -> Tuple[str, int, int]:
    """The first deal record with its 1-based line and the column where it starts."""
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIXES):
            continue
        tag = _TAG.search(raw)
        if tag:
            return tag.group(1), number, tag.start(1) + 1
        if stripped.startswith("["):
            # other PBN tags
            continue
        return raw, number, 1
    raise ParseError("no deal found", 1, 1)


def _infer_params(hands: Sequence[Sequence[Card]], num_suits: int) -> GameParams:
    n_hands = len(hands)
    cards_per_hand = max(len(hand) for hand in hands)
    deck = n_hands * cards_per_hand
    if cards_per_hand == 0 or deck % num_suits:
        raise DeckMismatch(f"{n_hands} hands of {cards_per_hand} cards cannot form {num_suits} equal suits")
    return make_params(n_hands, cards_per_hand, num_suits, deck // num_suits)


def parse_deal_text(text: str, params: Optional[GameParams] = None) -> Deal:
    """
    Parse deal text or a JSON deal document.

    Args:
        text: File contents.
        params: Expected parameters; inferred from the deal when omitted.

    Returns:
        The validated Deal.

    Raises:
        ParseError: Malformed text, with line and column.
        DuplicateCard: A card appears twice.
        WrongHandSize: A hand does not hold cards_per_hand cards.
    """
    if text.lstrip().startswith("{"):
        return _parse_document(text, params)

    record, line, start = _find_record(text)
    tokens = list(_TOKEN.finditer(record))
    if not tokens:
        raise ParseError("empty deal record", line, start)
    first = tokens[0]
    if ":" not in first.group():
        raise ParseError("deal must start with '<seat>:'", line, start + first.start())
    label, _, first_hand = first.group().partition(":")

    hand_tokens: List[Tuple[str, int]] = []
    if first_hand:
        hand_tokens.append((first_hand, start + first.start() + len(label) + 1))
    hand_tokens.extend((tok.group(), start + tok.start()) for tok in tokens[1:])
    n_hands = len(hand_tokens)
    if params is not None and n_hands != params.hands:
        raise ParseError(f"expected {params.hands} hands, found {n_hands}", line, start)
    if n_hands < 2:
        raise ParseError("a deal needs at least two hands", line, start)

    suit_counts = {token.count(".") + 1 for token, _ in hand_tokens}
    if len(suit_counts) != 1:
        raise ParseError("hands list different numbers of suits", line, start)
    num_suits = suit_counts.pop()
    if params is not None and num_suits != params.num_suits:
        raise ParseError(f"expected {params.num_suits} suits per hand, found {num_suits}", line, start)

    seat0 = _parse_seat(label, n_hands, line, start + first.start())
    hands: List[List[Card]] = [[] for _ in range(n_hands)]
    for index, (token, column) in enumerate(hand_tokens):
        hands[(seat0 + index) % n_hands] = _parse_hand(token, line, column)

    params = params or _infer_params(hands, num_suits)
    return Deal.from_hands(params, hands)


def _parse_document(text: str, params: Optional[GameParams]) -> Deal:
    try:
        document = DealDocument.model_validate_json(text)
    except ValidationError as exc:
        # JSON syntax errors carry no position through pydantic; re-read for one
        try:
            json.loads(text)
        except json.JSONDecodeError as decode_error:
            raise ParseError(decode_error.msg, decode_error.lineno, decode_error.colno) from exc
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ParseError(f"{where}: {first['msg']}", 1, 1) from exc
    declared = document.params.to_params()
    if params is not None and not params.same_deck(declared):
        raise ParseError("document parameters do not match the requested deck", 1, 1)
    return Deal.from_hands(params or declared, document.hands)


def format_deal(deal: Deal, first_seat: int = 0) -> str:
    """
    Deal text, starting with `first_seat`; parse_deal_text reads it back to the same deal.

    Raises:
        DealFileError: If the deal has more ranks than the rank alphabet.
    """
    params = deal.params
    if params.ranks_per_suit > len(RANK_CHARS):
        raise DealFileError(f"deal text supports at most {len(RANK_CHARS)} ranks per suit")
    hands = []
    for offset in range(params.hands):
        hand = deal.hands[(first_seat + offset) % params.hands]
        suits = []
        for suit in range(params.num_suits):
            # hands are stored rank-descending within each suit
            suits.append("".join(RANK_CHARS[c.rank] for c in hand if c.suit == suit))
        hands.append(".".join(suits))
    return f"{_seat_label(first_seat, params.hands)}:" + " ".join(hands)


# === FILE I/O ===

def parse_deal_file(path: str, params: Optional[GameParams] = None) -> Deal:
    """
    Read a deal from a text or JSON file.

    Raises:
        DealFileError: If the file cannot be read or is not UTF-8 text.
        ParseError, DuplicateCard, WrongHandSize: As parse_deal_text.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise DealFileError(f"cannot read deal file '{path}': {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DealFileError(f"deal file '{path}' is not UTF-8 text (byte {exc.start})") from exc
    deal = parse_deal_text(text, params)
    logger.debug("Read deal from %s", path)
    return deal


def write_text_atomic(path: str, text: str) -> None:
    """
    Write text through a temporary file renamed over the target.

    Raises:
        OSError: If the file cannot be written; the temporary file is removed.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    temp_path = path + ".tmp"
    try:
        with open(temp_path, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(temp_path, path)
    except OSError:
        if os.path.exists(temp_path):
            try:
                os.remove(temp_path)
            except OSError:
                pass
        raise


def write_json_atomic(path: str, data: Dict[str, Any]) -> None:
    write_text_atomic(path, json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def write_deal_file(path: str, deal: Deal, as_json: bool = False) -> None:
    if as_json:
        write_json_atomic(path, deal_document(deal))
    else:
        write_text_atomic(path, format_deal(deal) + "\n")

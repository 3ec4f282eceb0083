"""
Errors Module

Domain exceptions raised by the engine, the bound calculators, the estimators and the
deal-file readers. Input problems derive from ValueError, resource limits from
RuntimeError, so callers that only know the builtins still catch them.
"""

from typing import Optional


class TrickspaceError(Exception):
    """Base class for every error raised by this package."""


# --- Parameter errors ---

class ParamsError(TrickspaceError, ValueError):
    """Invalid game parameters or arguments derived from them."""


class DeckMismatch(ParamsError):
    """The deck (suits x ranks) does not exactly cover hands x cards_per_hand."""


class BadTrump(ParamsError):
    """Trump suit index outside [0, num_suits)."""


class OutOfRange(ParamsError):
    """A trick count k outside [0, cards_per_hand]."""


class BadShape(ParamsError):
    """Shape table whose row or column sums do not match the parameters."""


# --- Play errors ---

class PlayError(TrickspaceError, ValueError):
    """Invalid operation on a play state or trace."""


class TerminalState(PlayError):
    """The state has no successors (every hand is empty)."""


class IllegalMove(PlayError):
    """The card is not among the legal moves of the state."""


class IncompleteTrick(PlayError):
    """A trick winner was requested for a trick that is not full."""


class IncompleteTrace(PlayError):
    """A playout trace does not cover the whole game."""


# --- Deal file errors ---

class DealFileError(TrickspaceError, ValueError):
    """Deal text or document that cannot be turned into a valid deal."""


class ParseError(DealFileError):
    """Malformed deal text; carries the 1-based line and column of the problem."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateCard(DealFileError):
    """The same card appears more than once in a deal."""


class WrongHandSize(DealFileError):
    """A hand holds a number of cards different from cards_per_hand."""


# --- Resource limits ---

class LimitError(TrickspaceError, RuntimeError):
    """A configured enumeration cap was hit."""

    def __init__(self, message: str, limit: Optional[int] = None):
        super().__init__(message)
        self.limit = limit


class TooLarge(LimitError):
    """Shape enumeration would exceed the configured cap."""


class GuardExceeded(LimitError):
    """Exhaustive enumeration would exceed max_leaves or max_states."""

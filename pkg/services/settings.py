"""
Settings Module

Run configuration for the command line: presets, per-command defaults, enumeration
guards and their environment overrides. A .env file in the working directory is loaded
first, so guards can be pinned per checkout.
"""

import logging
import os
from typing import Literal, Mapping, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

from core.bounds import DEFAULT_MAX_SHAPES
from core.engine import GameParams, make_params
from core.estimator import DEFAULT_GAMES, MODE_NO_TRUMP, MODE_TRUMP
from core.oracle import DEFAULT_MAX_LEAVES, DEFAULT_MAX_STATES, EnumerationGuard

logger = logging.getLogger(__name__)

# --- Environment overrides (guards only) ---
ENV_MAX_LEAVES = "TRICKSPACE_MAX_LEAVES"
ENV_MAX_STATES = "TRICKSPACE_MAX_STATES"
ENV_MAX_SHAPES = "TRICKSPACE_MAX_SHAPES"

# --- Presets: (hands, cards per hand, suits, ranks per suit) ---
PRESETS = {
    "bridge": (4, 13, 4, 13),
    "tiny": (4, 3, 2, 6),
}
DEFAULT_PRESET = "bridge"

MODE_BOTH = "both"
DEFAULT_VERIFY_PLAYOUTS = 10**5

Command = Literal["bounds", "frank", "profile", "estimate", "oracle", "verify"]


class GuardSettings(BaseModel):
    """Enumeration caps after environment overrides."""
    model_config = ConfigDict(extra="forbid")

    max_leaves: int = Field(DEFAULT_MAX_LEAVES, ge=1)
    max_states: int = Field(DEFAULT_MAX_STATES, ge=1)
    max_shapes: int = Field(DEFAULT_MAX_SHAPES, ge=1)

    def guard(self) -> EnumerationGuard:
        return EnumerationGuard(self.max_leaves, self.max_states)


def load_guard_settings(environ: Optional[Mapping[str, str]] = None) -> GuardSettings:
    """
    Guard defaults overridden by TRICKSPACE_* variables.

    Args:
        environ: Variables to read; the process environment (after load_dotenv) if None.

    Raises:
        pydantic.ValidationError: If an override is not a positive integer.
    """
    if environ is None:
        load_dotenv()
        environ = os.environ
    values = {}
    for field_name, variable in (("max_leaves", ENV_MAX_LEAVES),
                                 ("max_states", ENV_MAX_STATES),
                                 ("max_shapes", ENV_MAX_SHAPES)):
        if environ.get(variable):
            values[field_name] = environ[variable]
            logger.debug("%s overridden by %s", field_name, variable)
    return GuardSettings(**values)


class RunConfig(BaseModel):
    """
    A fully resolved command line. Preset values are filled in before validation so
    every numeric field is concrete here.
    """
    model_config = ConfigDict(extra="forbid")

    command: Command
    target: Optional[Literal["leaves", "states"]] = None

    hands: int = Field(ge=2)
    cards: int = Field(ge=1)
    suits: int = Field(ge=1)
    ranks: int = Field(ge=1)
    trump: Optional[int] = Field(None, ge=0)

    mode: Optional[Literal["nt", "trump", "both"]] = None
    games: Optional[int] = Field(None, ge=1)
    playouts_per_deal: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    format: Literal["text", "csv", "json"] = "text"
    deal: Optional[str] = None
    leader: int = Field(0, ge=0)
    output: Optional[str] = None

    guards: GuardSettings = Field(default_factory=GuardSettings)

    def params(self) -> GameParams:
        """
        Raises:
            DeckMismatch, BadTrump, ParamsError: For an invalid parametrization.
        """
        return make_params(self.hands, self.cards, self.suits, self.ranks, self.trump)

    def resolved_mode(self) -> str:
        """Experiments default to both modes; single-deal commands follow --trump."""
        if self.mode is not None:
            return self.mode
        if self.command in ("profile", "estimate"):
            return MODE_BOTH
        return MODE_NO_TRUMP if self.trump is None else MODE_TRUMP

    def resolved_games(self) -> Optional[int]:
        if self.games is not None:
            return self.games
        if self.command in ("profile", "estimate"):
            return DEFAULT_GAMES
        if self.command == "verify":
            return DEFAULT_VERIFY_PLAYOUTS
        return None

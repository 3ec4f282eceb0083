import pytest

from core.engine import BRIDGE, Card, Deal, make_params


# ---------------------------------------------------------------------------
# Parametrizations
# ---------------------------------------------------------------------------

@pytest.fixture
def bridge():
    return BRIDGE


@pytest.fixture
def tiny():
    """Four hands of three cards from two suits of six ranks."""
    return make_params(4, 3, 2, 6)


@pytest.fixture
def two_by_two():
    return make_params(2, 2, 2, 2)


@pytest.fixture
def one_suit():
    """A single suit: every follower is unconstrained."""
    return make_params(2, 3, 1, 6)


# ---------------------------------------------------------------------------
# Deals
# ---------------------------------------------------------------------------

# Every hand 4-3-3-3, the long suit rotating N=spades, E=hearts, S=diamonds, W=clubs
BALANCED_BRIDGE_TEXT = "N:AKQJ.AKQ.AKQ.AKQ T98.JT98.JT9.JT9 765.765.8765.876 432.432.432.5432"


@pytest.fixture
def balanced_bridge_text():
    return BALANCED_BRIDGE_TEXT


@pytest.fixture
def crossed_deal(two_by_two):
    """Hand 0: high card of suit 0 and low of suit 1; hand 1 the opposite."""
    return Deal.from_hands(two_by_two, [[Card(0, 1), Card(1, 0)], [Card(0, 0), Card(1, 1)]])

"""
Exact number rendering.

All counts are Python ints or fractions.Fraction; the helpers here are the only place
where they are turned into lossy decimal or float form.
"""

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional, Union

Exact = Union[int, Fraction]

SQRT_PRECISION = 40


def _to_decimal(value: Exact, digits: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        if isinstance(value, Fraction):
            # Decimal division is correctly rounded to ctx.prec digits
            return Decimal(value.numerator) / Decimal(value.denominator)
        return +Decimal(value)


def to_scientific(value: Exact, digits: int = 3) -> str:
    """
    Render an exact value in scientific notation with `digits` significant digits.

    Args:
        value: Nonnegative int or Fraction.
        digits: Number of significant digits (>= 1).

    Returns:
        A string such as "1.5e+39"; zero renders as "0".
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if value == 0:
        return "0"
    rounded = _to_decimal(value, digits)
    return f"{rounded:.{digits - 1}e}"


def to_decimal_string(value: Exact, places: int = 6) -> str:
    """Exact ints render in full; fractions render with `places` decimals (half-even)."""
    if isinstance(value, Fraction) and value.denominator != 1:
        with localcontext() as ctx:
            ctx.prec = max(places + len(str(abs(value.numerator) // value.denominator)) + 2, 28)
            quotient = Decimal(value.numerator) / Decimal(value.denominator)
            return str(quotient.quantize(Decimal(1).scaleb(-places)))
    return str(int(value))


def to_float(value: Union[Exact, Decimal]) -> Optional[float]:
    """Float approximation, or None when the value is beyond double range."""
    try:
        return float(value)
    except OverflowError:
        return None


def exact_sqrt(value: Fraction) -> Decimal:
    """Square root of a nonnegative rational with SQRT_PRECISION significant digits."""
    if value < 0:
        raise ValueError("square root of a negative value")
    with localcontext() as ctx:
        ctx.prec = SQRT_PRECISION
        return (Decimal(value.numerator) / Decimal(value.denominator)).sqrt()


def log10(value: Exact) -> float:
    """log10 of a positive exact value, safe beyond double range."""
    if value <= 0:
        raise ValueError("log10 of a nonpositive value")
    if isinstance(value, Fraction):
        return math.log10(value.numerator) - math.log10(value.denominator)
    return math.log10(value)

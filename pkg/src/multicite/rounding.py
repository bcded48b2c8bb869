"""Deterministic rounding on exact rationals."""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from numbers import Rational


def round_half_away(value: Rational | int, ndigits: int = 0) -> Fraction:
    """Round ``value`` to ``ndigits`` decimals, ties going away from zero.

    Works on exact rationals so the result never depends on float
    representation; 2494.5 rounds to 2495 and -2.5 to -3.
    """
    q = Fraction(value)
    scale = 10 ** ndigits
    scaled = q * scale
    mag = abs(scaled)
    n = (2 * mag.numerator + mag.denominator) // (2 * mag.denominator)
    if scaled < 0:
        n = -n
    return Fraction(n, scale)


def round_int(value: Rational | int) -> int:
    return int(round_half_away(value, 0))


def to_decimal(value: Rational | int, ndigits: int) -> Decimal:
    """Exact ``Decimal`` with exactly ``ndigits`` fraction digits."""
    q = round_half_away(value, ndigits)
    scaled = q * 10 ** ndigits
    return Decimal(int(scaled)).scaleb(-ndigits)


def round_float(x: float) -> int:
    """Nearest integer for a float, halves away from zero (display rounding)."""
    return round_int(Fraction(x))

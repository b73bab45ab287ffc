"""Exact rational helpers: parsing, formatting and outward-rounded powers."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import gmpy2

PRECISION_BITS = 64


def as_fraction(value) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are accepted only when they are exactly representable in a short
    decimal form; ``0.1`` becomes ``1/10`` rather than its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(value: Fraction) -> str:
    """Format a rational as a ``"p/q"`` string (always with a denominator)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _scale_exponent(x: Fraction) -> int:
    # roughly floor(log2 x) for x > 0
    return x.numerator.bit_length() - x.denominator.bit_length()


def _is_short(x: Fraction) -> bool:
    return (x.numerator.bit_length() <= PRECISION_BITS
            and x.denominator.bit_length() <= PRECISION_BITS)


def round_up(x: Fraction) -> Fraction:
    """Smallest dyadic with about 64 significant bits that is >= x."""
    if x == 0 or _is_short(x):
        return x
    if x < 0:
        return -round_down(-x)
    s = PRECISION_BITS - _scale_exponent(x)
    num, den = x.numerator, x.denominator
    if s >= 0:
        q = -((-num << s) // den)
        return Fraction(q, 1 << s)
    q = -(-num // (den << -s))
    return Fraction(q << -s)


def round_down(x: Fraction) -> Fraction:
    """Largest dyadic with about 64 significant bits that is <= x."""
    if x == 0 or _is_short(x):
        return x
    if x < 0:
        return -round_up(-x)
    s = PRECISION_BITS - _scale_exponent(x)
    num, den = x.numerator, x.denominator
    if s >= 0:
        return Fraction((num << s) // den, 1 << s)
    return Fraction((num // (den << -s)) << -s)


def _root_bracket(y: Fraction, d: int) -> tuple[Fraction, Fraction]:
    """Return (lo, hi) with lo <= y**(1/d) <= hi, for y > 0."""
    s = PRECISION_BITS - _scale_exponent(y) // d
    shift = d * s
    num, den = y.numerator, y.denominator
    if shift >= 0:
        n, rem = divmod(num << shift, den)
    else:
        n, rem = divmod(num, den << -shift)
    r, exact = gmpy2.iroot(gmpy2.mpz(n), d)
    r = int(r)
    if s >= 0:
        lo = Fraction(r, 1 << s)
        hi = lo if (exact and rem == 0) else Fraction(r + 1, 1 << s)
    else:
        lo = Fraction(r << -s)
        hi = lo if (exact and rem == 0) else Fraction((r + 1) << -s)
    return lo, hi


@lru_cache(maxsize=65536)
def _pow_bracket(x: Fraction, q: Fraction) -> tuple[Fraction, Fraction]:
    if x <= 0:
        raise ValueError("power base must be positive")
    if q.denominator == 1:
        v = x ** q.numerator
        return v, v
    lo, hi = _root_bracket(x ** q.numerator, q.denominator)
    return lo, hi


@lru_cache(maxsize=65536)
def pow_up(x, q) -> Fraction:
    """Rational upper bound for ``x**q`` with x > 0 and rational q."""
    return _pow_bracket(Fraction(x), Fraction(q))[1]


@lru_cache(maxsize=65536)
def pow_down(x, q) -> Fraction:
    """Rational lower bound for ``x**q`` with x > 0 and rational q."""
    return _pow_bracket(Fraction(x), Fraction(q))[0]

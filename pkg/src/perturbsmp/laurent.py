"""Laurent asymptotic expansions with exact coefficients and certified remainders.

An ``(h, k)``-expansion stands for ``a_h e^h + ... + a_k e^k + o(e^k)``.  When a
:class:`RemainderBound` ``(delta, G, eps_max)`` is attached, the remainder is
certified to satisfy ``|o(e^k)| <= G e^(k + delta)`` for ``0 < e <= eps_max``.

Coefficients are always exact :class:`~fractions.Fraction` values.  Bound
constants are exact too; fractional powers are bracketed outward (``G`` is
rounded up, cutoffs for ``eps`` are rounded down) so that certificates remain
valid after rounding.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2

from ._exact import as_fraction, fmt, pow_down, pow_up, round_down, round_up
from .errors import (
    DeltaTooLarge,
    EmptyCoefficients,
    EmptySequence,
    InconsistentRepresentations,
    InvalidBound,
    NonpositiveEpsilon,
    NotPivotal,
    ParseError,
    PivotalZeroLead,
)

__all__ = [
    "RemainderBound",
    "LaurentExpansion",
    "make",
    "normalize_bound",
    "merge",
    "scale",
    "add",
    "mul",
    "reciprocal",
    "div",
    "sum_many",
    "prod_many",
    "constant",
    "downgrade_delta",
    "evaluate",
    "to_record",
    "from_record",
]

ZERO = Fraction(0)
# remainder constants are accumulated in gmpy2 rationals (exact, much faster)
QZERO = gmpy2.mpq(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class RemainderBound:
    """Certificate ``|o(e^k)| <= G e^(k+delta)`` valid for ``0 < e <= eps_max``."""

    delta: Fraction
    G: Fraction
    eps_max: Fraction

    def __post_init__(self):
        try:
            delta = as_fraction(self.delta)
            G = as_fraction(self.G)
            eps = as_fraction(self.eps_max)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidBound(str(exc)) from None
        if not 0 < delta <= 1:
            raise InvalidBound(f"delta must lie in (0, 1], got {delta}")
        if G < 0:
            raise InvalidBound(f"G must be non-negative, got {G}")
        if eps <= 0:
            raise InvalidBound(f"eps_max must be positive, got {eps}")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "eps_max", eps)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.delta, self.G, self.eps_max)


@dataclass(frozen=True)
class LaurentExpansion:
    h: int
    coeffs: tuple[Fraction, ...]
    bound: RemainderBound | None = None

    def __post_init__(self):
        if not self.coeffs:
            raise EmptyCoefficients("an expansion needs at least one coefficient")
        object.__setattr__(self, "h", int(self.h))
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))

    @property
    def k(self) -> int:
        return self.h + len(self.coeffs) - 1

    @property
    def w(self) -> int:
        """Width ``k - h`` of the coefficient window."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[0]

    @property
    def pivotal(self) -> bool:
        # exact coefficients make "lead known nonzero" decidable
        return self.coeffs[0] != 0

    def coeff(self, l: int) -> Fraction:
        """Coefficient of ``e^l``; zero below ``h``, undefined above ``k``."""
        if l < self.h:
            return ZERO
        if l > self.k:
            raise IndexError(f"order {l} lies beyond k={self.k}")
        return self.coeffs[l - self.h]

    def terms(self) -> Iterable[tuple[int, Fraction]]:
        return zip(range(self.h, self.k + 1), self.coeffs)

    def same_terms(self, other: "LaurentExpansion") -> bool:
        """Equality of window and coefficients, ignoring bounds."""
        return self.h == other.h and self.coeffs == other.coeffs

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1, other))

    def __neg__(self):
        return scale(-1, self)

    def __mul__(self, other):
        if isinstance(other, LaurentExpansion):
            return mul(self, other)
        return scale(other, self)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __str__(self) -> str:
        parts = []
        for l, c in self.terms():
            if c == 0 and len(self.coeffs) > 1:
                continue
            mono = "" if l == 0 else ("eps" if l == 1 else f"eps^{l}")
            if mono and abs(c) == 1:
                s = ("-" if c < 0 else "") + mono
            else:
                s = str(c) + (f"*{mono}" if mono else "")
            parts.append(s)
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        tail = f"o(eps^{self.k})"
        if self.bound is not None:
            b = self.bound
            tail += f" [delta={b.delta}, G={float(b.G):.6g}, eps_max={b.eps_max}]"
        return f"{body} + {tail}"


def make(h: int, coeffs: Sequence, pivotal: bool | None = None,
         bound: RemainderBound | tuple | None = None) -> LaurentExpansion:
    """Validated constructor.

    ``pivotal=True`` asserts a nonzero lead and raises :class:`PivotalZeroLead`
    otherwise.  ``pivotal=False`` or ``None`` makes no claim; the flag of the
    returned expansion is read off the exact lead coefficient.
    """
    coeffs = tuple(as_fraction(c) for c in coeffs)
    if not coeffs:
        raise EmptyCoefficients("an expansion needs at least one coefficient")
    if pivotal and coeffs[0] == 0:
        raise PivotalZeroLead("pivotal expansion with zero leading coefficient")
    if bound is not None and not isinstance(bound, RemainderBound):
        bound = RemainderBound(*bound)
    return LaurentExpansion(int(h), coeffs, bound)


def normalize_bound(h: int, coeffs: Sequence, delta, G, eps_max) -> LaurentExpansion:
    """Rewrite a bound with arbitrary ``delta > 0`` into one with ``delta in (0, 1]``.

    The window is padded with exact zeros; ``G`` and ``eps_max`` carry over.
    """
    delta = as_fraction(delta)
    if delta <= 0:
        raise InvalidBound(f"delta must be positive, got {delta}")
    whole = delta.numerator // delta.denominator
    if delta == whole:
        extra, new_delta = whole - 1, ONE
    else:
        extra, new_delta = whole, delta - whole
    coeffs = tuple(as_fraction(c) for c in coeffs) + (ZERO,) * extra
    return make(h, coeffs, bound=RemainderBound(new_delta, G, eps_max))


def constant(value=1, n: int = 0, eps0=1) -> LaurentExpansion:
    """The ``(0, n)``-expansion of a constant; its remainder is identically zero."""
    if n < 0:
        raise ValueError("n must be non-negative")
    value = as_fraction(value)
    return LaurentExpansion(0, (value,) + (ZERO,) * n, RemainderBound(ONE, ZERO, eps0))


def _fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _q(x):
    return gmpy2.mpq(x.numerator, x.denominator)


def _qcoeffs(a: LaurentExpansion) -> list:
    return [_q(c) for c in a.coeffs]


def _up(eps: Fraction, shift):
    """Upper bound for ``eps**shift`` as an mpq.

    Powers ``eps**(n + shift)`` are bounded by ``eps**n * _up(eps, shift)``,
    exact for integer ``n``, so only one rounded root is needed per operation.
    """
    return _q(pow_up(eps, shift))


def _bound(delta, G, eps) -> RemainderBound:
    return RemainderBound(delta, round_up(_fraction(G)), round_down(eps))


def _all_bounded(items) -> bool:
    return all(a.bound is not None for a in items)


# -- merging ---------------------------------------------------------------

def merge(a1: LaurentExpansion, a2: LaurentExpansion) -> LaurentExpansion:
    """Combine two representations of one function into the most informative one."""
    lo, hi = min(a1.h, a2.h), min(a1.k, a2.k)
    for l in range(lo, hi + 1):
        if a1.coeff(l) != a2.coeff(l):
            raise InconsistentRepresentations(
                f"coefficients of eps^{l} differ: {a1.coeff(l)} vs {a2.coeff(l)}")
    h = max(a1.h, a2.h)
    longer = a1 if a1.k >= a2.k else a2
    k = longer.k
    coeffs = tuple(longer.coeff(l) for l in range(h, k + 1))
    return LaurentExpansion(h, coeffs, _merge_bound(a1, a2))


def _merge_bound(a1, a2) -> RemainderBound | None:
    if a1.k != a2.k:
        return (a1 if a1.k > a2.k else a2).bound
    b1, b2 = a1.bound, a2.bound
    if b1 is None or b2 is None:
        return b1 or b2
    if b1.delta != b2.delta:
        return b1 if b1.delta > b2.delta else b2
    return RemainderBound(b1.delta, min(b1.G, b2.G), min(b1.eps_max, b2.eps_max))


# -- linear operations -----------------------------------------------------

def scale(c, a: LaurentExpansion) -> LaurentExpansion:
    c = as_fraction(c)
    bound = None
    if a.bound is not None:
        bound = RemainderBound(a.bound.delta, abs(c) * a.bound.G, a.bound.eps_max)
    return LaurentExpansion(a.h, tuple(c * x for x in a.coeffs), bound)


def _tail(a: LaurentExpansion, k: int, delta: Fraction, eps: Fraction) -> Fraction:
    """Contribution of ``a`` to the remainder of a sum truncated at order ``k``."""
    b = a.bound
    total = _q(b.G) * _up(eps, a.k + b.delta - k - delta) if b.G else QZERO
    if a.k > k:
        qe = _q(eps)
        cs = _qcoeffs(a)
        dropped = sum((abs(cs[i - a.h]) * qe ** i
                       for i in range(max(k + 1, a.h), a.k + 1)), QZERO)
        total += dropped * _up(eps, -k - delta)
    return total


def sum_many(terms: Sequence[LaurentExpansion]) -> LaurentExpansion:
    """Sum of several expansions with the one-shot, order-free remainder bound."""
    terms = list(terms)
    if not terms:
        raise EmptySequence("sum of an empty sequence")
    if len(terms) == 1:
        return terms[0]
    h = min(t.h for t in terms)
    k = min(t.k for t in terms)
    coeffs = tuple(sum((t.coeff(l) for t in terms), ZERO) for l in range(h, k + 1))
    bound = None
    if _all_bounded(terms):
        delta = min(t.bound.delta for t in terms if t.k == k)
        eps = min(t.bound.eps_max for t in terms)
        G = sum((_tail(t, k, delta, eps) for t in terms), QZERO)
        bound = _bound(delta, G, eps)
    return LaurentExpansion(h, coeffs, bound)


def add(a: LaurentExpansion, b: LaurentExpansion) -> LaurentExpansion:
    # the two-term sum rule coincides with the one-shot rule
    return sum_many([a, b])


# -- multiplicative operations ---------------------------------------------

def _qconvolve(x: Sequence, y: Sequence, n: int) -> list:
    out = []
    for r in range(n):
        s = QZERO
        for i in range(max(0, r - len(y) + 1), min(r, len(x) - 1) + 1):
            s += x[i] * y[r - i]
        out.append(s)
    return out


def _convolve(x: Sequence[Fraction], y: Sequence[Fraction], n: int) -> tuple[Fraction, ...]:
    out = _qconvolve([_q(c) for c in x], [_q(c) for c in y], n)
    return tuple(_fraction(c) for c in out)


def _case_delta(left: int, right: int, d_left: Fraction, d_right: Fraction) -> Fraction:
    """Pick delta of the side attaining the smaller truncation order."""
    if left < right:
        return d_left
    if right < left:
        return d_right
    return min(d_left, d_right)


def _abs_power_sum(a: LaurentExpansion, eps: Fraction, shift) -> Fraction:
    """Upper bound for ``sum_i |a_i| eps^(i + shift)`` over the window of ``a``."""
    qe = _q(eps)
    total = sum((abs(c) * qe ** i for i, c in zip(range(a.h, a.k + 1), _qcoeffs(a)) if c),
                QZERO)
    return total * _up(eps, shift)


def mul(a: LaurentExpansion, b: LaurentExpansion) -> LaurentExpansion:
    h = a.h + b.h
    k = min(a.h + b.k, b.h + a.k)
    coeffs = _convolve(a.coeffs, b.coeffs, k - h + 1)
    bound = None
    if _all_bounded((a, b)):
        da, db = a.bound.delta, b.bound.delta
        Ga, Gb = a.bound.G, b.bound.G
        delta = _case_delta(b.h + a.k, a.h + b.k, da, db)
        eps = min(a.bound.eps_max, b.bound.eps_max)
        qe = _q(eps)
        bs = [(j, abs(bj)) for j, bj in zip(range(b.h, b.k + 1), _qcoeffs(b)) if bj]
        dropped = QZERO
        for i, ai in zip(range(a.h, a.k + 1), _qcoeffs(a)):
            if not ai:
                continue
            ai = abs(ai)
            for j, bj in bs:
                if i + j > k:
                    dropped += ai * bj * qe ** (i + j)
        G = dropped * _up(eps, -k - delta)
        if Ga:
            G += _q(Ga) * _abs_power_sum(b, eps, a.k + da - k - delta)
        if Gb:
            G += _q(Gb) * _abs_power_sum(a, eps, b.k + db - k - delta)
        if Ga and Gb:
            G += _q(Ga) * _q(Gb) * _up(eps, a.k + b.k + da + db - k - delta)
        bound = _bound(delta, G, eps)
    return LaurentExpansion(h, coeffs, bound)


def prod_many(factors: Sequence[LaurentExpansion]) -> LaurentExpansion:
    """Product of several expansions with the one-shot, order-free remainder bound."""
    factors = list(factors)
    if not factors:
        raise EmptySequence("product of an empty sequence")
    if len(factors) == 1:
        return factors[0]
    h = sum(f.h for f in factors)
    k_each = [f.k + h - f.h for f in factors]
    k = min(k_each)
    coeffs = factors[0].coeffs
    for f in factors[1:]:
        coeffs = _convolve(coeffs, f.coeffs, len(coeffs) + len(f.coeffs) - 1)
    coeffs = coeffs[: k - h + 1]
    bound = None
    if _all_bounded(factors):
        delta = min(f.bound.delta for f, kf in zip(factors, k_each) if kf == k)
        eps = min(f.bound.eps_max for f in factors)
        # polynomial of absolute coefficients, indexed from total order h
        poly = [abs(c) for c in _qcoeffs(factors[0])]
        for f in factors[1:]:
            poly = _qconvolve(poly, [abs(c) for c in _qcoeffs(f)],
                              len(poly) + len(f.coeffs) - 1)
        qe = _q(eps)
        dropped = sum((c * qe ** (h + r) for r, c in enumerate(poly) if h + r > k and c), QZERO)
        G = dropped * _up(eps, -k - delta)
        envelopes = [_abs_power_sum(f, eps, 0) + _q(f.bound.G) * _up(eps, f.k + f.bound.delta)
                     for f in factors]
        for j, f in enumerate(factors):
            if not f.bound.G:
                continue
            term = _q(f.bound.G) * _up(eps, f.k + f.bound.delta - k - delta)
            for i, env in enumerate(envelopes):
                if i != j:
                    term *= env
            G += term
        bound = _bound(delta, G, eps)
    return LaurentExpansion(h, coeffs, bound)


def _eps_cutoff(b: LaurentExpansion) -> Fraction | None:
    """Range on which the remainder of ``b`` cannot push it below half its lead."""
    half_lead = abs(b.lead) / 2
    bb = b.bound
    if b.h < b.k:
        den = _q(bb.G) * _up(bb.eps_max, b.k + bb.delta - b.h - 1) if bb.G else QZERO
        qe = _q(bb.eps_max)
        for i, c in zip(range(b.h, b.k + 1), _qcoeffs(b)):
            if i > b.h and c:
                den += abs(c) * qe ** (i - b.h - 1)
        if den == 0:
            return None
        return round_down(half_lead / _fraction(den))
    if bb.G == 0:
        return None
    return round_down(pow_down(half_lead / bb.G, 1 / bb.delta))


def _require_pivotal(b: LaurentExpansion):
    if not b.pivotal:
        raise NotPivotal("divisor must be pivotal (nonzero leading coefficient)")


def reciprocal(b: LaurentExpansion) -> LaurentExpansion:
    _require_pivotal(b)
    h, k = -b.h, b.k - 2 * b.h
    bq = _qcoeffs(b)
    b0 = bq[0]
    c = [1 / b0]
    for r in range(1, k - h + 1):
        s = sum((bq[i] * c[r - i] for i in range(1, r + 1)), QZERO)
        c.append(-s / b0)
    coeffs = tuple(_fraction(x) for x in c)
    bound = None
    if b.bound is not None:
        delta = b.bound.delta
        cut = _eps_cutoff(b)
        eps = b.bound.eps_max if cut is None else min(b.bound.eps_max, cut)
        top = b.k - b.h
        qe = _q(eps)
        dropped = QZERO
        for i, bi in zip(range(b.h, b.k + 1), bq):
            for j, cj in zip(range(h, k + 1), c):
                if i + j > top and bi and cj:
                    dropped += abs(bi) * abs(cj) * qe ** (i + j)
        G = dropped * _up(eps, -top - delta)
        if b.bound.G:
            G += _q(b.bound.G) * _abs_power_sum(LaurentExpansion(h, coeffs), eps, b.h)
        G = G * 2 / abs(b0)
        bound = _bound(delta, G, eps)
    return LaurentExpansion(h, coeffs, bound)


def div(a: LaurentExpansion, b: LaurentExpansion) -> LaurentExpansion:
    """Quotient ``a / b`` computed by the direct long-division recurrence."""
    _require_pivotal(b)
    h = a.h - b.h
    k = min(a.k - b.h, a.h + b.k - 2 * b.h)
    aq, bq = _qcoeffs(a), _qcoeffs(b)
    b0 = bq[0]
    d = []
    for r in range(k - h + 1):
        s = sum((bq[i] * d[r - i] for i in range(1, min(r, len(bq) - 1) + 1)), QZERO)
        d.append((aq[r] - s) / b0)
    coeffs = tuple(_fraction(x) for x in d)
    bound = None
    if _all_bounded((a, b)):
        da, db = a.bound.delta, b.bound.delta
        delta = _case_delta(a.k - b.h, a.h + b.k - 2 * b.h, da, db)
        eps = min(a.bound.eps_max, b.bound.eps_max)
        cut = _eps_cutoff(b)
        if cut is not None:
            eps = min(eps, cut)
        top = min(a.k, a.h + b.k - b.h)  # = k + h_B
        qe = _q(eps)
        dropped = sum((abs(aq[i - a.h]) * qe ** i for i in range(top + 1, a.k + 1)
                       if aq[i - a.h]), QZERO)
        for i, bi in zip(range(b.h, b.k + 1), bq):
            for j, dj in zip(range(h, k + 1), d):
                if i + j > top and bi and dj:
                    dropped += abs(bi) * abs(dj) * qe ** (i + j)
        G = dropped * _up(eps, -b.h - k - delta)
        if a.bound.G:
            G += _q(a.bound.G) * _up(eps, a.k + da - b.h - k - delta)
        if b.bound.G:
            G += _q(b.bound.G) * _abs_power_sum(LaurentExpansion(h, coeffs), eps,
                                                b.k + db - b.h - k - delta)
        G = G * 2 / abs(b0)
        bound = _bound(delta, G, eps)
    return LaurentExpansion(h, coeffs, bound)


# -- bound manipulation and evaluation ---------------------------------------

def downgrade_delta(a: LaurentExpansion, delta_star) -> LaurentExpansion:
    """Weaken the bound exponent to ``delta_star``, inflating ``G`` accordingly."""
    if a.bound is None:
        raise InvalidBound("expansion carries no bound")
    delta_star = as_fraction(delta_star)
    b = a.bound
    if delta_star > b.delta:
        raise DeltaTooLarge(f"delta* = {delta_star} exceeds delta = {b.delta}")
    if delta_star <= 0:
        raise InvalidBound("delta* must be positive")
    if delta_star == b.delta:
        return a
    G = round_up(b.G * pow_up(b.eps_max, b.delta - delta_star))
    return LaurentExpansion(a.h, a.coeffs, RemainderBound(delta_star, G, b.eps_max))


def evaluate(a: LaurentExpansion, epsilon) -> Fraction:
    """Exact partial sum ``sum_l a_l e^l`` (the remainder is dropped)."""
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise NonpositiveEpsilon(f"epsilon must be positive, got {epsilon}")
    return sum((c * epsilon ** l for l, c in a.terms() if c), ZERO)


def bound_at(a: LaurentExpansion, epsilon) -> Fraction | None:
    """Certified upper bound ``G e^(k+delta)`` on the remainder, if available."""
    if a.bound is None:
        return None
    epsilon = as_fraction(epsilon)
    if not 0 < epsilon <= a.bound.eps_max:
        return None
    return a.bound.G * pow_up(epsilon, a.k + a.bound.delta)


# -- serialization -----------------------------------------------------------

def to_record(a: LaurentExpansion) -> dict:
    rec = {
        "h": a.h,
        "k": a.k,
        "coeffs": [fmt(c) for c in a.coeffs],
        "pivotal": a.pivotal,
    }
    if a.bound is not None:
        rec["bound"] = {
            "delta": fmt(a.bound.delta),
            "G": fmt(a.bound.G),
            "eps_max": fmt(a.bound.eps_max),
        }
    return rec


def from_record(rec: dict, location: str = "") -> LaurentExpansion:
    try:
        coeffs = [as_fraction(c) for c in rec["coeffs"]]
        h = rec["h"]
        if not isinstance(h, int) or isinstance(h, bool):
            raise ParseError("h must be an integer", location)
        if "k" in rec and rec["k"] != h + len(coeffs) - 1:
            raise ParseError("k does not match h and the number of coefficients", location)
        bound = None
        if rec.get("bound") is not None:
            b = rec["bound"]
            delta = as_fraction(b["delta"])
            if delta > 1:
                return normalize_bound(h, coeffs, delta, b["G"], b["eps_max"])
            bound = RemainderBound(delta, b["G"], b["eps_max"])
        return make(h, coeffs, pivotal=rec.get("pivotal"), bound=bound)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad expansion record ({exc})", location) from None

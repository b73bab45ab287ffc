"""Shared helpers: random expansions and independent reference computations."""
from __future__ import annotations

import random
from fractions import Fraction as F

from perturbsmp._exact import pow_up
from perturbsmp.laurent import LaurentExpansion, RemainderBound
from perturbsmp.oracle import solve


def rand_expansion(rng: random.Random, h_range=(-3, 3), w_max=6, pivotal=True,
                   bounded=True, eps=F(1, 4)) -> LaurentExpansion:
    h = rng.randint(*h_range)
    w = rng.randint(0, w_max)
    coeffs = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(w + 1)]
    if pivotal and coeffs[0] == 0:
        coeffs[0] = F(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 5))
    bound = None
    if bounded:
        bound = RemainderBound(F(rng.randint(1, 4), 4), F(rng.randint(0, 8), 4), eps)
    return LaurentExpansion(h, tuple(coeffs), bound)


def truncated(h: int, poly: list[F], k: int, delta: F, eps_max: F) -> LaurentExpansion:
    """Honest (h, k, delta, G, eps_max)-expansion of ``e^h * sum poly[r] e^r``.

    The dropped tail is bounded term by term on (0, eps_max].
    """
    keep = k - h + 1
    G = F(0)
    for r, c in enumerate(poly[keep:], start=keep):
        if c:
            G += abs(c) * pow_up(eps_max, h + r - k - delta)
    coeffs = tuple(poly[:keep]) + (F(0),) * max(0, keep - len(poly))
    return LaurentExpansion(h, coeffs, RemainderBound(delta, G, eps_max))


def poly_value(h: int, poly, eps: F) -> F:
    return sum((c * eps ** (h + r) for r, c in enumerate(poly)), F(0))


def series_quotient(a: LaurentExpansion, b: LaurentExpansion, n: int) -> list[F]:
    """First ``n`` coefficients of a/b via a dense triangular (Toeplitz) solve."""
    bs = list(b.coeffs) + [F(0)] * n
    as_ = list(a.coeffs) + [F(0)] * n
    T = [[bs[r - c] if r >= c else F(0) for c in range(n)] for r in range(n)]
    return solve(T, as_[:n])

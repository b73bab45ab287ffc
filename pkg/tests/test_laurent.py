import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from perturbsmp._exact import pow_up
from perturbsmp.errors import (
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
from perturbsmp.laurent import (
    LaurentExpansion,
    RemainderBound,
    add,
    bound_at,
    constant,
    div,
    downgrade_delta,
    evaluate,
    from_record,
    make,
    merge,
    mul,
    normalize_bound,
    prod_many,
    reciprocal,
    scale,
    sum_many,
    to_record,
)

from helpers import poly_value, rand_expansion, series_quotient, truncated


def E(h, coeffs, bound=None):
    return make(h, coeffs, bound=bound)


def window(a):
    return (a.h, a.k, list(a.coeffs))


# -- construction ------------------------------------------------------------

def test_make_examples():
    assert window(make(0, [1], pivotal=True)) == (0, 0, [1])
    a = make(-1, [1, 1], pivotal=True)
    assert (a.h, a.k, a.w) == (-1, 0, 1)
    z = make(0, [0, 2], pivotal=False)
    assert not z.pivotal and z.coeffs == (0, 2)


def test_make_errors():
    with pytest.raises(EmptyCoefficients):
        make(0, [])
    with pytest.raises(PivotalZeroLead):
        make(0, [0, 1], pivotal=True)
    with pytest.raises(InvalidBound):
        make(0, [1], bound=(F(3, 2), 1, F(1, 2)))
    with pytest.raises(InvalidBound):
        RemainderBound(F(1, 2), -1, F(1, 2))
    with pytest.raises(InvalidBound):
        RemainderBound(F(1, 2), 1, 0)


def test_normalize_bound_examples():
    a = normalize_bound(0, [1], F(3, 2), 2, F(1, 2))
    assert window(a) == (0, 1, [1, 0])
    assert a.bound.as_tuple() == (F(1, 2), 2, F(1, 2))
    b = normalize_bound(0, [1], 1, 3, F(1, 2))
    assert window(b) == (0, 0, [1]) and b.bound.delta == 1
    c = normalize_bound(-2, [3], 2, 1, F(1, 10))
    assert window(c) == (-2, -1, [3, 0]) and c.bound.delta == 1


def test_expansion_is_immutable():
    a = E(0, [1, 2])
    with pytest.raises(AttributeError):
        a.h = 3


# -- merge -------------------------------------------------------------------

def test_merge_examples():
    a = merge(E(0, [1, 2], (1, 1, F(1, 2))), E(0, [1, 2, 5], (F(1, 2), 7, F(1, 3))))
    assert window(a) == (0, 2, [1, 2, 5])
    assert a.bound.as_tuple() == (F(1, 2), 7, F(1, 3))

    b = merge(E(0, [1, 2], (F(1, 2), 3, F(1, 10))), E(0, [1, 2], (F(1, 2), 1, F(1, 5))))
    assert b.bound.as_tuple() == (F(1, 2), 1, F(1, 10))

    with pytest.raises(InconsistentRepresentations):
        merge(E(0, [1, 2]), E(0, [1, 3]))


def test_merge_prefers_larger_h_and_delta():
    # (0,1):[0,1] and (1,1):[1] describe the same function
    m = merge(E(0, [0, 1]), E(1, [1]))
    assert window(m) == (1, 1, [1]) and m.pivotal
    m = merge(E(0, [1, 2], (F(1, 2), 1, 1)), E(0, [1, 2], (1, 5, F(1, 2))))
    assert m.bound.as_tuple() == (1, 5, F(1, 2))


# -- arithmetic examples -----------------------------------------------------

def test_scale_examples():
    assert window(scale(2, E(0, [1]))) == (0, 0, [2])
    assert window(scale(-1, E(-1, [1, 2]))) == (-1, 0, [-1, -2])
    z = scale(0, E(0, [1, 1], (F(1, 2), 3, F(1, 4))))
    assert window(z) == (0, 1, [0, 0]) and not z.pivotal and z.bound.G == 0


def test_add_examples():
    assert window(add(E(0, [1, 1]), E(0, [1, -1]))) == (0, 1, [2, 0])
    assert window(add(E(-1, [1, 1]), E(0, [1, 1, 1]))) == (-1, 0, [1, 2])
    c = add(E(0, [1, 1]), E(0, [-1, 1]))
    assert window(c) == (0, 1, [0, 2]) and not c.pivotal


def test_mul_examples():
    assert window(mul(E(0, [1, 1]), E(0, [1, -1]))) == (0, 1, [1, 0])
    assert window(mul(E(-1, [1]), E(1, [1]))) == (0, 0, [1])
    assert window(mul(E(0, [1, 2]), E(0, [3]))) == (0, 0, [3])


def test_reciprocal_examples():
    assert window(reciprocal(E(0, [1, -1]))) == (0, 1, [1, 1])
    assert window(reciprocal(E(1, [2]))) == (-1, -1, [F(1, 2)])
    assert window(reciprocal(E(0, [1, 1, 1]))) == (0, 2, [1, -1, 0])
    with pytest.raises(NotPivotal):
        reciprocal(E(0, [0, 1]))


def test_div_examples():
    assert window(div(E(1, [1, 1]), E(1, [1]))) == (0, 0, [1])
    assert window(div(E(0, [1, 1]), E(0, [1, -1]))) == (0, 1, [1, 2])
    a = E(0, [2, 3])
    assert window(div(a, a)) == (0, 1, [1, 0])
    with pytest.raises(NotPivotal):
        div(a, E(0, [0, 1]))


def test_sum_many_examples():
    terms = [E(0, [1, 0], (1, 1, F(1, 4))), E(1, [2, 0], (F(1, 2), 2, F(1, 5))),
             E(0, [0, 1, 5], (1, 3, F(1, 4)))]
    s = sum_many(terms)
    assert window(s) == (0, 1, [1, 3])
    assert sum_many(terms[:1]) == terms[0]
    for perm in ([2, 0, 1], [1, 2, 0], [2, 1, 0]):
        assert sum_many([terms[i] for i in perm]) == s
    with pytest.raises(EmptySequence):
        sum_many([])


def test_prod_many_examples():
    f = E(0, [1, 1], (F(1, 2), 1, F(1, 4)))
    g = E(0, [1, 1], (1, 2, F(1, 3)))
    assert window(prod_many([f, f, f])) == (0, 1, [1, 3])
    assert window(prod_many([E(1, [2]), E(-1, [3])])) == (0, 0, [6])
    assert prod_many([f, g, f]) == prod_many([g, f, f]) == prod_many([f, f, g])
    with pytest.raises(EmptySequence):
        prod_many([])


def test_constant_examples():
    c = constant(1, 2)
    assert window(c) == (0, 2, [1, 0, 0]) and c.bound.G == 0
    assert window(constant(1, 0)) == (0, 0, [1])
    z = constant(0, 1)
    assert window(z) == (0, 1, [0, 0]) and not z.pivotal


def test_downgrade_delta_examples():
    a = E(0, [1], (1, 2, F(1, 2)))
    d = downgrade_delta(a, F(1, 2))
    assert d.bound.delta == F(1, 2)
    # G* = 2 * 0.5**0.5, rounded up
    assert d.bound.G >= 0 and (d.bound.G / 2) ** 2 >= F(1, 2)
    assert (d.bound.G / 2) ** 2 - F(1, 2) < F(1, 2**60)
    assert downgrade_delta(a, 1) == a
    with pytest.raises(DeltaTooLarge):
        downgrade_delta(E(0, [1], (F(1, 2), 1, F(1, 2))), 1)


def test_evaluate_examples():
    # 2 + 0 + 2 * (1/2)
    assert evaluate(E(-1, [1, 0, 2]), F(1, 2)) == 3
    assert evaluate(constant(1, 3), F(3, 7)) == 1
    assert evaluate(E(0, [0, 2]), F(1, 4)) == F(1, 2)
    with pytest.raises(NonpositiveEpsilon):
        evaluate(E(0, [1]), 0)


def test_record_round_trip():
    a = E(-2, [F(3, 7), 0, -1], (F(1, 3), F(5, 2), F(1, 10)))
    rec = to_record(a)
    assert rec["coeffs"] == ["3/7", "0/1", "-1/1"] and rec["k"] == 0
    assert from_record(rec) == a
    assert from_record(to_record(E(0, [1]))) == E(0, [1])
    with pytest.raises(ParseError):
        from_record({"h": 0, "k": 3, "coeffs": ["1"]})
    with pytest.raises(ParseError):
        from_record({"h": "0", "coeffs": ["1"]})


def test_str_mentions_window():
    assert str(E(-1, [1, 1])) == "eps^-1 + 1 + o(eps^0)"


# -- properties ----------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32)


@given(seeds)
def test_length_laws(seed):
    rng = random.Random(seed)
    a, b = rand_expansion(rng), rand_expansion(rng)
    assert scale(F(3, 2), a).w == a.w
    assert min(a.w, b.w) <= add(a, b).w <= max(a.w, b.w)
    assert mul(a, b).w == min(a.w, b.w)
    assert reciprocal(b).w == b.w
    assert div(a, b).w == min(a.w, b.w)


@given(seeds)
def test_division_matches_long_division(seed):
    rng = random.Random(seed)
    a, b = rand_expansion(rng), rand_expansion(rng)
    d = div(a, b)
    assert d.h == a.h - b.h
    assert list(d.coeffs) == series_quotient(a, b, len(d.coeffs))
    one = LaurentExpansion(0, (F(1),) + (F(0),) * 10)
    r = reciprocal(b)
    assert list(r.coeffs) == series_quotient(one, b, len(r.coeffs))


@given(seeds)
def test_bound_symmetry(seed):
    rng = random.Random(seed)
    a, b = rand_expansion(rng), rand_expansion(rng)
    assert add(a, b) == add(b, a)
    assert mul(a, b) == mul(b, a)


@given(seeds)
def test_delta_never_drops_below_inputs(seed):
    rng = random.Random(seed)
    a, b, c = (rand_expansion(rng) for _ in range(3))
    out = div(add(mul(a, b), c), b)
    assert out.bound.delta >= min(x.bound.delta for x in (a, b, c))


def _grid(eps_max):
    return [eps_max * f for f in (F(1), F(1, 2), F(1, 10), F(1, 100), F(1, 1000))]


def _rand_poly(rng, length):
    cs = [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(length)]
    if cs[0] == 0:
        cs[0] = F(1)
    return cs


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_certified_bounds_hold_for_rational_functions(seed):
    rng = random.Random(seed)
    eps0 = F(1, 4)
    funcs = []
    for _ in range(3):
        h = rng.randint(-2, 2)
        poly = _rand_poly(rng, rng.randint(1, 7))
        k = rng.randint(h, h + len(poly) - 1)
        delta = rng.choice([F(1, 3), F(1, 2), F(1)])
        funcs.append((truncated(h, poly, k, delta, eps0), (h, poly)))
    (A, fa), (B, fb), (C, fc) = funcs
    fA = lambda e: poly_value(*fa, e)
    fB = lambda e: poly_value(*fb, e)
    fC = lambda e: poly_value(*fc, e)
    cases = [
        (add(A, B), lambda e: fA(e) + fB(e)),
        (mul(A, B), lambda e: fA(e) * fB(e)),
        (scale(-3, A), lambda e: -3 * fA(e)),
        (reciprocal(B), lambda e: 1 / fB(e)),
        (div(A, B), lambda e: fA(e) / fB(e)),
        (sum_many([A, B, C]), lambda e: fA(e) + fB(e) + fC(e)),
        (prod_many([A, B, C]), lambda e: fA(e) * fB(e) * fC(e)),
        (div(mul(A, C), B), lambda e: fA(e) * fC(e) / fB(e)),
        (downgrade_delta(A, A.bound.delta / 2), fA),
    ]
    for expansion, f in cases:
        for eps in _grid(expansion.bound.eps_max):
            err = abs(f(eps) - evaluate(expansion, eps))
            assert err <= bound_at(expansion, eps), (expansion, eps)


def test_bounds_accept_zero_G():
    one = constant(1, 2, F(1, 2))
    x = E(1, [1], (1, 0, F(1, 2)))
    s = add(one, x)
    assert s.bound.G == 0
    q = div(one, add(one, x))
    eps = F(1, 8)
    assert abs(1 / (1 + eps) - evaluate(q, eps)) <= bound_at(q, eps)

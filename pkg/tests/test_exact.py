from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from perturbsmp._exact import as_fraction, fmt, pow_down, pow_up, round_down, round_up

positive = st.fractions(min_value=F(1, 10**6), max_value=F(10**3), max_denominator=10**6)
exponents = st.fractions(min_value=F(-3), max_value=F(5), max_denominator=12)


@given(positive, exponents)
def test_pow_brackets_true_value(x, q):
    lo, hi = pow_down(x, q), pow_up(x, q)
    assert lo <= hi
    # y = x**q  <=>  y**d = x**p for q = p/d; compare exactly
    p, d = q.numerator, q.denominator
    assert lo ** d <= x ** p <= hi ** d
    assert (hi - lo) <= abs(hi) * F(1, 2**60) + F(1, 2**200)


def test_integer_exponents_are_exact():
    assert pow_up(F(1, 10), 3) == F(1, 1000) == pow_down(F(1, 10), 3)
    assert pow_up(F(1, 4), F(1, 2)) == F(1, 2)


@given(st.fractions(min_value=F(-10**9), max_value=F(10**9), max_denominator=10**30))
def test_rounding_is_outward(x):
    assert round_down(x) <= x <= round_up(x)
    for r in (round_down(x), round_up(x)):
        assert abs(r - x) <= abs(x) * F(1, 2**62)
        assert r.numerator.bit_length() <= 66 or r.denominator.bit_length() <= 66


def test_parse_and_format():
    assert as_fraction("3/4") == F(3, 4)
    assert as_fraction(" -2 ") == F(-2)
    assert as_fraction(0.1) == F(1, 10)
    assert fmt(F(3)) == "3/1"
    with pytest.raises(TypeError):
        as_fraction(True)
    with pytest.raises(ValueError):
        as_fraction("x/2")

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from src.core.errors import DomainError
from src.ival import rounding as rd
from src.ival.interval import Interval, cos, cosh, exp, iv_arith, pi_enclosure, sin, sinh, sqrt

mpmath.mp.dps = 100

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
small = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_infinity=False)


def _holds(iv: Interval, exact) -> bool:
    """Containment of an exact rational; an infinite endpoint holds trivially"""
    below = iv.lo == -math.inf or Fraction(iv.lo) <= exact
    above = iv.hi == math.inf or exact <= Fraction(iv.hi)
    return below and above


def _holds_mp(iv: Interval, value) -> bool:
    return mpmath.mpf(iv.lo) <= value <= mpmath.mpf(iv.hi)


@settings(max_examples=500)
@given(finite, finite)
def test_add_sub_mul_contain_exact_results(a, b):
    x, y = Interval(a), Interval(b)
    fa, fb = Fraction(a), Fraction(b)
    assert _holds(x + y, fa + fb)
    assert _holds(x - y, fa - fb)
    assert _holds(x * y, fa * fb)


@settings(max_examples=500)
@given(finite, finite.filter(lambda v: v != 0.0))
@example(1.0, 5e-324)
@example(-1e6, -5e-324)
def test_division_contains_exact_quotient(a, b):
    assert _holds(Interval(a) / Interval(b), Fraction(a) / Fraction(b))


@given(st.floats(min_value=0.0, max_value=1e6, allow_nan=False))
def test_sqrt_brackets_the_root(a):
    r = sqrt(Interval(a))
    assert Fraction(r.lo) ** 2 <= Fraction(a) <= Fraction(r.hi) ** 2


@settings(max_examples=200)
@given(small)
@example(5e-324)
def test_elementary_functions_contain_oracle(x):
    v = mpmath.mpf(x)
    assert _holds_mp(sin(x), mpmath.sin(v))
    assert _holds_mp(cos(x), mpmath.cos(v))
    tenth = Interval.exact(Fraction(x) / 10)
    v10 = mpmath.mpf(x) / 10
    assert _holds_mp(tenth, v10)
    assert _holds_mp(exp(tenth), mpmath.exp(v10))
    assert _holds_mp(cosh(tenth), mpmath.cosh(v10))
    assert _holds_mp(sinh(tenth), mpmath.sinh(v10))


@given(finite, finite)
def test_wider_operands_give_wider_results(a, b):
    lo, hi = min(a, b), max(a, b)
    narrow = Interval(lo, hi)
    wide = narrow.widen(1.0)
    assert (wide * wide).contains(narrow * narrow)
    assert (wide + Interval(3.0)).contains(narrow + Interval(3.0))


def test_pi_enclosure_is_two_floats_wide():
    p = pi_enclosure()
    assert _holds_mp(p, mpmath.pi)
    assert p.hi == rd.next_up(p.lo)
    assert _holds_mp(iv_arith("mul", p, p), mpmath.pi ** 2)
    assert iv_arith("mul", p, p).contains(9.8696044010893586)


def test_cos_of_pi_is_tight():
    c = cos(pi_enclosure())
    assert c.contains(-1.0)
    assert c.width <= 1e-12


def test_exact_fraction_is_tight():
    third = Interval.exact(Fraction(1, 3))
    assert third.contains(Fraction(1, 3))
    assert third.hi == rd.next_up(third.lo)
    assert Interval.exact(5) == Interval(5.0)


def test_sign_reports_certain_signs_only():
    assert Interval(1.0, 2.0).sign() == 1
    assert Interval(-2.0, -1.0).sign() == -1
    assert Interval(0.0).sign() == 0
    assert Interval(-1.0, 1.0).sign() is None


def test_mag_mig_and_width():
    x = Interval(-3.0, 2.0)
    assert x.mag == 3.0
    assert x.mig == 0.0
    assert Interval(2.0, 5.0).mig == 2.0
    assert x.width == 5.0


def test_division_by_zero_interval_raises():
    with pytest.raises(DomainError):
        Interval(1.0) / Interval(-1.0, 1.0)


def test_sqrt_of_negative_raises():
    with pytest.raises(DomainError):
        sqrt(Interval(-1.0, 4.0))


def test_empty_interval_rejected():
    with pytest.raises(DomainError):
        Interval(2.0, 1.0)


def test_unknown_operation_rejected():
    with pytest.raises(DomainError):
        iv_arith("tan", Interval(1.0))
    with pytest.raises(DomainError):
        iv_arith("add", Interval(1.0))


def test_float_rounding_brackets_rationals():
    q = Fraction(2, 7)
    assert Fraction(rd.float_down(q)) <= q <= Fraction(rd.float_up(q))
    assert rd.add_down(0.1, 0.2) <= rd.add_up(0.1, 0.2)
    assert Fraction(rd.add_down(0.1, 0.2)) <= Fraction(0.1) + Fraction(0.2) <= Fraction(rd.add_up(0.1, 0.2))

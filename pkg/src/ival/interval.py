"""
Closed floating-point intervals with outward rounding.

`Interval` is the scalar atom every other module computes with. Endpoints are
Python floats; an endpoint may be infinite only when a caller deliberately
builds an unbounded interval (rough enclosures with no upper bound yet).
"""

import math
import numbers
from fractions import Fraction
from typing import Iterable, Optional, Union

from src.core.errors import DomainError
from src.ival import rounding as rd

Number = Union[int, float, Fraction]

_EXACT_INT = 2 ** 53


class Interval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: Optional[float] = None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if not lo <= hi:
            raise DomainError("empty or NaN interval", lo=lo, hi=hi)
        self.lo = lo
        self.hi = hi

    # construction

    @classmethod
    def exact(cls, value) -> "Interval":
        """Tightest enclosure of an exact value (int, float, Fraction, Decimal, str)"""
        if isinstance(value, Interval):
            return value
        if isinstance(value, float):
            return cls(value)
        if isinstance(value, int) and abs(value) <= _EXACT_INT:
            return cls(float(value))
        q = Fraction(value)
        return cls(rd.float_down(q), rd.float_up(q))

    from_fraction = exact

    @classmethod
    def hull_of(cls, items: Iterable["Interval"]) -> "Interval":
        items = list(items)
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    # inspection

    @property
    def width(self) -> float:
        return rd.sub_up(self.hi, self.lo)

    @property
    def mid(self) -> float:
        if math.isinf(self.lo) or math.isinf(self.hi):
            return self.lo if math.isinf(self.hi) else self.hi
        return 0.5 * self.lo + 0.5 * self.hi

    @property
    def rad(self) -> float:
        m = self.mid
        return max(rd.sub_up(self.hi, m), rd.sub_up(m, self.lo))

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    @property
    def is_bounded(self) -> bool:
        return not (math.isinf(self.lo) or math.isinf(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (Fraction,)) or (isinstance(x, int) and abs(x) > _EXACT_INT):
            q = Fraction(x)
            return (math.isinf(self.lo) or Fraction(self.lo) <= q) and (math.isinf(self.hi) or q <= Fraction(self.hi))
        return self.lo <= x <= self.hi

    __contains__ = contains

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def sign(self) -> Optional[int]:
        """+1 / -1 when the sign is certain, 0 for the point zero, None otherwise"""
        if self.lo > 0.0:
            return 1
        if self.hi < 0.0:
            return -1
        if self.lo == 0.0 and self.hi == 0.0:
            return 0
        return None

    def certainly_lt(self, other) -> bool:
        other = _coerce(other)
        return self.hi < other.lo

    def certainly_le(self, other) -> bool:
        other = _coerce(other)
        return self.hi <= other.lo

    def disjoint_from(self, other: "Interval") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def widen(self, eps: float) -> "Interval":
        return Interval(rd.sub_down(self.lo, eps), rd.add_up(self.hi, eps))

    # arithmetic

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other) -> "Interval":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Interval(rd.add_down(self.lo, other.lo), rd.add_up(self.hi, other.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Interval(rd.sub_down(self.lo, other.hi), rd.sub_up(self.hi, other.lo))

    def __rsub__(self, other) -> "Interval":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other) -> "Interval":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        lo = min(rd.mul_down(a, c), rd.mul_down(a, d), rd.mul_down(b, c), rd.mul_down(b, d))
        hi = max(rd.mul_up(a, c), rd.mul_up(a, d), rd.mul_up(b, c), rd.mul_up(b, d))
        return Interval(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.contains_zero():
            raise DomainError("division by an interval containing zero", divisor=str(other))
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        lo = min(rd.div_down(a, c), rd.div_down(a, d), rd.div_down(b, c), rd.div_down(b, d))
        hi = max(rd.div_up(a, c), rd.div_up(a, d), rd.div_up(b, c), rd.div_up(b, d))
        return Interval(lo, hi)

    def __rtruediv__(self, other) -> "Interval":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int) or n < 0:
            raise DomainError("only non-negative integer powers", exponent=n)
        if n == 0:
            return Interval(1.0)
        if n % 2 == 0:
            return Interval(_pow_down(self.mig, n), _pow_up(self.mag, n))
        lo = _pow_down(self.lo, n) if self.lo >= 0 else -_pow_up(-self.lo, n)
        hi = _pow_up(self.hi, n) if self.hi >= 0 else -_pow_down(-self.hi, n)
        return Interval(lo, hi)

    def sqr(self) -> "Interval":
        return self ** 2

    def __abs__(self) -> "Interval":
        return Interval(self.mig, self.mag)

    # comparison and display

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


def _coerce(value):
    if isinstance(value, Interval):
        return value
    if isinstance(value, numbers.Integral):
        return Interval.exact(int(value))
    if isinstance(value, (float, Fraction)):
        return Interval.exact(value)
    return NotImplemented


def _pow_down(x: float, n: int) -> float:
    result = 1.0
    for _ in range(n):
        result = rd.mul_down(result, x)
    return result


def _pow_up(x: float, n: int) -> float:
    result = 1.0
    for _ in range(n):
        result = rd.mul_up(result, x)
    return result


# constants

# fl(pi) < pi < next_up(fl(pi))
_PI = Interval(3.141592653589793, rd.next_up(3.141592653589793))
# pi/2 = P1 + P2 with P1 = fl(pi/2) and P2 enclosed below
_HALF_PI_HEAD = 1.5707963267948966
_HALF_PI_TAIL = Interval(6.1232339957367e-17, 6.1232339957368e-17)
# fl(e) < e < next_up(fl(e))
_E = Interval(2.718281828459045, rd.next_up(2.718281828459045))


def pi_enclosure() -> Interval:
    """Two-float enclosure of pi"""
    return _PI


def half_pi() -> Interval:
    return _HALF_PI_TAIL + _HALF_PI_HEAD


def sqrt(x: Interval) -> Interval:
    x = _coerce(x)
    if x.lo < 0.0:
        raise DomainError("sqrt of an interval with negative part", operand=str(x))
    return Interval(rd.sqrt_down(x.lo), rd.sqrt_up(x.hi))


# Taylor kernels on small arguments

_INV_FACT = [Interval.exact(Fraction(1, math.factorial(k))) for k in range(40)]


def _series_tail(r: Interval, order: int) -> Interval:
    """[-T, T] with T >= |r|^order / order!"""
    t = (Interval(r.mag) ** order) * _INV_FACT[order]
    return Interval(-t.hi, t.hi)


def _sin_small(r: Interval, terms: int = 13) -> Interval:
    r2 = r.sqr()
    acc = Interval(0.0)
    for j in range(terms - 1, -1, -1):
        coeff = _INV_FACT[2 * j + 1]
        acc = (coeff if j % 2 == 0 else -coeff) + r2 * acc
    return r * acc + _series_tail(r, 2 * terms + 1)


def _cos_small(r: Interval, terms: int = 13) -> Interval:
    r2 = r.sqr()
    acc = Interval(0.0)
    for j in range(terms - 1, -1, -1):
        coeff = _INV_FACT[2 * j]
        acc = (coeff if j % 2 == 0 else -coeff) + r2 * acc
    return acc + _series_tail(r, 2 * terms)


def _exp_small(r: Interval, terms: int = 25) -> Interval:
    acc = Interval(0.0)
    for j in range(terms - 1, -1, -1):
        acc = _INV_FACT[j] + r * acc
    tail = _series_tail(r, terms) * 2.0  # |r| <= 1/2 so the remainder series is at most twice its first term
    return acc + tail


def _reduce_quadrant(x: float):
    """x = k*pi/2 + r with r enclosed; |r| <= pi/4 + tiny"""
    k = round(x / _HALF_PI_HEAD)
    if k == 0:
        return 0, Interval(x)
    kf = float(k)
    p, e = rd.two_product(kf, _HALF_PI_HEAD)
    r = (Interval(x) - Interval(p)) - Interval(e)
    r = r - _HALF_PI_TAIL * kf
    return k, r


def _sin_point(x: float) -> Interval:
    if math.isinf(x) or abs(x) > 1e15:
        return Interval(-1.0, 1.0)
    k, r = _reduce_quadrant(x)
    q = k % 4
    if q == 0:
        v = _sin_small(r)
    elif q == 1:
        v = _cos_small(r)
    elif q == 2:
        v = -_sin_small(r)
    else:
        v = -_cos_small(r)
    return _clip_unit(v)


def _cos_point(x: float) -> Interval:
    if math.isinf(x) or abs(x) > 1e15:
        return Interval(-1.0, 1.0)
    k, r = _reduce_quadrant(x)
    q = k % 4
    if q == 0:
        v = _cos_small(r)
    elif q == 1:
        v = -_sin_small(r)
    elif q == 2:
        v = -_cos_small(r)
    else:
        v = _sin_small(r)
    return _clip_unit(v)


def _clip_unit(v: Interval) -> Interval:
    return Interval(max(v.lo, -1.0), min(v.hi, 1.0))


def _may_contain_multiple(x: Interval, offset: float):
    """Integers m for which (m + offset)*pi may lie in x"""
    lo_m = math.floor(x.lo / math.pi - offset) - 1
    hi_m = math.ceil(x.hi / math.pi - offset) + 1
    for m in range(lo_m, hi_m + 1):
        point = (Interval(float(m)) + offset) * _PI
        if not point.disjoint_from(x):
            yield m


def _periodic(x: Interval, point_fn, offset: float) -> Interval:
    """Hull of endpoint values plus extrema located at (m + offset)*pi"""
    if not x.is_bounded or x.width >= 6.283185307179586:
        return Interval(-1.0, 1.0)
    if x.lo == x.hi:
        return point_fn(x.lo)
    result = point_fn(x.lo).hull(point_fn(x.hi))
    for m in _may_contain_multiple(x, offset):
        extreme = 1.0 if m % 2 == 0 else -1.0
        result = result.hull(Interval(extreme))
    return result


def sin(x) -> Interval:
    return _periodic(_coerce(x), _sin_point, 0.5)


def cos(x) -> Interval:
    return _periodic(_coerce(x), _cos_point, 0.0)


def _exp_point(x: float, down: bool) -> float:
    if x == -math.inf:
        return 0.0
    if x > 709.0:
        return math.inf if not down else rd.next_down(math.inf)
    if x < -745.0:
        return 0.0 if down else 5e-324
    n = round(x)
    f = Interval(x) - float(n)
    v = _exp_small(f)
    if n > 0:
        v = v * (_E ** n)
    elif n < 0:
        v = v / (_E ** (-n))
    return max(v.lo, 0.0) if down else v.hi


def exp(x) -> Interval:
    x = _coerce(x)
    return Interval(_exp_point(x.lo, True), _exp_point(x.hi, False))


def _cosh_point(v: float) -> Interval:
    e = exp(Interval(v))
    return (e + 1.0 / e) * 0.5


def cosh(x) -> Interval:
    x = _coerce(x)
    if not x.is_bounded:
        return Interval(1.0, math.inf)
    lo_val = _cosh_point(x.lo)
    hi_val = _cosh_point(x.hi)
    upper = max(lo_val.hi, hi_val.hi)
    if x.contains_zero():
        return Interval(1.0, upper)
    lower = min(lo_val.lo, hi_val.lo)
    return Interval(max(lower, 1.0), upper)


def _sinh_point(v: float) -> Interval:
    if abs(v) < 0.5:
        r = Interval(v)
        r2 = r.sqr()
        acc = Interval(0.0)
        for j in range(12, -1, -1):
            acc = _INV_FACT[2 * j + 1] + r2 * acc
        tail = _series_tail(r, 27) * 2.0
        return r * acc + tail
    e = exp(Interval(v))
    return (e - 1.0 / e) * 0.5


def sinh(x) -> Interval:
    x = _coerce(x)
    if not x.is_bounded:
        lo = -math.inf if math.isinf(x.lo) else _sinh_point(x.lo).lo
        hi = math.inf if math.isinf(x.hi) else _sinh_point(x.hi).hi
        return Interval(lo, hi)
    return Interval(_sinh_point(x.lo).lo, _sinh_point(x.hi).hi)


_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}
_UNARY = {"sqrt": sqrt, "sin": sin, "cos": cos, "exp": exp}


def iv_arith(op: str, a, b=None) -> Interval:
    """Single entry point over the elementary operations"""
    a = _coerce(a)
    if op in _BINARY:
        if b is None:
            raise DomainError(f"{op} needs two operands", op=op)
        return _BINARY[op](a, _coerce(b))
    if op in _UNARY:
        return _UNARY[op](a)
    raise DomainError(f"unknown operation {op!r}", op=op)

"""
Directed rounding without touching the FPU rounding mode.

Every operation is computed in round-to-nearest; an error-free transform tells
whether the rounded value lies above or below the exact one, and the endpoint
is moved to the neighbouring float only when the result was inexact in the
wrong direction. Python floats take a scalar path, numpy arrays are handled
elementwise.
"""

import math
from fractions import Fraction

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1
_BIG = 1e290
_SMALL = 1e-290

INF = math.inf


def two_sum(a, b):
    """s + err == a + b exactly (Knuth)"""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_product(a, b):
    """p + err == a * b exactly when nothing overflows or underflows (Dekker)"""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = al * bl - (((p - ah * bh) - al * bh) - ah * bl)
    return p, err


def _is_scalar(*xs) -> bool:
    return all(isinstance(x, (float, int)) for x in xs)


# scalar kernels


def _s_finite(x: float) -> bool:
    return x - x == 0.0


def _s_add(a: float, b: float, down: bool) -> float:
    s, err = two_sum(a, b)
    if not _s_finite(err):
        if s != s:
            return -INF if down else INF
        return math.nextafter(s, -INF if down else INF)
    if down and err < 0:
        return math.nextafter(s, -INF)
    if not down and err > 0:
        return math.nextafter(s, INF)
    return s


def _s_mul(a: float, b: float, down: bool) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p, err = two_product(a, b)
    if p != p:
        return -INF if down else INF
    safe = _s_finite(err) and abs(a) < _BIG and abs(b) < _BIG and abs(p) > _SMALL
    if not safe:
        return math.nextafter(p, -INF if down else INF)
    if down and err < 0:
        return math.nextafter(p, -INF)
    if not down and err > 0:
        return math.nextafter(p, INF)
    return p


def _s_div(a: float, b: float, down: bool) -> float:
    if a == 0.0:
        return 0.0
    q = a / b
    if q != q:
        return -INF if down else INF
    if not _s_finite(q):
        return math.nextafter(q, -INF if down else INF)
    p, e = two_product(q, b)
    err = ((a - p) - e) * (1.0 if b > 0 else -1.0)
    safe = (
        _s_finite(err)
        and abs(q) < _BIG
        and abs(b) < _BIG
        and abs(q) > _SMALL
        and abs(a) > _SMALL
    )
    if not safe:
        return math.nextafter(q, -INF if down else INF)
    if down and err < 0:
        return math.nextafter(q, -INF)
    if not down and err > 0:
        return math.nextafter(q, INF)
    return q


def _s_sqrt(a: float, down: bool) -> float:
    if a == 0.0:
        return 0.0
    if a == INF:
        return math.nextafter(INF, -INF) if down else INF
    s = math.sqrt(a)
    p, e = two_product(s, s)
    # exact - s has the sign of a - s*s
    err = -((p - a) + e)
    if not (_s_finite(err) and _SMALL < a < _BIG):
        return max(math.nextafter(s, -INF), 0.0) if down else math.nextafter(s, INF)
    if down and err < 0:
        return math.nextafter(s, -INF)
    if not down and err > 0:
        return math.nextafter(s, INF)
    return s


# array kernels


def _directed(value, err, safe, down: bool):
    if down:
        return np.where((err < 0) | ~safe, np.nextafter(value, -np.inf), value)
    return np.where((err > 0) | ~safe, np.nextafter(value, np.inf), value)


def _a_add(a, b, down: bool):
    with np.errstate(all="ignore"):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        s, err = two_sum(a, b)
        out = _directed(s, err, np.isfinite(err), down)
        return np.where(np.isnan(s), -np.inf if down else np.inf, out)


def _a_mul(a, b, down: bool):
    with np.errstate(all="ignore"):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        p, err = two_product(a, b)
        zero = (a == 0) | (b == 0)
        safe = (
            np.isfinite(err)
            & (np.abs(a) < _BIG)
            & (np.abs(b) < _BIG)
            & (np.abs(p) > _SMALL)
        )
        out = _directed(p, err, safe, down)
        out = np.where(np.isnan(p), -np.inf if down else np.inf, out)
        return np.where(zero, 0.0, out)


def _a_div(a, b, down: bool):
    with np.errstate(all="ignore"):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        q = a / b
        p, e = two_product(q, b)
        err = ((a - p) - e) * np.sign(b)
        safe = (
            np.isfinite(err)
            & (np.abs(q) < _BIG)
            & (np.abs(b) < _BIG)
            & (np.abs(q) > _SMALL)
            & (np.abs(a) > _SMALL)
        )
        out = _directed(q, err, safe, down)
        out = np.where(np.isnan(q), -np.inf if down else np.inf, out)
        return np.where(a == 0, 0.0, out)


def _finish(result):
    if np.ndim(result) == 0:
        return float(result)
    return result


# public entry points


def add_down(a, b):
    if _is_scalar(a, b):
        return _s_add(float(a), float(b), True)
    return _finish(_a_add(a, b, True))


def add_up(a, b):
    if _is_scalar(a, b):
        return _s_add(float(a), float(b), False)
    return _finish(_a_add(a, b, False))


def sub_down(a, b):
    if _is_scalar(a, b):
        return _s_add(float(a), -float(b), True)
    return _finish(_a_add(a, -np.asarray(b, dtype=float), True))


def sub_up(a, b):
    if _is_scalar(a, b):
        return _s_add(float(a), -float(b), False)
    return _finish(_a_add(a, -np.asarray(b, dtype=float), False))


def mul_down(a, b):
    if _is_scalar(a, b):
        return _s_mul(float(a), float(b), True)
    return _finish(_a_mul(a, b, True))


def mul_up(a, b):
    if _is_scalar(a, b):
        return _s_mul(float(a), float(b), False)
    return _finish(_a_mul(a, b, False))


def div_down(a, b):
    if _is_scalar(a, b):
        return _s_div(float(a), float(b), True)
    return _finish(_a_div(a, b, True))


def div_up(a, b):
    if _is_scalar(a, b):
        return _s_div(float(a), float(b), False)
    return _finish(_a_div(a, b, False))


def sqrt_down(a: float) -> float:
    return _s_sqrt(float(a), True)


def sqrt_up(a: float) -> float:
    return _s_sqrt(float(a), False)


def next_down(x: float) -> float:
    return math.nextafter(x, -INF)


def next_up(x: float) -> float:
    return math.nextafter(x, INF)


def float_down(value) -> float:
    """Largest float not above an exact rational (int, Fraction, Decimal, str)"""
    exact = Fraction(value)
    f = float(exact)
    if Fraction(f) > exact:
        f = next_down(f)
    return f


def float_up(value) -> float:
    """Smallest float not below an exact rational"""
    exact = Fraction(value)
    f = float(exact)
    if Fraction(f) < exact:
        f = next_up(f)
    return f

"""
Dense interval matrices stored as a pair of endpoint arrays.

Products are formed in endpoint form (all four directed products per term)
and summed with an a-priori floating-point summation bound, so every member
product is contained whatever order BLAS-free numpy sums in.
"""

from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import DomainError
from src.ival import rounding as rd
from src.ival.interval import Interval

_CHUNK = 1 << 18
_ULP2 = 2.0 ** -52


def _sum_down_up(terms_lo: np.ndarray, terms_hi: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    """Directed bounds for sums along one axis: |fl(sum) - sum| <= 2 n u sum|x|"""
    n = terms_lo.shape[axis]
    c = (n + 1) * _ULP2
    with np.errstate(all="ignore"):
        s_lo = terms_lo.sum(axis=axis)
        s_hi = terms_hi.sum(axis=axis)
        a_lo = np.abs(terms_lo).sum(axis=axis)
        a_hi = np.abs(terms_hi).sum(axis=axis)
    lo = rd.sub_down(s_lo, rd.mul_up(a_lo, c))
    hi = rd.add_up(s_hi, rd.mul_up(a_hi, c))
    return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)


class IntervalMatrix:
    """Rectangular interval matrix; `symmetric` records entry(i,j) == entry(j,i)"""

    __slots__ = ("lo", "hi", "symmetric")

    def __init__(self, lo, hi=None, symmetric: bool = False):
        lo = np.array(lo, dtype=float, ndmin=2)
        hi = lo.copy() if hi is None else np.array(hi, dtype=float, ndmin=2)
        if lo.shape != hi.shape:
            raise DomainError("endpoint arrays differ in shape", lo=lo.shape, hi=hi.shape)
        if np.any(~(lo <= hi)):
            raise DomainError("matrix has empty or NaN entries")
        self.lo = lo
        self.hi = hi
        self.symmetric = bool(symmetric)
        if self.symmetric and not (np.array_equal(lo, lo.T) and np.array_equal(hi, hi.T)):
            raise DomainError("matrix flagged symmetric is not symmetric")

    # construction

    @classmethod
    def point(cls, a, symmetric: bool = False) -> "IntervalMatrix":
        a = np.array(a, dtype=float, ndmin=2)
        return cls(a, a.copy(), symmetric=symmetric)

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "IntervalMatrix":
        cols = rows if cols is None else cols
        return cls(np.zeros((rows, cols)), symmetric=rows == cols)

    @classmethod
    def identity(cls, n: int) -> "IntervalMatrix":
        return cls(np.eye(n), symmetric=True)

    @classmethod
    def from_intervals(cls, rows: Sequence[Sequence[Interval]], symmetric: bool = False) -> "IntervalMatrix":
        lo = np.array([[x.lo for x in row] for row in rows], dtype=float, ndmin=2)
        hi = np.array([[x.hi for x in row] for row in rows], dtype=float, ndmin=2)
        return cls(lo, hi, symmetric=symmetric)

    @classmethod
    def column(cls, values: Iterable[Interval]) -> "IntervalMatrix":
        values = list(values)
        return cls(np.array([[v.lo] for v in values]), np.array([[v.hi] for v in values]))

    @classmethod
    def block(cls, blocks: List[List["IntervalMatrix"]]) -> "IntervalMatrix":
        lo = np.block([[b.lo for b in row] for row in blocks])
        hi = np.block([[b.hi for b in row] for row in blocks])
        return cls(lo, hi)

    # inspection

    @property
    def shape(self) -> Tuple[int, int]:
        return self.lo.shape

    @property
    def rows(self) -> int:
        return self.lo.shape[0]

    @property
    def cols(self) -> int:
        return self.lo.shape[1]

    def mid(self) -> np.ndarray:
        return 0.5 * self.lo + 0.5 * self.hi

    def rad(self) -> np.ndarray:
        m = self.mid()
        return np.maximum(rd.sub_up(self.hi, m), rd.sub_up(m, self.lo))

    def mag(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def max_width(self) -> float:
        if self.lo.size == 0:
            return 0.0
        return float(np.max(rd.sub_up(self.hi, self.lo)))

    def contains(self, a) -> bool:
        a = np.asarray(a, dtype=float)
        return bool(np.all(self.lo <= a) and np.all(a <= self.hi))

    def __getitem__(self, key):
        if isinstance(key, tuple) and len(key) == 2 and all(isinstance(k, (int, np.integer)) for k in key):
            i, j = key
            return Interval(self.lo[i, j], self.hi[i, j])
        lo = np.array(self.lo[key], ndmin=2)
        hi = np.array(self.hi[key], ndmin=2)
        return IntervalMatrix(lo, hi)

    def principal(self, index: Sequence[int]) -> "IntervalMatrix":
        ix = np.ix_(index, index)
        return IntervalMatrix(self.lo[ix], self.hi[ix], symmetric=self.symmetric)

    def diagonal(self) -> List[Interval]:
        return [Interval(a, b) for a, b in zip(np.diag(self.lo), np.diag(self.hi))]

    def to_intervals(self) -> List[List[Interval]]:
        return [[Interval(a, b) for a, b in zip(rl, rh)] for rl, rh in zip(self.lo, self.hi)]

    @property
    def T(self) -> "IntervalMatrix":
        return IntervalMatrix(self.lo.T.copy(), self.hi.T.copy(), symmetric=self.symmetric)

    # arithmetic

    def __neg__(self) -> "IntervalMatrix":
        return IntervalMatrix(-self.hi, -self.lo, symmetric=self.symmetric)

    def __add__(self, other) -> "IntervalMatrix":
        other = _as_matrix(other)
        return IntervalMatrix(
            rd.add_down(self.lo, other.lo),
            rd.add_up(self.hi, other.hi),
            symmetric=self.symmetric and other.symmetric,
        )

    def __sub__(self, other) -> "IntervalMatrix":
        other = _as_matrix(other)
        return IntervalMatrix(
            rd.sub_down(self.lo, other.hi),
            rd.sub_up(self.hi, other.lo),
            symmetric=self.symmetric and other.symmetric,
        )

    def scale(self, s: Union[Interval, float]) -> "IntervalMatrix":
        s = Interval.exact(s) if not isinstance(s, Interval) else s
        candidates_lo = [rd.mul_down(self.lo, s.lo), rd.mul_down(self.lo, s.hi),
                         rd.mul_down(self.hi, s.lo), rd.mul_down(self.hi, s.hi)]
        candidates_hi = [rd.mul_up(self.lo, s.lo), rd.mul_up(self.lo, s.hi),
                         rd.mul_up(self.hi, s.lo), rd.mul_up(self.hi, s.hi)]
        lo = np.minimum.reduce([np.asarray(c, dtype=float) for c in candidates_lo])
        hi = np.maximum.reduce([np.asarray(c, dtype=float) for c in candidates_hi])
        return IntervalMatrix(lo, hi, symmetric=self.symmetric)

    def __mul__(self, other) -> "IntervalMatrix":
        if isinstance(other, (Interval, int, float)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other) -> "IntervalMatrix":
        other = _as_matrix(other)
        if self.cols != other.rows:
            raise DomainError("inner dimensions differ", left=self.shape, right=other.shape)
        n, k = self.shape
        m = other.cols
        out_lo = np.empty((n, m))
        out_hi = np.empty((n, m))
        step = max(1, _CHUNK // max(1, k * m))
        b_lo = other.lo[None, :, :]
        b_hi = other.hi[None, :, :]
        for start in range(0, n, step):
            stop = min(n, start + step)
            a_lo = self.lo[start:stop, :, None]
            a_hi = self.hi[start:stop, :, None]
            p_lo = np.minimum.reduce([
                rd.mul_down(a_lo, b_lo), rd.mul_down(a_lo, b_hi),
                rd.mul_down(a_hi, b_lo), rd.mul_down(a_hi, b_hi),
            ])
            p_hi = np.maximum.reduce([
                rd.mul_up(a_lo, b_lo), rd.mul_up(a_lo, b_hi),
                rd.mul_up(a_hi, b_lo), rd.mul_up(a_hi, b_hi),
            ])
            out_lo[start:stop], out_hi[start:stop] = _sum_down_up(p_lo, p_hi, axis=1)
        return IntervalMatrix(out_lo, out_hi)

    def __rmatmul__(self, other) -> "IntervalMatrix":
        return _as_matrix(other) @ self

    def congruence(self, x) -> "IntervalMatrix":
        """X^T A X with the symmetric flag restored by intersection"""
        x = _as_matrix(x)
        return (x.T @ (self @ x)).symmetrized()

    def symmetrized(self) -> "IntervalMatrix":
        """
        Intersect entry (i,j) with entry (j,i). Valid when the matrix encloses
        a symmetric quantity computed along two different rounding paths.
        """
        lo = np.maximum(self.lo, self.lo.T)
        hi = np.minimum(self.hi, self.hi.T)
        if np.any(lo > hi):
            raise DomainError("transposed entries do not overlap")
        return IntervalMatrix(lo, hi, symmetric=True)

    def frobenius_upper(self) -> float:
        """Upper bound of ||A||_F over all members"""
        mag = self.mag()
        if mag.size == 0:
            return 0.0
        sq = rd.mul_up(mag, mag)
        _, total = _sum_down_up(np.zeros(sq.size), np.asarray(sq, dtype=float).ravel(), axis=0)
        return rd.sqrt_up(float(total))

    def row_sums(self) -> List[Interval]:
        lo, hi = _sum_down_up(self.lo, self.hi, axis=1)
        return [Interval(a, b) for a, b in zip(lo, hi)]

    def offdiag_row_mag(self) -> np.ndarray:
        """Upper bounds of sum_{j != i} |a_ij|"""
        mag = self.mag().copy()
        np.fill_diagonal(mag, 0.0)
        _, hi = _sum_down_up(np.zeros_like(mag), mag, axis=1)
        return hi

    def __repr__(self) -> str:
        return f"IntervalMatrix(shape={self.shape}, symmetric={self.symmetric}, max_width={self.max_width():.3g})"


def _as_matrix(value) -> IntervalMatrix:
    if isinstance(value, IntervalMatrix):
        return value
    return IntervalMatrix.point(np.asarray(value, dtype=float))

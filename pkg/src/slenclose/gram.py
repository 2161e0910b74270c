"""
Gram triples of a polynomial test space on one cell.

Work happens in the local variable t in [-1, 1] with y = m + h t, where y
is the position in the problem's length unit. Coefficients become weights in
t (sums of c t^p, c t^p cos(k t), c t^p sin(k t)); every integral of a weight
against a Chebyshev product reduces to the moments in chebyshev.py, with
Taylor expansions plus a remainder bound for the trigonometric factors.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial import chebyshev as npcheb

from src.core.errors import BasisDegenerate, NotPositiveDefinite
from src.ival import interval as iv
from src.ival import rounding as rd
from src.ival.array import IntervalMatrix
from src.ival.eig import verify_positive_definite
from src.ival.interval import Interval
from src.observability.logger import get_logger
from src.observability.metrics import get_metrics
from src.slenclose import chebyshev as cheb
from src.slenclose.coefficients import CoefficientFn, Poly
from src.slenclose.problem import SLProblem

logger = get_logger(__name__)
_metrics = get_metrics()

TAYLOR_TAIL = 1e-25
MAX_TAYLOR_TERMS = 120


@dataclass(frozen=True)
class WeightTerm:
    coeff: Interval
    power: int
    kind: str = "one"  # one | cos | sin
    freq: Fraction = Fraction(0)  # multiplied by the unit enclosure


@dataclass(frozen=True)
class Segment:
    t0: Fraction
    t1: Fraction
    terms: Tuple[WeightTerm, ...]


Weight = Tuple[Segment, ...]


@dataclass(frozen=True)
class GramTriple:
    """
    M0 = <f_i, f_j>, M1 = <H f_i, f_j>, M2 = <H f_i, H f_j>. The basis
    descriptor is (cell, degree, bc) for polynomial spaces and None for
    triples supplied directly.
    """

    M0: IntervalMatrix
    M1: IntervalMatrix
    M2: IntervalMatrix
    basis: Optional[Tuple] = None

    @property
    def dim(self) -> int:
        return self.M0.rows

    @classmethod
    def for_matrix(cls, a: IntervalMatrix) -> "GramTriple":
        """Triple of a symmetric matrix operator on the standard basis"""
        a = a.symmetrized()
        return cls(IntervalMatrix.identity(a.rows), a, (a @ a).symmetrized(), None)

    def project(self, x) -> "GramTriple":
        return GramTriple(self.M0.congruence(x), self.M1.congruence(x), self.M2.congruence(x), self.basis)

    def principal(self, index) -> "GramTriple":
        return GramTriple(self.M0.principal(index), self.M1.principal(index), self.M2.principal(index), self.basis)


# weights in t


def _unit_power(unit: Interval, k: int) -> Interval:
    return unit ** k if k else Interval(1.0)


def _angle(omega: Fraction, y: Fraction, unit: Interval) -> Interval:
    return Interval.exact(omega * y) * unit


def _terms_to_weight(terms, m: Fraction, h: Fraction, unit: Interval) -> List[WeightTerm]:
    out: List[WeightTerm] = []
    for term in terms:
        if isinstance(term, Poly):
            k = term.degree
            scale = _unit_power(unit, k)
            for p in range(k + 1):
                c = term.coeff * comb(k, p) * m ** (k - p) * h ** p
                if c:
                    out.append(WeightTerm(Interval.exact(c) * scale, p))
            continue
        phi = _angle(term.omega, m, unit)
        c = Interval.exact(term.coeff)
        freq = term.omega * h
        cos_phi, sin_phi = iv.cos(phi), iv.sin(phi)
        if term.kind == "cos":
            out.append(WeightTerm(c * cos_phi, 0, "cos", freq))
            out.append(WeightTerm(-(c * sin_phi), 0, "sin", freq))
        else:
            out.append(WeightTerm(c * sin_phi, 0, "cos", freq))
            out.append(WeightTerm(c * cos_phi, 0, "sin", freq))
    return out


def coefficient_weight(fn: CoefficientFn, lo: Fraction, hi: Fraction, unit: Interval) -> Weight:
    m, h = (lo + hi) / 2, (hi - lo) / 2
    segments = []
    for piece in fn.pieces_on(lo, hi):
        terms = _terms_to_weight(piece.terms, m, h, unit)
        segments.append(Segment((piece.start - m) / h, (piece.end - m) / h, tuple(terms)))
    return tuple(segments)


def constant_weight(value) -> Weight:
    return (Segment(Fraction(-1), Fraction(1), (WeightTerm(Interval.exact(value), 0),)),)


def _normal(coeff: Interval, power: int, kind: str, freq: Fraction) -> Optional[WeightTerm]:
    if kind != "one" and freq == 0:
        if kind == "sin":
            return None
        kind = "one"
    if freq < 0:
        freq = -freq
        if kind == "sin":
            coeff = -coeff
    return WeightTerm(coeff, power, kind, freq if kind != "one" else Fraction(0))


def _term_product(a: WeightTerm, b: WeightTerm) -> List[WeightTerm]:
    c = a.coeff * b.coeff
    p = a.power + b.power
    if a.kind == "one":
        return [WeightTerm(c, p, b.kind, b.freq)]
    if b.kind == "one":
        return [WeightTerm(c, p, a.kind, a.freq)]
    half = c * 0.5
    plus, minus = a.freq + b.freq, a.freq - b.freq
    if a.kind == "cos" and b.kind == "cos":
        parts = [(half, "cos", minus), (half, "cos", plus)]
    elif a.kind == "sin" and b.kind == "sin":
        parts = [(half, "cos", minus), (-half, "cos", plus)]
    elif a.kind == "sin":
        parts = [(half, "sin", plus), (half, "sin", minus)]
    else:
        parts = [(half, "sin", plus), (-half, "sin", minus)]
    out = []
    for coeff, kind, freq in parts:
        term = _normal(coeff, p, kind, freq)
        if term is not None:
            out.append(term)
    return out


def multiply(w1: Weight, w2: Weight) -> Weight:
    out = []
    for s1 in w1:
        for s2 in w2:
            t0, t1 = max(s1.t0, s2.t0), min(s1.t1, s2.t1)
            if t0 >= t1:
                continue
            terms = [t for a in s1.terms for b in s2.terms for t in _term_product(a, b)]
            out.append(Segment(t0, t1, tuple(terms)))
    return tuple(out)


def scale_weight(w: Weight, s: Interval) -> Weight:
    return tuple(
        Segment(seg.t0, seg.t1, tuple(WeightTerm(t.coeff * s, t.power, t.kind, t.freq) for t in seg.terms))
        for seg in w
    )


def derivative_weight(w: Weight, unit: Interval) -> Weight:
    """d/dt of a weight that is smooth on each segment"""
    out = []
    for seg in w:
        terms: List[WeightTerm] = []
        for t in seg.terms:
            if t.power:
                terms.append(WeightTerm(t.coeff * float(t.power), t.power - 1, t.kind, t.freq))
            if t.kind == "one":
                continue
            kappa = Interval.exact(t.freq) * unit
            if t.kind == "cos":
                terms.append(WeightTerm(-(t.coeff * kappa), t.power, "sin", t.freq))
            else:
                terms.append(WeightTerm(t.coeff * kappa, t.power, "cos", t.freq))
        out.append(Segment(seg.t0, seg.t1, tuple(terms)))
    return tuple(out)


# moments


def _taylor_terms(kappa_mag: float) -> int:
    """Smallest J with kappa^J / J! below the tail target, J >= 1"""
    j, term = 1, kappa_mag
    while term >= TAYLOR_TAIL and j < MAX_TAYLOR_TERMS:
        j += 1
        term = term * kappa_mag / j
    return j


def _max_power(w: Weight, unit: Interval) -> int:
    need = 0
    for seg in w:
        for t in seg.terms:
            extra = 0 if t.kind == "one" else _taylor_terms((Interval.exact(t.freq) * unit).mag) + 1
            need = max(need, t.power + extra)
    return need


def _round_up(n: int, step: int = 16) -> int:
    return ((n + step - 1) // step) * step


def _vector_add(acc: Tuple[np.ndarray, np.ndarray], row: IntervalMatrix) -> Tuple[np.ndarray, np.ndarray]:
    return rd.add_down(acc[0], row.lo[0]), rd.add_up(acc[1], row.hi[0])


def weight_moments(w: Weight, k_max: int, unit: Interval) -> IntervalMatrix:
    """nu_k = integral over [-1, 1] of w(t) T_k(t), k = 0 .. k_max, as a 1 x (k_max+1) matrix"""
    n_max = _round_up(_max_power(w, unit) + 1)
    k_size = _round_up(k_max + 1) - 1
    lo = np.zeros(k_max + 1)
    hi = np.zeros(k_max + 1)
    acc = (lo, hi)
    for seg in w:
        t_lo, t_hi = cheb.moment_table_bounds(seg.t0, seg.t1, n_max, k_size)
        table = IntervalMatrix(t_lo[:, : k_max + 1], t_hi[:, : k_max + 1])
        span = float(seg.t1 - seg.t0)
        for t in seg.terms:
            if t.kind == "one":
                acc = _vector_add(acc, table[t.power : t.power + 1, :].scale(t.coeff))
                continue
            kappa = Interval.exact(t.freq) * unit
            j_max = _taylor_terms(kappa.mag)
            start = 0 if t.kind == "cos" else 1
            factor = Interval(1.0) if start == 0 else kappa
            n = start
            while n < j_max:
                if n > start:
                    factor = -(factor * kappa.sqr() / float((n - 1) * n))
                acc = _vector_add(acc, table[t.power + n : t.power + n + 1, :].scale(t.coeff * factor))
                n += 2
            # Lagrange remainder of order n on |t| <= 1
            tail = rd.mul_up(rd.mul_up(t.coeff.mag, span), _tail_bound(kappa.mag, n))
            acc = (rd.sub_down(acc[0], tail), rd.add_up(acc[1], tail))
    return IntervalMatrix(np.asarray(acc[0], dtype=float), np.asarray(acc[1], dtype=float))


def _tail_bound(kappa_mag: float, order: int) -> float:
    """Upper bound of kappa^order / order!"""
    value = 1.0
    for j in range(1, order + 1):
        value = rd.div_up(rd.mul_up(value, kappa_mag), float(j))
    return value


def gram_of_weight(w: Weight, degree: int, unit: Interval) -> IntervalMatrix:
    """G[p, q] = integral of w T_p T_q = (nu_{p+q} + nu_{|p-q|}) / 2"""
    nu = weight_moments(w, 2 * degree, unit)
    p = np.arange(degree + 1)
    s = p[:, None] + p[None, :]
    d = np.abs(p[:, None] - p[None, :])
    lo = 0.5 * np.asarray(rd.add_down(nu.lo[0][s], nu.lo[0][d]), dtype=float)
    hi = 0.5 * np.asarray(rd.add_up(nu.hi[0][s], nu.hi[0][d]), dtype=float)
    return IntervalMatrix(lo, hi, symmetric=True)


# assembly


_BASIS_CACHE: Dict[Tuple, Tuple[IntervalMatrix, IntervalMatrix, IntervalMatrix]] = {}


def _basis_matrices(degree: int, left, right) -> Tuple[IntervalMatrix, IntervalMatrix, IntervalMatrix]:
    key = (degree, left, right)
    if key not in _BASIS_CACHE:
        mats = []
        for fm in cheb.basis_with_derivatives(degree, left, right):
            lo, hi = cheb.frac_bounds(fm)
            mats.append(IntervalMatrix(lo, hi))
        _BASIS_CACHE[key] = tuple(mats)
    return _BASIS_CACHE[key]


def _sandwich(c_left: IntervalMatrix, g: IntervalMatrix, c_right: IntervalMatrix) -> IntervalMatrix:
    return c_left @ (g @ c_right.T)


def assemble_gram(p: SLProblem, cell: Tuple[Fraction, Fraction], basis_degree: int = 16) -> GramTriple:
    """
    Gram triple of the polynomial space on `cell` satisfying the cell
    operator's boundary conditions (Neumann at interior cut points).
    """
    lo, hi = Fraction(cell[0]), Fraction(cell[1])
    q = p.restrict(lo, hi)
    unit = q.unit.enclosure()
    h = (hi - lo) / 2
    h_iv = Interval.exact(h)
    inv_h = Interval.exact(1 / h)
    inv_h2 = Interval.exact(1 / (h * h))
    c0, c1, c2 = _basis_matrices(basis_degree, q.bc.left, q.bc.right)

    # a in y-derivatives: a(x) / unit^2
    a_w = scale_weight(coefficient_weight(q.a, lo, hi, unit), Interval(1.0) / unit.sqr())
    v_w = coefficient_weight(q.V, lo, hi, unit)
    one = constant_weight(1)

    g1 = gram_of_weight(one, basis_degree, unit)
    m0 = _sandwich(c0, g1, c0).scale(h_iv).symmetrized()
    m1 = (
        _sandwich(c1, gram_of_weight(a_w, basis_degree, unit), c1).scale(inv_h)
        + _sandwich(c0, gram_of_weight(v_w, basis_degree, unit), c0).scale(h_iv)
    ).symmetrized()

    # H phi = w2 phi'' + w1 phi' + w0 phi in t
    w2 = scale_weight(a_w, -inv_h2)
    w1 = scale_weight(derivative_weight(a_w, unit), -inv_h2)
    parts = [(c2, w2), (c0, v_w)]
    if not q.a.is_constant:
        parts.append((c1, w1))
    m2 = None
    for i, (ci, wi) in enumerate(parts):
        for cj, wj in parts[i:]:
            block = _sandwich(ci, gram_of_weight(multiply(wi, wj), basis_degree, unit), cj)
            if ci is not cj:
                block = block + block.T
            m2 = block if m2 is None else m2 + block
    m2 = m2.scale(h_iv).symmetrized()

    try:
        verify_positive_definite(m0)
    except NotPositiveDefinite as exc:
        raise BasisDegenerate("Gram matrix of the test space is not verifiably positive definite",
                              cell=q.describe(), degree=basis_degree) from exc

    _metrics.counter("gram.assembled").inc()
    logger.debug("gram assembled", cell=q.describe(), degree=basis_degree, m1_width=m1.max_width())
    return GramTriple(m0, m1, m2, (lo, hi, basis_degree, q.bc))


def approximate_eigenfunctions(p: SLProblem, degree: int = 32) -> Tuple[np.ndarray, Callable]:
    """
    Floating-point Ritz values on the whole domain, plus derivative(k, y) of
    the k-th Ritz function at positions y (in the length unit).
    """
    g = assemble_gram(p, (p.lo, p.hi), degree)
    a0 = 0.5 * (g.M0.mid() + g.M0.mid().T)
    a1 = 0.5 * (g.M1.mid() + g.M1.mid().T)
    values, vectors = scipy.linalg.eigh(a1, a0)
    c1 = _basis_matrices(degree, p.bc.left, p.bc.right)[1].mid()
    mid = float((p.lo + p.hi) / 2)
    half = float((p.hi - p.lo) / 2)

    def derivative(k: int, y) -> np.ndarray:
        coeffs = vectors[:, k] @ c1
        return npcheb.chebval((np.asarray(y, dtype=float) - mid) / half, coeffs) / half

    return values, derivative

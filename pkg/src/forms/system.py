"""
Two-component Sturm-Liouville system on (alpha, beta) with an interface at 0.

    V = [[u, 0], [0, 0]]   on (alpha, 0)
    V = [[v, v], [v, v]]   on (0, beta)

with a = identity and Neumann conditions at alpha and beta. Four operators
share the quadratic form and differ in their form domains:

    A1 = H1 + H2   the pieces decoupled at 0
    K              f1 continuous across 0, f2 free on each side
    H              both components continuous

H1, H2 and A1 are closed form. On (0, beta) the potential diagonalises along
(1, 1) and (1, -1), so on every piece the solutions are cos/cosh of
sqrt(lambda - c) and the eigenvalues of K and H are the roots of small
matching determinants at 0.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.core.errors import DomainError, VerificationFailed
from src.forms.chain import FormChain
from src.ival import rounding as rd
from src.ival.array import IntervalMatrix
from src.ival.interval import Interval, cos, cosh, pi_enclosure, sin, sinh, sqrt
from src.ival.roots import bisect_root
from src.observability.logger import get_logger
from src.observability.tracer import trace_operation
from src.slenclose.enclosure import EnclosureList, interlaces

logger = get_logger(__name__)

SCAN_STEPS = 1000
SERIES_TERMS = 12
ROOT_TOL = 1e-9

_UNDECIDED = Interval(-math.inf, math.inf)


@dataclass(frozen=True)
class SystemFixture:
    alpha: Fraction
    beta: Fraction
    u: Interval
    v: Interval
    E: float

    def __post_init__(self):
        if not self.alpha < 0 < self.beta:
            raise DomainError("fixture needs alpha < 0 < beta", alpha=str(self.alpha), beta=str(self.beta))
        if self.u.lo < 0 or self.v.lo < 0:
            raise DomainError("potentials must be non-negative", u=str(self.u), v=str(self.v))
        if not self.E > 0:
            raise DomainError("cutoff must be positive", E=self.E)

    @classmethod
    def of(cls, alpha, beta, u, v, E) -> "SystemFixture":
        return cls(Fraction(alpha), Fraction(beta), Interval.exact(Fraction(u)), Interval.exact(Fraction(v)), float(E))

    @property
    def left(self) -> Fraction:
        return -self.alpha

    @property
    def right(self) -> Fraction:
        return self.beta

    @property
    def decoupled(self) -> bool:
        return self.u.hi == 0.0 and self.v.hi == 0.0


@dataclass
class SystemLists:
    H1: EnclosureList
    H2: EnclosureList
    A1: EnclosureList
    K: EnclosureList
    H: EnclosureList

    def as_dict(self) -> Dict[str, EnclosureList]:
        return {"H1": self.H1, "H2": self.H2, "A1": self.A1, "K": self.K, "H": self.H}


# closed forms


def _modes(length: Fraction, shift: Interval, ceiling: float) -> List[Interval]:
    """shift + n^2 pi^2 / length^2 for n = 0, 1, ... while certainly below ceiling"""
    pi2 = pi_enclosure().sqr() / Interval.exact(length * length)
    out = []
    n = 0
    while True:
        value = shift + pi2 * float(n * n)
        if not value.hi < ceiling:
            return out
        out.append(value)
        n += 1


def _listing(values: List[Interval], ceiling: float) -> EnclosureList:
    return EnclosureList.build(sorted(values, key=lambda v: (v.lo, v.hi)), ceiling)


# fundamental solutions


def _series(z: Interval, odd: bool) -> Interval:
    """sum_k z^k / (2k)! (or (2k+1)!) for |z| <= 1, with the tail bound"""
    acc = Interval(0.0)
    for k in range(SERIES_TERMS - 1, -1, -1):
        acc = acc * z + Interval.exact(Fraction(1, math.factorial(2 * k + (1 if odd else 0))))
    tail = rd.float_up(Fraction(2, math.factorial(2 * SERIES_TERMS)))
    return acc + Interval(-tail, tail)


def neumann_solution(lam: Interval, c: Interval, length: Fraction) -> Optional[Tuple[Interval, Interval]]:
    """
    y(L), y'(L) for -y'' + c y = lam y, y(0) = 1, y'(0) = 0. None when lam - c
    straddles 0 too widely to decide the branch.
    """
    mu = lam - c
    L = Interval.exact(length)
    if mu.lo > 0.0:
        k = sqrt(mu)
        return cos(k * L), -(k * sin(k * L))
    if mu.hi < 0.0:
        kappa = sqrt(-mu)
        return cosh(kappa * L), kappa * sinh(kappa * L)
    z = -(mu * L.sqr())
    if z.mag > 1.0:
        return None
    return _series(z, odd=False), -(mu * L * _series(z, odd=True))


def _det(m: List[List[Interval]]) -> Interval:
    if len(m) == 1:
        return m[0][0]
    total = Interval(0.0)
    for j, entry in enumerate(m[0]):
        if entry.lo == 0.0 and entry.hi == 0.0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = entry * _det(minor)
        total = total - term if j % 2 else total + term
    return total


def _interface_data(fx: SystemFixture, lam: Interval):
    """Values and outward derivatives at 0- (left) and 0+ (right) of each piece solution"""
    left_u = neumann_solution(lam, fx.u, fx.left)
    left_0 = neumann_solution(lam, Interval(0.0), fx.left)
    right_2v = neumann_solution(lam, fx.v * 2.0, fx.right)
    right_0 = neumann_solution(lam, Interval(0.0), fx.right)
    if None in (left_u, left_0, right_2v, right_0):
        return None
    a, da = left_u
    b, db = left_0
    # right pieces are evaluated at x - beta = -beta: even value, odd derivative
    p, dp = right_2v[0], -right_2v[1]
    q, dq = right_0[0], -right_0[1]
    return a, da, b, db, p, dp, q, dq


def k_secular(fx: SystemFixture) -> Callable[[Interval], Interval]:
    """
    Determinant of the f1 matching (value and slope) plus f2'(0+) = 0 in the
    unknowns (left f1, right sum mode, right difference mode). The remaining
    eigenvalues of K, those with f2'(0-) = 0, are the left Neumann modes.
    """

    def f(lam: Interval) -> Interval:
        data = _interface_data(fx, lam)
        if data is None:
            return _UNDECIDED
        a, da, _, _, p, dp, q, dq = data
        return _det([[a, -p, -q], [da, -dp, -dq], [Interval(0.0), dp, -dq]])

    return f


def h_secular(fx: SystemFixture) -> Callable[[Interval], Interval]:
    """Value and slope matching of both components at 0"""
    zero = Interval(0.0)

    def f(lam: Interval) -> Interval:
        data = _interface_data(fx, lam)
        if data is None:
            return _UNDECIDED
        a, da, b, db, p, dp, q, dq = data
        return _det([
            [a, zero, -p, -q],
            [da, zero, -dp, -dq],
            [zero, b, -p, q],
            [zero, db, -dp, dq],
        ])

    return f


def scan_roots(f: Callable[[Interval], Interval], lo: float, hi: float, steps: int = SCAN_STEPS,
               tol: float = ROOT_TOL) -> List[Interval]:
    """Bracket sign changes on an even grid, then bisect each bracket"""
    roots = []
    last_x: Optional[float] = None
    last_s: Optional[int] = None
    for x in np.linspace(lo, hi, steps + 1):
        x = float(x)
        s = f(Interval(x)).sign()
        if s is None:
            continue
        if s == 0:
            roots.append(Interval(x))
        elif last_s not in (None, 0) and s != last_s:
            roots.append(bisect_root(f, Interval(last_x, x), tol))
        last_x, last_s = x, s
    return roots


@trace_operation("system_fixture_lists")
def system_fixture_lists(fx: SystemFixture, tol: float = ROOT_TOL) -> SystemLists:
    """
    H1, H2, A1 strictly below 2E; K up to its len(A1) - 1 leading eigenvalues;
    H below E. Interlacing A1 -> K -> H is checked on the endpoints.
    """
    top = 2.0 * fx.E
    zero = Interval(0.0)
    h1 = _modes(fx.left, fx.u, top) + _modes(fx.left, zero, top)
    h2 = _modes(fx.right, fx.v * 2.0, top) + _modes(fx.right, zero, top)
    H1, H2 = _listing(h1, top), _listing(h2, top)
    A1 = _listing(h1 + h2, top)
    wanted = len(A1) - 1
    whole = fx.right + fx.left

    if fx.decoupled:
        k_roots = _modes(whole, zero, top) + _modes(fx.right, zero, top)
        h_roots = _modes(whole, zero, fx.E) * 2
    else:
        scan_top = A1[len(A1) - 1].hi
        k_roots = scan_roots(k_secular(fx), 0.0, scan_top + top / SCAN_STEPS, SCAN_STEPS, tol)
        h_roots = scan_roots(h_secular(fx), 0.0, fx.E, SCAN_STEPS, tol)
    k_all = sorted(k_roots + _modes(fx.left, zero, top), key=lambda v: (v.lo, v.hi))[:wanted]
    K = _listing(k_all, A1[wanted].lo if wanted < len(A1) else top)
    H = _listing([r for r in h_roots if r.lo < fx.E], fx.E)

    lists = SystemLists(H1, H2, A1, K, H)
    for outer, inner, name in ((A1, K, "A1->K"), (K, H, "K->H")):
        if not interlaces(outer, inner):
            logger.error("❌ system lists fail to interlace", step=name)
            raise VerificationFailed("system lists fail to interlace", step=name)
    logger.info("system fixture listed", **{k: len(v) for k, v in lists.as_dict().items()})
    return lists


# Galerkin model


def _stiffness(degree: int, length: Fraction) -> IntervalMatrix:
    """int phi_i' phi_j' for orthonormal scaled Legendre phi_k on a piece of the given length"""
    n = degree + 1
    lo, hi = np.zeros((n, n)), np.zeros((n, n))
    inv_l2 = Interval.exact(Fraction(2) / (length * length))
    for i in range(n):
        for j in range(i, n):
            if (i + j) % 2:
                continue
            m = min(i, j)
            if m == 0:
                continue
            entry = sqrt(Interval(float((2 * i + 1) * (2 * j + 1)))) * inv_l2 * float(m * (m + 1))
            lo[i, j] = lo[j, i] = entry.lo
            hi[i, j] = hi[j, i] = entry.hi
    return IntervalMatrix(lo, hi, symmetric=True)


def _endpoint_values(degree: int, length: Fraction, side: int) -> List[Interval]:
    """phi_k at the right (side=1) or left (side=-1) end of a piece"""
    scale = Interval(1.0) / Interval.exact(length)
    return [sqrt(scale * float(2 * k + 1)) * float(side ** k) for k in range(degree + 1)]


def system_form_chain(fx: SystemFixture, degree: int = 24) -> FormChain:
    """
    Galerkin model of the A1 form on piecewise Legendre polynomials, blocks
    (f1 left, f2 left, f1 right, f2 right), with the f1 and f2 continuity
    constraints at 0 as the chain A1 -> K -> H.
    """
    n = degree + 1
    s1, s2 = _stiffness(degree, fx.left), _stiffness(degree, fx.right)
    eye = IntervalMatrix.identity(n)
    zero = IntervalMatrix.zeros(n)
    coupling = eye.scale(fx.v)
    a = IntervalMatrix.block([
        [s1 + eye.scale(fx.u), zero, zero, zero],
        [zero, s1, zero, zero],
        [zero, zero, s2 + coupling, coupling],
        [zero, zero, coupling, s2 + coupling],
    ])
    plus = _endpoint_values(degree, fx.left, 1)
    minus = [-x for x in _endpoint_values(degree, fx.right, -1)]
    blank = [Interval(0.0)] * n
    c1 = plus + blank + minus + blank
    c2 = blank + plus + blank + minus
    return FormChain(a.symmetrized(), IntervalMatrix.from_intervals([c1, c2]))

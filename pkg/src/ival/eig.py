"""
Verified eigenvalue enclosures for symmetric interval matrices and pencils.

An approximate eigendecomposition is computed in floating point; its defect is
bounded in interval arithmetic, and Weyl plus Ostrowski turn the defect into
index-exact enclosures valid for every symmetric member of the input.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg

from src.core.errors import NotPositiveDefinite, VerificationFailed
from src.ival import rounding as rd
from src.ival.array import IntervalMatrix
from src.ival.interval import Interval
from src.observability.metrics import get_metrics

_metrics = get_metrics()


@dataclass(frozen=True)
class EigEnclosure:
    """values[i] contains the i-th smallest eigenvalue of every member matrix"""

    values: List[Interval]
    verified: List[bool]
    defect: Interval = field(default_factory=lambda: Interval(0.0))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def all_verified(self) -> bool:
        return all(self.verified)


def _isolation_flags(values: List[Interval]) -> List[bool]:
    flags = []
    for i, v in enumerate(values):
        left_ok = i == 0 or values[i - 1].hi < v.lo
        right_ok = i == len(values) - 1 or v.hi < values[i + 1].lo
        flags.append(left_ok and right_ok)
    return flags


def _gershgorin_refine(d: np.ndarray, e: IntervalMatrix) -> List[Interval]:
    """
    Enclosures from isolated Gershgorin discs of D + E. Entry i is None unless
    its disc is separated from every other disc, in which case it holds the
    eigenvalue whose index is the number of discs to its left.
    """
    n = len(d)
    radius = e.offdiag_row_mag()
    centers = [Interval(float(d[i])) + e[i, i] for i in range(n)]
    discs = [Interval(rd.sub_down(c.lo, float(r)), rd.add_up(c.hi, float(r))) for c, r in zip(centers, radius)]
    refined = [None] * n
    for i, disc in enumerate(discs):
        left = 0
        isolated = True
        for j, other in enumerate(discs):
            if j == i:
                continue
            if other.hi < disc.lo:
                left += 1
            elif other.lo > disc.hi:
                continue
            else:
                isolated = False
                break
        if isolated:
            refined[left] = disc
    return refined


def verified_sym_eig(a: IntervalMatrix) -> EigEnclosure:
    """Index-exact enclosures of all eigenvalues of a symmetric interval matrix"""
    _metrics.counter("ival.sym_eig_calls").inc()
    n = a.rows
    if n == 0:
        return EigEnclosure([], [], Interval(0.0))
    if a.rows != a.cols:
        raise VerificationFailed("matrix is not square", shape=a.shape)

    am = a.mid()
    am = 0.5 * (am + am.T)
    if not np.all(np.isfinite(am)):
        raise VerificationFailed("matrix midpoint is not finite")
    d, q = np.linalg.eigh(am)

    e = a.congruence(q) - IntervalMatrix.point(np.diag(d))
    g_mat = (IntervalMatrix.point(q.T) @ IntervalMatrix.point(q)) - IntervalMatrix.identity(n)
    g = g_mat.frobenius_upper()
    if not g < 1.0:
        raise VerificationFailed("eigenvector basis too far from orthonormal", orthogonality_defect=g)
    e_norm = e.frobenius_upper()

    # lambda_i(A) = mu_i / theta_i, theta_i in [1 - g, 1 + g]
    factor = Interval(rd.div_down(1.0, rd.add_up(1.0, g)), rd.div_up(1.0, rd.sub_down(1.0, g)))
    refined = _gershgorin_refine(d, e)

    values = []
    for i in range(n):
        mu = Interval(rd.sub_down(float(d[i]), e_norm), rd.add_up(float(d[i]), e_norm))
        if refined[i] is not None:
            mu = mu.intersect(refined[i]) or mu
        values.append(mu * factor)

    return EigEnclosure(values, _isolation_flags(values), Interval(0.0, e_norm))


def verified_gen_eig(a: IntervalMatrix, b: IntervalMatrix) -> EigEnclosure:
    """Index-exact enclosures of the pencil A x = lambda B x, B positive definite"""
    n = a.rows
    if n == 0:
        return EigEnclosure([], [], Interval(0.0))
    bm = b.mid()
    bm = 0.5 * (bm + bm.T)
    try:
        chol = np.linalg.cholesky(bm)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization of the midpoint failed", size=n) from exc
    x = scipy.linalg.solve_triangular(chol, np.eye(n), lower=True)
    if not np.all(np.isfinite(x)):
        raise NotPositiveDefinite("triangular inverse is not finite", size=n)

    c = b.congruence(x.T)
    c_eig = verified_sym_eig(c)
    c_min = c_eig.values[0].lo
    c_max = c_eig.values[-1].hi
    if not c_min > 0.0:
        raise NotPositiveDefinite("could not verify B positive definite", lambda_min_lower=c_min)

    a_eig = verified_sym_eig(a.congruence(x.T))
    # pencil eigenvalues are lambda_i(X A X^T) scaled by 1/lambda(X B X^T)
    factor = Interval(rd.div_down(1.0, c_max), rd.div_up(1.0, c_min))
    values = [v * factor for v in a_eig.values]
    return EigEnclosure(values, _isolation_flags(values), a_eig.defect)


def verify_positive_definite(b: IntervalMatrix) -> Interval:
    """Enclosure of the smallest eigenvalue, raising unless it is certainly positive"""
    eig = verified_sym_eig(b)
    smallest = eig.values[0]
    if not smallest.lo > 0.0:
        raise NotPositiveDefinite("matrix not verifiably positive definite", lambda_min_lower=smallest.lo)
    return smallest

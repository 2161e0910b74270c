"""
Codimension-one form restrictions on matrices.

A FormChain holds a symmetric form on R^n and constraint vectors c_1 .. c_q.
Level i is the form restricted to {x : c_1.x = ... = c_i.x = 0}; each level
has codimension one in the previous, so consecutive spectra interlace.

The restricted subspace is spanned by the columns of an interval matrix N
that contains the exact null-space basis obtained by solving for pivot
coordinates; eigenvalues come from the pencil (N^T A N, N^T N).
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from src.core.errors import DependentConstraints, DomainError, NotPositiveDefinite, VerificationFailed
from src.ival.array import IntervalMatrix
from src.ival.eig import verified_gen_eig, verified_sym_eig, verify_positive_definite
from src.ival.interval import Interval
from src.observability.logger import get_logger
from src.slenclose.enclosure import EnclosureList, interlaces
from src.slenclose.gram import GramTriple

logger = get_logger(__name__)


def _as_interval_rows(vectors) -> IntervalMatrix:
    if isinstance(vectors, IntervalMatrix):
        return vectors
    rows = list(vectors)
    if rows and isinstance(rows[0][0], Interval):
        return IntervalMatrix.from_intervals(rows)
    return IntervalMatrix.point(np.array(rows, dtype=float, ndmin=2))


@dataclass(frozen=True)
class FormChain:
    ambient: IntervalMatrix
    constraints: IntervalMatrix

    def __post_init__(self):
        n, m = self.ambient.shape
        if n != m:
            raise DomainError("ambient form must be square", shape=self.ambient.shape)
        if self.constraints.rows and self.constraints.cols != n:
            raise DomainError("constraint length differs from the form size", n=n, length=self.constraints.cols)
        if self.constraints.rows >= n:
            raise DependentConstraints("as many constraints as dimensions", n=n, constraints=self.constraints.rows)

    @classmethod
    def of(cls, ambient, constraints: Sequence = ()) -> "FormChain":
        a = ambient if isinstance(ambient, IntervalMatrix) else IntervalMatrix.point(ambient)
        c = _as_interval_rows(constraints) if len(constraints) else IntervalMatrix(np.zeros((0, a.rows)))
        return cls(a.symmetrized(), c)

    @property
    def size(self) -> int:
        return self.ambient.rows

    @property
    def depth(self) -> int:
        return self.constraints.rows

    def basis(self, level: int) -> Optional[IntervalMatrix]:
        """Columns spanning the level-`level` subspace; None for the ambient space"""
        if level == 0:
            return None
        return null_basis(self.constraints[:level, :])

    def gram(self, level: int) -> GramTriple:
        """
        Triple of the restricted form on basis(level). M2 = N^T A^2 N bounds
        the restricted operator's <Tf, Tf> from above, which keeps Temple and
        Lehmann bounds valid.
        """
        a = self.ambient
        a2 = (a @ a).symmetrized()
        n = self.basis(level)
        if n is None:
            return GramTriple(IntervalMatrix.identity(self.size), a, a2)
        return GramTriple(IntervalMatrix.identity(n.rows).congruence(n), a.congruence(n), a2.congruence(n))


def _interval_solve(a: IntervalMatrix, b: IntervalMatrix) -> IntervalMatrix:
    """Gauss-Jordan elimination of A X = B in interval arithmetic (A small)"""
    q = a.rows
    rows = [ra + rb for ra, rb in zip(a.to_intervals(), b.to_intervals())]
    for col in range(q):
        pivot = max(range(col, q), key=lambda r: rows[r][col].mig)
        if rows[pivot][col].contains_zero():
            raise DependentConstraints("pivot block is singular", column=col)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for r in range(q):
            if r == col:
                continue
            f = rows[r][col]
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return IntervalMatrix.from_intervals([row[q:] for row in rows])


def null_basis(c: IntervalMatrix) -> IntervalMatrix:
    """Interval n x (n - q) matrix containing a basis of {x : C x = 0}"""
    q, n = c.shape
    try:
        verify_positive_definite((c @ c.T).symmetrized())
    except (NotPositiveDefinite, VerificationFailed) as exc:
        raise DependentConstraints("constraints are not verifiably independent", constraints=q) from exc
    _, _, order = scipy.linalg.qr(c.mid(), pivoting=True)
    pivots = sorted(int(j) for j in order[:q])
    free = [j for j in range(n) if j not in set(pivots)]

    x = _interval_solve(IntervalMatrix(c.lo[:, pivots], c.hi[:, pivots]),
                        IntervalMatrix(c.lo[:, free], c.hi[:, free]))
    lo = np.zeros((n, n - q))
    hi = np.zeros((n, n - q))
    lo[pivots, :], hi[pivots, :] = -x.hi, -x.lo
    for k, j in enumerate(free):
        lo[j, k] = hi[j, k] = 1.0
    return IntervalMatrix(lo, hi)


def level_enclosures(chain: FormChain, level: int) -> EnclosureList:
    n = chain.basis(level)
    if n is None:
        values = verified_sym_eig(chain.ambient).values
    else:
        values = verified_gen_eig(chain.ambient.congruence(n), IntervalMatrix.identity(n.rows).congruence(n)).values
    return EnclosureList.build(values, math.inf)


def chain_eigen_lists(chain: FormChain) -> List[EnclosureList]:
    """Full spectra of every level, ambient first; consecutive levels are checked to interlace"""
    lists = [level_enclosures(chain, level) for level in range(chain.depth + 1)]
    for level in range(1, len(lists)):
        if not interlaces(lists[level - 1], lists[level]):
            logger.error("❌ restricted spectra fail to interlace", level=level)
            raise VerificationFailed("restricted spectra fail to interlace", level=level)
    logger.info("form chain enclosed", levels=len(lists), size=chain.size)
    return lists

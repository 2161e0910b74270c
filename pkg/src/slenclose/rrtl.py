"""
Rayleigh-Ritz upper bounds with Temple and Lehmann lower bounds.

refine() is the per-node engine: float Ritz vectors are recomputed from the
interval Gram data, the triple is projected onto them in interval
arithmetic, and every bound below is derived from the projected triple only.
"""

import math
from typing import List, Optional, Union

import numpy as np
import scipy.linalg

from src.core.errors import GapViolated, NotPositiveDefinite, VerificationFailed
from src.ival.eig import verified_gen_eig
from src.ival.interval import Interval
from src.observability.logger import get_logger
from src.observability.metrics import get_metrics
from src.slenclose.enclosure import EnclosureList
from src.slenclose.gram import GramTriple

logger = get_logger(__name__)
_metrics = get_metrics()

LEHMANN_BLOCKS = (2, 3)


def _rho_point(rho: Union[Interval, float]) -> float:
    # both bounds increase with rho, so the lower end is the safe choice
    return rho.lo if isinstance(rho, Interval) else float(rho)


def rr_upper(g: GramTriple, k: int) -> List[Interval]:
    """Enclosures of the first k Ritz values; their upper ends bound the eigenvalues"""
    if k > g.dim:
        raise GapViolated("more eigenvalues requested than the test space holds", k=k, dim=g.dim)
    return verified_gen_eig(g.M1, g.M0).values[:k]


def temple_lower(g: GramTriple, test_vector_index: int, rho: Union[Interval, float]) -> Interval:
    """
    Temple bound (q rho - r)/(rho - q) for the eigenvalue just below rho.
    The lower end of the result is the rigorous bound.
    """
    j = test_vector_index
    norm = g.M0[j, j]
    q = g.M1[j, j] / norm
    r = g.M2[j, j] / norm
    rho_f = _rho_point(rho)
    if not math.isfinite(rho_f) or not q.hi < rho_f:
        raise GapViolated("rho does not lie above the Rayleigh quotient", q_upper=q.hi, rho=rho_f)
    rr = Interval(rho_f)
    return (q * rr - r) / (rr - q)


def lehmann_lower(g: GramTriple, rho: Union[Interval, float], k: int) -> List[Interval]:
    """
    Lower bounds for the k eigenvalues directly below rho, ascending, from
    the pencil (M1 - rho M0, M2 - 2 rho M1 + rho^2 M0). Requires rho to be
    at most the eigenvalue whose index equals the test space dimension.
    """
    rho_f = _rho_point(rho)
    if not math.isfinite(rho_f):
        raise GapViolated("rho is not finite", rho=rho_f)
    if k > g.dim:
        raise GapViolated("more bounds requested than the test space holds", k=k, dim=g.dim)
    rr = Interval(rho_f)
    a = (g.M1 - g.M0.scale(rr)).symmetrized()
    b = (g.M2 - g.M1.scale(rr * 2.0) + g.M0.scale(rr.sqr())).symmetrized()
    taus = verified_gen_eig(a, b).values
    bounds = []
    for j in range(k):
        tau = taus[j]
        if not tau.hi < 0.0:
            raise GapViolated("Lehmann eigenvalue not verifiably negative", branch=j, tau_upper=tau.hi, rho=rho_f)
        bounds.append(rr + 1.0 / tau)
    return list(reversed(bounds))


def _ritz_vectors(g: GramTriple, m: int) -> np.ndarray:
    a1 = g.M1.mid()
    a0 = g.M0.mid()
    _, vectors = scipy.linalg.eigh(0.5 * (a1 + a1.T), 0.5 * (a0 + a0.T))
    return vectors[:, :m]


class _Refinement:
    """Bookkeeping for one refine() call"""

    def __init__(self, rough: EnclosureList, uppers: List[Optional[float]]):
        self.rough = rough
        self.n = len(rough)
        self.lowers: List[Optional[float]] = [None] * self.n
        self.uppers = uppers

    def lower(self, i: int) -> float:
        if i >= self.n:
            return self.rough.ceiling
        own = self.lowers[i]
        return self.rough[i].lo if own is None else max(own, self.rough[i].lo)

    def upper(self, i: int) -> float:
        u = self.uppers[i] if i < len(self.uppers) else None
        return self.rough[i].hi if u is None else min(u, self.rough[i].hi)

    def width(self, i: int) -> float:
        return self.upper(i) - self.lower(i)

    def raise_lower(self, i: int, value: float):
        if self.lowers[i] is None or value > self.lowers[i]:
            self.lowers[i] = value


def _try_lehmann(p: GramTriple, state: _Refinement, i: int, block: int, m: int) -> bool:
    start = max(0, min(i, state.n - block))
    stop = start + block
    if stop > m:
        return False
    rho = state.lower(stop)
    try:
        bounds = lehmann_lower(p.principal(list(range(start, stop))), rho, block)
    except (GapViolated, NotPositiveDefinite, VerificationFailed) as exc:
        logger.debug("lehmann block failed", start=start, block=block, reason=str(exc))
        return False
    _metrics.counter("rrtl.lehmann_escalations").inc()
    for offset, bound in enumerate(bounds):
        state.raise_lower(start + offset, bound.lo)
    return True


def refine(g: GramTriple, rough: EnclosureList, tol: float = 1e-6) -> EnclosureList:
    """
    Tighten every entry of an index-exact rough list for the operator whose
    test space is g. Entries the test space cannot reach stay rough; the
    ceiling is unchanged.
    """
    n = len(rough)
    if n == 0:
        return rough
    m = min(g.dim, n)
    p = g.project(_ritz_vectors(g, m))

    ritz = verified_gen_eig(p.M1, p.M0).values
    uppers: List[Optional[float]] = [v.hi for v in ritz[:m]] + [None] * (n - m)
    state = _Refinement(rough, uppers)
    if g.basis is None and m == g.dim:
        # the projection spans the whole matrix space: the pencil enclosures are two-sided
        for i in range(m):
            state.raise_lower(i, ritz[i].lo)

    for i in range(m - 1, -1, -1):
        rho = state.lower(i + 1)
        ok = False
        try:
            state.raise_lower(i, temple_lower(p, i, rho).lo)
            ok = state.width(i) <= tol
        except GapViolated:
            pass
        if ok:
            continue
        _metrics.counter("rrtl.temple_failures").inc()
        for block in LEHMANN_BLOCKS:
            if _try_lehmann(p, state, i, block, m) and state.width(i) <= tol:
                break

    refined = rough.refine([state.lowers[i] for i in range(n)], state.uppers)
    for e in refined:
        _metrics.histogram("rrtl.enclosure_width").observe(e.width)
    return refined


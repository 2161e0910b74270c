"""
Constant-coefficient comparison bounds on a single cell.

With a0 <= a <= a1 and v0 <= V <= v1 on a cell of length L, the i-th
eigenvalue lies between a0 pi^2 c_i^2 / L^2 + v0 and a1 pi^2 c_i^2 / L^2 + v1,
where c_i = i + shift depends on the boundary conditions.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from src.core.errors import NonPositiveA, NotDisjoint
from src.ival import rounding as rd
from src.ival.interval import Interval
from src.observability.logger import get_logger
from src.slenclose.enclosure import EnclosureList
from src.slenclose.problem import SLProblem

logger = get_logger(__name__)

MAX_MODES = 100000


@dataclass(frozen=True)
class CrudeData:
    a: Interval
    v: Interval
    scale_lo: float  # lower bound of a0 pi^2 / L^2
    scale_hi: float  # upper bound of a1 pi^2 / L^2
    shift: Fraction


def _crude_data(p: SLProblem) -> CrudeData:
    a = p.a_range()
    if not a.lo > 0.0:
        raise NonPositiveA("a(x) not verifiably positive", cell=p.describe(), a_lower=a.lo)
    v = p.v_range()
    length_sq = Interval.exact(p.length * p.length)
    factor = p.unit.pi_over_unit_squared() / length_sq
    lo = (Interval(a.lo) * factor).lo
    hi = (Interval(a.hi) * factor).hi
    return CrudeData(a, v, lo, hi, p.bc.mode_shift())


def _mode_sq(i: int, shift: Fraction) -> Interval:
    return Interval.exact((i + shift) ** 2)


def _lower(data: CrudeData, i: int) -> float:
    return rd.add_down(rd.mul_down(data.scale_lo, _mode_sq(i, data.shift).lo), data.v.lo)


def _upper(data: CrudeData, i: int) -> float:
    return rd.add_up(rd.mul_up(data.scale_hi, _mode_sq(i, data.shift).hi), data.v.hi)


def mode_count(p: SLProblem, E_prime: float) -> int:
    """M = smallest index with E' <= v0 + c_M^2 a0 pi^2 / L^2"""
    data = _crude_data(p)
    m = 0
    while _lower(data, m) < E_prime:
        m += 1
        if m > MAX_MODES:
            raise NotDisjoint("too many modes below E'", cell=p.describe(), E_prime=E_prime)
    return m


def gap(data: CrudeData, m: int) -> float:
    """Lower bound of v0 + c_m^2 A0 - v1 - c_{m-1}^2 A1"""
    return rd.sub_down(_lower(data, m), _upper(data, m - 1))


def crude_enclosure(p: SLProblem, E_prime: float) -> EnclosureList:
    """
    Index-exact crude list of every eigenvalue below E'. Raises NotDisjoint
    when the enclosures of consecutive modes may overlap.
    """
    data = _crude_data(p)
    m_count = mode_count(p, E_prime)

    checks: List[int] = [1] if m_count >= 1 else []
    if m_count >= 2:
        checks.append(m_count)
    for m in checks:
        if not gap(data, m) > 0.0:
            raise NotDisjoint(
                "crude enclosures overlap",
                cell=p.describe(),
                mode=m,
                gap=gap(data, m),
                E_prime=E_prime,
            )

    entries = [Interval(_lower(data, i), _upper(data, i)) for i in range(m_count)]
    ceiling = _lower(data, m_count)
    for i in range(m_count):
        next_lo = entries[i + 1].lo if i + 1 < m_count else ceiling
        if not entries[i].hi < next_lo:
            raise NotDisjoint("crude enclosures overlap", cell=p.describe(), mode=i + 1, E_prime=E_prime)

    logger.debug("crude enclosure", cell=p.describe(), modes=m_count, ceiling=ceiling)
    return EnclosureList(tuple(entries), ceiling)


def crude_passes(p: SLProblem, E_prime: float) -> bool:
    try:
        crude_enclosure(p, E_prime)
        return True
    except NotDisjoint:
        return False


def lowest_bound(p: SLProblem) -> float:
    """Lower bound of the smallest eigenvalue on the cell"""
    data = _crude_data(p)
    return _lower(data, 0) if not math.isinf(data.v.lo) else -math.inf

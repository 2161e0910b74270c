"""
Decoupling trees: where Neumann conditions are inserted.

Three strategies build the tree of cells: uniform dyadic splitting, splitting
driven by the potential (cells with no spectrum below their ceiling stay
leaves), and splitting away from critical points of approximate
eigenfunctions.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import ConfigError, DepthExceeded
from src.observability.logger import get_logger
from src.slenclose.crude import crude_passes, lowest_bound
from src.slenclose.enclosure import Schedule
from src.slenclose.gram import approximate_eigenfunctions
from src.slenclose.problem import SLProblem

logger = get_logger(__name__)

DEFAULT_MAX_LEVEL = 8


@dataclass(frozen=True)
class Cell:
    lo: Fraction
    hi: Fraction
    depth: int
    children: Tuple["Cell", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> List["Cell"]:
        return [c for c in self.walk() if c.is_leaf]


@dataclass(frozen=True)
class Partition:
    points: Tuple[Fraction, ...]
    level: int
    root: Cell

    @classmethod
    def from_root(cls, root: Cell) -> "Partition":
        leaves = root.leaves()
        points = tuple([leaves[0].lo] + [c.hi for c in leaves])
        level = max(c.depth for c in leaves)
        return cls(points, level, root)

    def cells_at(self, depth: int) -> List[Cell]:
        return [c for c in self.root.walk() if c.depth == depth]

    @property
    def operator_count(self) -> int:
        return sum(1 for _ in self.root.walk())


def _default_split(p: SLProblem, lo: Fraction, hi: Fraction) -> Fraction:
    """Midpoint, or a potential jump inside the middle half nearest to it"""
    mid = (lo + hi) / 2
    quarter = (hi - lo) / 4
    jumps = [b for b in p.V.breakpoints if lo + quarter <= b <= hi - quarter]
    if jumps:
        return min(jumps, key=lambda b: (abs(b - mid), b))
    return mid


def _build(p: SLProblem, lo: Fraction, hi: Fraction, depth: int, target: int,
           split: Callable[[Fraction, Fraction, int], Fraction],
           stop: Callable[[Fraction, Fraction, int], bool] = None) -> Cell:
    if depth == target or (stop is not None and stop(lo, hi, depth)):
        return Cell(lo, hi, depth)
    gamma = split(lo, hi, depth)
    left = _build(p, lo, gamma, depth + 1, target, split, stop)
    right = _build(p, gamma, hi, depth + 1, target, split, stop)
    return Cell(lo, hi, depth, (left, right))


def crude_ceiling(E: float, E_prime: float, N: int) -> float:
    """E_{N+1} of the level schedule for a tree of depth N"""
    if N == 0:
        return E_prime
    return float(Fraction(E_prime) + (Fraction(E_prime) - Fraction(E)) / N)


def _leaves_pass(p: SLProblem, root: Cell, E_crude: float) -> bool:
    return all(crude_passes(p.restrict(c.lo, c.hi), E_crude) for c in root.leaves())


def partition_with(p: SLProblem, N: int, split: Optional[Callable] = None) -> Partition:
    split = split or (lambda lo, hi, depth: _default_split(p, lo, hi))
    return Partition.from_root(_build(p, p.lo, p.hi, 0, N, split))


def uniform_partition(p: SLProblem, E_prime: float, max_level: int = DEFAULT_MAX_LEVEL,
                      E: Optional[float] = None) -> Partition:
    """
    Smallest depth N whose leaves all pass the crude disjointness test at E'.
    With E given, the test ceiling is the schedule's E_{N+1} instead.
    """
    for N in range(max_level + 1):
        partition = partition_with(p, N)
        ceiling = E_prime if E is None else crude_ceiling(E, E_prime, N)
        if _leaves_pass(p, partition.root, ceiling):
            logger.info("uniform partition chosen", depth=N, cells=len(partition.points) - 1)
            return partition
    raise DepthExceeded("no uniform partition passes the crude test", max_level=max_level, E_prime=E_prime)


def coefficient_partition(p: SLProblem, E: float, E_prime: float,
                          max_level: int = DEFAULT_MAX_LEVEL) -> Partition:
    """
    Split only where needed: a cell stops once its crude list is disjoint up
    to 2E' - E (which bounds every E_{N+1}), or once its spectrum starts at or
    above that ceiling.
    """
    ceiling = 2.0 * E_prime - E

    def stop(lo: Fraction, hi: Fraction, depth: int) -> bool:
        cell = p.restrict(lo, hi)
        if lowest_bound(cell) >= ceiling:
            return True
        if crude_passes(cell, ceiling):
            return True
        if depth == max_level:
            raise DepthExceeded("cell still fails the crude test", cell=cell.describe(), max_level=max_level)
        return False

    root = _build(p, p.lo, p.hi, 0, max_level + 1, lambda lo, hi, depth: _default_split(p, lo, hi), stop)
    partition = Partition.from_root(root)
    logger.info("coefficient partition chosen", depth=partition.level, cells=len(partition.points) - 1)
    return partition


def adaptive_bisection_point(lo: Fraction, hi: Fraction, critical_points: Sequence,
                             leftmost: bool = False) -> Fraction:
    """
    A split point in the middle half of (lo, hi) at distance >= (hi-lo)/(4P)
    from each of the P critical points, taken from the (hi-lo)/(8P) grid.
    Among admissible grid points the one nearest the midpoint wins (ties go
    left); with leftmost=True the leftmost admissible point is returned. When
    no grid point qualifies the grid point farthest from the critical points
    is returned.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    length = hi - lo
    pts = [Fraction(c) for c in critical_points]
    P = len(pts)
    if P == 0:
        return (lo + hi) / 2
    bound = length / (4 * P)
    step = length / (8 * P)
    mid = (lo + hi) / 2
    candidates = []
    k = 0
    while lo + k * step <= hi:
        g = lo + k * step
        if lo + length / 4 <= g <= hi - length / 4:
            candidates.append(g)
        k += 1
    admissible = [g for g in candidates if all(abs(g - c) >= bound for c in pts)]
    if admissible:
        return admissible[0] if leftmost else min(admissible, key=lambda g: (abs(g - mid), g))
    return max(candidates, key=lambda g: (min(abs(g - c) for c in pts), -g))


def _critical_points(p: SLProblem, ceiling: float, degree: int = 32) -> List[Fraction]:
    """Sign changes of derivatives of float Ritz eigenfunctions of p below the ceiling"""
    values, derivative = approximate_eigenfunctions(p, degree)
    # endpoint derivatives vanish under Neumann conditions; only interior flips count
    grid = np.linspace(float(p.lo), float(p.hi), 2049)[1:-1]
    points: List[Fraction] = []
    for k, lam in enumerate(values):
        if lam >= ceiling:
            break
        dv = derivative(k, grid)
        flips = np.nonzero(np.sign(dv[:-1]) * np.sign(dv[1:]) < 0)[0]
        points.extend(Fraction(float(0.5 * (grid[i] + grid[i + 1]))).limit_denominator(1 << 20) for i in flips)
    return points


def adaptive_partition(p: SLProblem, E: float, E_prime: float,
                       max_level: int = DEFAULT_MAX_LEVEL) -> Partition:
    """
    Eigenfunction-aware tree; depth chosen like the uniform strategy. Every
    cell is bisected away from the critical points of its own operator's
    approximate eigenfunctions below that cell's level ceiling.
    """
    found: Dict[Tuple[Fraction, Fraction, float], List[Fraction]] = {}

    def critical(lo: Fraction, hi: Fraction, ceiling: float) -> List[Fraction]:
        key = (lo, hi, ceiling)
        if key not in found:
            found[key] = _critical_points(p.restrict(lo, hi), ceiling)
        return found[key]

    for N in range(max_level + 1):
        schedule = Schedule.build(E, N, E_prime) if N else None

        def split(lo: Fraction, hi: Fraction, depth: int) -> Fraction:
            inside = [c for c in critical(lo, hi, schedule.at(depth)) if lo < c < hi]
            return adaptive_bisection_point(lo, hi, inside)

        partition = Partition.from_root(_build(p, p.lo, p.hi, 0, N, split))
        if _leaves_pass(p, partition.root, crude_ceiling(E, E_prime, N)):
            logger.info("adaptive partition chosen", depth=N, cells=len(partition.points) - 1,
                        critical_sets=len(found))
            return partition
    raise DepthExceeded("no adaptive partition passes the crude test", max_level=max_level)


def choose_partition(p: SLProblem, E: float, E_prime: float, strategy: str = "uniform",
                     max_level: int = DEFAULT_MAX_LEVEL) -> Partition:
    if strategy == "uniform":
        return uniform_partition(p, E_prime, max_level=max_level, E=E)
    if strategy == "coefficient":
        return coefficient_partition(p, E, E_prime, max_level=max_level)
    if strategy == "adaptive":
        return adaptive_partition(p, E, E_prime, max_level=max_level)
    raise ConfigError(f"unknown partition strategy {strategy!r}", field="strategy")

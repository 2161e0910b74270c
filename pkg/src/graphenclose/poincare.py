"""
Poincare lower bounds on the first nonzero Laplacian eigenvalue from path
families.

A family holds one path per ordered vertex pair. With |gamma| the sum of
1/b along a path, three bounds on mu_1 are available:

    measured    |X| / (max |gamma| * max directed edge count)
    congestion  |X| / K,  K = max over directed edges of the sum of |gamma|
    declared    1 / (alpha beta d^2), from the family's own constants

The declared bound is only reported once the measured statistics confirm
alpha d >= max |gamma| and beta d |X| >= max edge count.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from src.core.errors import DisconnectedPath, IncompleteFamily, NotMonotone
from src.graphenclose.graph import Graph, Vertex, laplacian, staircase_graph
from src.ival.interval import Interval
from src.observability.logger import get_logger

logger = get_logger(__name__)

Path = Tuple[Vertex, ...]
Profile = Union[Sequence[int], Callable[[int], int]]


@dataclass(frozen=True)
class PathFamily:
    paths: Dict[Tuple[Vertex, Vertex], Path]
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    diameter: Optional[Fraction] = None

    @property
    def declared(self) -> bool:
        return None not in (self.alpha, self.beta, self.diameter)


@dataclass(frozen=True)
class FamilyStats:
    size: int
    max_length: Interval
    max_count: int
    K: Interval


@dataclass(frozen=True)
class PoincareCertificate:
    stats: FamilyStats
    measured: Interval
    congestion: Interval
    declared: Optional[Interval] = None

    @property
    def variants(self) -> Dict[str, Interval]:
        out = {"measured": self.measured, "congestion": self.congestion}
        if self.declared is not None:
            out["declared"] = self.declared
        return out

    @property
    def best(self) -> Interval:
        return max(self.variants.values(), key=lambda v: v.lo)

    @property
    def best_variant(self) -> str:
        return max(self.variants.items(), key=lambda kv: kv[1].lo)[0]


def family_stats(g: Graph, pf: PathFamily) -> FamilyStats:
    """Walk every path once; raises on missing pairs and on steps off the graph"""
    unit = g.is_unit_weighted()
    inverse = {} if unit else {frozenset(e): Interval(1.0) / g.weight(*e) for e in g.edges}
    counts: Dict[Tuple[Vertex, Vertex], int] = defaultdict(int)
    sums: Dict[Tuple[Vertex, Vertex], Interval] = defaultdict(lambda: Interval(0.0))
    max_len = Interval(0.0)

    for x in g.vertices:
        for y in g.vertices:
            if x == y:
                continue
            path = pf.paths.get((x, y))
            if path is None:
                raise IncompleteFamily("no path for ordered pair", pair=(x, y))
            if len(path) < 2 or path[0] != x or path[-1] != y:
                raise DisconnectedPath("path does not join its pair", pair=(x, y), path=path)
            steps = list(zip(path, path[1:]))
            for u, v in steps:
                if not g.has_edge(u, v):
                    raise DisconnectedPath("path steps across a non-edge", pair=(x, y), step=(u, v))
            if unit:
                length = Interval(float(len(steps)))
            else:
                length = Interval(0.0)
                for u, v in steps:
                    length = length + inverse[frozenset((u, v))]
            if length.hi > max_len.hi:
                max_len = length
            for step in steps:
                counts[step] += 1
                sums[step] = sums[step] + length

    max_count = max(counts.values(), default=0)
    K = max(sums.values(), key=lambda v: v.hi, default=Interval(0.0))
    return FamilyStats(g.n, max_len, max_count, K)


def _declared_bound(pf: PathFamily, stats: FamilyStats) -> Optional[Interval]:
    if not pf.declared:
        return None
    ad = pf.alpha * pf.diameter
    bdx = pf.beta * pf.diameter * stats.size
    if Fraction(stats.max_length.hi) > ad or stats.max_count > bdx:
        logger.warning("declared family constants do not dominate the paths", alpha_d=str(ad),
                       max_length=stats.max_length.hi, beta_d_size=str(bdx), max_count=stats.max_count)
        return None
    return Interval.exact(1 / (pf.alpha * pf.beta * pf.diameter ** 2))


def poincare_certificate(g: Graph, pf: PathFamily) -> PoincareCertificate:
    if g.n < 2:
        raise IncompleteFamily("a Poincare bound needs at least two vertices", vertices=g.n)
    stats = family_stats(g, pf)
    size = Interval(float(stats.size))
    measured = size / (stats.max_length.hi * Interval(float(stats.max_count)))
    congestion = size / Interval(stats.K.hi)
    return PoincareCertificate(stats, measured, congestion, _declared_bound(pf, stats))


def poincare_bound(g: Graph, pf: PathFamily) -> Interval:
    """Best of the three variants; the lower end bounds mu_1 from below"""
    return poincare_certificate(g, pf).best


def shortest_path_family(g: Graph) -> PathFamily:
    """One shortest path per ordered pair (hop count for unit weights, 1/b otherwise)"""
    if g.is_unit_weighted():
        table = dict(nx.all_pairs_shortest_path(g.nx))
    else:
        lengths = nx.Graph()
        for u, v in g.edges:
            lengths.add_edge(u, v, length=1.0 / g.weight(u, v).mid)
        table = dict(nx.all_pairs_dijkstra_path(lengths, weight="length"))
    paths = {}
    for x in g.vertices:
        reach = table.get(x, {})
        for y in g.vertices:
            if x != y and y in reach:
                paths[(x, y)] = tuple(reach[y])
    return PathFamily(paths)


# staircases


def _profile_values(n: int, f: Profile) -> List[int]:
    values = [int(f(i)) for i in range(1, n + 1)] if callable(f) else [int(v) for v in f]
    if len(values) != n:
        raise NotMonotone("profile length differs from n", n=n, length=len(values))
    if any(v < 1 for v in values):
        raise NotMonotone("profile values must be at least 1", profile=values)
    if any(a > b for a, b in zip(values, values[1:])):
        raise NotMonotone("profile is not non-decreasing", profile=values)
    return values


def _l_path(x: Vertex, y: Vertex) -> Path:
    (i, j), (i2, j2) = x, y
    row = [(k, j) for k in range(i, i2 + 1)]
    step = 1 if j2 >= j else -1
    column = [(i2, r) for r in range(j + step, j2 + step, step)]
    return tuple(row + column)


def staircase_paths(n: int, f: Profile) -> PathFamily:
    """
    Row-then-column paths on X = {(i, j): 1 <= i <= n, 1 <= j <= f(i)}.
    A pair whose first point lies to the right takes the reverse of the path
    in the other direction, so every path turns inside X.
    """
    values = _profile_values(n, f)
    points = [(i, j) for i, fi in enumerate(values, start=1) for j in range(1, fi + 1)]
    paths = {}
    for x in points:
        for y in points:
            if x == y:
                continue
            paths[(x, y)] = _l_path(x, y) if x[0] <= y[0] else tuple(reversed(_l_path(y, x)))

    top = values[-1]
    d = Fraction(n + top - 2)
    if d == 0:
        return PathFamily(paths)
    return PathFamily(paths, alpha=Fraction(1), beta=Fraction(max(n, top)) / d, diameter=d)


def degenerate_profile(n: int) -> List[int]:
    """f(i) = 1 for i < n and f(n) = n"""
    return [1] * (n - 1) + [n]


@dataclass
class ExperimentRow:
    n: int
    profile: List[int]
    bound: float
    oracle: float
    variant: str
    ratio: float = field(init=False)
    implied_c: float = field(init=False)

    def __post_init__(self):
        self.ratio = self.bound / self.oracle if self.oracle > 0 else float("nan")
        self.implied_c = self.bound * self.n ** 2


def oracle_mu1(g: Graph) -> float:
    """Floating-point mu_1 from a dense eigensolver; a reference value, not a bound"""
    return float(np.linalg.eigvalsh(laplacian(g).mid())[1])


def staircase_experiment(n_max: int, samples: int, seed: int = 0) -> List[ExperimentRow]:
    """Bound/oracle ratios and c = bound n^2 over random monotone staircases with f(n) <= n"""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(samples):
        n = int(rng.integers(2, n_max + 1))
        profile = sorted(int(v) for v in rng.integers(1, n + 1, size=n))
        g = staircase_graph(profile)
        cert = poincare_certificate(g, staircase_paths(n, profile))
        rows.append(ExperimentRow(n, profile, cert.best.lo, oracle_mu1(g), cert.best_variant))
    if rows:
        logger.info("🧪 staircase experiment", samples=len(rows), min_ratio=min(r.ratio for r in rows),
                    min_c=min(r.implied_c for r in rows))
    return rows

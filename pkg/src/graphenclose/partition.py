"""
Partition homotopy: eigenvalues of a graph below E = a b^2 d(X)^-2 from a
hierarchical split into parts of class C_a.

Below E each part contributes only its zero eigenvalue, so the leaves need no
eigen-lists at all; siblings are joined by the continuous homotopy up the
hierarchy. An eigenvalue that rises past E during a join leaves the list with
its last certified lower bound as the ceiling, so the result may stop short of
E (never below half of it).
"""

import asyncio
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

from src.core.config import get_settings
from src.core.errors import ClassViolation
from src.graphenclose.chain import DEFAULT_TOL, graph_enclose
from src.graphenclose.graph import Graph, Vertex
from src.graphenclose.homotopy import HomotopySchedule, run_homotopy
from src.graphenclose.poincare import poincare_bound, shortest_path_family
from src.ival import rounding as rd
from src.ival.interval import Interval
from src.observability.logger import get_logger
from src.observability.tracer import trace_context, trace_operation
from src.slenclose.enclosure import EnclosureList, merge

logger = get_logger(__name__)

# a leaf is a list (or set) of vertices, a split is a pair of subtrees
PartTree = Union[List[Vertex], FrozenSet[Vertex], Tuple["PartTree", "PartTree"]]

DIRECT_LIMIT = 64


@dataclass(frozen=True)
class PartCertificate:
    vertices: Tuple[Vertex, ...]
    diameter: float
    mu1_lower: float
    required: float
    method: str


def _is_split(tree) -> bool:
    return isinstance(tree, tuple)


def _leaves(tree) -> List[Sequence[Vertex]]:
    if _is_split(tree):
        return _leaves(tree[0]) + _leaves(tree[1])
    return [tree]


def balanced_tree(leaves: Sequence) -> PartTree:
    """Pair up a flat list of parts into a balanced hierarchy"""
    leaves = list(leaves)
    if len(leaves) == 1:
        return leaves[0]
    mid = len(leaves) // 2
    return (balanced_tree(leaves[:mid]), balanced_tree(leaves[mid:]))


def ceiling_for(g: Graph, a: float, b: float) -> float:
    """Lower end of a b^2 d(X)^-2 with the diameter bounded from above"""
    _, d_hi = g.diameter_bounds()
    return (Interval(a) * Interval(b).sqr() / Interval(d_hi).sqr()).lo


def certify_class(g: Graph, a: float) -> PartCertificate:
    """Verify mu_1(g) >= a d(g)^-2, by a Poincare family or a direct enclosure"""
    if g.n == 1:
        return PartCertificate(tuple(g.vertices), 0.0, float("inf"), 0.0, "trivial")
    if g.component_count() > 1:
        raise ClassViolation("part is not connected", vertices=len(g.vertices))
    d_lo, _ = g.diameter_bounds()
    required = rd.div_up(a, rd.mul_down(d_lo, d_lo))
    bound = poincare_bound(g, shortest_path_family(g)).lo
    method = "poincare"
    if bound < required and g.n <= DIRECT_LIMIT:
        bound = graph_enclose(g, 2)[1].lo
        method = "direct"
    if bound < required:
        raise ClassViolation("part fails its class certificate", vertices=len(g.vertices),
                             mu1_lower=bound, required=required)
    return PartCertificate(tuple(g.vertices), d_lo, bound, required, method)


class PartitionEncloser:
    def __init__(self, g: Graph, parts: PartTree, a: float, b: float, tol: float = DEFAULT_TOL,
                 schedule: Optional[HomotopySchedule] = None, concurrency: Optional[int] = None):
        self.g = g
        self.parts = parts
        self.a, self.b = float(a), float(b)
        self.tol = tol
        self.schedule = schedule
        self.E = ceiling_for(g, self.a, self.b)
        self._d_lo, _ = g.diameter_bounds()
        self.certificates: List[PartCertificate] = []
        self._semaphore = asyncio.Semaphore(max(1, concurrency or get_settings().threads))

    def _check_cover(self):
        seen = [v for leaf in _leaves(self.parts) for v in leaf]
        if len(seen) != len(set(seen)) or set(seen) != set(self.g.vertices):
            raise ClassViolation("parts do not partition the vertex set", covered=len(set(seen)), vertices=self.g.n)

    def _leaf(self, vertices: Sequence[Vertex]) -> Tuple[Graph, EnclosureList]:
        part = self.g.induced(vertices)
        _, dp_hi = part.diameter_bounds()
        if rd.mul_up(dp_hi, self.b) > self._d_lo:
            raise ClassViolation("part diameter exceeds d(X)/b", vertices=part.n, diameter=dp_hi,
                                 limit=rd.div_down(self._d_lo, self.b))
        cert = certify_class(part, self.a)
        self.certificates.append(cert)
        logger.info("part certified", vertices=part.n, method=cert.method, mu1_lower=cert.mu1_lower)
        return part, EnclosureList((Interval(0.0),), self.E)

    def _join(self, left: Tuple[Graph, EnclosureList], right: Tuple[Graph, EnclosureList]) -> Tuple[Graph, EnclosureList]:
        (gl, ll), (gr, lr) = left, right
        bridges = gl.bridges_to(gr, self.g)
        start = merge(ll, lr)
        with trace_context("partition_join", left=gl.n, right=gr.n) as span:
            run = run_homotopy(gl, gr, bridges, self.schedule, count=1, tol=self.tol, start=start,
                               complete_below=self.E)
            span.set_tag("count", len(run.result))
        joined = self.g.induced(list(gl.vertices) + list(gr.vertices))
        return joined, run.result

    async def _solve(self, tree) -> Tuple[Graph, EnclosureList]:
        if not _is_split(tree):
            async with self._semaphore:
                return await asyncio.to_thread(self._leaf, tree)
        left, right = await asyncio.gather(self._solve(tree[0]), self._solve(tree[1]))
        async with self._semaphore:
            return await asyncio.to_thread(self._join, left, right)

    @trace_operation("partition_enclose")
    async def run_async(self) -> EnclosureList:
        self._check_cover()
        logger.info("🧩 partition ceiling", E=self.E, parts=len(_leaves(self.parts)))
        _, result = await self._solve(self.parts)
        return result.below(self.E)

    def run(self) -> EnclosureList:
        return asyncio.run(self.run_async())


def partition_enclose(g: Graph, parts: PartTree, a: float, b: float, tol: float = DEFAULT_TOL,
                      schedule: Optional[HomotopySchedule] = None) -> EnclosureList:
    """Certified eigenvalues of g below a b^2 d(X)^-2"""
    if not _is_split(parts):
        # a single part is the whole graph
        E = ceiling_for(g, a, b)
        return graph_enclose(g).below(E)
    return PartitionEncloser(g, parts, a, b, tol, schedule).run()

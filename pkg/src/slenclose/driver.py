"""
Hierarchical Neumann-decoupling driver.

Leaves of the decoupling tree start from crude constant-coefficient
enclosures; every node is tightened with RR/Temple/Lehmann, then siblings
are merged through interlacing into the rough list of their parent. Nodes of
one level are independent and run concurrently.
"""

import asyncio
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src.core.config import get_settings
from src.core.errors import BasisDegenerate, GapViolated, Halted, NotPositiveDefinite, VerificationFailed
from src.core.models import EffortReport
from src.observability.logger import get_logger
from src.observability.metrics import get_metrics
from src.observability.tracer import trace_context, trace_operation
from src.slenclose.crude import crude_enclosure
from src.slenclose.enclosure import EnclosureList, Schedule, merge_interlace
from src.slenclose.gram import assemble_gram
from src.slenclose.partition import DEFAULT_MAX_LEVEL, Cell, Partition, choose_partition
from src.slenclose.problem import SLProblem
from src.slenclose.rrtl import refine

logger = get_logger(__name__)
_metrics = get_metrics()

_RECOVERABLE = (BasisDegenerate, GapViolated, NotPositiveDefinite, VerificationFailed)


@dataclass(frozen=True)
class DriverConfig:
    E_prime: Optional[float] = None
    strategy: str = "uniform"
    max_level: int = DEFAULT_MAX_LEVEL
    basis_degrees: Tuple[int, ...] = (16, 24, 32)
    tol: float = 1e-6
    concurrency: Optional[int] = None


@dataclass
class NodeResult:
    cell: Cell
    rough: EnclosureList
    enclosures: EnclosureList
    degree: int
    seconds: float

    @property
    def key(self) -> Tuple[Fraction, Fraction]:
        return (self.cell.lo, self.cell.hi)


@dataclass
class SLRun:
    problem: SLProblem
    schedule: Schedule
    partition: Partition
    nodes: Dict[int, List[NodeResult]] = field(default_factory=dict)
    result: Optional[EnclosureList] = None
    halted_at: Optional[int] = None

    def level(self, depth: int) -> List[NodeResult]:
        return self.nodes.get(depth, [])


class HierarchicalEncloser:
    """Runs the decoupling tree bottom-up for one problem and one target E"""

    def __init__(self, problem: SLProblem, E: float, config: Optional[DriverConfig] = None):
        self.problem = problem
        self.E = float(E)
        self.config = config or DriverConfig()
        self.E_prime = self.config.E_prime if self.config.E_prime is not None else 9.0 * self.E / 8.0
        limit = self.config.concurrency or get_settings().threads
        self._limit = max(1, limit)

    def _refine_node(self, cell: Cell, rough: EnclosureList, threshold: float) -> Tuple[EnclosureList, int]:
        """Escalate the basis degree until the kept entries are narrow enough"""
        best: Optional[Tuple[EnclosureList, int]] = None
        for degree in self.config.basis_degrees:
            try:
                g = assemble_gram(self.problem, (cell.lo, cell.hi), degree)
                kept = refine(g, rough, self.config.tol).below(threshold)
            except _RECOVERABLE as exc:
                logger.warning("node refinement failed at this degree", cell=f"({cell.lo}, {cell.hi})",
                               degree=degree, reason=str(exc))
                continue
            if best is None or _quality(kept) < _quality(best[0]):
                best = (kept, degree)
            if kept.bounded and kept.max_width <= self.config.tol:
                break
        if best is None:
            return rough.below(threshold), 0
        return best

    def _process(self, cell: Cell, children: List[NodeResult], schedule: Schedule) -> NodeResult:
        start = time.perf_counter()
        with trace_context("sl_node", level=cell.depth, lo=str(cell.lo), hi=str(cell.hi)) as span:
            if cell.is_leaf:
                sub = self.problem.restrict(cell.lo, cell.hi)
                rough = crude_enclosure(sub, schedule.crude_ceiling)
            else:
                rough = merge_interlace(children[0].enclosures, children[1].enclosures)
            enclosures, degree = self._refine_node(cell, rough, schedule.at(cell.depth))
            span.set_tag("count", len(enclosures))
        seconds = time.perf_counter() - start
        _metrics.counter("sl.operators").inc()
        _metrics.counter("sl.eigenvalues").inc(len(enclosures))
        _metrics.histogram("sl.node_seconds").observe(seconds)
        logger.info("node finished", depth=cell.depth, cell=f"({cell.lo}, {cell.hi})",
                    count=len(enclosures), max_width=enclosures.max_width, degree=degree)
        return NodeResult(cell, rough, enclosures, degree, seconds)

    async def _process_level(self, cells: List[Cell], done: Dict[Tuple, NodeResult],
                             schedule: Schedule) -> List[NodeResult]:
        semaphore = asyncio.Semaphore(self._limit)

        async def one(cell: Cell) -> NodeResult:
            children = [done[(c.lo, c.hi)] for c in cell.children]
            async with semaphore:
                return await asyncio.to_thread(self._process, cell, children, schedule)

        return list(await asyncio.gather(*[one(c) for c in cells]))

    @trace_operation("hierarchical_enclose")
    async def run_async(self) -> SLRun:
        partition = choose_partition(self.problem, self.E, self.E_prime, self.config.strategy, self.config.max_level)
        schedule = Schedule.build(self.E, partition.level, self.E_prime)
        run = SLRun(self.problem, schedule, partition)
        _metrics.gauge("sl.levels").set(partition.level + 1)
        logger.info("🌲 decoupling tree ready", depth=partition.level,
                    points=[str(x) for x in partition.points], ceilings=list(schedule.levels))

        done: Dict[Tuple, NodeResult] = {}
        for depth in range(partition.level, -1, -1):
            results = await self._process_level(partition.cells_at(depth), done, schedule)
            run.nodes[depth] = results
            for node in results:
                done[node.key] = node
            for node in results:
                _check_node(node, run, depth)

        run.result = run.nodes[0][0].enclosures
        logger.info("✅ enclosure complete", count=len(run.result), max_width=run.result.max_width)
        return run

    def run(self) -> SLRun:
        return asyncio.run(self.run_async())


def _quality(lst: EnclosureList) -> Tuple[int, float]:
    return (0 if lst.bounded else 1, lst.max_width)


def _check_node(node: NodeResult, run: SLRun, depth: int):
    lst = node.enclosures
    pair = lst.overlapping_pair()
    if pair is None and lst.bounded:
        return
    run.halted_at = depth
    cell = f"({node.cell.lo}, {node.cell.hi})"
    diagnostics = {"level": depth, "node": cell}
    if pair is not None:
        diagnostics["pair"] = pair
        diagnostics["entries"] = (str(lst[pair[0]]), str(lst[pair[1]]))
    else:
        diagnostics["unbounded"] = [i for i, e in enumerate(lst) if not e.is_bounded]
    logger.error("🛑 disjointness could not be restored", depth=depth, **{k: v for k, v in diagnostics.items() if k != "level"})
    raise Halted("disjointness could not be restored", partial=run, **diagnostics)


def run_hierarchical(p: SLProblem, E: float, config: Optional[DriverConfig] = None) -> SLRun:
    """Full run with per-node artifacts; raises Halted carrying the partial SLRun"""
    return HierarchicalEncloser(p, E, config).run()


def hierarchical_enclose(p: SLProblem, E: float, config: Optional[DriverConfig] = None) -> EnclosureList:
    """Certified enclosures of every eigenvalue of p below E"""
    return run_hierarchical(p, E, config).result


def effort_report(run: SLRun) -> EffortReport:
    per_level = [sum(len(n.enclosures) for n in run.level(d)) for d in range(run.partition.level + 1)]
    operators = sum(len(run.level(d)) for d in range(run.partition.level + 1))
    return EffortReport(
        operators=operators,
        levels=len([d for d in range(run.partition.level + 1) if run.level(d)]),
        eigenvalues_per_level=per_level,
        total_eigenvalues=sum(per_level),
    )

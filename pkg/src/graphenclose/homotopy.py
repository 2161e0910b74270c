"""
Continuous edge-weight homotopy between two graphs.

Q_s = Q_F + s Q_G where F holds the edges inside gY and gZ and G the bridges
joining them. Every eigenvalue of A_s is non-decreasing in s, so a certified
list at s_i gives lower bounds at s_{i+1} and RRTL supplies the rest.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from src.core.errors import DomainError, Halted
from src.graphenclose.chain import DEFAULT_TOL, graph_enclose
from src.graphenclose.graph import UNIT, Edge, Graph, _weight, laplacian
from src.ival.array import IntervalMatrix
from src.ival.interval import Interval
from src.observability.logger import get_logger
from src.observability.metrics import get_metrics
from src.observability.tracer import trace_context, trace_operation
from src.slenclose.enclosure import EnclosureList, merge
from src.slenclose.gram import GramTriple
from src.slenclose.rrtl import refine

logger = get_logger(__name__)
_metrics = get_metrics()

HEADROOM = 8
MAX_STEPS = 32
# an eigenvalue leaving the list must carry a lower bound of at least this share of complete_below
CROSSING_SHARE = 0.5
DEFAULT_COUNT = 7


def _as_fraction(value) -> Fraction:
    # floats are read as their decimal text so 0.2 means 1/5
    return Fraction(str(value)) if isinstance(value, float) else Fraction(value)


@dataclass(frozen=True)
class HomotopySchedule:
    s_values: Tuple[Fraction, ...]

    def __post_init__(self):
        s = self.s_values
        if len(s) < 2 or s[0] != 0 or s[-1] != 1:
            raise DomainError("schedule must run from 0 to 1", s_values=[str(v) for v in s])
        if any(not a < b for a, b in zip(s, s[1:])):
            raise DomainError("schedule must be strictly increasing", s_values=[str(v) for v in s])

    @classmethod
    def of(cls, values: Iterable) -> "HomotopySchedule":
        return cls(tuple(_as_fraction(v) for v in values))

    @classmethod
    def default(cls) -> "HomotopySchedule":
        return cls.of([0, Fraction(1, 4), Fraction(1, 2), 1])

    @property
    def steps(self) -> int:
        return len(self.s_values) - 1

    def bisected(self, step: int) -> "HomotopySchedule":
        """Insert the midpoint of step `step` (between s_step and s_{step+1})"""
        s = list(self.s_values)
        s.insert(step + 1, (s[step] + s[step + 1]) / 2)
        return HomotopySchedule(tuple(s))


@dataclass
class HomotopyStage:
    s: Fraction
    enclosures: EnclosureList


@dataclass
class HomotopyRun:
    schedule: HomotopySchedule
    stages: List[HomotopyStage] = field(default_factory=list)
    bisections: int = 0

    def at(self, s) -> EnclosureList:
        target = _as_fraction(s)
        for stage in self.stages:
            if stage.s == target:
                return stage.enclosures
        raise KeyError(f"no certified stage at s={s}")

    @property
    def result(self) -> EnclosureList:
        return self.stages[-1].enclosures


class JoinedPair:
    """The two halves, their bridges and the matrices A_F, A_G of the joined graph"""

    def __init__(self, gY: Graph, gZ: Graph, bridges: Iterable):
        joined = nx.union(gY.nx, gZ.nx)
        self.bridges: List[Edge] = []
        for edge in bridges:
            u, v = edge[0], edge[1]
            if not ((u in gY and v in gZ) or (u in gZ and v in gY)):
                raise DomainError("bridge must join the two graphs", edge=(u, v))
            joined.add_edge(u, v, b=_weight(edge[2]) if len(edge) > 2 else UNIT)
            self.bridges.append((u, v))
        self.gY, self.gZ = gY, gZ
        self.graph = Graph(joined, gY.vertices + gZ.vertices)
        self.inner = laplacian(self.graph, gY.edges + gZ.edges)
        self.bridge_part = laplacian(self.graph, self.bridges)

    def matrix(self, s: Fraction) -> IntervalMatrix:
        if s == 0:
            return self.inner
        return (self.inner + self.bridge_part.scale(Interval.exact(s))).symmetrized()


def _start_list(pair: JoinedPair, start: Optional[EnclosureList], track: int) -> EnclosureList:
    if start is None:
        start = merge(graph_enclose(pair.gY), graph_enclose(pair.gZ))
    return start.truncated(track)


def _step(pair: JoinedPair, prev: EnclosureList, s: Fraction, tol: float) -> EnclosureList:
    rough = EnclosureList(tuple(Interval(e.lo, math.inf) for e in prev), prev.ceiling)
    refined = refine(GramTriple.for_matrix(pair.matrix(s)), rough, tol)
    return refined.narrow_prefix(tol)


def run_homotopy(gY: Graph, gZ: Graph, bridges: Iterable, schedule: Optional[HomotopySchedule] = None,
                 count: Optional[int] = None, tol: float = DEFAULT_TOL, start: Optional[EnclosureList] = None,
                 max_steps: int = MAX_STEPS, complete_below: Optional[float] = None) -> HomotopyRun:
    """
    Certified lists at every schedule point. A step whose narrow prefix is
    shorter than `count` is bisected and retried; a schedule longer than
    max_steps halts the run.

    With complete_below the step is also bisected while its ceiling lies under
    CROSSING_SHARE * complete_below. An eigenvalue that rises past the target
    then drops out of the list, and its last certified lower bound becomes
    the ceiling.
    """
    pair = JoinedPair(gY, gZ, bridges)
    schedule = schedule or HomotopySchedule.default()
    count = DEFAULT_COUNT if count is None else count
    first = _start_list(pair, start, count + HEADROOM)
    count = min(count, len(first)) if first.ceiling == math.inf else count
    run = HomotopyRun(schedule, [HomotopyStage(Fraction(0), first)])

    i = 0
    while i < run.schedule.steps:
        s = run.schedule.s_values[i + 1]
        prev = run.stages[-1].enclosures
        with trace_context("homotopy_step", step=i, s=str(s)) as span:
            certified = _step(pair, prev, s, tol)
            span.set_tag("count", len(certified))
        _metrics.counter("graph.homotopy_steps").inc()

        if len(certified) >= count and (complete_below is None
                                        or certified.ceiling >= CROSSING_SHARE * complete_below):
            run.stages.append(HomotopyStage(s, certified))
            logger.info("homotopy step certified", step=i, s=str(s), certified=len(certified))
            i += 1
            continue

        if run.schedule.steps >= max_steps:
            logger.error("🛑 homotopy schedule too coarse", step=i, s=str(s), certified=len(certified),
                         requested=count, steps=run.schedule.steps)
            raise Halted("homotopy schedule too coarse", partial=run, step=i, s=str(s),
                         certified=len(certified))
        run.schedule = run.schedule.bisected(i)
        run.bisections += 1
        _metrics.counter("graph.step_bisections").inc()
        logger.info("✂️ bisecting homotopy step", step=i, s_from=str(run.schedule.s_values[i]),
                    s_mid=str(run.schedule.s_values[i + 1]), certified=len(certified))
    return run


@trace_operation("homotopy_enclose")
def homotopy_enclose(gY: Graph, gZ: Graph, bridge_edges: Iterable, schedule: Optional[HomotopySchedule] = None,
                     count: Optional[int] = None, tol: float = DEFAULT_TOL,
                     start: Optional[EnclosureList] = None) -> EnclosureList:
    """Certified leading eigenvalues of the joined graph (s = 1)"""
    return run_homotopy(gY, gZ, bridge_edges, schedule, count, tol, start).result


def homotopy_sweep(gY: Graph, gZ: Graph, bridges: Iterable, s_values: Sequence, index: int,
                   tol: float = DEFAULT_TOL) -> List[Tuple[Fraction, Interval]]:
    """Enclosure of eigenvalue `index` of A_s at every requested s"""
    points = sorted({_as_fraction(v) for v in s_values} | {Fraction(0), Fraction(1)})
    run = run_homotopy(gY, gZ, bridges, HomotopySchedule(tuple(points)), count=index + 1, tol=tol)
    wanted = [_as_fraction(v) for v in s_values]
    return [(s, run.at(s)[index]) for s in wanted]

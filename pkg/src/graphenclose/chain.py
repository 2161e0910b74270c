"""
Edge-removal chains A >= A_1 >= ... >= A_n.

Dropping one edge is a rank-one decrease of the Laplacian, so the spectra of
consecutive matrices interlace and each certified list seeds the rough list
of the next matrix.
"""

import math
from typing import List, Optional, Sequence

import networkx as nx

from src.core.errors import Halted
from src.graphenclose.graph import Edge, Graph, laplacian
from src.ival.array import IntervalMatrix
from src.ival.eig import verified_sym_eig
from src.ival.interval import Interval
from src.observability.logger import get_logger
from src.observability.metrics import get_metrics
from src.observability.tracer import trace_context, trace_operation
from src.slenclose.enclosure import EnclosureList
from src.slenclose.gram import GramTriple
from src.slenclose.rrtl import refine

logger = get_logger(__name__)
_metrics = get_metrics()

DEFAULT_TOL = 1e-5
DEFAULT_COUNT = 6


def direct_enclose(a: IntervalMatrix, count: Optional[int] = None) -> EnclosureList:
    """Index-exact enclosures of the whole spectrum, optionally cut after `count`"""
    values = verified_sym_eig(a).values
    full = EnclosureList.build(values, math.inf)
    return full if count is None else full.truncated(count)


def graph_enclose(g: Graph, count: Optional[int] = None) -> EnclosureList:
    return direct_enclose(laplacian(g), count)


def interlace_down(upper: EnclosureList, floor: float = 0.0) -> EnclosureList:
    """
    Rough list for B = A - (rank one, positive) from the list of A:
    lambda_{k-1}(A) <= lambda_k(B) <= lambda_k(A).
    """
    entries = []
    for k, e in enumerate(upper):
        lo = upper[k - 1].lo if k > 0 else floor
        entries.append(Interval(lo, e.hi))
    ceiling = upper[len(upper) - 1].lo if len(upper) else floor
    return EnclosureList(tuple(entries), min(ceiling, upper.ceiling))


def congestion_order(g: Graph, edges: Sequence[Edge]) -> List[Edge]:
    """Edges sorted by betweenness (a congestion proxy), most congested first"""
    centrality = nx.edge_betweenness_centrality(g.nx, normalized=False)
    score = {frozenset(e): c for e, c in centrality.items()}
    return sorted(edges, key=lambda e: -score.get(frozenset(e), 0.0))


@trace_operation("edge_chain_enclose")
def edge_chain_enclose(g: Graph, removed_edges: Sequence[Edge], count: int = DEFAULT_COUNT,
                       tol: float = DEFAULT_TOL) -> List[EnclosureList]:
    """
    Certified lists for A, A_1, ..., A_n where A_i omits the first i edges.
    Each list keeps the leading entries narrower than tol; fewer than
    `count` of them halts the chain.
    """
    lists = [graph_enclose(g)]
    current = g
    for step, edge in enumerate(removed_edges, start=1):
        current = current.without_edges([edge])
        with trace_context("chain_step", step=step) as span:
            rough = interlace_down(lists[-1])
            refined = refine(GramTriple.for_matrix(laplacian(current)), rough, tol)
            certified = refined.narrow_prefix(tol)
            span.set_tag("count", len(certified))
        if len(certified) < count:
            logger.error("🛑 chain step left too few certified eigenvalues", step=step, edge=str(edge),
                         certified=len(certified), requested=count)
            raise Halted("chain step left too few certified eigenvalues", partial=lists + [refined],
                         step=step, edge=edge, certified=len(certified))
        logger.info("chain step certified", step=step, edge=str(edge), certified=len(certified))
        lists.append(certified)
    return lists

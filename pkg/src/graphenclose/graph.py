"""
Weighted finite graphs and their Laplacians.

A Graph wraps an undirected networkx graph whose edges carry an interval
weight `b`; the directed edge set of the Dirichlet form is the symmetric
closure, so b(x, y) = b(y, x) holds by construction. Vertex order is fixed
at construction and defines the row order of every matrix.
"""

import re
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from src.core.errors import ConfigError, DisconnectedPath, DomainError
from src.ival import rounding as rd
from src.ival.array import IntervalMatrix
from src.ival.interval import Interval

Vertex = Hashable
Edge = Tuple[Vertex, Vertex]

UNIT = Interval(1.0)


class Graph:
    def __init__(self, g: nx.Graph, order: Optional[Sequence[Vertex]] = None):
        if nx.number_of_selfloops(g):
            raise DomainError("graph has self-loops", loops=nx.number_of_selfloops(g))
        for u, v, data in g.edges(data=True):
            b = data.setdefault("b", UNIT)
            if not isinstance(b, Interval) or not b.lo > 0.0:
                raise DomainError("edge weight must be a positive interval", edge=(u, v), weight=str(b))
        self.nx = g
        self.vertices: List[Vertex] = list(order) if order is not None else sorted(g.nodes, key=_sort_key)
        if set(self.vertices) != set(g.nodes):
            raise DomainError("vertex order does not match the vertex set")
        self.index: Dict[Vertex, int] = {v: i for i, v in enumerate(self.vertices)}

    # construction

    @classmethod
    def from_edges(cls, edges: Iterable, vertices: Iterable[Vertex] = ()) -> "Graph":
        g = nx.Graph()
        g.add_nodes_from(vertices)
        for edge in edges:
            u, v = edge[0], edge[1]
            b = _weight(edge[2]) if len(edge) > 2 else UNIT
            g.add_edge(u, v, b=b)
        return cls(g)

    @classmethod
    def lattice(cls, points: Iterable[Tuple[int, ...]]) -> "Graph":
        """Subset of Z^N with edges between points at l1-distance one"""
        pts = set(tuple(p) for p in points)
        g = nx.Graph()
        g.add_nodes_from(pts)
        for p in pts:
            for axis in range(len(p)):
                q = p[:axis] + (p[axis] + 1,) + p[axis + 1:]
                if q in pts:
                    g.add_edge(p, q, b=UNIT)
        return cls(g)

    # inspection

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return self.n

    def __contains__(self, v: Vertex) -> bool:
        return v in self.index

    @property
    def edges(self) -> List[Edge]:
        return sorted((tuple(sorted((u, v), key=_sort_key)) for u, v in self.nx.edges), key=_edge_key)

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return self.nx.has_edge(u, v)

    def weight(self, u: Vertex, v: Vertex) -> Interval:
        if not self.nx.has_edge(u, v):
            raise DisconnectedPath("not an edge", edge=(u, v))
        return self.nx.edges[u, v]["b"]

    def degree(self, v: Vertex) -> Interval:
        total = Interval(0.0)
        for w in self.nx.neighbors(v):
            total = total + self.nx.edges[v, w]["b"]
        return total

    def is_unit_weighted(self) -> bool:
        return all(data["b"] == UNIT for _, _, data in self.nx.edges(data=True))

    def component_count(self) -> int:
        uf = UnionFind(self.vertices)
        for u, v in self.nx.edges:
            uf.union(u, v)
        return len({uf[v] for v in self.vertices})

    def diameter_bounds(self) -> Tuple[float, float]:
        """Lower and upper bounds of the diameter with edge length 1/b"""
        if self.n <= 1:
            return 0.0, 0.0
        if self.component_count() > 1:
            return float("inf"), float("inf")
        if self.is_unit_weighted():
            d = float(nx.diameter(self.nx))
            return d, d
        lo_g, hi_g = nx.Graph(), nx.Graph()
        for u, v, data in self.nx.edges(data=True):
            b = data["b"]
            lo_g.add_edge(u, v, length=rd.div_down(1.0, b.hi))
            hi_g.add_edge(u, v, length=rd.div_up(1.0, b.lo))
        # path sums: n terms, bounded by the a-priori summation error
        slack = (self.n + 1) * 2.0 ** -52
        lo = max(max(d.values()) for _, d in nx.all_pairs_dijkstra_path_length(lo_g, weight="length"))
        hi = max(max(d.values()) for _, d in nx.all_pairs_dijkstra_path_length(hi_g, weight="length"))
        return rd.mul_down(lo, 1.0 - slack), rd.mul_up(hi, 1.0 + slack)

    # derived graphs

    def without_edges(self, edges: Iterable[Edge]) -> "Graph":
        g = self.nx.copy()
        for u, v in edges:
            if not g.has_edge(u, v):
                raise DomainError("edge not in graph", edge=(u, v))
            g.remove_edge(u, v)
        return Graph(g, self.vertices)

    def without_vertices(self, vertices: Iterable[Vertex]) -> "Graph":
        drop = set(vertices)
        g = self.nx.copy()
        g.remove_nodes_from(drop)
        return Graph(g, [v for v in self.vertices if v not in drop])

    def induced(self, vertices: Iterable[Vertex]) -> "Graph":
        keep = [v for v in self.vertices if v in set(vertices)]
        return Graph(self.nx.subgraph(keep).copy(), keep)

    def union(self, other: "Graph") -> "Graph":
        if set(self.vertices) & set(other.vertices):
            raise DomainError("graphs share vertices")
        return Graph(nx.union(self.nx, other.nx), self.vertices + other.vertices)

    def bridges_to(self, other: "Graph", within: "Graph") -> List[Edge]:
        """Edges of `within` joining this graph to `other`"""
        out = []
        for u, v in within.edges:
            if (u in self and v in other) or (v in self and u in other):
                out.append((u, v) if u in self else (v, u))
        return out


def _weight(value) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.exact(Fraction(value))


def _sort_key(v):
    return (0, v) if isinstance(v, int) else (1, tuple(v)) if isinstance(v, tuple) else (2, str(v))


def _edge_key(e):
    return (_sort_key(e[0]), _sort_key(e[1]))


def laplacian(g: Graph, edges: Optional[Iterable[Edge]] = None) -> IntervalMatrix:
    """
    Matrix of Q(f) = 1/2 sum over directed edges of b(x,y) |f(x) - f(y)|^2,
    restricted to `edges` when given (all vertices keep their rows).
    """
    n = g.n
    lo = np.zeros((n, n))
    hi = np.zeros((n, n))
    chosen = g.edges if edges is None else list(edges)
    for u, v in chosen:
        b = g.weight(u, v)
        i, j = g.index[u], g.index[v]
        lo[i, j] = lo[j, i] = -b.hi
        hi[i, j] = hi[j, i] = -b.lo
        lo[i, i] = rd.add_down(lo[i, i], b.lo)
        hi[i, i] = rd.add_up(hi[i, i], b.hi)
        lo[j, j] = rd.add_down(lo[j, j], b.lo)
        hi[j, j] = rd.add_up(hi[j, j], b.hi)
    return IntervalMatrix(lo, hi, symmetric=True)


# builders


def grid_graph(k: int, m: Optional[int] = None) -> Graph:
    """Points (i, j), 1 <= i <= k, 1 <= j <= m"""
    m = k if m is None else m
    return Graph.lattice((i, j) for i in range(1, k + 1) for j in range(1, m + 1))


def staircase_graph(f: Sequence[int]) -> Graph:
    """X = {(i, j): 1 <= i <= n, 1 <= j <= f(i)} with f given as f(1)..f(n)"""
    return Graph.lattice((i, j) for i, fi in enumerate(f, start=1) for j in range(1, fi + 1))


def triangle_graphs(h: int) -> Tuple[Graph, Graph, List[Edge]]:
    """
    The two lattice triangles Y = {1 <= x <= h-1, 1 <= y <= x} and
    Z = {h <= x <= 2h-1, 1 <= y <= 2h-x} with the bridges (h-1, r)-(h, r).
    """
    gy = Graph.lattice((x, y) for x in range(1, h) for y in range(1, x + 1))
    gz = Graph.lattice((x, y) for x in range(h, 2 * h) for y in range(1, 2 * h - x + 1))
    bridges = [((h - 1, r), (h, r)) for r in range(1, h)]
    return gy, gz, bridges


_VERTEX = r"\(\s*-?\d+\s*(?:,\s*-?\d+\s*)*\)|-?\d+|[A-Za-z_][\w.]*"
_EDGE_LINE = re.compile(rf"^\s*(?P<u>{_VERTEX})\s+(?P<v>{_VERTEX})(?:\s+(?P<w>\d+(?:\.\d+)?(?:/\d+)?))?\s*$")


def _parse_vertex(text: str) -> Vertex:
    text = text.strip()
    if text.startswith("("):
        return tuple(int(part) for part in text[1:-1].split(","))
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    return text


def parse_edge_list(text: str, first_line: int = 1) -> Graph:
    """`u v [weight]` per line; vertices are integers, names or (i,j) tuples; # starts a comment"""
    edges = []
    for offset, raw in enumerate(text.splitlines()):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        match = _EDGE_LINE.match(line)
        if match is None:
            raise ConfigError(f"cannot parse edge {raw.strip()!r}", line=first_line + offset, field="edges")
        u, v = _parse_vertex(match["u"]), _parse_vertex(match["v"])
        if u == v:
            raise ConfigError("self-loop in edge list", line=first_line + offset, field="edges")
        weight = Fraction(match["w"]) if match["w"] else Fraction(1)
        if weight <= 0:
            raise ConfigError("edge weight must be positive", line=first_line + offset, field="edges")
        edges.append((u, v, weight))
    if not edges:
        raise ConfigError("edge list is empty", field="edges")
    return Graph.from_edges(edges)


_PAIR = re.compile(rf"^\s*(?P<u>{_VERTEX})\s*-\s*(?P<v>{_VERTEX})\s*$")


def parse_edge_pairs(text: str, field: str = "remove") -> List[Edge]:
    """`u-v` pairs separated by ';', e.g. `(1,2)-(2,2); (2,1)-(2,2)`"""
    edges = []
    for part in text.split(";"):
        if not part.strip():
            continue
        match = _PAIR.match(part)
        if match is None:
            raise ConfigError(f"cannot parse edge {part.strip()!r}", field=field)
        edges.append((_parse_vertex(match["u"]), _parse_vertex(match["v"])))
    return edges


def parse_vertex_groups(text: str, field: str = "parts") -> List[List[Vertex]]:
    """Vertex lists separated by '|'"""
    groups = []
    for part in text.split("|"):
        vertices = [_parse_vertex(v) for v in re.findall(_VERTEX, part)]
        if not vertices:
            raise ConfigError("empty vertex group", field=field)
        groups.append(vertices)
    return groups

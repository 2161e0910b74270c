import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import ConfigError, DomainError, Halted
from src.graphenclose.chain import (congestion_order, direct_enclose, edge_chain_enclose, graph_enclose,
                                    interlace_down)
from src.graphenclose.graph import (Graph, grid_graph, laplacian, parse_edge_list, parse_edge_pairs,
                                    parse_vertex_groups, staircase_graph, triangle_graphs)
from src.ival.interval import Interval

GRID_EDGES = [((1, 2), (2, 2)), ((2, 1), (2, 2)), ((1, 2), (1, 3)), ((2, 1), (3, 1))]

# eigenvalues of the 7x7 grid chain, times 49
GRID_TABLE = [
    [0, 9.705, 9.705, 19.410, 36.898, 36.898],
    [0, 9.515, 9.705, 19.142, 33.499, 36.898],
    [0, 9.361, 9.574, 18.367, 30.187, 34.782],
    [0, 5.868, 9.540, 13.119, 23.836, 34.571],
    [0, 0, 9.095, 11.471, 23.049, 32.525],
]


def _cycle(n: int) -> Graph:
    return Graph.from_edges([(i, (i + 1) % n) for i in range(n)])


def test_laplacian_of_three_point_path():
    g = Graph.lattice([(1, 1), (1, 2), (2, 1)])
    values = graph_enclose(g)
    for iv, exact in zip(values, (0, 1, 3)):
        assert iv.contains(exact)


def test_laplacian_rows_sum_to_zero():
    a = laplacian(grid_graph(4))
    assert a.symmetric
    assert all(s.contains(0.0) for s in a.row_sums())
    assert a[0, 0] == Interval(2.0)


def test_single_vertex_laplacian_is_zero():
    g = Graph.lattice([(0, 0)])
    a = laplacian(g)
    assert a.shape == (1, 1)
    assert a[0, 0] == Interval(0.0)


def test_weighted_laplacian_uses_edge_weights():
    g = Graph.from_edges([(1, 2, 3)])
    values = graph_enclose(g)
    assert values[1].contains(6.0)


def test_grid_spectrum_scaled():
    values = graph_enclose(grid_graph(7), 6)
    for iv, expected in zip(values, GRID_TABLE[0]):
        assert abs(iv.mid * 49 - expected) <= 6e-4


def test_graph_rejects_bad_input():
    with pytest.raises(DomainError):
        Graph.from_edges([(1, 2, 0)])
    with pytest.raises(DomainError):
        grid_graph(2).without_edges([((1, 1), (2, 2))])


def test_diameter_and_components():
    g = grid_graph(7)
    assert g.diameter_bounds() == (12.0, 12.0)
    assert g.component_count() == 1
    assert g.without_edges(GRID_EDGES).component_count() == 2


def test_weighted_diameter_brackets_the_path_length():
    g = Graph.from_edges([(1, 2, 2), (2, 3, 4)])
    lo, hi = g.diameter_bounds()
    assert lo <= 0.75 <= hi


def test_interlace_down_shifts_lower_ends():
    upper = direct_enclose(laplacian(_cycle(6)))
    rough = interlace_down(upper)
    assert rough[0].lo == 0.0
    assert rough[3].lo == upper[2].lo
    assert rough[3].hi == upper[3].hi


def test_cycle_to_path_chain_matches_oracle():
    lists = edge_chain_enclose(_cycle(6), [(0, 5)], count=6)
    assert len(lists) == 2
    path = [2 - 2 * math.cos(math.pi * k / 6) for k in range(6)]
    for iv, exact in zip(lists[1], path):
        assert iv.contains(exact)
    for a, b in zip(lists[1], lists[0]):
        assert a.lo <= b.hi


def test_chain_without_removals_is_direct():
    g = grid_graph(3)
    lists = edge_chain_enclose(g, [], count=3)
    assert len(lists) == 1
    assert list(lists[0]) == list(graph_enclose(g))


def test_chain_halts_when_too_few_are_certified():
    with pytest.raises(Halted) as info:
        edge_chain_enclose(_cycle(6), [(0, 5)], count=6, tol=0.0)
    assert info.value.details["step"] == 1
    assert len(info.value.partial) == 2


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_single_edge_removal_interlaces(seed):
    base = nx.gnp_random_graph(8, 0.5, seed=seed)
    if base.number_of_edges() == 0:
        return
    g = Graph.from_edges(list(base.edges), vertices=range(8))
    edge = g.edges[seed % len(g.edges)]
    before = np.linalg.eigvalsh(laplacian(g).mid())
    after = np.linalg.eigvalsh(laplacian(g.without_edges([edge])).mid())
    full = graph_enclose(g.without_edges([edge]))
    for i, iv in enumerate(full):
        assert iv.lo <= after[i] + 1e-12 and after[i] - 1e-12 <= iv.hi
        assert after[i] <= before[i] + 1e-9
        if i + 1 < len(after):
            assert before[i] <= after[i + 1] + 1e-9


def test_congestion_order_is_a_permutation():
    g = grid_graph(5)
    edges = [((1, 1), (1, 2)), ((3, 3), (3, 4)), ((2, 3), (3, 3))]
    ordered = congestion_order(g, edges)
    assert sorted(ordered) == sorted(edges)
    assert ordered[-1] == ((1, 1), (1, 2))


def test_builders():
    assert staircase_graph([1, 2, 3]).n == 6
    gy, gz, bridges = triangle_graphs(8)
    assert gy.n == 28 and gz.n == 36
    assert len(bridges) == 7
    assert all(u in gy and v in gz for u, v in bridges)


def test_parse_edge_list_with_weights_and_comments():
    g = parse_edge_list("1 2\n# comment\n2 3 1/2\n(1,1) (1,2)\n")
    assert g.n == 5
    assert g.weight(2, 3).contains(0.5)


def test_parse_edge_list_reports_the_line():
    with pytest.raises(ConfigError) as info:
        parse_edge_list("1 2\n2 2\n", first_line=10)
    assert info.value.line == 11
    with pytest.raises(ConfigError):
        parse_edge_list("# only a comment\n")


def test_parse_pairs_and_groups():
    assert parse_edge_pairs("(1,2)-(2,2); (2,1)-(2,2)") == [((1, 2), (2, 2)), ((2, 1), (2, 2))]
    assert parse_vertex_groups("1 2 3 | 4 5") == [[1, 2, 3], [4, 5]]
    with pytest.raises(ConfigError):
        parse_edge_pairs("(1,2)+(2,2)")
    with pytest.raises(ConfigError):
        parse_vertex_groups("1 2 | ")


@pytest.mark.slow
def test_grid_chain_reproduces_table():
    lists = edge_chain_enclose(grid_graph(7), GRID_EDGES, count=6, tol=1e-5)
    assert len(lists) == 5
    for row, lst in zip(GRID_TABLE, lists):
        for iv, expected in zip(lst, row):
            assert abs(iv.mid * 49 - expected) <= 6e-4
    for upper, lower in zip(lists, lists[1:]):
        for i in range(6):
            assert lower[i].lo <= upper[i].hi
            if i + 1 < 6:
                assert upper[i].lo <= lower[i + 1].hi

from fractions import Fraction

import numpy as np
import pytest

from src.core.errors import ClassViolation, DomainError, Halted
from src.graphenclose.chain import graph_enclose
from src.graphenclose.graph import Graph, grid_graph, laplacian, triangle_graphs
from src.graphenclose.homotopy import (HomotopySchedule, JoinedPair, homotopy_enclose, homotopy_sweep,
                                       run_homotopy)
from src.graphenclose.partition import balanced_tree, ceiling_for, certify_class, partition_enclose
from src.slenclose.enclosure import merge

# sixth entry from a dense eigensolve (0.321294)
A0_ROW = [0, 0, 0.12061, 0.15224, 0.25330, 0.32129, 0.46791]
A02_ROW = [0, 0.04705, 0.13054, 0.23249, 0.27273, 0.42485, 0.49950]
A1_ROW = [0, 0.07244, 0.13259, 0.27719, 0.33076, 0.51058, 0.60389]
SWEEP = [0, 0.03153, 0.04705, 0.05559, 0.06085, 0.06439, 0.06693, 0.06882, 0.07030, 0.07148, 0.07244]


def _two_paths():
    gy = Graph.from_edges([(1, 2), (2, 3)])
    gz = Graph.from_edges([(4, 5), (5, 6)])
    return gy, gz, [(3, 4)]


def test_schedule_validation_and_bisection():
    s = HomotopySchedule.of([0, 0.2, 1])
    assert s.s_values == (Fraction(0), Fraction(1, 5), Fraction(1))
    assert s.bisected(0).s_values == (Fraction(0), Fraction(1, 10), Fraction(1, 5), Fraction(1))
    with pytest.raises(DomainError):
        HomotopySchedule.of([0, 0.5])
    with pytest.raises(DomainError):
        HomotopySchedule.of([0, 0.5, 0.5, 1])


def test_joined_pair_matrices():
    gy, gz, bridges = _two_paths()
    pair = JoinedPair(gy, gz, bridges)
    assert pair.matrix(Fraction(0)).contains(laplacian(gy.union(gz)).mid())
    joined = Graph.from_edges([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)])
    assert pair.matrix(Fraction(1)).contains(laplacian(joined).mid())
    with pytest.raises(DomainError):
        JoinedPair(gy, gz, [(1, 2)])


def test_joined_paths_match_path_spectrum():
    gy, gz, bridges = _two_paths()
    result = homotopy_enclose(gy, gz, bridges, count=6)
    exact = [2 - 2 * np.cos(np.pi * k / 6) for k in range(6)]
    for iv, value in zip(result, exact):
        assert iv.contains(value)


def test_eigenvalues_increase_along_the_schedule():
    gy, gz, bridges = _two_paths()
    run = run_homotopy(gy, gz, bridges, HomotopySchedule.of([0, 0.25, 0.5, 1]), count=4)
    for before, after in zip(run.stages, run.stages[1:]):
        for a, b in zip(before.enclosures, after.enclosures):
            assert a.lo <= b.hi


def test_zero_bridges_keep_the_merged_lists():
    gy, gz, _ = _two_paths()
    run = run_homotopy(gy, gz, [], count=6)
    start = merge(graph_enclose(gy), graph_enclose(gz))
    for stage in run.stages:
        for iv, ref in zip(stage.enclosures, start):
            assert iv.intersect(ref) is not None


def test_coarse_schedule_is_bisected():
    gy, gz, bridges = triangle_graphs(4)
    run = run_homotopy(gy, gz, bridges, HomotopySchedule.of([0, 1]), count=4)
    assert run.schedule.s_values[0] == 0 and run.schedule.s_values[-1] == 1
    assert run.result.ceiling > 0
    if run.bisections:
        assert run.schedule.steps == 1 + run.bisections


def test_step_limit_halts_with_the_partial_run():
    gy, gz, bridges = triangle_graphs(4)
    with pytest.raises(Halted) as info:
        run_homotopy(gy, gz, bridges, HomotopySchedule.of([0, 1]), count=4, tol=0.0, max_steps=2)
    assert info.value.partial.stages[0].s == 0


def test_separated_triangles_match_a_dense_eigensolve():
    gy, gz, _ = triangle_graphs(8)
    values = np.sort(np.concatenate([np.linalg.eigvalsh(laplacian(g).mid()) for g in (gy, gz)]))
    assert np.allclose(values[:6], A0_ROW[:6], atol=6e-6)
    assert abs(values[5] - 0.321294) <= 1e-6


@pytest.mark.slow
def test_triangles_reproduce_the_table():
    gy, gz, bridges = triangle_graphs(8)
    run = run_homotopy(gy, gz, bridges, HomotopySchedule.of([0, 0.2, 1]), count=7)
    for s, row in ((0, A0_ROW), (0.2, A02_ROW), (1, A1_ROW)):
        for iv, expected in zip(run.at(s), row):
            assert abs(iv.mid - expected) <= 6e-6


@pytest.mark.slow
def test_second_eigenvalue_sweep():
    gy, gz, bridges = triangle_graphs(8)
    values = homotopy_sweep(gy, gz, bridges, [Fraction(k, 10) for k in range(11)], index=1)
    assert [s for s, _ in values] == [Fraction(k, 10) for k in range(11)]
    for (_, iv), expected in zip(values, SWEEP):
        assert abs(iv.mid - expected) <= 6e-6
    for (_, a), (_, b) in zip(values, values[1:]):
        assert a.lo <= b.hi


# partition homotopy


def test_ceiling_uses_the_diameter():
    g = grid_graph(4)
    # a b^2 / d^2 with d = 6
    assert ceiling_for(g, 1.0, 1.0) == pytest.approx(1 / 36)


def test_class_certificate_of_a_grid_part():
    cert = certify_class(grid_graph(3), 1.0)
    assert cert.mu1_lower >= cert.required
    assert cert.method in ("poincare", "direct")
    with pytest.raises(ClassViolation):
        certify_class(Graph.from_edges([(1, 2), (3, 4)]), 1.0)


def test_balanced_tree():
    assert balanced_tree([[1], [2], [3], [4]]) == (([1], [2]), ([3], [4]))
    assert balanced_tree([[1]]) == [1]


def test_partition_agrees_with_direct_enclosure():
    g = grid_graph(12)
    quarters = [[(i, j) for i in rows for j in cols]
                for rows in (range(1, 7), range(7, 13)) for cols in (range(1, 7), range(7, 13))]
    a, b = 0.5, 0.45
    result = partition_enclose(g, balanced_tree(quarters), a, b)
    direct = graph_enclose(g).below(ceiling_for(g, a, b))
    assert len(result) == len(direct)
    assert result.ceiling >= 0.5 * ceiling_for(g, a, b)
    for x, y in zip(result, direct):
        assert x.intersect(y) is not None


def test_parts_must_cover_the_graph():
    g = grid_graph(4)
    with pytest.raises(ClassViolation):
        partition_enclose(g, ([(1, 1)], [(1, 2)]), 0.5, 0.5)


@pytest.mark.slow
def test_triangles_below_the_partition_ceiling():
    gy, gz, _ = triangle_graphs(8)
    g = Graph.lattice(list(gy.vertices) + list(gz.vertices))
    result = partition_enclose(g, (list(gy.vertices), list(gz.vertices)), 0.25, 0.5)
    direct = graph_enclose(g).below(result.ceiling)
    assert len(result) >= 1
    assert result[0].contains(0.0)
    for x, y in zip(result, direct):
        assert x.intersect(y) is not None

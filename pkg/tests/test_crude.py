from fractions import Fraction

import pytest

from src.core.errors import DepthExceeded, NonPositiveA, NotDisjoint
from src.slenclose import partition
from src.slenclose.coefficients import CoefficientFn, parse_coefficient
from src.slenclose.crude import crude_enclosure, crude_passes, mode_count
from src.slenclose.enclosure import Schedule
from src.slenclose.partition import (adaptive_bisection_point, choose_partition, crude_ceiling, partition_with,
                                     uniform_partition)
from src.slenclose.problem import BC, SLProblem

ULP_SLACK = 1e-12


def _close(iv, lo, hi):
    return abs(iv.lo - lo) <= ULP_SLACK * max(1.0, abs(lo)) and abs(iv.hi - hi) <= ULP_SLACK * max(1.0, abs(hi))


def test_leaf_bounds_of_cos_problem(cos_problem):
    leaf = cos_problem.restrict(Fraction(0), Fraction(1, 4))
    schedule = Schedule.build(70.0, 2)
    crude = crude_enclosure(leaf, schedule.crude_ceiling)
    assert len(crude) == 3
    for iv, (lo, hi) in zip(crude, [(4, 8), (20, 24), (68, 72)]):
        assert _close(iv, lo, hi)
        assert iv.lo <= lo and iv.hi >= hi
    assert crude.ceiling > schedule.crude_ceiling


def test_leaf_bound_of_airy_problem(airy_problem):
    leaf = airy_problem.restrict(Fraction(0), Fraction(1, 8))
    assert leaf.bc.left is BC.DIRICHLET and leaf.bc.right is BC.NEUMANN
    first = crude_enclosure(leaf, 300.0)[0]
    assert 157.9 < first.lo < 157.92
    assert 282.9 < first.hi < 282.92
    assert round(first.lo) == 158 and round(first.hi) == 283


def test_whole_interval_of_cos_problem_overlaps(cos_problem):
    with pytest.raises(NotDisjoint):
        crude_enclosure(cos_problem, 78.75)
    assert not crude_passes(cos_problem, 78.75)


def test_mode_count_for_free_problem(free_problem):
    # i^2 < 10 for i = 0..3
    assert mode_count(free_problem, 10.0) == 4


def test_non_positive_a_rejected():
    lo, hi = Fraction(0), Fraction(1)
    p = SLProblem(lo, hi, parse_coefficient("x", lo, hi), CoefficientFn.constant(0, lo, hi))
    with pytest.raises(NonPositiveA):
        crude_enclosure(p, 10.0)


def test_uniform_partition_depths(cos_problem, airy_problem):
    assert uniform_partition(cos_problem, 78.75, E=70.0).level == 2
    airy = uniform_partition(airy_problem, 1125.0, E=1000.0)
    assert airy.level == 3
    assert airy.operator_count == 15


def test_partition_depth_cap(cos_problem):
    with pytest.raises(DepthExceeded):
        uniform_partition(cos_problem, 78.75, max_level=1, E=70.0)


def test_partition_tree_shape(cos_problem):
    tree = partition_with(cos_problem, 2)
    assert tree.points == tuple(Fraction(k, 4) for k in range(5))
    assert tree.operator_count == 7
    assert [len(tree.cells_at(d)) for d in range(3)] == [1, 2, 4]


def test_schedule_ceilings():
    schedule = Schedule.build(70.0, 2)
    assert schedule.levels == (70.0, 74.375, 78.75, 83.125)
    assert crude_ceiling(70.0, 78.75, 2) == schedule.crude_ceiling
    assert crude_ceiling(70.0, 78.75, 0) == 78.75


def test_adaptive_split_keeps_distance_from_critical_points():
    lo, hi = Fraction(0), Fraction(1)
    critical = [Fraction(1, 2), Fraction(3, 5)]
    g = adaptive_bisection_point(lo, hi, critical)
    assert Fraction(1, 4) <= g <= Fraction(3, 4)
    assert all(abs(g - c) >= Fraction(1, 8) for c in critical)


def test_adaptive_split_without_critical_points_is_midpoint():
    assert adaptive_bisection_point(Fraction(0), Fraction(1), []) == Fraction(1, 2)


def test_adaptive_split_prefers_the_admissible_point_nearest_the_midpoint():
    lo, hi = Fraction(0), Fraction(1)
    # a critical point at the midpoint pushes the split to distance 1/4, ties go left
    assert adaptive_bisection_point(lo, hi, [Fraction(1, 2)]) == Fraction(1, 4)
    assert adaptive_bisection_point(lo, hi, [Fraction(1, 2), Fraction(3, 5)]) == Fraction(3, 8)
    assert adaptive_bisection_point(lo, hi, [Fraction(1, 2), Fraction(3, 5)], leftmost=True) == Fraction(1, 4)


def test_adaptive_partition_recomputes_critical_points_per_cell(cos_problem, monkeypatch):
    seen = []

    def no_critical_points(p, ceiling, degree=32):
        seen.append((p.lo, p.hi, ceiling))
        return []

    monkeypatch.setattr(partition, "_critical_points", no_critical_points)
    tree = choose_partition(cos_problem, 70.0, 78.75, strategy="adaptive")
    assert tree.level == 2
    assert tree.points == tuple(Fraction(k, 4) for k in range(5))
    schedule = Schedule.build(70.0, 2, 78.75)
    assert (Fraction(0), Fraction(1), schedule.at(0)) in seen
    assert (Fraction(0), Fraction(1, 2), schedule.at(1)) in seen
    assert (Fraction(1, 2), Fraction(1), schedule.at(1)) in seen


@pytest.mark.slow
def test_adaptive_tree_is_no_deeper_than_uniform(cos_problem):
    uniform = choose_partition(cos_problem, 70.0, 78.75)
    adaptive = choose_partition(cos_problem, 70.0, 78.75, strategy="adaptive")
    assert adaptive.level <= uniform.level
    leaves = adaptive.root.leaves()
    # each split stays in the middle half of its parent
    assert max(c.hi - c.lo for c in leaves) <= Fraction(9, 16)
    assert min(c.hi - c.lo for c in leaves) >= Fraction(1, 16)


def test_coefficient_partition_passes_crude_test(airy_problem):
    partition = choose_partition(airy_problem, 1000.0, 1125.0, strategy="coefficient")
    ceiling = 2 * 1125.0 - 1000.0
    for cell in partition.root.leaves():
        assert crude_passes(airy_problem.restrict(cell.lo, cell.hi), ceiling) or cell.depth == 0

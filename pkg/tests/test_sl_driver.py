import math
from fractions import Fraction

import pytest

from src.core.errors import DepthExceeded, DomainError, Halted
from src.ival.interval import Interval
from src.observability.tracer import get_tracer
from src.slenclose import driver
from src.slenclose.driver import DriverConfig, effort_report, hierarchical_enclose, run_hierarchical
from src.slenclose.enclosure import EnclosureList, Schedule, interlaces, merge, merge_interlace
from src.slenclose.partition import Cell


def _points(values, ceiling=math.inf) -> EnclosureList:
    return EnclosureList.build([Interval(v) for v in values], ceiling)


# enclosure lists


def test_build_normalizes_with_sortedness():
    lst = EnclosureList.build([Interval(1.0, 5.0), Interval(0.0, 3.0)], 10.0)
    assert lst[0] == Interval(1.0, 3.0)
    assert lst[1] == Interval(1.0, 3.0)


def test_inconsistent_bounds_raise():
    with pytest.raises(DomainError):
        EnclosureList.build([Interval(4.0, 5.0), Interval(0.0, 1.0)], 10.0)
    with pytest.raises(DomainError):
        _points([1.0]).refine([2.0], [None])


def test_below_and_certified_below():
    lst = EnclosureList.build([Interval(1.0, 2.0), Interval(4.0, 6.0), Interval(8.0, 9.0)], 12.0)
    below = lst.below(5.0)
    assert len(below) == 2 and below.ceiling == 8.0
    certain = lst.certified_below(5.0)
    assert len(certain) == 1 and certain.ceiling == 4.0


def test_narrow_prefix_and_truncation():
    lst = EnclosureList.build([Interval(0.0, 1e-9), Interval(1.0, 1.5), Interval(2.0, 2.0)], 3.0)
    narrow = lst.narrow_prefix(1e-6)
    assert len(narrow) == 1 and narrow.ceiling == 1.0
    assert len(lst.truncated(2)) == 2 and lst.truncated(2).ceiling == 2.0
    assert lst.truncated(5) is lst


def test_overlapping_pair():
    assert _points([1.0, 2.0]).overlapping_pair() is None
    lst = EnclosureList.build([Interval(1.0, 2.0), Interval(1.5, 3.0)], 4.0)
    assert lst.overlapping_pair() == (0, 1)
    assert not lst.disjoint


def test_merge_of_direct_sum_respects_the_smaller_ceiling():
    merged = merge(_points([1.0, 5.0], 7.0), _points([2.0, 8.0], 9.0))
    assert [e.lo for e in merged] == [1.0, 2.0, 5.0]
    assert merged.ceiling == 7.0


def test_merge_interlace_of_level_two_lists():
    left = _points([6.454, 22.450, 70.515], 83.125)
    right = _points([1.364, 17.693, 65.503], 83.125)
    rough = merge_interlace(left, right)
    assert [a.lo for a in rough.anchors] == [1.364, 6.454, 17.693, 22.450, 65.503, 70.515]
    assert rough[0] == Interval(1.364, 6.454)
    assert rough[5].hi == math.inf
    parent = [2.486, 9.173, 20.141, 40.057, 68.032]
    assert rough.contains_all(parent)
    assert interlaces(EnclosureList(rough.anchors, rough.ceiling), _points(parent))


def test_interlacing_check_rejects_a_jump():
    outer = _points([0.0, 1.0, 2.0])
    assert interlaces(outer, _points([0.5, 1.5]))
    assert not interlaces(outer, _points([1.5, 1.6]))


def test_schedule_requires_increasing_ceilings():
    with pytest.raises(DomainError):
        Schedule.build(10.0, 2, E_prime=9.0)
    assert Schedule.build(8.0, 0).levels == (8.0, 9.0)


# hierarchical driver


def test_free_problem_is_enclosed_in_one_operator(free_problem):
    run = run_hierarchical(free_problem, 10.0)
    result = run.result
    assert len(result) == 4
    for iv, exact in zip(result, (0, 1, 4, 9)):
        assert iv.contains(exact)
        assert iv.width <= 1e-6
    effort = effort_report(run)
    assert effort.operators == 1 and effort.levels == 1
    assert get_tracer().spans("hierarchical_enclose")


def test_driver_caps_depth(cos_problem):
    config = DriverConfig(max_level=1)
    with pytest.raises(DepthExceeded):
        hierarchical_enclose(cos_problem, 70.0, config)


def test_nodes_are_recorded_per_level(free_problem):
    run = run_hierarchical(free_problem, 10.0, DriverConfig(concurrency=1))
    node = run.level(0)[0]
    assert isinstance(node.cell, Cell)
    assert node.key == (Fraction(0), Fraction(1))
    assert node.degree in (16, 24, 32)
    assert run.halted_at is None


@pytest.mark.slow
def test_cos_problem_reproduces_nine_eigenvalues(cos_problem):
    run = run_hierarchical(cos_problem, 70.0)
    result = run.result
    assert len(result) == 9
    assert 2.4860431147 <= result[0].lo <= result[0].hi <= 2.4860431150
    assert result[0].width <= 1e-6
    assert 68.031756 <= result[8].mid <= 68.031758
    effort = effort_report(run)
    assert (effort.operators, effort.levels, effort.total_eigenvalues) == (7, 3, 31)
    assert effort.eigenvalues_per_level == [9, 10, 12]
    for depth in (1, 2):
        for node in run.level(depth):
            assert node.enclosures.disjoint


@pytest.mark.slow
def test_airy_problem_matches_reference_values(airy_problem):
    run = run_hierarchical(airy_problem, 1000.0)
    expected = [233.811, 408.795, 552.056, 678.679, 794.738, 906.461]
    assert len(run.result) == 6
    for iv, value in zip(run.result, expected):
        assert abs(iv.mid - value) <= 5e-3
    assert run.result[0].width <= 1e-2
    effort = effort_report(run)
    assert effort.operators == 15 and effort.levels == 4
    assert effort.total_eigenvalues <= 42


@pytest.mark.slow
def test_adaptive_strategy_agrees_with_uniform(cos_problem):
    uniform = hierarchical_enclose(cos_problem, 70.0)
    adaptive = hierarchical_enclose(cos_problem, 70.0, DriverConfig(strategy="adaptive"))
    assert len(adaptive) == len(uniform)
    for a, b in zip(adaptive, uniform):
        assert a.intersect(b) is not None


def test_halt_carries_the_partial_run(free_problem, monkeypatch):
    def never_refined(self, cell, rough, threshold):
        return EnclosureList.build([Interval(0.0, 2.0), Interval(1.0, 3.0)], 4.0), 0

    monkeypatch.setattr(driver.HierarchicalEncloser, "_refine_node", never_refined)
    with pytest.raises(Halted) as info:
        run_hierarchical(free_problem, 10.0)
    assert info.value.partial is not None
    assert info.value.details["pair"] == (0, 1)

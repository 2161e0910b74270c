from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import DisconnectedPath, IncompleteFamily, NotMonotone
from src.graphenclose.graph import Graph, grid_graph, staircase_graph
from src.graphenclose.poincare import (PathFamily, degenerate_profile, family_stats, oracle_mu1,
                                       poincare_bound, poincare_certificate, shortest_path_family,
                                       staircase_experiment, staircase_paths)

profiles = st.lists(st.integers(min_value=1, max_value=6), min_size=2, max_size=6).map(sorted)


@pytest.mark.parametrize("n", [4, 8, 16])
def test_degenerate_staircase_declared_bound(n):
    profile = degenerate_profile(n)
    g = staircase_graph(profile)
    cert = poincare_certificate(g, staircase_paths(n, profile))
    exact = 1 / (n * (2 * n - 2))
    assert cert.declared is not None
    assert cert.declared.contains(exact)
    assert cert.declared.width <= 1e-15
    assert cert.best.lo <= oracle_mu1(g)


def test_degenerate_family_statistics():
    n = 5
    g = staircase_graph(degenerate_profile(n))
    stats = family_stats(g, staircase_paths(n, degenerate_profile(n)))
    assert stats.size == 2 * n - 1
    assert stats.max_length.contains(2 * n - 2)
    assert stats.max_count <= n * (2 * n - 1)


@settings(max_examples=30, deadline=None)
@given(profiles)
def test_staircase_bounds_never_exceed_mu1(profile):
    g = staircase_graph(profile)
    cert = poincare_certificate(g, staircase_paths(len(profile), profile))
    mu1 = oracle_mu1(g)
    for value in cert.variants.values():
        assert value.lo <= mu1 * (1 + 1e-12)


def test_grid_shortest_paths_give_a_sound_bound():
    g = grid_graph(7)
    bound = poincare_bound(g, shortest_path_family(g))
    assert 0 < bound.lo <= oracle_mu1(g)


def test_weighted_paths_use_inverse_weights():
    g = Graph.from_edges([(1, 2, 2), (2, 3, Fraction(1, 2))])
    pf = shortest_path_family(g)
    stats = family_stats(g, pf)
    # 1/2 + 2
    assert stats.max_length.contains(2.5)
    assert poincare_bound(g, pf).lo <= oracle_mu1(g)


def test_family_must_cover_every_pair():
    g = Graph.from_edges([(1, 2), (2, 3)])
    paths = dict(shortest_path_family(g).paths)
    del paths[(3, 1)]
    with pytest.raises(IncompleteFamily):
        poincare_bound(g, PathFamily(paths))
    with pytest.raises(IncompleteFamily):
        poincare_certificate(Graph.lattice([(0, 0)]), PathFamily({}))


def test_paths_must_follow_edges():
    g = Graph.from_edges([(1, 2), (2, 3)])
    paths = dict(shortest_path_family(g).paths)
    paths[(1, 3)] = (1, 3)
    with pytest.raises(DisconnectedPath):
        family_stats(g, PathFamily(paths))
    paths[(1, 3)] = (1, 2)
    with pytest.raises(DisconnectedPath):
        family_stats(g, PathFamily(paths))


def test_profiles_must_be_monotone():
    with pytest.raises(NotMonotone):
        staircase_paths(3, [2, 1, 1])
    with pytest.raises(NotMonotone):
        staircase_paths(3, [1, 2])
    with pytest.raises(NotMonotone):
        staircase_paths(2, [0, 1])


def test_callable_profile_matches_the_list():
    a = staircase_paths(4, lambda i: i)
    b = staircase_paths(4, [1, 2, 3, 4])
    assert a == b


def test_declared_constants_are_checked_against_the_paths():
    n = 4
    pf = staircase_paths(n, degenerate_profile(n))
    loose = PathFamily(pf.paths, alpha=Fraction(1, 10), beta=pf.beta, diameter=pf.diameter)
    g = staircase_graph(degenerate_profile(n))
    assert poincare_certificate(g, loose).declared is None


def test_staircase_experiment_rows():
    rows = staircase_experiment(8, 6, seed=3)
    assert len(rows) == 6
    for row in rows:
        assert row.profile == sorted(row.profile)
        assert max(row.profile) <= row.n
        assert 0 < row.ratio <= 1 + 1e-12
        assert row.implied_c == pytest.approx(row.bound * row.n ** 2)
    assert staircase_experiment(8, 6, seed=3)[0].profile == rows[0].profile

import math

import mpmath
import numpy as np
import pytest

from src.core.errors import GapViolated
from src.ival.array import IntervalMatrix
from src.ival.eig import verified_sym_eig
from src.ival.interval import Interval
from src.slenclose.enclosure import EnclosureList
from src.slenclose.gram import GramTriple
from src.slenclose.rrtl import lehmann_lower, refine, rr_upper, temple_lower

mpmath.mp.dps = 40

SEEDS = [3, 11, 17, 29, 41]


def _symmetric(seed: int, n: int = 6) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1.0, 1.0, size=(n, n))
    return np.triu(a) + np.triu(a, 1).T


def _oracle(a: np.ndarray):
    values, _ = mpmath.eigsy(mpmath.matrix(a.tolist()))
    return sorted(float(values[i]) for i in range(a.shape[0]))


def _triple(a: np.ndarray) -> GramTriple:
    return GramTriple.for_matrix(IntervalMatrix.point(a, symmetric=True))


@pytest.mark.parametrize("seed", SEEDS)
def test_temple_never_exceeds_rayleigh_ritz(seed):
    a = _symmetric(seed)
    exact = _oracle(a)
    _, vectors = np.linalg.eigh(a)
    p = _triple(a).project(vectors[:, :2])
    rho = verified_sym_eig(IntervalMatrix.point(a, symmetric=True)).values[1].lo
    low = temple_lower(p, 0, rho)
    up = rr_upper(p, 1)[0]
    assert low.lo <= exact[0] <= up.hi
    assert low.lo <= up.hi


@pytest.mark.parametrize("seed", SEEDS)
def test_lehmann_bounds_are_ascending_lower_bounds(seed):
    a = _symmetric(seed)
    exact = _oracle(a)
    _, vectors = np.linalg.eigh(a)
    p = _triple(a).project(vectors[:, :2])
    rho = verified_sym_eig(IntervalMatrix.point(a, symmetric=True)).values[2].lo
    bounds = lehmann_lower(p, rho, 2)
    assert bounds[0].lo <= bounds[1].lo
    assert bounds[0].lo <= exact[0]
    assert bounds[1].lo <= exact[1]
    assert exact[1] - bounds[1].lo < 1e-8


def test_temple_needs_rho_above_the_quotient():
    g = _triple(np.diag([1.0, 2.0, 3.0]))
    with pytest.raises(GapViolated):
        temple_lower(g, 1, 1.5)
    with pytest.raises(GapViolated):
        temple_lower(g, 0, math.inf)


def test_temple_with_an_exact_eigenvector_is_exact():
    g = _triple(np.diag([1.0, 2.0, 3.0]))
    assert temple_lower(g, 0, 2.0).contains(1.0)
    assert temple_lower(g, 0, Interval(2.0, 2.5)).contains(1.0)


def test_requests_beyond_the_test_space_raise():
    g = _triple(np.diag([1.0, 2.0]))
    with pytest.raises(GapViolated):
        rr_upper(g, 3)
    with pytest.raises(GapViolated):
        lehmann_lower(g, 5.0, 3)


@pytest.mark.parametrize("seed", SEEDS)
def test_refine_tightens_a_rough_list(seed):
    a = _symmetric(seed)
    exact = _oracle(a)
    rough = EnclosureList.build(
        [Interval(v - 0.5, v + 0.5) for v in exact[:4]],
        ceiling=exact[4] - 1e-9,
    )
    refined = refine(_triple(a), rough, tol=1e-8)
    assert len(refined) == 4
    assert refined.ceiling == rough.ceiling
    for iv, value in zip(refined, exact):
        assert iv.contains(value)
    assert refined[3].width <= 1e-8


def test_refine_of_empty_list_is_identity():
    empty = EnclosureList.empty(3.0)
    assert refine(_triple(np.eye(2)), empty) is empty


def test_refine_over_the_whole_space_needs_no_ceiling():
    a = _symmetric(5, n=4)
    exact = _oracle(a)
    rough = EnclosureList.build([Interval(v - 0.5, math.inf) for v in exact], math.inf)
    refined = refine(_triple(a), rough, tol=1e-8)
    assert all(iv.width <= 1e-8 for iv in refined)
    assert refined[3].contains(exact[3])

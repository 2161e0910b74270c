import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import NotPositiveDefinite
from src.ival.array import IntervalMatrix
from src.ival.eig import verified_gen_eig, verified_sym_eig, verify_positive_definite

mpmath.mp.dps = 40


def _random_symmetric(seed: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1.0, 1.0, size=(n, n))
    return np.triu(a) + np.triu(a, 1).T


def _oracle_sym(a: np.ndarray):
    values, _ = mpmath.eigsy(mpmath.matrix(a.tolist()))
    return sorted(values[i] for i in range(a.shape[0]))


def _oracle_pencil(a: np.ndarray, b: np.ndarray):
    low = mpmath.cholesky(mpmath.matrix(b.tolist()))
    inv = low ** -1
    c = inv * mpmath.matrix(a.tolist()) * inv.T
    c = (c + c.T) / 2
    values, _ = mpmath.eigsy(c)
    return sorted(values[i] for i in range(a.shape[0]))


def _inside(iv, value) -> bool:
    return mpmath.mpf(iv.lo) <= value <= mpmath.mpf(iv.hi)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.integers(min_value=1, max_value=8))
def test_sym_enclosures_contain_oracle(seed, n):
    a = _random_symmetric(seed, n)
    result = verified_sym_eig(IntervalMatrix.point(a, symmetric=True))
    assert len(result) == n
    for iv, exact in zip(result.values, _oracle_sym(a)):
        assert _inside(iv, exact)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_perturbed_members_stay_inside(seed):
    rng = np.random.default_rng(seed)
    a = _random_symmetric(seed, 5)
    eps = 1e-3
    wide = verified_sym_eig(IntervalMatrix(a - eps, a + eps, symmetric=True))
    delta = rng.uniform(-eps, eps, size=(5, 5))
    member = a + 0.5 * (delta + delta.T)
    for iv, exact in zip(wide.values, _oracle_sym(member)):
        assert _inside(iv, exact)


def test_diagonal_matrix_is_tight_and_isolated():
    result = verified_sym_eig(IntervalMatrix.point(np.diag([3.0, 1.0, 2.0])))
    for iv, expected in zip(result.values, (1.0, 2.0, 3.0)):
        assert iv.contains(expected)
        assert iv.width < 1e-12
    assert result.all_verified


def test_repeated_eigenvalue_is_not_flagged_isolated():
    result = verified_sym_eig(IntervalMatrix.point(np.eye(3)))
    assert all(iv.contains(1.0) for iv in result.values)
    assert not any(result.verified)


def test_empty_matrix():
    assert len(verified_sym_eig(IntervalMatrix.zeros(0))) == 0


@pytest.mark.parametrize("seed", [1, 2, 3, 4])
def test_pencil_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    a = _random_symmetric(seed, 4)
    m = rng.uniform(-1.0, 1.0, size=(4, 4))
    b = m @ m.T + 4.0 * np.eye(4)
    result = verified_gen_eig(IntervalMatrix.point(a, symmetric=True), IntervalMatrix.point(b, symmetric=True))
    for iv, exact in zip(result.values, _oracle_pencil(a, b)):
        assert _inside(iv, exact)
        assert iv.width < 1e-8


def test_pencil_rejects_indefinite_b():
    a = IntervalMatrix.point(np.eye(2))
    b = IntervalMatrix.point(np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefinite):
        verified_gen_eig(a, b)


def test_positive_definite_check():
    smallest = verify_positive_definite(IntervalMatrix.point(np.array([[2.0, 1.0], [1.0, 2.0]])))
    assert smallest.contains(1.0)
    with pytest.raises(NotPositiveDefinite):
        verify_positive_definite(IntervalMatrix.point(np.array([[1.0, 1.0], [1.0, 1.0]])))

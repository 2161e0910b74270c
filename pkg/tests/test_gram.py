from fractions import Fraction

import numpy as np
import pytest

from src.ival.array import IntervalMatrix
from src.ival.interval import Interval
from src.slenclose.coefficients import CoefficientFn, parse_coefficient
from src.slenclose.gram import GramTriple, approximate_eigenfunctions, assemble_gram, constant_weight, gram_of_weight
from src.slenclose.problem import BC, BoundaryCondition, SLProblem
from src.slenclose.rrtl import rr_upper


def test_free_problem_ritz_values_are_upper_bounds(free_problem):
    g = assemble_gram(free_problem, (free_problem.lo, free_problem.hi), basis_degree=6)
    uppers = rr_upper(g, 3)
    for iv, exact in zip(uppers, (0.0, 1.0, 4.0)):
        assert iv.hi >= exact
        assert iv.hi <= exact * 1.1 + 1e-9


def test_mass_matrix_is_symmetric_and_positive(free_problem):
    g = assemble_gram(free_problem, (Fraction(0), Fraction(1, 2)), basis_degree=8)
    assert g.M0.symmetric and g.M1.symmetric and g.M2.symmetric
    assert g.dim == g.M1.rows == g.M2.rows
    assert np.all(np.linalg.eigvalsh(g.M0.mid()) > 0)
    assert g.basis[2] == 8


def test_cos_problem_first_ritz_value(cos_problem):
    g = assemble_gram(cos_problem, (cos_problem.lo, cos_problem.hi), basis_degree=16)
    mu0 = rr_upper(g, 1)[0]
    assert abs(mu0.hi - 2.48604311) <= 1e-6


def test_airy_left_cell_ritz_value(airy_problem):
    g = assemble_gram(airy_problem, (Fraction(0), Fraction(1, 4)), basis_degree=12)
    mu0 = rr_upper(g, 1)[0]
    assert abs(mu0.hi - 205.942) <= 1e-2


def test_dirichlet_basis_vanishes_at_the_end():
    lo, hi = Fraction(0), Fraction(1)
    p = SLProblem(lo, hi, CoefficientFn.constant(1, lo, hi), CoefficientFn.constant(0, lo, hi),
                  BoundaryCondition(BC.DIRICHLET, BC.DIRICHLET))
    # -f'' on (0, 1) with Dirichlet ends: pi^2 k^2
    uppers = rr_upper(assemble_gram(p, (lo, hi), basis_degree=12), 2)
    assert uppers[0].hi >= np.pi ** 2 - 1e-9
    assert uppers[0].hi <= np.pi ** 2 * 1.0001
    assert uppers[1].hi <= 4 * np.pi ** 2 * 1.001


def test_piecewise_potential_gram_is_finite():
    lo, hi = Fraction(0), Fraction(1)
    V = parse_coefficient("0 on [0,1/2]; 10 on [1/2,1]", lo, hi)
    p = SLProblem(lo, hi, CoefficientFn.constant(1, lo, hi), V)
    g = assemble_gram(p, (lo, hi), basis_degree=10)
    assert np.all(np.isfinite(g.M1.hi)) and np.all(np.isfinite(g.M2.hi))
    assert rr_upper(g, 1)[0].hi < 10.0


def test_constant_weight_gram_matches_legendre_mass():
    # <T_0, T_0> on [-1, 1] is 2
    m = gram_of_weight(constant_weight(1), 3, Interval(1.0))
    assert m[0, 0].contains(2.0)


def test_triple_for_matrix():
    a = IntervalMatrix.point(np.array([[2.0, 1.0], [1.0, 3.0]]))
    g = GramTriple.for_matrix(a)
    assert g.M0.contains(np.eye(2))
    assert g.M2.contains(np.array([[5.0, 5.0], [5.0, 10.0]]))
    assert g.principal([1]).M1[0, 0].contains(3.0)


def test_approximate_eigenfunctions(free_problem):
    values, derivative = approximate_eigenfunctions(free_problem, degree=16)
    assert values[:3] == pytest.approx([0.0, 1.0, 4.0], abs=1e-6)
    # cos(x) has derivative zero at both Neumann ends
    ends = derivative(1, np.array([0.0, 1.0]))
    assert np.allclose(ends, 0.0, atol=1e-8)

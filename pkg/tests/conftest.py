from fractions import Fraction

import pytest

from src.observability.metrics import get_metrics
from src.observability.tracer import get_tracer
from src.slenclose.coefficients import CoefficientFn, parse_coefficient
from src.slenclose.problem import BC, BoundaryCondition, SLProblem, Unit


@pytest.fixture(autouse=True)
def fresh_observability():
    get_metrics().reset()
    get_tracer().start_trace("test")
    yield


@pytest.fixture
def cos_problem() -> SLProblem:
    """-f'' + (4 + 4cos 2x) f on (0, pi), Neumann at both ends"""
    lo, hi = Fraction(0), Fraction(1)
    return SLProblem(lo, hi, CoefficientFn.constant(1, lo, hi), parse_coefficient("4 + 4cos(2x)", lo, hi),
                     unit=Unit.PI, name="cos")


@pytest.fixture
def airy_problem() -> SLProblem:
    """-f'' + 1000x f on (0, 1), Dirichlet at both ends"""
    lo, hi = Fraction(0), Fraction(1)
    return SLProblem(lo, hi, CoefficientFn.constant(1, lo, hi), parse_coefficient("1000x", lo, hi),
                     BoundaryCondition(BC.DIRICHLET, BC.DIRICHLET), name="airy")


@pytest.fixture
def free_problem() -> SLProblem:
    """-f'' on (0, pi), Neumann at both ends; eigenvalues i^2"""
    lo, hi = Fraction(0), Fraction(1)
    return SLProblem(lo, hi, CoefficientFn.constant(1, lo, hi), CoefficientFn.constant(0, lo, hi),
                     unit=Unit.PI, name="free")

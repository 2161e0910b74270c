from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

from src.core.errors import DomainError
from src.ival.interval import Interval, pi_enclosure
from src.slenclose.coefficients import CoefficientFn


class BC(str, Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"

    @classmethod
    def parse(cls, text: str) -> "BC":
        key = text.strip().lower()
        aliases = {"n": cls.NEUMANN, "nbc": cls.NEUMANN, "neumann": cls.NEUMANN,
                   "d": cls.DIRICHLET, "dbc": cls.DIRICHLET, "dirichlet": cls.DIRICHLET}
        if key not in aliases:
            raise DomainError(f"unknown boundary condition {text!r}")
        return aliases[key]


class Unit(str, Enum):
    """Length unit of the domain endpoints; coefficients are always written in x"""

    ONE = "1"
    PI = "pi"

    def enclosure(self) -> Interval:
        return Interval(1.0) if self is Unit.ONE else pi_enclosure()

    def pi_over_unit_squared(self) -> Interval:
        """(pi/unit)^2, exactly 1 when the unit is pi"""
        if self is Unit.PI:
            return Interval(1.0)
        return pi_enclosure().sqr()


@dataclass(frozen=True)
class BoundaryCondition:
    left: BC = BC.NEUMANN
    right: BC = BC.NEUMANN

    def mode_shift(self) -> Fraction:
        """Offset c in the constant-coefficient eigenvalues (i + c)^2 pi^2 / L^2"""
        if self.left is BC.NEUMANN and self.right is BC.NEUMANN:
            return Fraction(0)
        if self.left is BC.DIRICHLET and self.right is BC.DIRICHLET:
            return Fraction(1)
        return Fraction(1, 2)

    def __str__(self) -> str:
        return f"{self.left.value[0].upper()}BC/{self.right.value[0].upper()}BC"


@dataclass(frozen=True)
class SLProblem:
    """
    -(a f')' + V f on [lo, hi] * unit. Cells are addressed by Fractions in
    units, so every split point is exact; the operator itself lives in x.
    """

    lo: Fraction
    hi: Fraction
    a: CoefficientFn
    V: CoefficientFn
    bc: BoundaryCondition = field(default_factory=BoundaryCondition)
    unit: Unit = Unit.ONE
    name: str = "sl"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError("empty domain", lo=str(self.lo), hi=str(self.hi))
        if not self.a.is_single_piece:
            raise DomainError("a(x) must be a single piece", pieces=len(self.a.pieces))
        for fn, label in ((self.a, "a"), (self.V, "V")):
            if not fn.covers(self.lo, self.hi):
                raise DomainError(f"{label} does not cover the domain", coefficient=label)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def restrict(self, lo: Fraction, hi: Fraction) -> "SLProblem":
        """Operator on a sub-cell; cut points carry Neumann conditions"""
        left = self.bc.left if lo == self.lo else BC.NEUMANN
        right = self.bc.right if hi == self.hi else BC.NEUMANN
        return replace(self, lo=Fraction(lo), hi=Fraction(hi), bc=BoundaryCondition(left, right))

    def a_range(self, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> Interval:
        return self.a.range_on(self.lo if lo is None else lo, self.hi if hi is None else hi, self.unit.enclosure())

    def v_range(self, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> Interval:
        return self.V.range_on(self.lo if lo is None else lo, self.hi if hi is None else hi, self.unit.enclosure())

    def x_endpoints(self) -> Tuple[Interval, Interval]:
        u = self.unit.enclosure()
        return Interval.exact(self.lo) * u, Interval.exact(self.hi) * u

    def describe(self) -> str:
        unit = "" if self.unit is Unit.ONE else "*pi"
        return f"({self.lo}{unit}, {self.hi}{unit}) {self.bc}"

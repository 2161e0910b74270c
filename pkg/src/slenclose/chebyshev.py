"""
Exact rational Chebyshev machinery on t in [-1, 1].

Everything here is computed with Fractions and cached; conversion to
intervals happens once per table.
"""

from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from src.core.errors import BasisDegenerate
from src.ival import rounding as rd
from src.slenclose.problem import BC

FracMatrix = Tuple[Tuple[Fraction, ...], ...]


def cheb_values(t: Fraction, n: int) -> List[Fraction]:
    """T_0(t) .. T_n(t)"""
    values = [Fraction(1), Fraction(t)]
    for _ in range(2, n + 1):
        values.append(2 * t * values[-1] - values[-2])
    return values[: n + 1]


def _endpoint_functional(bc: BC, side: int, j: int) -> Fraction:
    """Value (Dirichlet) or derivative (Neumann) of T_j at t = side"""
    if bc is BC.DIRICHLET:
        return Fraction(1) if side > 0 else Fraction((-1) ** j)
    return Fraction(j * j) if side > 0 else Fraction((-1) ** (j + 1) * j * j)


@lru_cache(maxsize=64)
def basis_coefficients(degree: int, left: BC, right: BC) -> FracMatrix:
    """
    Rows are Chebyshev coefficients of phi_k = T_k + b_k T_{k+1} + c_k T_{k+2},
    k = 0 .. degree-2, with (b_k, c_k) solving the two endpoint conditions.
    """
    if degree < 2:
        raise BasisDegenerate("basis degree must be at least 2", degree=degree)
    rows = []
    for k in range(degree - 1):
        l0, l1, l2 = (_endpoint_functional(left, -1, j) for j in (k, k + 1, k + 2))
        r0, r1, r2 = (_endpoint_functional(right, 1, j) for j in (k, k + 1, k + 2))
        det = l1 * r2 - l2 * r1
        if det == 0:
            raise BasisDegenerate("boundary conditions leave the basis under-determined", k=k)
        b = (-l0 * r2 + l2 * r0) / det
        c = (-l1 * r0 + l0 * r1) / det
        row = [Fraction(0)] * (degree + 1)
        row[k], row[k + 1], row[k + 2] = Fraction(1), b, c
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=8)
def derivative_matrix(n: int) -> FracMatrix:
    """D with (row vector c) @ D = Chebyshev coefficients of the derivative"""
    d = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for j in range(1, n + 1):
        for k in range(j - 1, -1, -2):
            d[j][k] = Fraction(j) if k == 0 else Fraction(2 * j)
    return tuple(tuple(row) for row in d)


def frac_matmul(a: FracMatrix, b: FracMatrix) -> FracMatrix:
    cols = list(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col) if x and y), Fraction(0)) for col in cols)
        for row in a
    )


@lru_cache(maxsize=64)
def basis_with_derivatives(degree: int, left: BC, right: BC) -> Tuple[FracMatrix, FracMatrix, FracMatrix]:
    c0 = basis_coefficients(degree, left, right)
    d = derivative_matrix(degree)
    c1 = frac_matmul(c0, d)
    c2 = frac_matmul(c1, d)
    return c0, c1, c2


def _antiderivative_row(t: Fraction, k_max: int) -> List[Fraction]:
    """F_k(t) with F_k' = T_k"""
    tv = cheb_values(t, k_max + 1)
    out = [tv[1], tv[2] / 4 if k_max >= 1 else Fraction(0)]
    for k in range(2, k_max + 1):
        out.append((tv[k + 1] / (k + 1) - tv[k - 1] / (k - 1)) / 2)
    return out[: k_max + 1]


@lru_cache(maxsize=32)
def moment_table(t0: Fraction, t1: Fraction, n_max: int, k_max: int) -> FracMatrix:
    """A[n][k] = integral over [t0, t1] of t^n T_k(t)"""
    width = k_max + n_max + 1
    hi_row = _antiderivative_row(Fraction(t1), width)
    lo_row = _antiderivative_row(Fraction(t0), width)
    row = [h - l for h, l in zip(hi_row, lo_row)]
    table = [row]
    for n in range(1, n_max + 1):
        prev = table[-1]
        limit = width - n
        cur = [prev[1]] + [(prev[k + 1] + prev[k - 1]) / 2 for k in range(1, limit + 1)]
        table.append(cur)
    return tuple(tuple(r[: k_max + 1]) for r in table)


@lru_cache(maxsize=32)
def moment_table_bounds(t0: Fraction, t1: Fraction, n_max: int, k_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Float enclosures of moment_table as (lo, hi) arrays"""
    table = moment_table(t0, t1, n_max, k_max)
    lo = np.array([[rd.float_down(x) for x in row] for row in table])
    hi = np.array([[rd.float_up(x) for x in row] for row in table])
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


def frac_bounds(m: FracMatrix) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.array([[rd.float_down(x) for x in row] for row in m], dtype=float, ndmin=2)
    hi = np.array([[rd.float_up(x) for x in row] for row in m], dtype=float, ndmin=2)
    return lo, hi

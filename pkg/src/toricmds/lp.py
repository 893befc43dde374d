"""Exact rational linear programming, phase-I simplex only.

The package needs two feasibility questions answered with proofs, not floats:
membership of a point in a finitely generated cone, and existence of a vector
strictly positive on a finite set of functionals (the projectivity
certificate). Both reduce to finding a nonnegative solution of a linear
system, which is what this module does, with Bland's rule so it terminates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def nonneg_solve(
    columns: Sequence[Sequence], target: Sequence
) -> list[Fraction] | None:
    """Solve sum_j lam_j * columns[j] = target with lam >= 0.

    Returns one solution as a list of Fractions, or None if infeasible.
    """
    d = len(target)
    g = len(columns)
    for col in columns:
        if len(col) != d:
            raise ValueError("column length mismatch")
    # Tableau rows: [lam columns | artificial identity | rhs], rhs >= 0.
    rows: list[list[Fraction]] = []
    for i in range(d):
        row = [Fraction(columns[j][i]) for j in range(g)]
        rhs = Fraction(target[i])
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        art = [Fraction(1) if k == i else Fraction(0) for k in range(d)]
        rows.append(row + art + [rhs])
    basis = [g + i for i in range(d)]

    def reduced_cost(j: int) -> Fraction:
        # cost 0 for lam columns, 1 for artificials
        cj = Fraction(0) if j < g else Fraction(1)
        return cj - sum(
            (Fraction(1) if basis[i] >= g else Fraction(0)) * rows[i][j]
            for i in range(d)
        )

    while True:
        enter = None
        for j in range(g):  # artificials never re-enter
            if j in basis:
                continue
            if reduced_cost(j) < 0:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best: Fraction | None = None
        for i in range(d):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]  # type: ignore[index]
                ):
                    best = ratio
                    leave = i
        if leave is None:
            raise ArithmeticError("phase-I objective unbounded; impossible")
        piv = rows[leave][enter]
        rows[leave] = [x / piv for x in rows[leave]]
        for i in range(d):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[leave])]
        basis[leave] = enter

    objective = sum(rows[i][-1] for i in range(d) if basis[i] >= g)
    if objective != 0:
        return None
    lam = [Fraction(0)] * g
    for i in range(d):
        if basis[i] < g:
            lam[basis[i]] = rows[i][-1]
    return lam


def in_cone(generators: Sequence[Sequence], point: Sequence) -> bool:
    """Is the point a nonnegative combination of the generators?"""
    if all(x == 0 for x in point):
        return True
    if not generators:
        return False
    cols = [list(gen) for gen in generators]
    return nonneg_solve(cols, list(point)) is not None


def strictly_positive_point(
    functionals: Sequence[Sequence], dim: int
) -> tuple[Fraction, ...] | None:
    """A rational x with f.x >= 1 for every functional, or None.

    By homogeneity this decides whether some x has f.x > 0 for all f, which
    is the strict-convexity / ample-class feasibility question.
    """
    if not functionals:
        return tuple(Fraction(0) for _ in range(dim))
    # x = u - v with u, v >= 0; slack s_i >= 0; f.u - f.v - s_i = 1.
    cols: list[list[Fraction]] = []
    m = len(functionals)
    for k in range(dim):
        cols.append([Fraction(f[k]) for f in functionals])
    for k in range(dim):
        cols.append([Fraction(-f[k]) for f in functionals])
    for i in range(m):
        cols.append([Fraction(-1) if j == i else Fraction(0) for j in range(m)])
    lam = nonneg_solve(cols, [Fraction(1)] * m)
    if lam is None:
        return None
    return tuple(lam[k] - lam[dim + k] for k in range(dim))

"""Exact-rational linear programming with a dense two-phase simplex.

Problems here are tiny (hull memberships, unit-dual-ball functional
searches), so a plain tableau with Bland's anti-cycling rule is plenty.
All arithmetic stays in ``Fraction``; optima are exact.

Standard form: maximize c.x subject to A x = b, x >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInput

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: str
    x: list[Fraction] | None
    value: Fraction | None


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    inv = Fraction(1) / piv
    tableau[row] = [inv * a for a in tableau[row]]
    for r, line in enumerate(tableau):
        if r != row and line[col] != 0:
            factor = line[col]
            prow = tableau[row]
            tableau[r] = [a - factor * p for a, p in zip(line, prow)]
    basis[row] = col


def _simplex(tableau: list[list[Fraction]], basis: list[int], cost: list[Fraction]):
    """Maximize ``cost`` over the current tableau in place (Bland's rule)."""
    m = len(tableau)
    width = len(tableau[0])
    while True:
        # reduced costs: c_j - c_B . B^{-1} A_j
        reduced = list(cost)
        offset = Fraction(0)
        for r in range(m):
            cb = cost[basis[r]]
            if cb != 0:
                row = tableau[r]
                for j in range(width - 1):
                    if row[j] != 0:
                        reduced[j] -= cb * row[j]
                offset += cb * row[-1]
        enter = -1
        for j in range(width - 1):
            if reduced[j] > 0:
                enter = j
                break
        if enter < 0:
            return offset
        leave = -1
        best = None
        for r in range(m):
            a = tableau[r][enter]
            if a > 0:
                ratio = tableau[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return None  # unbounded
        _pivot(tableau, basis, leave, enter)


def solve_lp(objective: list[Fraction], a_eq: list[list[Fraction]], b_eq: list[Fraction]) -> LpResult:
    """Maximize ``objective . x`` subject to ``a_eq x = b_eq``, ``x >= 0``."""
    n = len(objective)
    m = len(a_eq)
    for row in a_eq:
        if len(row) != n:
            raise InvalidInput("inconsistent LP row width")
    if len(b_eq) != m:
        raise InvalidInput("inconsistent LP right-hand side")
    if m == 0:
        # only x >= 0; optimum is 0 unless some objective coefficient is positive
        if any(c > 0 for c in objective):
            return LpResult(UNBOUNDED, None, None)
        return LpResult(OPTIMAL, [Fraction(0)] * n, Fraction(0))

    # normalize b >= 0, append artificial columns
    tableau: list[list[Fraction]] = []
    for r in range(m):
        row = list(a_eq[r])
        rhs = b_eq[r]
        if rhs < 0:
            row = [-a for a in row]
            rhs = -rhs
        art = [Fraction(0)] * m
        art[r] = Fraction(1)
        tableau.append(row + art + [rhs])
    basis = [n + r for r in range(m)]
    width = n + m + 1

    phase1 = [Fraction(0)] * (width - 1)
    for j in range(n, n + m):
        phase1[j] = Fraction(-1)
    value = _simplex(tableau, basis, phase1)
    if value is None or value < 0:
        return LpResult(INFEASIBLE, None, None)

    # drive leftover artificials out of the basis (or drop redundant rows)
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tableau[r][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, r, col)
    tableau2: list[list[Fraction]] = []
    kept_basis: list[int] = []
    for r in range(m):
        if basis[r] < n:
            tableau2.append(tableau[r][:n] + [tableau[r][-1]])
            kept_basis.append(basis[r])
        # else: artificial stuck in a zero row; the constraint is redundant
    if not tableau2:
        if any(c > 0 for c in objective):
            return LpResult(UNBOUNDED, None, None)
        return LpResult(OPTIMAL, [Fraction(0)] * n, Fraction(0))

    phase2 = list(objective)
    value = _simplex(tableau2, kept_basis, phase2)
    if value is None:
        return LpResult(UNBOUNDED, None, None)
    x = [Fraction(0)] * n
    for r, b in enumerate(kept_basis):
        x[b] = tableau2[r][-1]
    return LpResult(OPTIMAL, x, value)


def feasible_point(a_eq: list[list[Fraction]], b_eq: list[Fraction]) -> list[Fraction] | None:
    """A nonnegative solution of ``a_eq x = b_eq``, or None."""
    n = len(a_eq[0]) if a_eq else 0
    res = solve_lp([Fraction(0)] * n, a_eq, b_eq)
    return res.x if res.status == OPTIMAL else None

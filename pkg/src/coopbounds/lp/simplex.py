"""
Dense two-phase simplex over ``Fraction``.

Solves  max c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0  exactly.
Pricing is Dantzig's rule; after a run of degenerate pivots it falls back to
Bland's rule until the objective moves again, which rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_DEGENERATE_STREAK = 30


@dataclass
class LPResult:
    status: str
    x: list[Fraction] | None = None
    fun: Fraction | None = None
    iterations: int = 0


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows  # each row: ncols coefficients followed by rhs
        self.basis = basis
        self.ncols = ncols
        self.iterations = 0

    def pivot(self, r: int, j: int, obj: list[Fraction]) -> None:
        prow = self.rows[r]
        piv = prow[j]
        if piv != 1:
            prow = [a / piv for a in prow]
            self.rows[r] = prow
        nz = [k for k, a in enumerate(prow) if a]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[j]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
        f = obj[j]
        if f:
            for k in nz:
                obj[k] -= f * prow[k]
        self.basis[r] = j
        self.iterations += 1

    def optimize(self, obj: list[Fraction], allowed: Sequence[bool], max_iter: int) -> str:
        """Drive the reduced-cost row ``obj`` (max problem, enter on negative) to optimality."""
        streak = 0
        while self.iterations < max_iter:
            candidates = [j for j in range(self.ncols) if allowed[j] and obj[j] < 0]
            if not candidates:
                return OPTIMAL
            if streak >= _DEGENERATE_STREAK:
                j = candidates[0]
            else:
                j = min(candidates, key=lambda k: (obj[k], k))
            best_r, best_ratio = None, None
            for i, row in enumerate(self.rows):
                a = row[j]
                if a > 0:
                    ratio = row[-1] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[best_r])
                    ):
                        best_r, best_ratio = i, ratio
            if best_r is None:
                return UNBOUNDED
            streak = streak + 1 if best_ratio == 0 else 0
            self.pivot(best_r, j, obj)
        raise RuntimeError(f"simplex did not converge in {max_iter} pivots")


def _as_rows(A: Sequence[Sequence] | None, n: int) -> list[list[Fraction]]:
    rows = [[Fraction(a) for a in row] for row in (A or [])]
    for row in rows:
        if len(row) != n:
            raise ValueError(f"constraint row has {len(row)} entries, expected {n}")
    return rows


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] | None = None,
    b_ub: Sequence | None = None,
    A_eq: Sequence[Sequence] | None = None,
    b_eq: Sequence | None = None,
    max_iter: int = 100_000,
) -> LPResult:
    """Maximize ``c @ x`` over nonnegative ``x`` exactly."""
    n = len(c)
    c = [Fraction(v) for v in c]
    ub = _as_rows(A_ub, n)
    eq = _as_rows(A_eq, n)
    bub = [Fraction(v) for v in (b_ub or [])]
    beq = [Fraction(v) for v in (b_eq or [])]
    if len(ub) != len(bub) or len(eq) != len(beq):
        raise ValueError("constraint matrix and right-hand side lengths differ")

    m_ub, m = len(ub), len(ub) + len(eq)
    # columns: x (n) | slacks (m_ub) | artificials (assigned below)
    needs_art = [bub[i] < 0 for i in range(m_ub)] + [True] * len(eq)
    n_art = sum(needs_art)
    ncols = n + m_ub + n_art
    rows, basis = [], []
    art = n + m_ub
    for i in range(m):
        if i < m_ub:
            coeffs, rhs = ub[i], bub[i]
            slack = [Fraction(0)] * m_ub
            slack[i] = Fraction(1)
        else:
            coeffs, rhs = eq[i - m_ub], beq[i - m_ub]
            slack = [Fraction(0)] * m_ub
        row = coeffs + slack + [Fraction(0)] * n_art + [rhs]
        if rhs < 0:
            row = [-a for a in row]
        if needs_art[i]:
            row[art] = Fraction(1)
            basis.append(art)
            art += 1
        else:
            basis.append(n + i)
        rows.append(row)

    tab = _Tableau(rows, basis, ncols)
    allowed = [True] * ncols

    if n_art:
        # phase 1: maximize -(sum of artificials)
        obj = [Fraction(0)] * (ncols + 1)
        for k in range(n + m_ub, ncols):
            obj[k] = Fraction(1)
        for i, bj in enumerate(tab.basis):
            if bj >= n + m_ub:
                obj = [o - a for o, a in zip(obj, tab.rows[i])]
        tab.optimize(obj, allowed, max_iter)
        if obj[-1] != 0:
            return LPResult(INFEASIBLE, iterations=tab.iterations)
        # drive zero-level artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= n + m_ub:
                row = tab.rows[i]
                j = next((k for k in range(n + m_ub) if row[k] != 0), None)
                if j is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, j, obj)
            i += 1
        for k in range(n + m_ub, ncols):
            allowed[k] = False

    obj = [-v for v in c] + [Fraction(0)] * (ncols - n) + [Fraction(0)]
    for i, bj in enumerate(tab.basis):
        f = obj[bj]
        if f:
            obj = [o - f * a for o, a in zip(obj, tab.rows[i])]
    status = tab.optimize(obj, allowed, max_iter)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, iterations=tab.iterations)
    x = [Fraction(0)] * n
    for i, bj in enumerate(tab.basis):
        if bj < n:
            x[bj] = tab.rows[i][-1]
    fun = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x, fun, tab.iterations)

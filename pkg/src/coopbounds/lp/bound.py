"""
LP certificate for competitive-ratio upper bounds.

Variables are one outcome distribution per chain profile plus the ratio
``alpha``.  Any DSIC mechanism with competitive ratio ``alpha`` restricted to
the chain profiles is a feasible point, so the LP optimum ``alpha*`` is an
upper bound on what a truthful mechanism can guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..core import opt_gain, rational_str
from ..families import DeviationChain, build_chain, DEFAULT_EPS, DEFAULT_L
from ..mechanisms import decreasing_random, harmonic, uniform_random
from .simplex import OPTIMAL, linprog_exact

EXACT = "exact"
FLOAT = "float"
FLOAT_TOL = 1e-9
CHECK_TOL = 1e-8

MAX_EXACT_M = 8
MAX_FLOAT_M = 12


class LPSolveError(RuntimeError):
    pass


@dataclass
class BoundLP:
    chain: DeviationChain
    c: list[Fraction]
    A_ub: list[list[Fraction]]
    b_ub: list[Fraction]
    A_eq: list[list[Fraction]]
    b_eq: list[Fraction]
    row_kinds: list[str]

    @property
    def n_profiles(self) -> int:
        return len(self.chain.profiles)

    @property
    def width(self) -> int:
        """Entries per distribution block (options 0..M)."""
        return self.chain.M + 1

    @property
    def n_vars(self) -> int:
        return len(self.c)

    @property
    def alpha_index(self) -> int:
        return self.n_vars - 1

    def var(self, profile: int, option: int) -> int:
        return profile * self.width + option

    def check_assignment(self, dists: Sequence[Sequence[Fraction]], alpha: Fraction) -> list[str]:
        """Exactly evaluate every constraint at a candidate point; return the violated row kinds."""
        x = [Fraction(0)] * self.n_vars
        for p, dist in enumerate(dists):
            for i, q in enumerate(dist):
                x[self.var(p, i)] = Fraction(q)
        x[self.alpha_index] = Fraction(alpha)
        bad = []
        for row, rhs, kind in zip(self.A_ub, self.b_ub, self.row_kinds):
            if sum(a * v for a, v in zip(row, x) if a) > rhs:
                bad.append(kind)
        for row, rhs in zip(self.A_eq, self.b_eq):
            if sum(a * v for a, v in zip(row, x) if a) != rhs:
                bad.append("simplex")
        if any(v < 0 for v in x):
            bad.append("nonnegativity")
        return bad


@dataclass
class BoundReport:
    family: str
    M: int
    eps: Fraction
    L: Fraction
    mode: str
    alpha_star: Fraction
    theoretical_bound: Fraction
    slack_budget: Fraction
    assignment: list[tuple[Fraction, ...]]
    certified_upper: Fraction | None = None
    passed: bool | None = None

    @property
    def upper_limit(self) -> Fraction:
        return self.theoretical_bound + self.slack_budget

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "M": self.M,
            "eps": rational_str(self.eps),
            "L": rational_str(self.L),
            "mode": self.mode,
            "alpha_star": rational_str(self.alpha_star),
            "alpha_star_float": float(self.alpha_star),
            "theoretical_bound": rational_str(self.theoretical_bound),
            "slack_budget": rational_str(self.slack_budget),
            "certified_upper": None if self.certified_upper is None else rational_str(self.certified_upper),
            "pass": self.passed,
            "assignment": [[rational_str(q) for q in dist] for dist in self.assignment],
        }

    def csv_row(self) -> list[str]:
        return [
            str(self.M), self.family, rational_str(self.eps), rational_str(self.L),
            rational_str(self.alpha_star), rational_str(self.theoretical_bound),
            rational_str(self.slack_budget), "pass" if self.passed else "fail",
        ]


CSV_HEADER = ["M", "family", "eps", "L", "alpha_star", "bound", "slack", "pass"]


def build_lp(chain: DeviationChain) -> BoundLP:
    """Encode simplex, ratio and per-edge DSIC constraints of ``chain``."""
    M = chain.M
    width = M + 1
    n_vars = len(chain.profiles) * width + 1
    alpha = n_vars - 1
    zero = Fraction(0)

    A_ub, b_ub, kinds = [], [], []
    A_eq, b_eq = [], []
    for p, prof in enumerate(chain.profiles):
        inst = prof.instance
        row = [zero] * n_vars
        for i in range(width):
            row[p * width + i] = Fraction(1)
        A_eq.append(row)
        b_eq.append(Fraction(1))

        opt, _ = opt_gain(inst)
        if opt > 0:
            # alpha * OPT - sum_i r_i (b_i + s_i) <= 0
            row = [zero] * n_vars
            row[alpha] = opt
            for i in range(1, width):
                row[p * width + i] = -inst.welfare(i)
            A_ub.append(row)
            b_ub.append(zero)
            kinds.append(f"ratio[{p}]")

    def add_dsic(truth: int, report: int, utility: Sequence[Fraction], kind: str) -> None:
        # true utility under the report's outcome minus truthful utility <= 0
        row = [zero] * n_vars
        for i in range(1, width):
            row[report * width + i] += utility[i - 1]
            row[truth * width + i] -= utility[i - 1]
        A_ub.append(row)
        b_ub.append(zero)
        kinds.append(kind)

    for truth, report in chain.buyer_edges:
        add_dsic(truth, report, chain.profiles[truth].instance.buyer, f"buyer[{truth}->{report}]")
    for truth, report in chain.seller_edges:
        add_dsic(truth, report, chain.profiles[truth].instance.seller, f"seller[{truth}->{report}]")

    c = [zero] * n_vars
    c[alpha] = Fraction(1)
    return BoundLP(chain, c, A_ub, b_ub, A_eq, b_eq, kinds)


def theoretical_bound(family: str, M: int) -> Fraction:
    if family == "general":
        return Fraction(1, M)
    if family == "submodular":
        return 1 / harmonic(M)
    raise ValueError(f"unknown family {family!r}")


def slack_budget(M: int, eps: Fraction, L: Fraction) -> Fraction:
    """2 eps from the induction plus M/L for replacing limits by a finite scale factor."""
    return 2 * eps + M / L


def _geometric_scaling(A: np.ndarray, sweeps: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Row and column factors from alternating geometric-mean equilibration."""
    rows, cols = np.ones(A.shape[0]), np.ones(A.shape[1])
    mag = np.abs(A)
    mag[mag == 0] = np.nan
    for _ in range(sweeps):
        scaled = mag * rows[:, None] * cols[None, :]
        f = 1 / np.sqrt(np.nanmax(scaled, axis=1) * np.nanmin(scaled, axis=1))
        rows *= np.where(np.isnan(f), 1.0, f)
        scaled = mag * rows[:, None] * cols[None, :]
        f = 1 / np.sqrt(np.nanmax(scaled, axis=0) * np.nanmin(scaled, axis=0))
        cols *= np.where(np.isnan(f), 1.0, f)
    return rows, cols


def _solve_float(lp: BoundLP) -> tuple[np.ndarray, float, np.ndarray, np.ndarray]:
    """HiGHS on the equilibrated LP; returns x, alpha and the duals of the ub and eq rows."""
    from scipy.optimize import linprog

    m_ub = len(lp.A_ub)
    A = np.array([[float(a) for a in row] for row in lp.A_ub + lp.A_eq])
    b = np.array([float(v) for v in lp.b_ub + lp.b_eq])
    rows, cols = _geometric_scaling(A)
    As = A * rows[:, None] * cols[None, :]
    bs = b * rows
    cost = -np.array([float(v) for v in lp.c]) * cols
    res = linprog(
        cost, A_ub=As[:m_ub], b_ub=bs[:m_ub], A_eq=As[m_ub:], b_eq=bs[m_ub:],
        bounds=(0, None), method="highs",
        options={"primal_feasibility_tolerance": FLOAT_TOL, "dual_feasibility_tolerance": FLOAT_TOL},
    )
    if res.status != 0:
        raise LPSolveError(f"float LP failed ({res.message}); rerun in exact mode")
    x = res.x * cols
    # scipy reports d(min objective)/d(rhs); the max problem's duals are their negation
    y = -res.ineqlin.marginals * rows[:m_ub]
    z = -res.eqlin.marginals * rows[m_ub:]
    return x, float(x[lp.alpha_index]), y, z


def _certified_upper(lp: BoundLP, y_float: np.ndarray) -> Fraction:
    """Exact weak-duality bound built from approximate duals of the ub rows.

    The ub duals are clipped at zero and scaled so the alpha column is
    covered; each block's free simplex dual then absorbs whatever reduced
    cost is still violated, which makes the point dual feasible exactly.
    """
    y = [Fraction(max(float(v), 0.0)) for v in y_float]
    alpha_cover = sum((row[lp.alpha_index] * v for row, v in zip(lp.A_ub, y)), Fraction(0))
    if alpha_cover <= 0:
        return Fraction(10**9)
    y = [v / alpha_cover for v in y] if alpha_cover < 1 else y
    w = lp.width
    bound = Fraction(0)
    for p in range(lp.n_profiles):
        need = None
        for i in range(w):
            j = p * w + i
            col = sum((row[j] * v for row, v in zip(lp.A_ub, y) if row[j]), Fraction(0))
            gap = lp.c[j] - col
            need = gap if need is None or gap > need else need
        bound += need
    return bound


def solve_lp(lp: BoundLP, mode: str = EXACT) -> BoundReport:
    chain = lp.chain
    if mode == EXACT:
        res = linprog_exact(lp.c, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq)
        if res.status != OPTIMAL:
            raise LPSolveError(f"exact LP ended with status {res.status}")
        x, alpha = res.x, res.fun
        upper = alpha
    elif mode == FLOAT:
        xf, af, y, _ = _solve_float(lp)
        _, floor = floor_assignment(chain)
        upper = _certified_upper(lp, y)
        tol = Fraction(CHECK_TOL)
        if not floor - tol <= Fraction(af) <= upper + tol:
            raise LPSolveError(
                f"float LP is numerically inconsistent (alpha={af:.12g}, feasible floor "
                f"{float(floor):.12g}, certified upper bound {float(upper):.12g}); rerun in exact mode"
            )
        x, alpha = [Fraction(v) for v in xf], Fraction(af)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    w = lp.width
    assignment = [tuple(x[p * w:(p + 1) * w]) for p in range(lp.n_profiles)]
    return BoundReport(
        family=chain.family, M=chain.M, eps=chain.eps, L=chain.L, mode=mode,
        alpha_star=alpha,
        theoretical_bound=theoretical_bound(chain.family, chain.M),
        slack_budget=slack_budget(chain.M, chain.eps, chain.L),
        assignment=assignment,
        certified_upper=upper,
    )


def floor_assignment(chain: DeviationChain) -> tuple[list[tuple[Fraction, ...]], Fraction]:
    """UR (general) or DR (submodular) outputs on every profile, with their guaranteed ratio."""
    if chain.family == "general":
        mech = uniform_random(chain.M)
    else:
        mech = decreasing_random(chain.M)
    dists = [mech(p.instance).probs for p in chain.profiles]
    return dists, theoretical_bound(chain.family, chain.M)


def verify_upper_bound(
    M: int,
    eps=DEFAULT_EPS,
    L=DEFAULT_L,
    family: str = "general",
    mode: str = EXACT,
    graded: bool = False,
) -> BoundReport:
    """Build the chain, confirm the UR/DR floor is feasible, solve, and judge the bracket.

    Exact mode is the reference.  Float mode solves with HiGHS and judges the
    upper side by an exact weak-duality bound rebuilt from HiGHS's duals; it
    raises :class:`LPSolveError` when HiGHS contradicts that bound or the
    floor.
    """
    cap = MAX_EXACT_M if mode == EXACT else MAX_FLOAT_M
    if M > cap:
        raise ValueError(f"M={M} exceeds the {mode}-mode cap of {cap}")
    chain = build_chain(family, M, eps, L, graded)
    lp = build_lp(chain)
    dists, floor = floor_assignment(chain)
    violated = lp.check_assignment(dists, floor)
    if violated:
        raise AssertionError(f"floor mechanism violates LP rows {violated}")
    report = solve_lp(lp, mode)
    # the floor is feasible, so alpha* >= bound holds exactly in both modes;
    # float mode judges the upper side by its exact dual certificate
    report.passed = (
        report.theoretical_bound <= report.alpha_star + Fraction(CHECK_TOL) * (mode == FLOAT)
        and report.certified_upper <= report.upper_limit
    )
    return report

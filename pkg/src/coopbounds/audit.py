"""
Brute-force DSIC auditing on finite report grids.

A passing verdict certifies truthfulness only for the enumerated grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Hashable, Sequence, TypeVar

import numpy as np

from .core import Instance, RationalLike, expected_gains, feasible_set, rational_str, to_rational
from .submodular import is_submodular

DEFAULT_MAX_CHECKS = 5_000_000

BUYER = "buyer"
SELLER = "seller"

T = TypeVar("T", bound=Hashable)


class EnumerationCapExceeded(RuntimeError):
    """The requested audit would exceed the enumeration cap; nothing was checked."""

    def __init__(self, needed: int, cap: int):
        super().__init__(f"audit needs {needed} deviation checks, cap is {cap}")
        self.needed = needed
        self.cap = cap


@dataclass(frozen=True)
class AuditWitness:
    buyer_type: Hashable
    seller_type: Hashable
    side: str
    report: Hashable
    truthful_utility: Fraction
    deviant_utility: Fraction

    @property
    def gain(self) -> Fraction:
        return self.deviant_utility - self.truthful_utility

    def to_json(self) -> dict:
        def enc(t):
            if isinstance(t, tuple):
                return [enc(v) for v in t]
            if isinstance(t, Fraction):
                return rational_str(t)
            return t

        return {
            "buyer": enc(self.buyer_type),
            "seller": enc(self.seller_type),
            "side": self.side,
            "report": enc(self.report),
            "truthful_utility": rational_str(self.truthful_utility),
            "deviant_utility": rational_str(self.deviant_utility),
        }


@dataclass(frozen=True)
class AuditVerdict:
    dsic_on_grid: bool
    witness: AuditWitness | None
    profiles: int
    checks: int

    def __post_init__(self):
        if not self.dsic_on_grid:
            if self.witness is None or self.witness.gain <= 0:
                raise ValueError("a failing verdict needs a witness with a strictly positive gain")

    def to_json(self) -> dict:
        return {
            "dsic_on_grid": self.dsic_on_grid,
            "scope": "finite report grid only",
            "profiles": self.profiles,
            "checks": self.checks,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def audit_types(
    outcome: Callable[[T, T], object],
    buyer_types: Sequence[T],
    seller_types: Sequence[T],
    buyer_utility: Callable[[object, T, T], Fraction],
    seller_utility: Callable[[object, T, T], Fraction],
    max_checks: int = DEFAULT_MAX_CHECKS,
) -> AuditVerdict:
    """Check unilateral deviations over finite type spaces.

    ``outcome(b, s)`` is the mechanism's output on reports (b, s).
    ``buyer_utility(out, b, s)`` is the buyer's expected utility from ``out``
    when the true profile is (b, s); likewise for the seller.  Profiles are
    visited in the given order, buyer deviations before seller deviations,
    and the first profitable deviation is returned.
    """
    nb, ns = len(buyer_types), len(seller_types)
    checks = nb * ns * (nb + ns)
    if checks > max_checks:
        raise EnumerationCapExceeded(checks, max_checks)
    table = {(b, s): outcome(b, s) for b in buyer_types for s in seller_types}
    for b in buyer_types:
        for s in seller_types:
            truth = table[b, s]
            u = buyer_utility(truth, b, s)
            for b_rep in buyer_types:
                dev = buyer_utility(table[b_rep, s], b, s)
                if dev > u:
                    return AuditVerdict(False, AuditWitness(b, s, BUYER, b_rep, u, dev), nb * ns, checks)
            u = seller_utility(truth, b, s)
            for s_rep in seller_types:
                dev = seller_utility(table[b, s_rep], b, s)
                if dev > u:
                    return AuditVerdict(False, AuditWitness(b, s, SELLER, s_rep, u, dev), nb * ns, checks)
    return AuditVerdict(True, None, nb * ns, checks)


def grid_vectors(grid: Sequence[RationalLike], M: int, submodular_only: bool = False) -> list[tuple[Fraction, ...]]:
    """All vectors in grid^M in lexicographic order of the sorted grid."""
    values = sorted({to_rational(g) for g in grid})
    if not values:
        raise ValueError("empty grid")
    vecs = [tuple(v) for v in product(values, repeat=M)]
    if submodular_only:
        vecs = [v for v in vecs if is_submodular(v)]
    return vecs


def _common_denominator(values) -> int:
    den = 1
    for v in values:
        den = math.lcm(den, v.denominator)
    return den


def _int_array(rows, scale: int, dtype) -> np.ndarray:
    return np.array([[int(v * scale) for v in row] for row in rows], dtype=dtype)


def audit_dsic(
    mech,
    grid: Sequence[RationalLike],
    M: int,
    restrict_submodular: bool = False,
    max_checks: int = DEFAULT_MAX_CHECKS,
) -> AuditVerdict:
    """Enumerate grid^M x grid^M profiles and every unilateral deviation inside the grid.

    With ``restrict_submodular`` both the true vectors and the deviations
    range over submodular grid vectors only.  Profiles are visited buyer
    vector first, then seller vector, in lexicographic grid order; buyer
    deviations are tried before seller deviations.
    """
    vecs = grid_vectors(grid, M, restrict_submodular)
    n = len(vecs)
    checks = n * n * 2 * n
    if checks > max_checks:
        raise EnumerationCapExceeded(checks, max_checks)
    table = [[mech(Instance(b, s)).probs[1:] for s in vecs] for b in vecs]

    # exact integer arithmetic: utilities scaled by G, probabilities by D
    D = _common_denominator(p for row in table for probs in row for p in probs)
    G = _common_denominator(v for vec in vecs for v in vec)
    top = max(abs(v) for vec in vecs for v in vec) * G
    dtype = np.int64 if M * top * D < 2**62 else object
    V = _int_array(vecs, G, dtype)
    P = np.empty((n, n, M), dtype=dtype)
    for bi, row in enumerate(table):
        P[bi] = _int_array(row, D, dtype)

    buyer_dev = np.full((n, n), -1)
    seller_dev = np.full((n, n), -1)
    for si in range(n):
        U = V @ P[:, si, :].T  # U[true b, reported b]
        bad = U > np.diag(U)[:, None]
        hit = bad.any(axis=1)
        buyer_dev[hit, si] = bad[hit].argmax(axis=1)
    for bi in range(n):
        U = V @ P[bi, :, :].T  # U[true s, reported s]
        bad = U > np.diag(U)[:, None]
        hit = bad.any(axis=1)
        seller_dev[bi, hit] = bad[hit].argmax(axis=1)

    for bi in range(n):
        for si in range(n):
            for side, devs, truth_vec in ((BUYER, buyer_dev, vecs[bi]), (SELLER, seller_dev, vecs[si])):
                ri = int(devs[bi, si])
                if ri < 0:
                    continue
                if side == BUYER:
                    honest, dev = table[bi][si], table[ri][si]
                else:
                    honest, dev = table[bi][si], table[bi][ri]
                u = sum(p * v for p, v in zip(honest, truth_vec))
                w = sum(p * v for p, v in zip(dev, truth_vec))
                witness = AuditWitness(vecs[bi], vecs[si], side, vecs[ri], Fraction(u), Fraction(w))
                return AuditVerdict(False, witness, n * n, checks)
    return AuditVerdict(True, None, n * n, checks)


def deviation_utilities(mech, truth: Instance, side: str, report: Sequence[RationalLike]) -> tuple[Fraction, Fraction]:
    """(truthful, deviant) expected utility of ``side`` when it misreports ``report``."""
    report = tuple(to_rational(v) for v in report)
    honest = expected_gains(mech(truth), truth)
    if side == BUYER:
        dev = expected_gains(mech(truth.with_buyer(report)), truth)
        return honest.buyer_gain, dev.buyer_gain
    if side == SELLER:
        dev = expected_gains(mech(truth.with_seller(report)), truth)
        return honest.seller_gain, dev.seller_gain
    raise ValueError(f"side must be buyer or seller, got {side!r}")


def replay_witness(mech, witness: AuditWitness) -> tuple[Fraction, Fraction]:
    """Recompute a witness of :func:`audit_dsic` through :func:`expected_gains`."""
    truth = Instance(witness.buyer_type, witness.seller_type)
    return deviation_utilities(mech, truth, witness.side, witness.report)


def audit_utility_share(
    mech,
    inst: Instance,
    alpha: RationalLike,
    side: str = BUYER,
    L: RationalLike = 10**6,
) -> bool:
    """Check that the truthful expected utility of ``side`` is at least alpha times its best feasible utility.

    This is the consequence a ratio-alpha DSIC mechanism must satisfy.  The
    derivation replaces the reporting side by an L-fold scaled copy; at
    finite L it only forces the inequality up to 2 * max|other side| / L,
    and that slack is granted here.
    """
    alpha, L = to_rational(alpha), to_rational(L)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if L < 1:
        raise ValueError("L must be at least 1")
    report = expected_gains(mech(inst), inst)
    feasible = feasible_set(inst)
    if side == BUYER:
        own, other, got = inst.b, inst.s, report.buyer_gain
    elif side == SELLER:
        own, other, got = inst.s, inst.b, report.seller_gain
    else:
        raise ValueError(f"side must be buyer or seller, got {side!r}")
    best = max(own(i) for i in feasible)
    slack = 2 * max(abs(other(i)) for i in range(inst.M + 1)) / L
    return got >= alpha * best - slack

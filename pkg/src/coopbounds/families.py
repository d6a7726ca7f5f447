"""
Adversarial profiles and deviation chains behind the two upper bounds.

A chain is a finite set of (buyer, seller) profiles plus directed misreport
edges.  Every edge says: when the truth is profile ``u``, one agent may
report as in profile ``w`` (the other agent's vector is shared).  The LP in
:mod:`coopbounds.lp.bound` turns each edge into one DSIC inequality.

Two kinds of profile appear:

* chain nodes, the valuation vectors of the induction (levels d = M..0);
* scaled scaffolds, where one side is multiplied by a large factor so that
  the ratio guarantee at that profile bounds the scaled side's own utility.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import Instance, RationalLike, feasible_set, rational_str, to_rational
from .submodular import is_submodular

DEFAULT_EPS = Fraction(1, 1000)
DEFAULT_L = Fraction(10**6)

NODE = "chain-node"
BUYER_SCALED = "buyer-scaled"
SELLER_SCALED = "seller-scaled"


@dataclass(frozen=True)
class Profile:
    instance: Instance
    role: str
    level: int


@dataclass(frozen=True)
class DeviationChain:
    family: str
    M: int
    eps: Fraction
    L: Fraction
    profiles: tuple[Profile, ...]
    buyer_edges: tuple[tuple[int, int], ...]
    seller_edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.L < 1:
            raise ValueError(f"L must be at least 1, got {self.L}")
        n = len(self.profiles)
        for p in self.profiles:
            if p.instance.M != self.M:
                raise ValueError("profile with the wrong number of options")
        for truth, report in self.buyer_edges:
            if not (0 <= truth < n and 0 <= report < n):
                raise ValueError(f"buyer edge {(truth, report)} out of range")
            if self.profiles[truth].instance.seller != self.profiles[report].instance.seller:
                raise ValueError(f"buyer edge {(truth, report)} changes the seller vector")
        for truth, report in self.seller_edges:
            if not (0 <= truth < n and 0 <= report < n):
                raise ValueError(f"seller edge {(truth, report)} out of range")
            if self.profiles[truth].instance.buyer != self.profiles[report].instance.buyer:
                raise ValueError(f"seller edge {(truth, report)} changes the buyer vector")

    def nodes(self) -> list[Profile]:
        """Chain nodes ordered from level M down to level 0."""
        return sorted(
            (p for p in self.profiles if p.role == NODE), key=lambda p: -p.level
        )

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "M": self.M,
            "eps": rational_str(self.eps),
            "L": rational_str(self.L),
            "profiles": [
                {"role": p.role, "level": p.level, **p.instance.to_json()}
                for p in self.profiles
            ],
            "buyer_edges": [list(e) for e in self.buyer_edges],
            "seller_edges": [list(e) for e in self.seller_edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DeviationChain":
        profiles = tuple(
            Profile(Instance.from_json(p), p["role"], int(p["level"]))
            for p in data["profiles"]
        )
        return cls(
            family=data["family"],
            M=int(data["M"]),
            eps=to_rational(data["eps"]),
            L=to_rational(data["L"]),
            profiles=profiles,
            buyer_edges=tuple(tuple(e) for e in data["buyer_edges"]),
            seller_edges=tuple(tuple(e) for e in data.get("seller_edges", ())),
        )


def _check_eps(eps: Fraction) -> None:
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")


def s_eps_vector(M: int, eps: RationalLike) -> tuple[Fraction, ...]:
    """Seller vector with s_i = eps**(M - i): strictly increasing, s_M = 1."""
    eps = to_rational(eps)
    _check_eps(eps)
    return tuple(eps ** (M - i) for i in range(1, M + 1))


def s_star_vector(M: int) -> tuple[Fraction, ...]:
    if M < 1:
        raise ValueError("need M >= 1")
    return tuple(Fraction(i) for i in range(1, M + 1))


def tail_magnitudes(M: int, eps: Fraction, graded: bool = False) -> dict[int, Fraction]:
    """Tail steepness for the node at each level d = M-1..0.

    With ``graded=False`` every level uses 1/eps**M.  The graded schedule
    multiplies by 1/eps**2 per level going down, so that the tail of a
    deviation is always far steeper than the tail of the vector it deviates
    from; otherwise the truthful agent's own tail can absorb an O(1) share of
    the deviation's utility.
    """
    base = 1 / eps**M
    if not graded:
        return {d: base for d in range(M)}
    return {d: base / eps ** (2 * (M - 1 - d)) for d in range(M)}


def general_deviation(M: int, d: int, tail: Fraction) -> tuple[Fraction, ...]:
    """Level d-1 node: ones on 1..d-1, zero at d, -tail on d+1..M."""
    if not 1 <= d <= M:
        raise ValueError(f"level {d} outside 1..{M}")
    return tuple(
        Fraction(1) if i < d else Fraction(0) if i == d else -tail
        for i in range(1, M + 1)
    )


def submodular_deviation(
    b: Sequence[RationalLike], d: int, eps: RationalLike, tail_step: RationalLike | None = None
) -> tuple[Fraction, ...]:
    """Deviation used in the submodular induction step at level d.

    Entries 1..d become b_i - (i/d) b_d, so entry d is 0.  Entries past d
    continue with a constant increment of ``-tail_step`` (default 1/eps**M),
    which keeps the whole vector submodular.
    """
    b = tuple(to_rational(x) for x in b)
    eps = to_rational(eps)
    _check_eps(eps)
    M = len(b)
    if not 1 <= d <= M:
        raise ValueError(f"level {d} outside 1..{M}")
    if not is_submodular(b):
        raise ValueError("submodular_deviation needs a submodular vector")
    if not in_submodular_family(b, d):
        raise ValueError(f"vector is not in the level-{d} family (b_d > 0 >= b_(d+1..M))")
    step = 1 / eps**M if tail_step is None else to_rational(tail_step)
    bd = b[d - 1]
    head = tuple(b[i - 1] - Fraction(i, d) * bd for i in range(1, d + 1))
    tail = tuple(-k * step for k in range(1, M - d + 1))
    out = head + tail
    if not is_submodular(out):
        raise ValueError("tail step too shallow to keep the vector submodular")
    return out


def in_general_family(b: Sequence[Fraction], d: int) -> bool:
    """Ones on 1..d and nonpositive afterwards."""
    return all(x == 1 for x in b[:d]) and all(x <= 0 for x in b[d:])


def in_submodular_family(b: Sequence[Fraction], d: int) -> bool:
    """b_1 >= ... >= b_d > 0 >= b_(d+1) >= ... >= b_M."""
    b = list(b)
    if any(b[i] < b[i + 1] for i in range(len(b) - 1)):
        return False
    return (d == 0 or b[d - 1] > 0) and all(x <= 0 for x in b[d:])


def _scale_factor(scaled: Sequence[Fraction], other: Sequence[Fraction], inst: Instance, L: Fraction) -> Fraction:
    """Factor k such that k * (best feasible value of ``scaled``) = L * max(1, largest feasible |other|)."""
    feas = [i for i in feasible_set(inst) if i > 0]
    top = max(scaled[i - 1] for i in feas)
    if top <= 0:
        raise ValueError("cannot scale a side with no positive feasible value")
    mag = max([Fraction(1)] + [abs(other[i - 1]) for i in feas])
    return L * mag / top


def _scaffolds(
    profiles: list[Profile],
    node_ids: dict[int, int],
    buyer_levels: Sequence[int],
    L: Fraction,
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    buyer_edges, seller_edges = [], []
    for d, pid in sorted(node_ids.items(), reverse=True):
        inst = profiles[pid].instance
        k = _scale_factor(inst.seller, inst.buyer, inst, L)
        profiles.append(
            Profile(inst.with_seller([k * x for x in inst.seller]), SELLER_SCALED, d)
        )
        seller_edges.append((pid, len(profiles) - 1))
    for d in buyer_levels:
        pid = node_ids[d]
        inst = profiles[pid].instance
        k = _scale_factor(inst.buyer, inst.seller, inst, L)
        profiles.append(
            Profile(inst.with_buyer([k * x for x in inst.buyer]), BUYER_SCALED, d)
        )
        buyer_edges.append((pid, len(profiles) - 1))
    return buyer_edges, seller_edges


def _check_params(M: int, eps: Fraction, L: Fraction) -> None:
    if M < 1:
        raise ValueError("need M >= 1")
    _check_eps(eps)
    if L < 1 / eps:
        raise ValueError(f"L must be at least 1/eps = {1 / eps}, got {L}")


def general_chain(
    M: int,
    eps: RationalLike = DEFAULT_EPS,
    L: RationalLike = DEFAULT_L,
    graded: bool = False,
) -> DeviationChain:
    """Chain for general utilities, paired throughout with the seller vector s^eps.

    Nodes c^(M) = (1, ..., 1) down to c^(0); the buyer at level d may report
    the level d-1 node.  Every node gets a seller-scaled scaffold and the
    level-1 node a buyer-scaled one.
    """
    eps, L = to_rational(eps), to_rational(L)
    _check_params(M, eps, L)
    seller = s_eps_vector(M, eps)
    tails = tail_magnitudes(M, eps, graded)
    profiles = [Profile(Instance((Fraction(1),) * M, seller), NODE, M)]
    node_ids = {M: 0}
    for d in range(M, 0, -1):
        profiles.append(Profile(Instance(general_deviation(M, d, tails[d - 1]), seller), NODE, d - 1))
        node_ids[d - 1] = len(profiles) - 1
    chain_edges = [(node_ids[d], node_ids[d - 1]) for d in range(M, 0, -1)]
    buyer_edges, seller_edges = _scaffolds(profiles, node_ids, [1], L)
    return DeviationChain(
        "general", M, eps, L, tuple(profiles),
        tuple(chain_edges + buyer_edges), tuple(seller_edges),
    )


def submodular_chain(
    M: int,
    eps: RationalLike = DEFAULT_EPS,
    L: RationalLike = DEFAULT_L,
    graded: bool = False,
) -> DeviationChain:
    """Chain for submodular utilities, paired throughout with s* = (1, 2, ..., M).

    Starts at (1, ..., 1) and applies :func:`submodular_deviation` for
    d = M..1.  Scaled scaffolds as in :func:`general_chain`; positive scaling
    keeps every vector submodular.
    """
    eps, L = to_rational(eps), to_rational(L)
    _check_params(M, eps, L)
    seller = s_star_vector(M)
    tails = tail_magnitudes(M, eps, graded)
    b = (Fraction(1),) * M
    profiles = [Profile(Instance(b, seller), NODE, M)]
    node_ids = {M: 0}
    for d in range(M, 0, -1):
        b = submodular_deviation(b, d, eps, tail_step=tails[d - 1])
        profiles.append(Profile(Instance(b, seller), NODE, d - 1))
        node_ids[d - 1] = len(profiles) - 1
    chain_edges = [(node_ids[d], node_ids[d - 1]) for d in range(M, 0, -1)]
    buyer_edges, seller_edges = _scaffolds(profiles, node_ids, [1], L)
    return DeviationChain(
        "submodular", M, eps, L, tuple(profiles),
        tuple(chain_edges + buyer_edges), tuple(seller_edges),
    )


def build_chain(family: str, M: int, eps=DEFAULT_EPS, L=DEFAULT_L, graded: bool = False) -> DeviationChain:
    if family == "general":
        return general_chain(M, eps, L, graded)
    if family == "submodular":
        return submodular_chain(M, eps, L, graded)
    raise ValueError(f"unknown family {family!r}")

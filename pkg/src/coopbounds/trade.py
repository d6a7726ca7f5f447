"""
Fixed-price bilateral trade as a cooperation instance.

Two markets are covered: M units of one good (options = number of units
traded) and M distinct goods sold to a unit-demand buyer (options = which
single good is traded).  The oracles here work directly with market values
and never go through :class:`~coopbounds.core.Instance`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .core import Instance, OutcomeDistribution, RationalLike, rational_str, to_rational
from .submodular import random_submodular_vector


def _rats(values) -> tuple[Fraction, ...]:
    return tuple(to_rational(v) for v in values)


@dataclass(frozen=True)
class MultiUnitScenario:
    """beta[i-1] is the buyer's value for i units; sigma[i] the seller's, with sigma[0] = 0."""

    beta: tuple[Fraction, ...]
    sigma: tuple[Fraction, ...]
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta", _rats(self.beta))
        object.__setattr__(self, "sigma", _rats(self.sigma))
        object.__setattr__(self, "p", to_rational(self.p))
        if len(self.sigma) != len(self.beta) + 1:
            raise ValueError("sigma needs M+1 entries (sigma_0..sigma_M) for M buyer values")
        if self.sigma[0] != 0:
            raise ValueError("sigma_0 must be 0")
        if not self.beta:
            raise ValueError("need at least one unit")

    @property
    def M(self) -> int:
        return len(self.beta)

    def to_json(self) -> dict:
        return {
            "type": "multiunit",
            "M": self.M,
            "beta": [rational_str(v) for v in self.beta],
            "sigma": [rational_str(v) for v in self.sigma],
            "p": rational_str(self.p),
        }

    @classmethod
    def from_json(cls, data: dict) -> "MultiUnitScenario":
        sc = cls(tuple(data["beta"]), tuple(data["sigma"]), data["p"])
        if "M" in data and int(data["M"]) != sc.M:
            raise ValueError(f"declared M={data['M']} but beta has {sc.M} entries")
        return sc


@dataclass(frozen=True)
class UnitDemandScenario:
    """Per-item buyer values and prices; the seller's set function enters only via
    sigma(all items) and sigma(all items minus item i)."""

    beta: tuple[Fraction, ...]
    prices: tuple[Fraction, ...]
    sigma_full: Fraction
    sigma_minus: tuple[Fraction, ...]

    def __post_init__(self):
        for name in ("beta", "prices", "sigma_minus"):
            object.__setattr__(self, name, _rats(getattr(self, name)))
        object.__setattr__(self, "sigma_full", to_rational(self.sigma_full))
        if not len(self.beta) == len(self.prices) == len(self.sigma_minus) > 0:
            raise ValueError("beta, prices and sigma_minus must all have length M >= 1")

    @property
    def M(self) -> int:
        return len(self.beta)

    def to_json(self) -> dict:
        return {
            "type": "unitdemand",
            "M": self.M,
            "beta": [rational_str(v) for v in self.beta],
            "prices": [rational_str(v) for v in self.prices],
            "sigma_full": rational_str(self.sigma_full),
            "sigma_minus": [rational_str(v) for v in self.sigma_minus],
        }

    @classmethod
    def from_json(cls, data: dict) -> "UnitDemandScenario":
        sc = cls(tuple(data["beta"]), tuple(data["prices"]), data["sigma_full"], tuple(data["sigma_minus"]))
        if "M" in data and int(data["M"]) != sc.M:
            raise ValueError(f"declared M={data['M']} but beta has {sc.M} entries")
        return sc

    @classmethod
    def additive_seller(cls, beta, prices, item_values) -> "UnitDemandScenario":
        vals = _rats(item_values)
        full = sum(vals, Fraction(0))
        return cls(beta, prices, full, tuple(full - v for v in vals))


def scenario_from_json(data: dict):
    kind = data.get("type")
    if kind == "multiunit" or (kind is None and "sigma" in data):
        return MultiUnitScenario.from_json(data)
    if kind == "unitdemand" or (kind is None and "sigma_minus" in data):
        return UnitDemandScenario.from_json(data)
    raise ValueError("scenario JSON is neither multiunit nor unitdemand")


def reduce_multiunit(sc: MultiUnitScenario) -> Instance:
    """b_i = beta_i - p i ;  s_i = p i + sigma_(M-i) - sigma_M."""
    M, p = sc.M, sc.p
    buyer = tuple(sc.beta[i - 1] - p * i for i in range(1, M + 1))
    seller = tuple(p * i + sc.sigma[M - i] - sc.sigma[M] for i in range(1, M + 1))
    return Instance(buyer, seller)


def reduce_unitdemand(sc: UnitDemandScenario) -> Instance:
    """b_i = beta_i - p_i ;  s_i = p_i + sigma(all minus i) - sigma(all)."""
    buyer = tuple(b - p for b, p in zip(sc.beta, sc.prices))
    seller = tuple(p + sm - sc.sigma_full for p, sm in zip(sc.prices, sc.sigma_minus))
    return Instance(buyer, seller)


def multiunit_from_instance(inst: Instance, p: RationalLike) -> MultiUnitScenario:
    """Inverse of :func:`reduce_multiunit` at price p."""
    p = to_rational(p)
    M = inst.M
    beta = tuple(inst.b(i) + p * i for i in range(1, M + 1))
    # s_i = p i + sigma_(M-i) - sigma_M  with sigma_0 = 0 fixes sigma_M = p M - s_M
    sigma_M = p * M - inst.s(M)
    sigma = [Fraction(0)] * (M + 1)
    sigma[M] = sigma_M
    for i in range(1, M):
        sigma[M - i] = inst.s(i) - p * i + sigma_M
    return MultiUnitScenario(beta, tuple(sigma), p)


def gft_oracle_multiunit(sc: MultiUnitScenario) -> Fraction:
    """Largest welfare gain over trade sizes that both sides accept at the posted price."""
    best = Fraction(0)
    M = sc.M
    for k in range(M + 1):
        pay = sc.p * k
        bought = sc.beta[k - 1] if k else Fraction(0)
        kept = sc.sigma[M - k]
        buyer_ok = bought >= pay
        seller_ok = pay + kept >= sc.sigma[M]
        if buyer_ok and seller_ok:
            best = max(best, (bought + kept) - sc.sigma[M])
    return best


def gft_oracle_unitdemand(sc: UnitDemandScenario) -> Fraction:
    """Largest welfare gain over single-item sales both sides accept."""
    best = Fraction(0)
    for beta, price, kept in zip(sc.beta, sc.prices, sc.sigma_minus):
        if beta >= price and price + kept >= sc.sigma_full:
            best = max(best, beta + kept - sc.sigma_full)
    return best


# -- additive special cases ---------------------------------------------------


def additive_multiunit(M: int, beta1: RationalLike, sigma1: RationalLike, p: RationalLike) -> MultiUnitScenario:
    b1, s1 = to_rational(beta1), to_rational(sigma1)
    return MultiUnitScenario(
        tuple(i * b1 for i in range(1, M + 1)),
        tuple(i * s1 for i in range(M + 1)),
        p,
    )


def additive_multiunit_mechanism(M: int, p: RationalLike):
    """Per-unit reports (beta_1, sigma_1): trade all M units iff beta_1 >= p >= sigma_1."""
    p = to_rational(p)

    def rule(beta1: RationalLike, sigma1: RationalLike) -> OutcomeDistribution:
        trade = to_rational(beta1) >= p >= to_rational(sigma1)
        return OutcomeDistribution.point(M, M if trade else 0)

    return rule


def per_item_additive_mechanism(prices: Sequence[RationalLike]):
    """Item-wise reports (beta_i, sigma_i): item i changes hands iff beta_i >= p_i >= sigma_i."""
    prices = _rats(prices)

    def rule(beta: Sequence[RationalLike], sigma: Sequence[RationalLike]) -> frozenset[int]:
        return frozenset(
            i for i, (b, s, p) in enumerate(zip(_rats(beta), _rats(sigma), prices), start=1)
            if b >= p >= s
        )

    return rule


def additive_items_welfare(traded, beta, sigma) -> Fraction:
    return sum((to_rational(beta[i - 1]) - to_rational(sigma[i - 1]) for i in traded), Fraction(0))


def gft_oracle_additive_items(beta, sigma, prices) -> Fraction:
    """Best bundle over all 2^M subsets in which every traded item is a sale both
    sides accept at its own price."""
    beta, sigma, prices = _rats(beta), _rats(sigma), _rats(prices)
    best = Fraction(0)
    for mask in product((False, True), repeat=len(beta)):
        items = [i for i, on in enumerate(mask) if on]
        if all(beta[i] - prices[i] >= 0 and prices[i] - sigma[i] >= 0 for i in items):
            best = max(best, sum((beta[i] - sigma[i] for i in items), Fraction(0)))
    return best


# -- random scenarios ---------------------------------------------------------


def _rand_rat(rng: random.Random, lo: int, hi: int, den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_multiunit(M: int, rng: random.Random, submodular: bool = False) -> MultiUnitScenario:
    p = _rand_rat(rng, 0, 5)
    if submodular:
        beta = random_submodular_vector(M, -2, 8, rng)
        sigma = (Fraction(0),) + random_submodular_vector(M, -2, 8, rng)
    else:
        beta = tuple(_rand_rat(rng, -5, 10 * M) for _ in range(M))
        sigma = (Fraction(0),) + tuple(_rand_rat(rng, -5, 10 * M) for _ in range(M))
    return MultiUnitScenario(beta, sigma, p)

"""
Bilateral cooperation model with M options and a no-cooperation option 0.

Utilities, probabilities and ratios are exact ``Fraction`` values. Option 0
is implicit in an :class:`Instance` (both utilities zero) but explicit in an
:class:`OutcomeDistribution`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[Fraction, int, str, float]


def to_rational(x: RationalLike) -> Fraction:
    """Parse an int, Fraction, "p/q" / decimal string, or float into a Fraction.

    Floats go through ``repr`` so that 0.5 becomes 1/2 rather than its
    binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not utilities")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rational_str(x: Fraction) -> str:
    return str(x)


def _rational_tuple(values: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(to_rational(v) for v in values)


@dataclass(frozen=True)
class Instance:
    """Buyer and seller utilities for options 1..M."""

    buyer: tuple[Fraction, ...]
    seller: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "buyer", _rational_tuple(self.buyer))
        object.__setattr__(self, "seller", _rational_tuple(self.seller))
        if len(self.buyer) != len(self.seller):
            raise ValueError(
                f"buyer has {len(self.buyer)} options but seller has {len(self.seller)}"
            )
        if len(self.buyer) == 0:
            raise ValueError("an instance needs at least one option")

    @property
    def M(self) -> int:
        return len(self.buyer)

    def b(self, i: int) -> Fraction:
        """Buyer utility of option i, with b_0 = 0."""
        return Fraction(0) if i == 0 else self.buyer[i - 1]

    def s(self, i: int) -> Fraction:
        return Fraction(0) if i == 0 else self.seller[i - 1]

    def welfare(self, i: int) -> Fraction:
        return self.b(i) + self.s(i)

    def with_buyer(self, buyer: Sequence[RationalLike]) -> "Instance":
        return Instance(tuple(buyer), self.seller)

    def with_seller(self, seller: Sequence[RationalLike]) -> "Instance":
        return Instance(self.buyer, tuple(seller))

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "buyer": [rational_str(v) for v in self.buyer],
            "seller": [rational_str(v) for v in self.seller],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Instance":
        try:
            inst = cls(tuple(data["buyer"]), tuple(data["seller"]))
        except KeyError as exc:
            raise ValueError(f"instance JSON is missing {exc}") from None
        if "M" in data and int(data["M"]) != inst.M:
            raise ValueError(f"declared M={data['M']} but vectors have length {inst.M}")
        return inst


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of options 0..M; entries are nonnegative and sum to 1."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = _rational_tuple(self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 2:
            raise ValueError("a distribution covers option 0 and at least one option")
        if any(p < 0 for p in probs):
            raise ValueError(f"negative probability in {[str(p) for p in probs]}")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")

    @property
    def M(self) -> int:
        return len(self.probs) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.probs[i]

    @classmethod
    def point(cls, M: int, option: int) -> "OutcomeDistribution":
        probs = [Fraction(0)] * (M + 1)
        probs[option] = Fraction(1)
        return cls(tuple(probs))

    def to_json(self) -> dict:
        return {"probs": [rational_str(p) for p in self.probs]}

    @classmethod
    def from_json(cls, data: dict) -> "OutcomeDistribution":
        return cls(tuple(data["probs"]))


@dataclass(frozen=True)
class GainReport:
    buyer_gain: Fraction
    seller_gain: Fraction
    total_gain: Fraction
    opt: Fraction
    ratio: Fraction | None = field(default=None)

    def to_json(self) -> dict:
        return {
            "buyer_gain": rational_str(self.buyer_gain),
            "seller_gain": rational_str(self.seller_gain),
            "total_gain": rational_str(self.total_gain),
            "opt": rational_str(self.opt),
            "ratio": None if self.ratio is None else rational_str(self.ratio),
        }


def feasible_set(inst: Instance) -> frozenset[int]:
    """Options where both agents get nonnegative utility; always contains 0."""
    return frozenset(
        [0] + [i for i in range(1, inst.M + 1) if inst.b(i) >= 0 and inst.s(i) >= 0]
    )


def opt_gain(inst: Instance) -> tuple[Fraction, int]:
    """Best total utility over feasible options and the smallest index attaining it."""
    best, best_i = Fraction(0), 0
    for i in sorted(feasible_set(inst)):
        w = inst.welfare(i)
        if w > best:
            best, best_i = w, i
    return best, best_i


def expected_gains(r: OutcomeDistribution, inst: Instance) -> GainReport:
    """Expected utilities when outcome ``r`` is executed on the true instance ``inst``."""
    if r.M != inst.M:
        raise ValueError(f"distribution has M={r.M} but instance has M={inst.M}")
    buyer = sum((r[i] * inst.b(i) for i in range(1, inst.M + 1)), Fraction(0))
    seller = sum((r[i] * inst.s(i) for i in range(1, inst.M + 1)), Fraction(0))
    total = buyer + seller
    opt, _ = opt_gain(inst)
    ratio = total / opt if opt > 0 else None
    return GainReport(buyer, seller, total, opt, ratio)


def apply_ir_veto(r: OutcomeDistribution, reported: Instance) -> OutcomeDistribution:
    """Move the mass of every option that is not feasible under ``reported`` to option 0."""
    if r.M != reported.M:
        raise ValueError(f"distribution has M={r.M} but instance has M={reported.M}")
    feasible = feasible_set(reported)
    probs = [p if i in feasible else Fraction(0) for i, p in enumerate(r.probs)]
    probs[0] += 1 - sum(probs)
    return OutcomeDistribution(tuple(probs))


@dataclass(frozen=True)
class RatioResult:
    """Worst ratio over a batch of instances.

    ``ratio`` is None when every instance had OPT = 0. ``violations`` lists
    OPT = 0 instances on which the mechanism produced a negative total gain.
    """

    ratio: Fraction | None
    witness: Instance | None
    evaluated: int
    skipped: int
    violations: tuple[Instance, ...] = ()

    @property
    def defined(self) -> bool:
        return self.ratio is not None


def competitive_ratio_over(mech, instances: Iterable[Instance]) -> RatioResult:
    """Minimum of G/OPT over instances with OPT > 0, evaluated on truthful reports."""
    worst: Fraction | None = None
    witness = None
    evaluated = skipped = 0
    violations = []
    for inst in instances:
        report = expected_gains(mech(inst), inst)
        if report.opt == 0:
            skipped += 1
            if report.total_gain < 0:
                violations.append(inst)
            continue
        evaluated += 1
        if worst is None or report.ratio < worst:
            worst, witness = report.ratio, inst
    return RatioResult(worst, witness, evaluated, skipped, tuple(violations))


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)

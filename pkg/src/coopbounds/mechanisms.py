"""
Mechanisms map a reported instance to a distribution over options 0..M.

The two randomized mechanisms ignore the reports except for the final
individual-rationality veto, which is what makes them truthful.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .core import (
    Instance,
    OutcomeDistribution,
    RationalLike,
    apply_ir_veto,
    feasible_set,
    to_rational,
)


@dataclass(frozen=True)
class Mechanism:
    name: str
    rule: Callable[[Instance], OutcomeDistribution]
    M: int | None = None

    def __call__(self, reported: Instance) -> OutcomeDistribution:
        if self.M is not None and reported.M != self.M:
            raise ValueError(f"{self.name} is defined for M={self.M}, got M={reported.M}")
        return self.rule(reported)


@lru_cache(maxsize=None)
def harmonic(M: int) -> Fraction:
    """Exact M-th harmonic number."""
    if M < 1:
        raise ValueError("harmonic number needs M >= 1")
    return sum((Fraction(1, j) for j in range(1, M + 1)), Fraction(0))


def _check_M(M: int) -> None:
    if not isinstance(M, int) or M < 1:
        raise ValueError(f"need a positive number of options, got {M!r}")


def uniform_weights(M: int) -> tuple[Fraction, ...]:
    _check_M(M)
    return (Fraction(0),) + (Fraction(1, M),) * M


def decreasing_weights(M: int) -> tuple[Fraction, ...]:
    _check_M(M)
    h = harmonic(M)
    return (Fraction(0),) + tuple(1 / (i * h) for i in range(1, M + 1))


def fixed_distribution(
    weights: Sequence[RationalLike], veto: bool = True, name: str | None = None
) -> Mechanism:
    """Mechanism that emits ``weights`` whatever the reports, optionally IR-vetoed."""
    base = OutcomeDistribution(tuple(to_rational(w) for w in weights))
    M = base.M

    if veto:
        def rule(reported: Instance) -> OutcomeDistribution:
            return apply_ir_veto(base, reported)
    else:
        def rule(reported: Instance) -> OutcomeDistribution:
            return base

    if name is None:
        name = "dist:" + ",".join(str(p) for p in base.probs) + (":veto" if veto else "")
    return Mechanism(name, rule, M)


def uniform_random(M: int) -> Mechanism:
    """Pick option i in 1..M with probability 1/M, then let either agent veto it."""
    return fixed_distribution(uniform_weights(M), veto=True, name="ur")


def decreasing_random(M: int) -> Mechanism:
    """Pick option i with probability 1/(i H_M), then let either agent veto it."""
    return fixed_distribution(decreasing_weights(M), veto=True, name="dr")


def reported_welfare_argmax(M: int) -> Mechanism:
    """Deterministically pick the feasible option of largest reported welfare.

    Not truthful; kept as a foil for the DSIC auditor.
    """
    _check_M(M)

    def rule(reported: Instance) -> OutcomeDistribution:
        best_i, best = 0, Fraction(0)
        for i in sorted(feasible_set(reported)):
            if reported.welfare(i) > best:
                best_i, best = i, reported.welfare(i)
        return OutcomeDistribution.point(reported.M, best_i)

    return Mechanism("welfare-argmax", rule, M)


def parse_mechanism(spec: str, M: int) -> Mechanism:
    """Build a mechanism from a CLI string.

    Accepted forms: ``ur``, ``dr``, ``welfare-argmax`` and
    ``dist:p0,p1,...,pM`` with an optional ``:veto`` suffix.
    """
    spec = spec.strip()
    if spec == "ur":
        return uniform_random(M)
    if spec == "dr":
        return decreasing_random(M)
    if spec == "welfare-argmax":
        return reported_welfare_argmax(M)
    if spec.startswith("dist:"):
        body = spec[len("dist:"):]
        veto = False
        if body.endswith(":veto"):
            body, veto = body[: -len(":veto")], True
        weights = [to_rational(w) for w in body.split(",") if w.strip()]
        if len(weights) != M + 1:
            raise ValueError(f"dist needs {M + 1} weights for M={M}, got {len(weights)}")
        return fixed_distribution(weights, veto=veto)
    raise ValueError(f"unknown mechanism {spec!r}")

"""Decreasing-marginal-returns utility sequences, anchored at v_0 = 0."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import accumulate
from typing import Sequence

from .core import RationalLike, to_rational


def increments(v: Sequence[RationalLike]) -> list[Fraction]:
    """Marginal values v_i - v_{i-1} for i = 1..M with v_0 = 0."""
    vals = [Fraction(0)] + [to_rational(x) for x in v]
    return [vals[i] - vals[i - 1] for i in range(1, len(vals))]


def is_submodular(v: Sequence[RationalLike]) -> bool:
    inc = increments(v)
    return all(inc[i + 1] <= inc[i] for i in range(len(inc) - 1))


def check_ratio_monotone(v: Sequence[RationalLike]) -> bool:
    """True iff v_i / i is nonincreasing over i = 1..M."""
    vals = [to_rational(x) for x in v]
    ratios = [x / i for i, x in enumerate(vals, start=1)]
    return all(ratios[i + 1] <= ratios[i] for i in range(len(ratios) - 1))


def from_increments(inc: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(accumulate(to_rational(x) for x in inc))


def random_submodular_vector(
    M: int,
    low: RationalLike = -10,
    high: RationalLike = 10,
    rng: random.Random | None = None,
    denominator: int = 4,
) -> tuple[Fraction, ...]:
    """Random submodular vector of length M.

    Increments are drawn from the grid ``{low, low + 1/denominator, ..., high}``,
    sorted into nonincreasing order and prefix-summed from v_0 = 0.
    """
    if M < 1:
        raise ValueError("need M >= 1")
    lo, hi = to_rational(low), to_rational(high)
    if hi < lo:
        raise ValueError("empty increment bounds")
    rng = rng or random.Random()
    steps = int((hi - lo) * denominator)
    inc = sorted(
        (lo + Fraction(rng.randint(0, steps), denominator) for _ in range(M)),
        reverse=True,
    )
    return from_increments(inc)

"""Seeded random instances and the tightness witnesses for UR and DR."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

from .core import Instance
from .submodular import random_submodular_vector


def random_vector(M: int, rng: random.Random, lo: int = -10, hi: int = 10, den: int = 4) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(lo * den, hi * den), den) for _ in range(M))


def random_instance(M: int, rng: random.Random) -> Instance:
    """Utilities on a quarter-integer grid in [-10, 10]; some draws are sparse in
    feasible options so that single-option optima are common."""
    buyer = random_vector(M, rng)
    seller = random_vector(M, rng)
    if rng.random() < 0.25:
        keep = rng.randrange(M)
        buyer = tuple(v if i == keep else -abs(v) - 1 for i, v in enumerate(buyer))
    return Instance(buyer, seller)


def random_submodular_instance(M: int, rng: random.Random) -> Instance:
    return Instance(
        random_submodular_vector(M, -6, 10, rng),
        random_submodular_vector(M, -6, 10, rng),
    )


def instances(M: int, n: int, seed: int, submodular: bool = False) -> Iterator[Instance]:
    rng = random.Random(seed)
    draw = random_submodular_instance if submodular else random_instance
    for _ in range(n):
        yield draw(M, rng)


def tight_instance_ur(M: int) -> Instance:
    """All gain sits in option 1, the only feasible one: UR gets exactly 1/M of it."""
    return Instance((1,) + (-1,) * (M - 1), (1,) * M)


def tight_instance_dr(M: int) -> Instance:
    """b_i = i, s = 0: both submodular, OPT = M, DR gets M / H_M."""
    return Instance(tuple(range(1, M + 1)), (0,) * M)

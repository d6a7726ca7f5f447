"""Truthful cooperation with fixed prices: randomized mechanisms, DSIC audits and LP-certified ratio bounds."""

from .core import (
    GainReport,
    Instance,
    OutcomeDistribution,
    apply_ir_veto,
    competitive_ratio_over,
    expected_gains,
    feasible_set,
    opt_gain,
)
from .mechanisms import (
    Mechanism,
    decreasing_random,
    fixed_distribution,
    harmonic,
    reported_welfare_argmax,
    uniform_random,
)

__version__ = "0.1.0"

__all__ = [
    "GainReport",
    "Instance",
    "Mechanism",
    "OutcomeDistribution",
    "apply_ir_veto",
    "competitive_ratio_over",
    "decreasing_random",
    "expected_gains",
    "feasible_set",
    "fixed_distribution",
    "harmonic",
    "opt_gain",
    "reported_welfare_argmax",
    "uniform_random",
]

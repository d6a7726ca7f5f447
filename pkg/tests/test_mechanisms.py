import math
import random
from fractions import Fraction as F

import pytest

from coopbounds.core import Instance, expected_gains, opt_gain
from coopbounds.mechanisms import (
    decreasing_random,
    decreasing_weights,
    fixed_distribution,
    harmonic,
    parse_mechanism,
    reported_welfare_argmax,
    uniform_random,
    uniform_weights,
)
from coopbounds.sampling import (
    random_instance,
    random_submodular_instance,
    tight_instance_dr,
    tight_instance_ur,
)

EX = Instance((1, -1, 0), (1, 1, -5))


def test_uniform_random_examples():
    assert uniform_random(3)(EX).probs == (F(2, 3), F(1, 3), 0, 0)
    assert uniform_random(1)(Instance((2,), (0,))).probs == (0, 1)
    assert uniform_random(2)(Instance((1, 1), (1, 1))).probs == (0, F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        uniform_random(0)


def test_decreasing_random_examples():
    all_feasible = Instance((1, 1, 1), (1, 1, 1))
    assert decreasing_random(3)(all_feasible).probs == (0, F(6, 11), F(3, 11), F(2, 11))
    only_two = Instance((-1, 1, -1), (1, 1, 1))
    assert decreasing_random(3)(only_two).probs == (F(8, 11), 0, F(3, 11), 0)
    for inst in (Instance((1,), (1,)), Instance((-1,), (1,))):
        assert decreasing_random(1)(inst) == uniform_random(1)(inst)
    with pytest.raises(ValueError):
        decreasing_random(0)


def test_decreasing_weights_sum_to_one_without_option_zero():
    for M in range(1, 12):
        w = decreasing_weights(M)
        assert w[0] == 0 and sum(w) == 1


@pytest.mark.parametrize("M, expected", [(1, F(1)), (3, F(11, 6)), (4, F(25, 12))])
def test_harmonic_examples(M, expected):
    assert harmonic(M) == expected


def test_harmonic_bracket():
    for M in range(1, 200):
        h = float(harmonic(M))
        assert math.log(M) + 1 / M - 1e-12 <= h <= math.log(M) + 1 + 1e-12


def test_fixed_distribution_matches_named_mechanisms():
    rng = random.Random(3)
    for _ in range(200):
        inst = random_instance(3, rng)
        assert fixed_distribution(uniform_weights(3))(inst) == uniform_random(3)(inst)
        assert fixed_distribution(decreasing_weights(3))(inst) == decreasing_random(3)(inst)


def test_no_trade_distribution_has_ratio_zero():
    mech = fixed_distribution((1, 0, 0))
    inst = Instance((1, 1), (1, 1))
    assert expected_gains(mech(inst), inst).ratio == 0


def test_fixed_distribution_rejects_invalid_weights():
    with pytest.raises(ValueError):
        fixed_distribution((F(1, 2), F(1, 3)))


def test_fixed_distribution_without_veto_ignores_reports():
    mech = fixed_distribution((0, F(1, 2), F(1, 2)), veto=False)
    assert mech(Instance((-5, -5), (-5, -5))).probs == (0, F(1, 2), F(1, 2))


def test_welfare_argmax_examples():
    mech = reported_welfare_argmax(2)
    assert mech(Instance((1, 2), (2, 1))).probs == (0, 1, 0)
    assert mech(Instance((0, 2), (2, 1))).probs == (0, 0, 1)
    assert mech(Instance((-1, 2), (2, -1))).probs == (1, 0, 0)


def test_mechanism_rejects_wrong_M():
    with pytest.raises(ValueError):
        uniform_random(2)(EX)


def test_parse_mechanism():
    assert parse_mechanism("ur", 3).name == "ur"
    assert parse_mechanism("dr", 3)(EX) == decreasing_random(3)(EX)
    m = parse_mechanism("dist:0,1/2,1/2:veto", 2)
    assert m(Instance((1, -1), (1, 1))).probs == (F(1, 2), F(1, 2), 0)
    m = parse_mechanism("dist:0,1/2,1/2", 2)
    assert m(Instance((1, -1), (1, 1))).probs == (0, F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        parse_mechanism("dist:1,0", 2)
    with pytest.raises(ValueError):
        parse_mechanism("vcg", 2)


@pytest.mark.parametrize("M", range(1, 7))
def test_ur_guarantee_sampled(M):
    rng = random.Random(M)
    mech = uniform_random(M)
    for _ in range(3000):
        inst = random_instance(M, rng)
        opt, _ = opt_gain(inst)
        assert expected_gains(mech(inst), inst).total_gain * M >= opt


@pytest.mark.parametrize("M", range(1, 7))
def test_dr_guarantee_sampled_on_submodular(M):
    rng = random.Random(100 + M)
    mech = decreasing_random(M)
    for _ in range(3000):
        inst = random_submodular_instance(M, rng)
        opt, _ = opt_gain(inst)
        assert expected_gains(mech(inst), inst).total_gain * harmonic(M) >= opt


def test_dr_guarantee_needs_submodularity():
    # all gain sits at the largest option, which DR picks least often
    inst = Instance((0, 0, 6), (0, 0, 0))
    rep = expected_gains(decreasing_random(3)(inst), inst)
    assert rep.ratio < 1 / harmonic(3)


@pytest.mark.parametrize("M", range(1, 7))
def test_tightness_witnesses(M):
    ur = tight_instance_ur(M)
    assert expected_gains(uniform_random(M)(ur), ur).ratio == F(1, M)
    dr = tight_instance_dr(M)
    assert expected_gains(decreasing_random(M)(dr), dr).ratio == 1 / harmonic(M)

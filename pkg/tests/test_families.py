from fractions import Fraction as F

import pytest

from coopbounds.core import Instance, feasible_set, opt_gain
from coopbounds.families import (
    BUYER_SCALED,
    NODE,
    SELLER_SCALED,
    DeviationChain,
    build_chain,
    general_chain,
    in_general_family,
    in_submodular_family,
    submodular_deviation,
    s_eps_vector,
    s_star_vector,
    submodular_chain,
    tail_magnitudes,
)
from coopbounds.submodular import is_submodular

EPS = F(1, 10)


def test_s_eps_examples():
    assert s_eps_vector(3, EPS) == (F(1, 100), F(1, 10), 1)
    assert s_eps_vector(1, EPS) == (1,)
    with pytest.raises(ValueError):
        s_eps_vector(2, 0)


def test_s_star():
    assert s_star_vector(4) == (1, 2, 3, 4)
    assert is_submodular(s_star_vector(4))


def test_general_chain_M2_nodes():
    chain = general_chain(2, EPS, 100)
    vecs = [p.instance.buyer for p in chain.nodes()]
    assert vecs == [(1, 1), (1, 0), (0, -100)]
    assert all(p.instance.seller == (F(1, 10), 1) for p in chain.nodes())


def _node_ids(chain):
    return {p.level: i for i, p in enumerate(chain.profiles) if p.role == NODE}


@pytest.mark.parametrize("M", range(1, 6))
@pytest.mark.parametrize("family", ["general", "submodular"])
def test_chain_shape(family, M):
    chain = build_chain(family, M)
    ids = _node_ids(chain)
    assert sorted(ids) == list(range(M + 1))
    chain_edges = [e for e in chain.buyer_edges if chain.profiles[e[1]].role == NODE]
    assert chain_edges == [(ids[d], ids[d - 1]) for d in range(M, 0, -1)]
    roles = [p.role for p in chain.profiles]
    assert roles.count(SELLER_SCALED) == M + 1
    assert roles.count(BUYER_SCALED) == 1


@pytest.mark.parametrize("M", range(1, 6))
def test_general_nodes_lie_in_their_family(M):
    for p in general_chain(M).nodes():
        assert in_general_family(p.instance.buyer, p.level)


@pytest.mark.parametrize("M", range(1, 6))
def test_general_node_opt_sits_at_its_level(M):
    """Oracle: brute-force the best feasible option of each node from the definitions."""
    for p in general_chain(M).nodes():
        b, s = p.instance.buyer, p.instance.seller
        best, arg = F(0), 0
        for i in range(1, M + 1):
            if b[i - 1] >= 0 and s[i - 1] >= 0 and b[i - 1] + s[i - 1] > best:
                best, arg = b[i - 1] + s[i - 1], i
        assert opt_gain(p.instance) == (best, arg)
        assert arg == max(p.level, 1)


@pytest.mark.parametrize("M", range(1, 6))
@pytest.mark.parametrize("graded", [False, True])
def test_submodular_nodes_are_submodular_and_in_family(M, graded):
    for p in submodular_chain(M, graded=graded).nodes():
        assert is_submodular(p.instance.buyer)
        assert in_submodular_family(p.instance.buyer, p.level)


def test_submodular_chain_M2():
    chain = submodular_chain(2, EPS, 100)
    vecs = [p.instance.buyer for p in chain.nodes()]
    assert vecs[0] == (1, 1)
    assert vecs[1] == (F(1, 2), 0)
    assert vecs[2] == (0, -100)


def test_submodular_deviation_examples():
    assert submodular_deviation((3, 2, 1), 3, EPS) == (F(8, 3), F(4, 3), 0)
    assert submodular_deviation((1, 1, 1), 3, EPS) == (F(2, 3), F(1, 3), 0)
    assert submodular_deviation((2, 1, 0), 2, EPS) == (F(3, 2), 0, -1000)


def test_submodular_deviation_rejects_bad_input():
    with pytest.raises(ValueError):
        submodular_deviation((1, 3, 4), 3, EPS)
    with pytest.raises(ValueError):
        submodular_deviation((1, 1, 1), 4, EPS)
    with pytest.raises(ValueError):
        submodular_deviation((1, 0, 0), 3, EPS)  # b_3 = 0 is not positive


def test_graded_tails_grow_as_level_drops():
    tails = tail_magnitudes(3, EPS, graded=True)
    assert tails[2] == 1000 and tails[1] == 10**5 and tails[0] == 10**7
    assert set(tail_magnitudes(3, EPS).values()) == {1000}


@pytest.mark.parametrize("family", ["general", "submodular"])
@pytest.mark.parametrize("M", range(1, 5))
def test_scaffolds_keep_feasibility_and_counterpart(family, M):
    chain = build_chain(family, M)
    nodes = {p.level: p for p in chain.nodes()}
    for p in chain.profiles:
        if p.role == NODE:
            continue
        base = nodes[p.level].instance
        assert feasible_set(p.instance) == feasible_set(base)
        if p.role == SELLER_SCALED:
            assert p.instance.buyer == base.buyer
            new, old, other = p.instance.seller, base.seller, base.buyer
        else:
            assert p.instance.seller == base.seller
            new, old, other = p.instance.buyer, base.buyer, base.seller
        ratio = {new[i] / old[i] for i in range(M) if old[i]}
        assert len(ratio) == 1
        # the scaled side's best feasible value is L times the other side's largest feasible magnitude
        feas = [i - 1 for i in feasible_set(base) if i]
        assert max(new[i] for i in feas) == chain.L * max([F(1)] + [abs(other[i]) for i in feas])
        if family == "submodular":
            assert is_submodular(p.instance.buyer) and is_submodular(p.instance.seller)


def test_edges_share_the_counterpart_vector():
    chain = general_chain(3)
    for u, w in chain.buyer_edges:
        assert chain.profiles[u].instance.seller == chain.profiles[w].instance.seller
    for u, w in chain.seller_edges:
        assert chain.profiles[u].instance.buyer == chain.profiles[w].instance.buyer


def test_chain_json_roundtrip():
    chain = submodular_chain(3, EPS, 1000)
    assert DeviationChain.from_json(chain.to_json()) == chain


def test_chain_validation():
    chain = general_chain(2, EPS, 100)
    with pytest.raises(ValueError):
        DeviationChain("general", 2, EPS, 100, chain.profiles, ((0, 99),))
    bad = chain.profiles + (chain.profiles[0].__class__(Instance((1, 1), (5, 5)), NODE, 2),)
    with pytest.raises(ValueError):
        DeviationChain("general", 2, EPS, 100, bad, ((0, len(bad) - 1),))


def test_parameter_errors():
    with pytest.raises(ValueError):
        general_chain(0)
    with pytest.raises(ValueError):
        general_chain(2, EPS, 5)  # L below 1/eps
    with pytest.raises(ValueError):
        build_chain("additive", 2)

"""Ascending-cost path emission, dominance, and the feasibility witness.

The five-node fixture has exactly four simple routes, so every expected
value below was worked out by hand: costs 3, 4, 6, 10, with the cost-6
route dominated because it pays tolls on a superset of the cost-4 route's
arcs at higher cost.
"""

from fractions import Fraction

import pytest

from tollgate.enumeration import (
    ConsistencyError,
    dominance_filter,
    enumerate_paths,
    is_bilevel_feasible,
    perturb_costs,
)
from tollgate.network import Arc, Commodity, Network

from bruteforce import all_simple_paths, naive_feasible_paths


def test_emission_order_and_costs(fig_enum):
    assert [p.cost for p in fig_enum.paths] == [3, 4, 6, 10]
    assert [p.arcs for p in fig_enum.paths] == [
        (0, 1, 2),
        (0, 5),
        (0, 1, 3, 4),
        (6,),
    ]
    assert fig_enum.stopped_at_tollfree


def test_feasible_set_drops_dominated(fig_enum):
    bf = fig_enum.feasible_set()
    assert [p.cost for p in bf.paths] == [3, 4, 10]
    assert bf.exhaustive
    assert len(bf) == 3
    assert bf.tolled_universe == frozenset({0, 1, 2})
    assert bf.arc_union == frozenset({0, 1, 2, 5, 6})


def test_emission_matches_exhaustive_search(fig):
    emitted = {p.arcs for p in enumerate_paths(fig.network, fig.commodities[0]).paths}
    assert emitted == set(all_simple_paths(fig.network, 0, 4))


def test_feasible_set_matches_naive_filter(fig, fig_bfset):
    naive = naive_feasible_paths(fig.network, 0, 4)
    assert [p.arcs for p in fig_bfset.paths] == naive


def test_cap_truncates(fig):
    res = enumerate_paths(fig.network, fig.commodities[0], cap=2)
    assert len(res.paths) == 2
    assert not res.stopped_at_tollfree
    assert not res.feasible_set().exhaustive


def test_cap_validation(fig):
    with pytest.raises(ValueError):
        enumerate_paths(fig.network, fig.commodities[0], cap=0)


def test_no_route_is_an_error():
    net = Network(3, [Arc(0, 0, 1, Fraction(1), False)])
    with pytest.raises(ConsistencyError):
        enumerate_paths(net, Commodity(0, 2, Fraction(1)))


def test_dominance_filter_rejects_cost_ties(fig):
    p = fig.network.path([0, 1, 2])
    with pytest.raises(ValueError, match="strictly increasing"):
        dominance_filter([p, p])


def test_dominance_filter_infers_exhaustive(fig):
    spine = fig.network.path([0, 1, 2])
    free = fig.network.path([6])
    assert dominance_filter([spine, free]).exhaustive
    assert not dominance_filter([spine]).exhaustive


def test_witness_accepts_survivors_rejects_dominated(fig, fig_bfset):
    com = fig.commodities[0]
    for p in fig_bfset.paths:
        assert is_bilevel_feasible(fig.network, p, com)
    dominated = fig.network.path([0, 1, 3, 4])
    assert not is_bilevel_feasible(fig.network, dominated, com)


def test_witness_checks_endpoints(fig):
    com = Commodity(1, 4, Fraction(1))
    wrong = fig.network.path([0, 1, 2])
    with pytest.raises(ValueError):
        is_bilevel_feasible(fig.network, wrong, com)


def test_perturb_is_deterministic_and_tiny(fig):
    a = perturb_costs(fig.network, seed=11)
    b = perturb_costs(fig.network, seed=11)
    assert [x.cost for x in a.arcs] == [x.cost for x in b.arcs]
    bound = min(x.cost for x in fig.network.arcs) / 10**9
    for before, after in zip(fig.network.arcs, a.arcs):
        delta = after.cost - before.cost
        assert 0 < delta <= bound


def test_perturb_keeps_twin_symmetry():
    arcs = [
        Arc(0, 0, 1, Fraction(5), True),
        Arc(1, 1, 0, Fraction(5), True),
        Arc(2, 0, 1, Fraction(9), False),
        Arc(3, 1, 0, Fraction(9), False),
    ]
    net = perturb_costs(Network(2, arcs), seed=3)
    assert net.arc(0).cost == net.arc(1).cost
    assert net.arc(2).cost == net.arc(3).cost
    assert net.arc(0).cost != net.arc(2).cost - 4


def test_perturb_rejects_bad_magnitude(fig):
    with pytest.raises(ValueError):
        perturb_costs(fig.network, seed=0, magnitude=Fraction(0))


def test_perturb_breaks_parallel_ties():
    arcs = [
        Arc(0, 0, 1, Fraction(4), True),
        Arc(1, 0, 1, Fraction(4), False),
    ]
    net = perturb_costs(Network(2, arcs), seed=0)
    assert net.arc(0).cost != net.arc(1).cost

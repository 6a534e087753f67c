"""Regime-aware shortest paths, checked against hand-computed distances."""

import math
from fractions import Fraction

import pytest

from tollgate.network import Arc, Network
from tollgate.shortest_path import (
    INFINITY,
    ExclusionSet,
    distances_to,
    shortest_path,
)

# Hand-derived distance tables for the five-node fixture (all to node 4).
# Zero regime: tolled arcs at base cost.  Infinite regime: tolled arcs
# unusable.  Capped regime with cap 7 everywhere: tolled arcs at cost + 7.
ZERO_DIST = {0: 3, 1: 2, 2: 1, 3: 2, 4: 0}
FREE_DIST = {0: 10, 1: 3, 2: 4, 3: 2, 4: 0}
CAPPED_DIST = {0: 10, 1: 3, 2: 4, 3: 2, 4: 0}


def test_zero_regime_distances(fig):
    assert distances_to(fig.network, 4, "zero") == ZERO_DIST


def test_infinite_regime_distances(fig):
    assert distances_to(fig.network, 4, "infinite") == FREE_DIST


def test_capped_regime_distances(fig):
    caps = {a: Fraction(7) for a in fig.network.tolled_ids}
    assert distances_to(fig.network, 4, "capped", caps=caps) == CAPPED_DIST


def test_capped_regime_requires_caps(fig):
    with pytest.raises(ValueError):
        distances_to(fig.network, 4, "capped")


def test_unknown_regime_rejected(fig):
    with pytest.raises(ValueError):
        distances_to(fig.network, 4, "half")


def test_shortest_path_returns_base_costs(fig):
    p = shortest_path(fig.network, 0, 4, "infinite")
    assert p.arcs == (6,)
    assert p.cost == 10
    q = shortest_path(fig.network, 0, 4, "zero")
    assert q.arcs == (0, 1, 2)
    assert q.cost == 3


def test_shortest_path_tie_breaks_lexicographically():
    arcs = [
        Arc(0, 0, 1, Fraction(1), False),
        Arc(1, 0, 1, Fraction(1), False),
        Arc(2, 1, 2, Fraction(1), False),
    ]
    net = Network(3, arcs)
    assert shortest_path(net, 0, 2).arcs == (0, 2)


def test_exclusions_reroute(fig):
    p = shortest_path(fig.network, 0, 4, excluded=ExclusionSet(arcs=frozenset({2})))
    assert p.arcs == (0, 5)
    assert p.cost == 4


def test_node_exclusion(fig):
    p = shortest_path(
        fig.network, 0, 4, excluded=ExclusionSet(nodes=frozenset({1}))
    )
    assert p.arcs == (6,)


def test_unreachable_returns_none():
    net = Network(3, [Arc(0, 0, 1, Fraction(1), False)])
    assert shortest_path(net, 0, 2) is None
    dist = distances_to(net, 2)
    assert dist[0] == INFINITY and math.isinf(dist[0])


def test_commodity_tag_propagates(fig):
    p = shortest_path(fig.network, 0, 4, commodity=3)
    assert p.commodity == 3

"""Shared fixtures.

The five-node fixture below is small enough to work through by hand, and
most frozen values in the unit tests were derived on paper from it: four
simple paths of costs 3, 4, 6, 10, of which the cost-6 one is dominated
(its tolled arcs are a superset of the cost-4 path's), a toll cap of 7,
and a best revenue of 7 collected entirely on the first tolled arc.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from tollgate.bigm import compute_bigm
from tollgate.enumeration import enumerate_paths
from tollgate.network import Arc, Commodity, Network, ProblemInstance


def five_node_instance() -> ProblemInstance:
    # Nodes: 0 origin, 1..3 interior, 4 destination.
    # Tolled spine 0->1->2->4 of base cost 3, bypasses of costs 3, 4
    # joining partway, and a direct toll-free arc of cost 10.
    arcs = [
        Arc(0, 0, 1, Fraction(1), True),
        Arc(1, 1, 2, Fraction(1), True),
        Arc(2, 2, 4, Fraction(1), True),
        Arc(3, 2, 3, Fraction(2), False),
        Arc(4, 3, 4, Fraction(2), False),
        Arc(5, 1, 4, Fraction(3), False),
        Arc(6, 0, 4, Fraction(10), False),
    ]
    network = Network(5, arcs)
    return ProblemInstance(
        network, (Commodity(0, 4, Fraction(1)),), "five-node"
    )


@pytest.fixture
def fig() -> ProblemInstance:
    return five_node_instance()


@pytest.fixture
def fig_enum(fig):
    return enumerate_paths(fig.network, fig.commodities[0])


@pytest.fixture
def fig_bfset(fig_enum):
    return fig_enum.feasible_set()


@pytest.fixture
def fig_bigm(fig, fig_bfset):
    return compute_bigm(fig.network, fig.commodities, {0: fig_bfset})

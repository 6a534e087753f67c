"""Big-M families, checked against values worked out by hand.

On the five-node fixture the toll-free fallback costs 10 and the cheapest
zero-toll route costs 3, so every toll cap is 7.  The dual bounds come from
two shortest-path sweeps: zero-regime distances to the destination give the
lower potentials, cap-inflated distances the upper ones.
"""

from fractions import Fraction

import pytest

from tollgate.bigm import compute_bigm
from tollgate.network import Arc, Commodity, InstanceError, Network, ProblemInstance

LAM_LO = {0: 3, 1: 2, 2: 1, 3: 2, 4: 0}
LAM_HI = {0: 10, 1: 3, 2: 4, 3: 2, 4: 0}
R_BY_ARC = {0: 8, 1: 10, 2: 7, 3: 3, 4: 0, 5: 1, 6: 7}


def test_toll_caps(fig_bigm):
    assert fig_bigm.N == {0: Fraction(7), 1: Fraction(7), 2: Fraction(7)}
    assert fig_bigm.M == {(0, a): Fraction(7) for a in (0, 1, 2)}
    assert fig_bigm.L_lo == {0: Fraction(3)}
    assert fig_bigm.pi_cost == {0: Fraction(10)}


def test_potential_bounds(fig_bigm):
    assert {n: fig_bigm.lam_lo[(0, n)] for n in range(5)} == LAM_LO
    assert {n: fig_bigm.lam_hi[(0, n)] for n in range(5)} == LAM_HI


def test_dual_slack_bounds(fig_bigm):
    assert {a: fig_bigm.R[(0, a)] for a in range(7)} == R_BY_ARC


def test_r_value_matches_table(fig, fig_bigm):
    for arc in fig.network.arcs:
        assert (
            fig_bigm.r_value(0, arc.cost, arc.tolled, arc.tail, arc.head)
            == R_BY_ARC[arc.index]
        )


def test_r_value_unreachable_endpoint_raises(fig_bigm):
    with pytest.raises(KeyError):
        fig_bigm.r_value(0, Fraction(1), False, 0, 99)


def test_path_slack_bounds(fig_bigm):
    assert fig_bigm.S == {
        (0, 0): Fraction(21),
        (0, 1): Fraction(8),
        (0, 2): Fraction(7),
    }


def test_s_value_agrees_with_table_and_extends(fig, fig_bigm, fig_bfset):
    for pos, p in enumerate(fig_bfset.paths):
        assert fig_bigm.s_value(0, p.cost, p.tolled_set) == fig_bigm.S[(0, pos)]
    dominated = fig.network.path([0, 1, 3, 4])
    assert fig_bigm.s_value(0, dominated.cost, dominated.tolled_set) == 17


def test_dead_arcs_carry_no_r_bound(fig):
    net = fig.network
    arcs = list(net.arcs) + [Arc(7, 1, 5, Fraction(1), False)]
    widened = Network(6, arcs)
    params = compute_bigm(widened, fig.commodities)
    assert (0, 7) not in params.R
    assert (0, 5) not in params.lam_lo


def test_multi_commodity_caps_take_the_max(fig):
    both = (fig.commodities[0], Commodity(1, 4, Fraction(2)))
    params = compute_bigm(fig.network, both)
    # Second commodity: toll-free cost 3, zero-toll cost 2, so its gap is 1.
    assert params.N == {a: Fraction(7) for a in (0, 1, 2)}
    assert params.M[(1, 0)] == 1
    assert params.M[(0, 0)] == 7


def test_no_toll_free_route_is_an_error():
    arcs = [
        Arc(0, 0, 1, Fraction(1), True),
        Arc(1, 1, 0, Fraction(1), False),
    ]
    net = Network(2, arcs)
    with pytest.raises(InstanceError, match="toll-free"):
        compute_bigm(net, (Commodity(0, 1, Fraction(1)),))


def test_scaled_multiplies_only_big_ms(fig_bigm):
    doubled = fig_bigm.scaled(2)
    assert doubled.N[0] == 14
    assert doubled.M[(0, 1)] == 14
    assert doubled.R[(0, 3)] == 6
    assert doubled.S[(0, 1)] == 16
    assert doubled.lam_lo == fig_bigm.lam_lo
    assert doubled.L_lo == fig_bigm.L_lo
    with pytest.raises(ValueError):
        fig_bigm.scaled(0)

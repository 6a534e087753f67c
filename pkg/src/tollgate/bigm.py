"""Big-M constants for the single-level reformulations.

All quantities derive from three families of exact shortest-path values per
commodity ``k`` with destination ``d``:

* ``lam_lo[k, i]``  cheapest ``i -> d`` cost with every toll at zero,
* ``lam_hi[k, i]``  cheapest ``i -> d`` cost with every toll at its cap
  (tolled arcs stay usable at ``cost + N``; removing them instead could
  disconnect nodes and blow the bounds up to infinity),
* ``pi_cost[k]``    cheapest toll-free ``origin -> d`` cost.

From these:

* ``N[a]``     toll cap, the same for every tolled arc: the largest surplus
  any commodity could ever be charged, ``max_k max(0, pi_cost - L_lo)``,
* ``M[k, a]``  per-commodity cap on collected toll, ``min(N, pi_cost - L_lo)``
  clamped at zero,
* ``R[k, a]``  slack bound for dual rows, ``cost (+ N if tolled) - lam_lo[tail]
  + lam_hi[head]``,
* ``S[k, p]``  slack bound for path rows, ``base(p) + sum of N over p's tolled
  arcs - L_lo``.

Values are computed once on the original network and looked up by original
arc id, which keeps them valid on every reduced graph (the witness dual
vector for any optimal toll lives on the original network and transfers to
subgraphs).  Entries whose supporting distance is infinite are simply absent;
builders raise when they need one, naming the arc.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .enumeration import BilevelFeasibleSet
from .network import ArcId, Commodity, InstanceError, Network, Node
from .shortest_path import INFINITY, distances_to


@dataclass(frozen=True)
class BigMParams:
    """Exact big-M constants, keyed by original arc/node ids.

    ``S`` is keyed by ``(commodity, position in the feasible set)``; use
    :meth:`s_value` for paths outside the set (cut generation needs that).
    """

    N: Mapping[ArcId, Fraction]
    M: Mapping[tuple[int, ArcId], Fraction]
    R: Mapping[tuple[int, ArcId], Fraction]
    S: Mapping[tuple[int, int], Fraction]
    lam_lo: Mapping[tuple[int, Node], Fraction]
    lam_hi: Mapping[tuple[int, Node], Fraction]
    L_lo: Mapping[int, Fraction]
    pi_cost: Mapping[int, Fraction]

    def s_value(
        self, commodity: int, base_cost: Fraction, tolled_original_ids: Iterable[ArcId]
    ) -> Fraction:
        """The path slack bound for an arbitrary path of this commodity."""
        total = base_cost - self.L_lo[commodity]
        for aid in tolled_original_ids:
            total += self.N[aid]
        return total

    def r_value(
        self,
        commodity: int,
        cost: Fraction,
        tolled: bool,
        orig_tail: Node,
        orig_head: Node,
    ) -> Fraction:
        """Dual slack bound for an arc given by its original endpoints.

        Works for contracted arcs too: a toll-free chain's slack is bounded by
        the same endpoint distances that bound a single arc.  Raises KeyError
        when an endpoint cannot reach the commodity's destination (the bound
        would be infinite there).
        """
        bound = cost - self.lam_lo[(commodity, orig_tail)] + self.lam_hi[(commodity, orig_head)]
        if tolled:
            cap = max(self.N.values(), default=Fraction(0))
            bound += cap
        return bound

    def scaled(self, factor: int) -> "BigMParams":
        """Every big-M multiplied by ``factor`` (validity stress testing)."""
        if factor < 1:
            raise ValueError("scale factor must be at least 1")
        f = Fraction(factor)
        return replace(
            self,
            N={k: v * f for k, v in self.N.items()},
            M={k: v * f for k, v in self.M.items()},
            R={k: v * f for k, v in self.R.items()},
            S={k: v * f for k, v in self.S.items()},
        )


def compute_bigm(
    network: Network,
    commodities: Sequence[Commodity],
    bfsets: Optional[Mapping[int, BilevelFeasibleSet]] = None,
) -> BigMParams:
    """Compute all big-M families on the original network.

    ``bfsets`` is only needed for the path bounds ``S``; pass the feasible
    sets of whichever commodities will be modeled with path rows.
    """
    lam_lo: dict[tuple[int, Node], Fraction] = {}
    lam_hi: dict[tuple[int, Node], Fraction] = {}
    L_lo: dict[int, Fraction] = {}
    pi_cost: dict[int, Fraction] = {}

    zero_dist: list[dict[Node, object]] = []
    for k, com in enumerate(commodities):
        dist = distances_to(network, com.destination, "zero")
        zero_dist.append(dist)
        for node, value in dist.items():
            if value != INFINITY:
                lam_lo[(k, node)] = Fraction(value)
        free = distances_to(network, com.destination, "infinite")
        pi = free[com.origin]
        if pi == INFINITY:
            raise InstanceError(
                f"commodity {k} has no toll-free path; toll caps are undefined"
            )
        pi_cost[k] = Fraction(pi)
        L_lo[k] = lam_lo[(k, com.origin)]

    gaps = {k: max(Fraction(0), pi_cost[k] - L_lo[k]) for k in range(len(commodities))}
    cap = max(gaps.values(), default=Fraction(0))
    N = {aid: cap for aid in network.tolled_ids}
    M = {
        (k, aid): min(cap, gaps[k])
        for k in range(len(commodities))
        for aid in network.tolled_ids
    }

    R: dict[tuple[int, ArcId], Fraction] = {}
    for k, com in enumerate(commodities):
        capped = distances_to(network, com.destination, "capped", caps=N)
        for node, value in capped.items():
            if value != INFINITY:
                lam_hi[(k, node)] = Fraction(value)
        for arc in network.arcs:
            lo = zero_dist[k][arc.tail]
            hi = capped[arc.head]
            if lo == INFINITY or hi == INFINITY:
                continue  # arc can never carry k's flow; no bound needed or defined
            bound = arc.cost - Fraction(lo) + Fraction(hi)
            if arc.tolled:
                bound += cap
            R[(k, arc.index)] = bound

    S: dict[tuple[int, int], Fraction] = {}
    if bfsets:
        for k, bfset in bfsets.items():
            for pos, path in enumerate(bfset.paths):
                S[(k, pos)] = (
                    path.cost
                    + sum((N[a] for a in path.tolled_set), Fraction(0))
                    - L_lo[k]
                )

    return BigMParams(N, M, R, S, lam_lo, lam_hi, L_lo, pi_cost)

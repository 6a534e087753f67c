"""Shortest paths under the three toll regimes, with arc/node exclusions.

Regimes fix how tolled arcs are priced while toll-free arcs always cost their
base cost:

* ``"zero"``      tolled arcs cost their base cost (tolls at zero),
* ``"capped"``    tolled arcs cost base + cap (caller supplies the caps),
* ``"infinite"``  tolled arcs are unusable (removed, not priced).

Ties between equal-cost paths break toward the lexicographically smallest arc
index sequence, which makes every search in this package deterministic.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

from .network import Arc, ArcId, Network, Node, Path

REGIMES = ("zero", "capped", "infinite")

Cost = Union[Fraction, float]  # float only for math.inf markers
INFINITY: float = math.inf


@dataclass(frozen=True)
class ExclusionSet:
    """Arcs and nodes a search must not touch.

    Excluding a node removes every arc incident to it.  The empty exclusion
    set is shared as :data:`NO_EXCLUSIONS`.
    """

    arcs: frozenset[ArcId] = frozenset()
    nodes: frozenset[Node] = frozenset()

    def blocks(self, arc: Arc) -> bool:
        return (
            arc.index in self.arcs
            or arc.tail in self.nodes
            or arc.head in self.nodes
        )


NO_EXCLUSIONS = ExclusionSet()


def _check_regime(network: Network, regime: str, caps: Optional[Mapping[ArcId, Fraction]]) -> None:
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}, expected one of {REGIMES}")
    if regime == "capped":
        if caps is None:
            raise ValueError("capped regime needs a cap per tolled arc")
        missing = [a for a in network.tolled_ids if a not in caps]
        if missing:
            raise ValueError(f"capped regime is missing caps for tolled arcs {missing}")


def _arc_cost(arc: Arc, regime: str, caps: Optional[Mapping[ArcId, Fraction]]) -> Optional[Fraction]:
    """Price of the arc under the regime; None means the arc is unusable."""
    if not arc.tolled:
        return arc.cost
    if regime == "zero":
        return arc.cost
    if regime == "capped":
        return arc.cost + caps[arc.index]  # type: ignore[index]
    return None  # infinite regime removes tolled arcs


def shortest_path(
    network: Network,
    source: Node,
    target: Node,
    regime: str = "zero",
    caps: Optional[Mapping[ArcId, Fraction]] = None,
    excluded: ExclusionSet = NO_EXCLUSIONS,
    commodity: int = -1,
) -> Optional[Path]:
    """Cheapest ``source -> target`` path under the regime, or None.

    Among equal-cost paths the one with the lexicographically smallest arc
    index sequence wins.  The returned :class:`Path` carries base costs (the
    regime only steers the search), so its ``cost`` equals the regime cost
    only under ``"zero"``.
    """
    _check_regime(network, regime, caps)
    if not (0 <= source < network.num_nodes and 0 <= target < network.num_nodes):
        raise ValueError("source or target out of range")
    if source in excluded.nodes or target in excluded.nodes:
        raise ValueError("source and target must not be excluded")
    if source == target:
        raise ValueError("source equals target")

    # Entries are (regime cost, arc sequence, node); with strictly positive
    # costs the first pop per node carries its minimal (cost, sequence) label.
    heap: list[tuple[Fraction, tuple[ArcId, ...], Node]] = [(Fraction(0), (), source)]
    settled: set[Node] = set()
    while heap:
        cost, arcs, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node == target:
            return network.path(arcs, commodity)
        for arc in network.out_arcs(node):
            if arc.head in settled or excluded.blocks(arc):
                continue
            price = _arc_cost(arc, regime, caps)
            if price is None:
                continue
            heapq.heappush(heap, (cost + price, arcs + (arc.index,), arc.head))
    return None


def distances_to(
    network: Network,
    target: Node,
    regime: str = "zero",
    caps: Optional[Mapping[ArcId, Fraction]] = None,
    excluded: ExclusionSet = NO_EXCLUSIONS,
) -> dict[Node, Cost]:
    """Cost of the cheapest path from every node to ``target`` under the regime.

    Runs one backward sweep over reversed arcs.  Unreachable nodes map to
    ``math.inf`` (comparisons against Fractions behave as expected).
    """
    _check_regime(network, regime, caps)
    if not (0 <= target < network.num_nodes):
        raise ValueError("target out of range")
    dist: dict[Node, Cost] = {node: INFINITY for node in range(network.num_nodes)}
    if target in excluded.nodes:
        return dist
    dist[target] = Fraction(0)
    heap: list[tuple[Fraction, Node]] = [(Fraction(0), target)]
    settled: set[Node] = set()
    while heap:
        cost, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        for arc in network.in_arcs(node):
            if arc.tail in settled or excluded.blocks(arc):
                continue
            price = _arc_cost(arc, regime, caps)
            if price is None:
                continue
            candidate = cost + price
            if candidate < dist[arc.tail]:
                dist[arc.tail] = candidate
                heapq.heappush(heap, (candidate, arc.tail))
    return dist

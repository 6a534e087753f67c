"""Bilevel-feasible path enumeration for one commodity.

A path is bilevel feasible when some nonnegative toll vector makes it a
cheapest route for its commodity.  Two facts drive everything here:

* a path ``p`` can never be the follower's choice if another path uses a
  subset of its tolled arcs at strictly smaller base cost (it is *dominated*),
* once a toll-free path is emitted in cost order, no later path can be
  bilevel feasible, so enumeration can stop.

:func:`enumerate_paths` produces candidate paths in nondecreasing base cost by
a deviation scheme: each emitted path spawns one subproblem per tolled arc on
its suffix, which excludes that arc, pins the prefix before the spur node, and
re-solves a shortest path from the spur node.  The subproblem regions
partition the remaining path space, so nothing is emitted twice and pruning is
safe.  :func:`dominance_filter` then removes dominated paths; the survivors
are exactly the bilevel-feasible paths whenever enumeration ran to its
toll-free stopping point.

Distinct base costs across candidate paths are a precondition (generic costs).
Instances with ties should be passed through :func:`perturb_costs` first.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .network import ArcId, Commodity, Network, Path
from .shortest_path import ExclusionSet, shortest_path


class ConsistencyError(RuntimeError):
    """An internal invariant failed (bad input state rather than bad argument)."""


@dataclass(frozen=True)
class BilevelFeasibleSet:
    """The filtered candidate paths of one commodity, in ascending base cost.

    ``exhaustive`` records whether enumeration reached its natural stopping
    point (the cheapest toll-free path was emitted); only then is the set
    guaranteed complete, which downstream consumers (graph reduction, the
    brute-force reference solver) require.
    """

    commodity: int
    paths: tuple[Path, ...]
    exhaustive: bool

    def __post_init__(self) -> None:
        costs = [p.cost for p in self.paths]
        if any(b <= a for a, b in zip(costs, costs[1:])):
            raise ConsistencyError("feasible-set paths must have strictly increasing costs")
        tolled = [p.tolled_set for p in self.paths]
        if len(set(tolled)) != len(tolled):
            raise ConsistencyError("feasible-set paths must have distinct tolled sets")
        toll_free = [p for p in self.paths if p.is_toll_free()]
        if len(toll_free) > 1:
            raise ConsistencyError("at most one toll-free path can survive the filter")
        if self.paths and self.exhaustive and not self.paths[-1].is_toll_free():
            raise ConsistencyError("an exhaustive set must end with the toll-free path")

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @property
    def tolled_universe(self) -> frozenset[ArcId]:
        """All tolled arc ids used by some path in the set."""
        out: set[ArcId] = set()
        for p in self.paths:
            out |= p.tolled_set
        return frozenset(out)

    @property
    def arc_union(self) -> frozenset[ArcId]:
        out: set[ArcId] = set()
        for p in self.paths:
            out.update(p.arcs)
        return frozenset(out)


@dataclass
class EnumerationResult:
    """Raw output of :func:`enumerate_paths` for one commodity."""

    commodity: int
    paths: list[Path]
    stopped_at_tollfree: bool
    _bfset: Optional[BilevelFeasibleSet] = field(default=None, repr=False)

    def feasible_set(self) -> BilevelFeasibleSet:
        """Dominance-filter the emitted paths (cached)."""
        if self._bfset is None:
            self._bfset = dominance_filter(
                self.paths, commodity=self.commodity, exhaustive=self.stopped_at_tollfree
            )
        return self._bfset


def perturb_costs(
    network: Network,
    seed: int,
    magnitude: Optional[Fraction] = None,
) -> Network:
    """Add a tiny positive rational to every arc cost to break cost ties.

    Draws are i.i.d. uniform on a fine grid in ``(0, magnitude]``; a reversed
    twin arc (same endpoints swapped, same cost) receives the same draw so that
    symmetric instances stay symmetric.  The default magnitude is one billionth
    of the smallest arc cost, small enough never to reorder paths whose costs
    already differ.
    """
    if magnitude is None:
        magnitude = min(a.cost for a in network.arcs) / 10**9
    magnitude = Fraction(magnitude)
    if magnitude <= 0:
        raise ValueError("perturbation magnitude must be positive")
    rng = random.Random(seed)
    grid = 2**30
    drawn: dict[tuple[int, int, Fraction], Fraction] = {}
    costs: dict[ArcId, Fraction] = {}
    for arc in network.arcs:
        twin = drawn.get((arc.head, arc.tail, arc.cost))
        if twin is None:
            twin = Fraction(rng.randrange(1, grid + 1), grid) * magnitude
            drawn[(arc.tail, arc.head, arc.cost)] = twin
        costs[arc.index] = arc.cost + twin
    return network.with_costs(costs)


def enumerate_paths(
    network: Network,
    commodity: Commodity,
    cap: Optional[int] = None,
    commodity_index: int = 0,
) -> EnumerationResult:
    """Emit candidate paths in nondecreasing base cost until done or capped.

    ``cap`` bounds the number of emitted paths; ``None`` means unbounded, in
    which case the run always ends at the cheapest toll-free path.  Ties in
    the candidate pool break toward the lexicographically smallest arc index
    sequence.  The result's ``stopped_at_tollfree`` flag is True exactly when
    the stopping path was emitted, i.e. when the output is complete.
    """
    if cap is not None and cap < 1:
        raise ValueError("cap must be at least 1 (or None for unbounded)")
    origin, dest = commodity.origin, commodity.destination
    first = shortest_path(network, origin, dest, commodity=commodity_index)
    if first is None:
        raise ConsistencyError(f"no path from {origin} to {dest}")

    counter = itertools.count()
    # Heap entries: (cost, arc sequence, tiebreak, spur position, excluded arcs).
    # The spur position indexes the path's node sequence; arcs before it are
    # pinned, and the excluded set carries the deviations that define this
    # candidate's region of the path space.
    heap: list[tuple[Fraction, tuple[ArcId, ...], int, Path, int, frozenset[ArcId]]] = []
    heap.append((first.cost, first.arcs, next(counter), first, 0, frozenset()))

    emitted: list[Path] = []
    stopped_at_tollfree = False
    while heap and (cap is None or len(emitted) < cap):
        _, _, _, path, spur_pos, banned = heapq.heappop(heap)
        emitted.append(path)
        if path.is_toll_free():
            stopped_at_tollfree = True
            break

        arcs = [network.arc(a) for a in path.arcs]
        prefix_costs = [Fraction(0)]
        for arc in arcs:
            prefix_costs.append(prefix_costs[-1] + arc.cost)

        # One subproblem per tolled arc on the suffix that starts at the spur
        # node.  For the i-th of them the prefix is pinned through the head of
        # the (i-1)-th, the arc itself is excluded, and nodes strictly before
        # the new spur node are removed so the replacement stays simple.
        spur = spur_pos
        for pos in range(spur_pos, len(arcs)):
            if not arcs[pos].tolled:
                continue
            child_banned = banned | {arcs[pos].index}
            blocked_nodes = frozenset(path.nodes[:spur])
            replacement = shortest_path(
                network,
                path.nodes[spur],
                dest,
                excluded=ExclusionSet(arcs=child_banned, nodes=blocked_nodes),
                commodity=commodity_index,
            )
            if replacement is not None:
                child_arcs = path.arcs[:spur] + replacement.arcs
                child_nodes = path.nodes[:spur] + replacement.nodes
                child_cost = prefix_costs[spur] + replacement.cost
                child = Path(
                    child_arcs,
                    child_nodes,
                    child_cost,
                    frozenset(path.tolled_set & set(child_arcs[:spur]))
                    | replacement.tolled_set,
                    commodity_index,
                )
                heapq.heappush(
                    heap,
                    (child_cost, child_arcs, next(counter), child, spur, child_banned),
                )
            spur = pos + 1
    return EnumerationResult(commodity_index, emitted, stopped_at_tollfree)


def dominance_filter(
    paths: Sequence[Path],
    commodity: int = 0,
    exhaustive: Optional[bool] = None,
) -> BilevelFeasibleSet:
    """Drop every path dominated by an earlier one.

    ``p`` dominates ``q`` when ``p``'s tolled arcs are a subset of ``q``'s and
    ``p`` is strictly cheaper; no toll vector can then ever make ``q`` the
    better choice.  Input must be sorted by strictly increasing base cost
    (ties void the rule, hence the hard error).  When the input came from a
    run that stopped at its toll-free path, the survivors are exactly the
    bilevel-feasible paths.
    """
    costs = [p.cost for p in paths]
    for a, b in zip(costs, costs[1:]):
        if b <= a:
            raise ValueError(
                "paths must be sorted by strictly increasing base cost "
                f"(saw {a} then {b}); perturb costs if the instance has ties"
            )
    survivors: list[Path] = []
    for candidate in paths:
        if any(kept.tolled_set <= candidate.tolled_set for kept in survivors):
            continue
        survivors.append(candidate)
    if exhaustive is None:
        exhaustive = bool(paths) and paths[-1].is_toll_free()
    return BilevelFeasibleSet(commodity, tuple(survivors), exhaustive)


def is_bilevel_feasible(network: Network, path: Path, commodity: Commodity) -> bool:
    """Witness check: can some toll vector make ``path`` a cheapest route?

    Setting the tolls on the path's own tolled arcs to zero and pricing every
    other tolled arc out of the market is the most favorable world for the
    path; it is bilevel feasible iff it is a shortest path in that world.
    """
    if path.origin != commodity.origin or path.destination != commodity.destination:
        raise ValueError("path endpoints do not match the commodity")
    rivals = frozenset(
        a for a in network.tolled_ids if a not in path.tolled_set
    )
    best = shortest_path(
        network,
        commodity.origin,
        commodity.destination,
        excluded=ExclusionSet(arcs=rivals),
    )
    if best is None:
        raise ConsistencyError("path exists but witness search found nothing")
    return best.cost == path.cost

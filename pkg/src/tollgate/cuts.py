"""Feasibility cut loop for arc-primal, path-dual slackness models.

Those models (kinds VFCS1 and VFCS2) carry slackness rows only for the
paths of the feasible set, while the arc flows can route over any path of
the working graph.  A solution that routes a commodity over an uncovered
path has no row forcing its dual bound tight, so its revenue can be
overstated.  On graphs with opposite twin arcs the flow balance rows even
admit a lit cycle riding along with the routed path, pocketing the tolls
of the cycle arcs without paying their cost.  The fix is iterative: solve,
decompose each commodity's lit arcs into the routed path plus cycles, and
add one row per round.  A lit cycle gets a row forbidding it outright (a
genuine routing is a simple path, so no true solution ever lights a full
cycle); an uncovered routed path gets the slackness row that makes its
dual bound tight.  Cycles and paths are both finite families and each cut
permanently removes one member, so the loop terminates.
"""

from __future__ import annotations

import time
from typing import Mapping, Optional

from .enumeration import ConsistencyError
from .formulations import (
    CommodityAssignment,
    HybridModel,
    var_L,
    var_T,
    var_x,
    var_y,
)
from .network import Arc, Path
from .solver import (
    DEFAULT_BUDGET,
    STATUS_BUDGET,
    STATUS_OPTIMAL,
    Backend,
    SolveResult,
    SolverError,
    get_backend,
    solve,
)

#: Hard stop for the cut loop; hitting it means the loop is not converging.
MAX_CUT_ROUNDS = 200


def _flow_value(assignment: Mapping[str, float], k: int, arc: Arc) -> float:
    name = var_x(k, arc.index) if arc.tolled else var_y(k, arc.index)
    return assignment.get(name, 0.0)


def selected_path(
    context: HybridModel, part: CommodityAssignment, values: Mapping[str, float]
) -> Path:
    """Read commodity ``part.commodity``'s routed path out of a solution.

    Follows the unit flow from origin to destination on the working graph.
    Ambiguous flow (zero or several out-arcs carrying flow at a node) raises
    :class:`ConsistencyError`.  Mid-loop incumbents of the slackness kinds
    can be ambiguous when a cycle is lit alongside the path, so this reader
    is only for solutions the cut loop has certified.
    """
    assert part.graph is not None
    k = part.commodity
    net = part.graph.network
    com = context.instance.commodities[k]
    node = part.graph.reduced_node(com.origin)
    dest = part.graph.reduced_node(com.destination)
    seen = {node}
    arcs: list[int] = []
    while node != dest:
        hot = [a for a in net.out_arcs(node) if _flow_value(values, k, a) > 0.5]
        if len(hot) != 1:
            raise ConsistencyError(
                f"commodity {k}: flow leaves node {node} on {len(hot)} arcs"
            )
        arcs.append(hot[0].index)
        node = hot[0].head
        if node in seen:
            raise ConsistencyError(f"commodity {k}: flow revisits node {node}")
        seen.add(node)
    return net.path(arcs, k)


def _pop_cycle(
    out_pool: dict[int, list[Arc]], start: int, k: int
) -> list[Arc]:
    """Extract one cycle from a pool of balanced leftover arcs."""
    walk: list[Arc] = []
    pos = {start: 0}
    node = start
    while True:
        pool = out_pool.get(node)
        if not pool:
            raise ConsistencyError(
                f"commodity {k}: flow dead-ends at node {node}"
            )
        arc = pool.pop()
        walk.append(arc)
        node = arc.head
        first = pos.get(node)
        if first is not None:
            for unused in walk[:first]:
                out_pool[unused.tail].append(unused)
            return walk[first:]
        pos[node] = len(walk)


def _decompose_flow(
    lit: list[Arc], origin: int, dest: int, k: int
) -> tuple[list[Arc], list[list[Arc]]]:
    """Split a unit flow's lit arcs into the routed path and cycles."""
    out_pool: dict[int, list[Arc]] = {}
    for arc in lit:
        out_pool.setdefault(arc.tail, []).append(arc)
    walk: list[Arc] = []
    cycles: list[list[Arc]] = []
    pos = {origin: 0}
    node = origin
    while node != dest:
        pool = out_pool.get(node)
        if not pool:
            raise ConsistencyError(
                f"commodity {k}: flow dead-ends at node {node}"
            )
        arc = pool.pop()
        walk.append(arc)
        node = arc.head
        first = pos.get(node)
        if first is not None:
            loop = walk[first:]
            del walk[first:]
            for looped in loop:
                if looped.head != node:
                    pos.pop(looped.head, None)
            cycles.append(loop)
        else:
            pos[node] = len(walk)
    while True:
        start = next((t for t, pool in out_pool.items() if pool), None)
        if start is None:
            break
        cycles.append(_pop_cycle(out_pool, start, k))
    return walk, cycles


def _flow_name(k: int, arc: Arc) -> str:
    return var_x(k, arc.index) if arc.tolled else var_y(k, arc.index)


def vfcs_feasibility_cut(
    context: HybridModel, result: SolveResult
) -> Optional[str]:
    """Add one row against an uncovered routed path or a lit cycle.

    Scans the commodities modeled with arc flows against a path dual, in
    order, decomposing each one's lit arcs into its routed path plus any
    cycles the flow balance rows let ride along.  The first offense gets a
    row and its tag is returned: a cycle is forbidden outright (no genuine
    routing lights all arcs of a cycle), and a routed path that neither the
    feasible set nor an earlier cut covers gets its slackness row.  Returns
    None when every commodity is clean, which certifies the incumbent.
    """
    for part in context.assignments:
        if part.kind is None or not part.kind.needs_cut_loop:
            continue
        assert part.graph is not None and part.bfset is not None
        k = part.commodity
        graph = part.graph
        com = context.instance.commodities[k]
        lit = [
            a
            for a in graph.network.arcs
            if _flow_value(result.assignment, k, a) > 0.5
        ]
        if not lit:
            raise ConsistencyError(f"commodity {k}: no flow in the solution")
        routed, cycles = _decompose_flow(
            lit,
            graph.reduced_node(com.origin),
            graph.reduced_node(com.destination),
            k,
        )

        if cycles:
            banned = context.cut_cycles.setdefault(k, set())
            cycle = cycles[0]
            terms = [(1, _flow_name(k, arc)) for arc in cycle]
            tag = f"cut-cycle[{k},{len(banned)}]"
            context.ir.add_constraint(tag, terms, "<=", len(cycle) - 1)
            banned.add(tuple(sorted(arc.index for arc in cycle)))
            return tag

        arcs = tuple(sorted(arc.index for arc in routed))
        covered = {tuple(sorted(p.arcs)) for p in part.bfset.paths}
        cut = context.cut_paths.setdefault(k, set())
        if arcs in covered or arcs in cut:
            continue
        cost = sum(arc.cost for arc in routed)
        tolled = [arc.index for arc in routed if arc.tolled]
        s_val = context.bigm.s_value(
            k, cost, [graph.original_tolled_id(r) for r in tolled]
        )
        terms = [(1, var_L(k))]
        for rid in tolled:
            terms.append((-1, var_T(graph.original_tolled_id(rid))))
        for arc in routed:
            terms.append((-s_val, _flow_name(k, arc)))
        tag = f"lin-cs-ap[{k},cut{len(cut)}]"
        context.ir.add_constraint(tag, terms, ">=", cost - s_val * len(routed))
        cut.add(arcs)
        return tag
    return None


def solve_with_vfcs_cuts(
    context: HybridModel,
    backend: Optional[Backend] = None,
    budget: float = DEFAULT_BUDGET,
    max_rounds: int = MAX_CUT_ROUNDS,
    config: Optional[Mapping[str, str]] = None,
) -> SolveResult:
    """Solve ``context`` to optimality under the feasibility cut loop.

    ``budget`` caps the total wall time across rounds.  When it runs out,
    the best incumbent so far is returned with budget-exhausted status; its
    objective may overstate the true optimum, since the pending cut was
    never applied.  Models without cut-needing blocks go through a single
    plain solve.
    """
    chosen = backend if backend is not None else get_backend(config)
    deadline = time.monotonic() + budget
    start = time.monotonic()
    rounds = 0
    best: Optional[SolveResult] = None
    while True:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            out = best if best is not None else SolveResult(
                status=STATUS_BUDGET,
                objective=None,
                best_bound=None,
                backend=chosen.name,
            )
            out.status = STATUS_BUDGET
            out.cut_rounds = rounds
            out.wall_time = time.monotonic() - start
            return out
        result = solve(context.ir, budget=remaining, backend=chosen, config=config)
        result.cut_rounds = rounds
        result.wall_time = time.monotonic() - start
        if result.status != STATUS_OPTIMAL:
            return result
        if not context.needs_cuts:
            return result
        tag = vfcs_feasibility_cut(context, result)
        if tag is None:
            return result
        best = result
        rounds += 1
        if rounds > max_rounds:
            raise SolverError(
                f"feasibility cut loop still adding rows after {max_rounds} rounds"
            )

"""Directed toll networks, commodities, and the plain-text instance format.

A network is a directed multigraph whose arcs split into a tolled set and a
toll-free set.  Arc costs are exact rationals and stay exact through every
transformation in this package; floating point only appears when a model is
handed to a numeric solver.

The instance file format is line oriented::

    npp <num_nodes> <num_arcs> <num_commodities>
    arc <tail> <head> <cost> <T|F>        (one line per arc)
    commodity <origin> <destination> <demand>

Costs and demands are decimal literals (or ``p/q`` rationals) parsed exactly.
Blank lines and ``#`` comments are ignored.  Parallel arcs are permitted;
self-loops are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path as FilePath
from typing import Iterable, Iterator, Mapping, Sequence, Union

Node = int
ArcId = int

RationalLike = Union[int, Fraction, str]


class InstanceError(ValueError):
    """A malformed instance file or an invalid in-memory instance."""


def as_fraction(value: RationalLike) -> Fraction:
    """Convert an exact input (int, Fraction, or literal string) to Fraction.

    Floats are rejected on purpose: they would silently break the exactness
    guarantees the rest of the package relies on.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a valid rational value")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not an exact rational literal: {value!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as the shortest exact literal the parser accepts.

    Integers render bare, denominators of the form 2^a * 5^b render as exact
    decimals, anything else falls back to ``p/q``.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = value.numerator * 10**digits // value.denominator
        sign = "-" if scaled < 0 else ""
        text = str(abs(scaled)).rjust(digits + 1, "0")
        return f"{sign}{text[:-digits]}.{text[-digits:]}"
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Arc:
    """One directed arc.  ``tolled`` marks membership in the priced set."""

    index: ArcId
    tail: Node
    head: Node
    cost: Fraction
    tolled: bool

    def __post_init__(self) -> None:
        if self.tail == self.head:
            raise InstanceError(f"arc {self.index}: self-loop at node {self.tail}")
        if self.cost <= 0:
            raise InstanceError(f"arc {self.index}: cost must be positive, got {self.cost}")


@dataclass(frozen=True)
class Commodity:
    """An origin-destination pair with a positive demand."""

    origin: Node
    destination: Node
    demand: Fraction

    def __post_init__(self) -> None:
        if self.origin == self.destination:
            raise InstanceError(f"commodity {self.origin}->{self.destination}: origin equals destination")
        if self.demand <= 0:
            raise InstanceError(f"commodity {self.origin}->{self.destination}: demand must be positive")


@dataclass(frozen=True)
class Path:
    """A simple directed path, stored as the arc index sequence it follows.

    ``cost`` is the toll-free (base) cost of the path and ``tolled_set`` the
    set of tolled arc indices it uses.  ``commodity`` tags which commodity the
    path was enumerated for; -1 means unattached.
    """

    arcs: tuple[ArcId, ...]
    nodes: tuple[Node, ...]
    cost: Fraction
    tolled_set: frozenset[ArcId]
    commodity: int = -1

    def __len__(self) -> int:
        return len(self.arcs)

    @property
    def origin(self) -> Node:
        return self.nodes[0]

    @property
    def destination(self) -> Node:
        return self.nodes[-1]

    def is_toll_free(self) -> bool:
        return not self.tolled_set


class Network:
    """An immutable directed multigraph with exact arc costs."""

    def __init__(self, num_nodes: int, arcs: Sequence[Arc]):
        if num_nodes < 2:
            raise InstanceError(f"a network needs at least 2 nodes, got {num_nodes}")
        self.num_nodes = num_nodes
        self.arcs: tuple[Arc, ...] = tuple(arcs)
        for pos, arc in enumerate(self.arcs):
            if arc.index != pos:
                raise InstanceError(f"arc at position {pos} carries index {arc.index}")
            if not (0 <= arc.tail < num_nodes and 0 <= arc.head < num_nodes):
                raise InstanceError(f"arc {arc.index}: endpoint out of range")
        self._out: list[list[Arc]] = [[] for _ in range(num_nodes)]
        self._in: list[list[Arc]] = [[] for _ in range(num_nodes)]
        for arc in self.arcs:
            self._out[arc.tail].append(arc)
            self._in[arc.head].append(arc)
        self.tolled_ids: tuple[ArcId, ...] = tuple(a.index for a in self.arcs if a.tolled)
        self.toll_free_ids: tuple[ArcId, ...] = tuple(a.index for a in self.arcs if not a.tolled)

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    def arc(self, index: ArcId) -> Arc:
        return self.arcs[index]

    def out_arcs(self, node: Node) -> Sequence[Arc]:
        return self._out[node]

    def in_arcs(self, node: Node) -> Sequence[Arc]:
        return self._in[node]

    def with_costs(self, costs: Mapping[ArcId, Fraction]) -> "Network":
        """Return a copy whose arcs carry the costs in ``costs`` (others kept)."""
        replaced = [
            Arc(a.index, a.tail, a.head, Fraction(costs.get(a.index, a.cost)), a.tolled)
            for a in self.arcs
        ]
        return Network(self.num_nodes, replaced)

    def path(self, arc_ids: Sequence[ArcId], commodity: int = -1) -> Path:
        """Build a :class:`Path` from contiguous arc indices, validating it."""
        if not arc_ids:
            raise InstanceError("a path needs at least one arc")
        arcs = [self.arcs[a] for a in arc_ids]
        nodes = [arcs[0].tail]
        for arc in arcs:
            if arc.tail != nodes[-1]:
                raise InstanceError(f"arc {arc.index} does not continue the path at node {nodes[-1]}")
            nodes.append(arc.head)
        if len(set(nodes)) != len(nodes):
            raise InstanceError("path revisits a node")
        cost = sum((a.cost for a in arcs), Fraction(0))
        tolled = frozenset(a.index for a in arcs if a.tolled)
        return Path(tuple(arc_ids), tuple(nodes), cost, tolled, commodity)


@dataclass(frozen=True)
class ProblemInstance:
    """A network plus its commodities."""

    network: Network
    commodities: tuple[Commodity, ...]
    label: str = "instance"

    def __post_init__(self) -> None:
        if not self.commodities:
            raise InstanceError("an instance needs at least one commodity")


def _toll_free_reachable(network: Network, origin: Node) -> set[Node]:
    seen = {origin}
    stack = [origin]
    while stack:
        node = stack.pop()
        for arc in network.out_arcs(node):
            if not arc.tolled and arc.head not in seen:
                seen.add(arc.head)
                stack.append(arc.head)
    return seen


def validate_instance(instance: ProblemInstance) -> None:
    """Check the structural rules every instance must satisfy.

    Arc-level rules (positive costs, no self-loops, endpoints in range) are
    enforced at construction; this adds the commodity rules, notably that every
    commodity keeps at least one toll-free route to its destination.  Without
    that guarantee the pricing problem is unbounded.
    """
    net = instance.network
    for k, com in enumerate(instance.commodities):
        for label, node in (("origin", com.origin), ("destination", com.destination)):
            if not (0 <= node < net.num_nodes):
                raise InstanceError(f"commodity {k}: {label} {node} out of range")
        if com.destination not in _toll_free_reachable(net, com.origin):
            raise InstanceError(
                f"commodity {k} ({com.origin}->{com.destination}) has no toll-free path"
            )


def parse_instance(text: str, label: str = "instance") -> ProblemInstance:
    """Parse the line-oriented instance format.  Costs are parsed exactly."""
    lines = []
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append(body)
    if not lines:
        raise InstanceError("empty instance")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "npp":
        raise InstanceError(f"bad header line: {lines[0]!r}")
    try:
        num_nodes, num_arcs, num_commodities = (int(tok) for tok in header[1:])
    except ValueError as exc:
        raise InstanceError(f"bad header counts: {lines[0]!r}") from exc
    if len(lines) != 1 + num_arcs + num_commodities:
        raise InstanceError(
            f"expected {num_arcs} arc and {num_commodities} commodity lines, "
            f"got {len(lines) - 1} body lines"
        )
    arcs: list[Arc] = []
    for pos, line in enumerate(lines[1 : 1 + num_arcs]):
        parts = line.split()
        if len(parts) != 5 or parts[0] != "arc":
            raise InstanceError(f"bad arc line: {line!r}")
        if parts[4] not in ("T", "F"):
            raise InstanceError(f"arc line must end with T or F: {line!r}")
        arcs.append(
            Arc(pos, int(parts[1]), int(parts[2]), as_fraction(parts[3]), parts[4] == "T")
        )
    commodities: list[Commodity] = []
    for line in lines[1 + num_arcs :]:
        parts = line.split()
        if len(parts) != 4 or parts[0] != "commodity":
            raise InstanceError(f"bad commodity line: {line!r}")
        commodities.append(Commodity(int(parts[1]), int(parts[2]), as_fraction(parts[3])))
    instance = ProblemInstance(Network(num_nodes, arcs), tuple(commodities), label)
    validate_instance(instance)
    return instance


def serialize_instance(instance: ProblemInstance) -> str:
    """Render an instance back to the file format, exactly round-trippable."""
    net = instance.network
    out = [f"npp {net.num_nodes} {net.num_arcs} {len(instance.commodities)}"]
    for arc in net.arcs:
        flag = "T" if arc.tolled else "F"
        out.append(f"arc {arc.tail} {arc.head} {format_rational(arc.cost)} {flag}")
    for com in instance.commodities:
        out.append(
            f"commodity {com.origin} {com.destination} {format_rational(com.demand)}"
        )
    return "\n".join(out) + "\n"


def load_instance(path: Union[str, FilePath]) -> ProblemInstance:
    """Read and parse an instance file; the label is the file stem."""
    path = FilePath(path)
    return parse_instance(path.read_text(), label=path.stem)

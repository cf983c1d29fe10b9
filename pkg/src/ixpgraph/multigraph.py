"""Substrate model: IXPs, client endpoints and parallel pathlet edges.

A pathlet is a capacitated, latency-annotated segment offered by one ISP.
Transit pathlets join two IXPs, access pathlets join a client endpoint to
an IXP anchor. Any number of pathlets may join the same pair of nodes.
Capacities are a single undirected pool per pathlet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

TRANSIT = "transit"
ACCESS = "access"


class GraphError(ValueError):
    """Raised when an operation would break a substrate invariant."""


class InsufficientResidual(GraphError):
    pass


@dataclass
class Pathlet:
    id: int
    kind: str
    end_a: str
    end_b: str
    isp: int
    capacity: int
    latency: int
    reserved: int = 0

    @property
    def residual(self) -> int:
        return self.capacity - self.reserved

    def other(self, node: str) -> str:
        if node == self.end_a:
            return self.end_b
        if node == self.end_b:
            return self.end_a
        raise GraphError(f"node {node!r} is not an end of pathlet {self.id}")


@dataclass
class Endpoint:
    id: str
    prefixes: list[str] = field(default_factory=list)
    access_pathlet_ids: list[int] = field(default_factory=list)


class Multigraph:
    """Mutable substrate holding pathlets and their reservations.

    Mutations are single-writer. :meth:`feasible_view` returns a read-only
    filter over the live pathlet objects, so it must not be held across a
    mutation.
    """

    def __init__(self, ixps: Iterable[str] = ()):
        self.ixps: set[str] = set()
        self.endpoints: dict[str, Endpoint] = {}
        self.pathlets: dict[int, Pathlet] = {}
        self.adjacency: dict[str, list[int]] = {}
        for x in ixps:
            self.add_ixp(x)

    # -- construction -----------------------------------------------------

    def add_ixp(self, ixp_id: str) -> None:
        if ixp_id in self.endpoints:
            raise GraphError(f"{ixp_id!r} is already an endpoint id")
        if ixp_id not in self.ixps:
            self.ixps.add(ixp_id)
            self.adjacency[ixp_id] = []

    def add_endpoint(self, endpoint_id: str, prefixes: Iterable[str] = ()) -> Endpoint:
        if endpoint_id in self.adjacency:
            raise GraphError(f"duplicate node id {endpoint_id!r}")
        ep = Endpoint(endpoint_id, list(prefixes))
        self.endpoints[endpoint_id] = ep
        self.adjacency[endpoint_id] = []
        return ep

    def add_pathlet(self, pathlet: Pathlet) -> Pathlet:
        p = pathlet
        if p.id in self.pathlets:
            raise GraphError(f"duplicate pathlet id {p.id}")
        if p.id < 0:
            raise GraphError(f"pathlet id must be non-negative, got {p.id}")
        for node in (p.end_a, p.end_b):
            if node not in self.adjacency:
                raise GraphError(f"pathlet {p.id} references unknown node {node!r}")
        if p.capacity <= 0 or p.latency <= 0:
            raise GraphError(f"pathlet {p.id} needs positive capacity and latency")
        if p.isp <= 0:
            raise GraphError(f"pathlet {p.id} has invalid ASN {p.isp}")
        if p.reserved != 0:
            raise GraphError(f"pathlet {p.id} must be added unreserved")
        if p.kind == TRANSIT:
            if p.end_a == p.end_b:
                raise GraphError(f"pathlet {p.id} is a self-loop")
            if p.end_a not in self.ixps or p.end_b not in self.ixps:
                raise GraphError(f"transit pathlet {p.id} must join two IXPs")
        elif p.kind == ACCESS:
            if p.end_a not in self.endpoints or p.end_b not in self.ixps:
                raise GraphError(f"access pathlet {p.id} must join an endpoint to an IXP")
            self.endpoints[p.end_a].access_pathlet_ids.append(p.id)
        else:
            raise GraphError(f"unknown pathlet kind {p.kind!r}")
        self.pathlets[p.id] = p
        self.adjacency[p.end_a].append(p.id)
        self.adjacency[p.end_b].append(p.id)
        return p

    def remove_pathlet(self, pathlet_id: int) -> Pathlet:
        p = self.pathlet(pathlet_id)
        if p.reserved:
            raise GraphError(f"pathlet {pathlet_id} still carries {p.reserved} Mbps")
        del self.pathlets[pathlet_id]
        self.adjacency[p.end_a].remove(pathlet_id)
        self.adjacency[p.end_b].remove(pathlet_id)
        if p.kind == ACCESS:
            self.endpoints[p.end_a].access_pathlet_ids.remove(pathlet_id)
        return p

    def next_pathlet_id(self) -> int:
        return max(self.pathlets, default=-1) + 1

    # -- reservations -------------------------------------------------------

    def pathlet(self, pathlet_id: int) -> Pathlet:
        try:
            return self.pathlets[pathlet_id]
        except KeyError:
            raise GraphError(f"unknown pathlet id {pathlet_id}") from None

    def reserve(self, pathlet_id: int, demand: int) -> None:
        p = self.pathlet(pathlet_id)
        if demand <= 0:
            raise GraphError(f"demand must be positive, got {demand}")
        if p.residual < demand:
            raise InsufficientResidual(
                f"pathlet {pathlet_id}: residual {p.residual} < demand {demand}"
            )
        p.reserved += demand

    def release(self, pathlet_id: int, demand: int) -> None:
        p = self.pathlet(pathlet_id)
        if demand <= 0:
            raise GraphError(f"demand must be positive, got {demand}")
        if p.reserved < demand:
            raise GraphError(
                f"pathlet {pathlet_id}: cannot release {demand}, only {p.reserved} reserved"
            )
        p.reserved -= demand

    # -- queries ----------------------------------------------------------------

    def has_node(self, node: str) -> bool:
        return node in self.adjacency

    def is_endpoint(self, node: str) -> bool:
        return node in self.endpoints

    def parallel_edge_count(self, node_a: str, node_b: str) -> int:
        for node in (node_a, node_b):
            if node not in self.adjacency:
                raise GraphError(f"unknown node {node!r}")
        if node_a == node_b:
            return 0
        return sum(1 for pid in self.adjacency[node_a] if self.pathlets[pid].other(node_a) == node_b)

    def transit_pathlets(self) -> Iterator[Pathlet]:
        return (p for p in self.pathlets.values() if p.kind == TRANSIT)

    def feasible_view(self, demand: int, excluded: Iterable[int] = ()) -> "FeasibleView":
        if demand <= 0:
            raise GraphError(f"demand must be positive, got {demand}")
        return FeasibleView(self, demand, frozenset(excluded))

    def reservations(self) -> dict[int, int]:
        return {pid: p.reserved for pid, p in sorted(self.pathlets.items())}

    # -- structure ----------------------------------------------------------------

    def check(self) -> None:
        """Raise :class:`GraphError` if adjacency or endpoint bookkeeping drifted."""
        expected: dict[str, list[int]] = {n: [] for n in self.adjacency}
        for pid, p in self.pathlets.items():
            if not 0 <= p.reserved <= p.capacity:
                raise GraphError(f"pathlet {pid} reserved {p.reserved} outside [0, {p.capacity}]")
            expected[p.end_a].append(pid)
            expected[p.end_b].append(pid)
        for node, ids in self.adjacency.items():
            if sorted(ids) != sorted(expected[node]):
                raise GraphError(f"adjacency of {node!r} does not mirror pathlet ends")
        for ep in self.endpoints.values():
            for pid in ep.access_pathlet_ids:
                p = self.pathlets.get(pid)
                if p is None or p.kind != ACCESS or p.end_a != ep.id:
                    raise GraphError(f"endpoint {ep.id!r} lists bad access pathlet {pid}")

    def canonical(self):
        return (
            tuple(sorted(self.ixps)),
            tuple(
                (e.id, tuple(e.prefixes), tuple(sorted(e.access_pathlet_ids)))
                for e in sorted(self.endpoints.values(), key=lambda e: e.id)
            ),
            tuple(
                (p.id, p.kind, p.end_a, p.end_b, p.isp, p.capacity, p.latency, p.reserved)
                for _, p in sorted(self.pathlets.items())
            ),
        )

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.canonical() == other.canonical()

    def copy(self) -> "Multigraph":
        g = Multigraph(sorted(self.ixps))
        for e in sorted(self.endpoints.values(), key=lambda e: e.id):
            g.add_endpoint(e.id, e.prefixes)
        for _, p in sorted(self.pathlets.items()):
            q = g.add_pathlet(Pathlet(p.id, p.kind, p.end_a, p.end_b, p.isp, p.capacity, p.latency))
            q.reserved = p.reserved
        return g

    def __repr__(self):
        return (
            f"Multigraph({len(self.ixps)} IXPs, {len(self.endpoints)} endpoints, "
            f"{len(self.pathlets)} pathlets)"
        )


class FeasibleView:
    """Pathlets with residual >= demand that are not explicitly excluded."""

    def __init__(self, graph: Multigraph, demand: int, excluded: frozenset = frozenset()):
        self.graph = graph
        self.demand = demand
        self.excluded = excluded

    def admits(self, pathlet_id: int) -> bool:
        p = self.graph.pathlets.get(pathlet_id)
        return p is not None and pathlet_id not in self.excluded and p.residual >= self.demand

    def incident(self, node: str) -> list[Pathlet]:
        pl = self.graph.pathlets
        return [pl[pid] for pid in self.graph.adjacency[node] if self.admits(pid)]

    def pathlet_ids(self) -> set[int]:
        return {pid for pid in self.graph.pathlets if self.admits(pid)}

    def excluding(self, more: Iterable[int]) -> "FeasibleView":
        return FeasibleView(self.graph, self.demand, self.excluded | frozenset(more))

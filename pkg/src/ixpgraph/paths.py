"""Feasible path search between client endpoints over a multigraph.

A path starts with an access pathlet of the source endpoint, crosses zero
or more transit pathlets and ends with an access pathlet of the
destination. Intermediate nodes are always IXPs and never repeat.

Candidate order throughout is ``(latency, pathlet ids)``; since every
label compared during search starts at the same node, the lexicographic
tie-break is consistent with path extension and Yen's partitioning stays
exact under ties.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .multigraph import GraphError, Multigraph, FeasibleView
from .streams import stream


@dataclass(frozen=True)
class Path:
    pathlets: tuple[int, ...]
    nodes: tuple[str, ...]
    latency: int

    @property
    def hops(self) -> int:
        return len(self.pathlets)

    @property
    def transit(self) -> tuple[int, ...]:
        return self.pathlets[1:-1]

    @property
    def anchors(self) -> tuple[str, str]:
        return self.nodes[1], self.nodes[-2]

    @property
    def intermediate_ixps(self) -> tuple[str, ...]:
        return self.nodes[2:-2]

    def key(self):
        return (self.latency, self.pathlets)

    def __lt__(self, other):
        return self.key() < other.key()


def path_from_pathlets(graph: Multigraph, src: str, pathlet_ids: Iterable[int]) -> Path:
    nodes = [src]
    latency = 0
    for pid in pathlet_ids:
        p = graph.pathlet(pid)
        nodes.append(p.other(nodes[-1]))
        latency += p.latency
    return Path(tuple(pathlet_ids), tuple(nodes), latency)


def check_path(graph: Multigraph, path: Path, src: str, dst: str, demand: int | None = None) -> None:
    """Raise :class:`GraphError` unless ``path`` is a well-formed src-dst path."""
    if path.hops < 2 or path.nodes[0] != src or path.nodes[-1] != dst:
        raise GraphError(f"path {path.pathlets} does not join {src} and {dst}")
    rebuilt = path_from_pathlets(graph, src, path.pathlets)
    if rebuilt != path:
        raise GraphError(f"path {path.pathlets} is not connected as recorded")
    if len(set(path.nodes)) != len(path.nodes):
        raise GraphError(f"path {path.pathlets} revisits a node")
    if any(graph.is_endpoint(n) for n in path.nodes[1:-1]):
        raise GraphError(f"path {path.pathlets} crosses an endpoint")
    if demand is not None:
        for pid in path.pathlets:
            if graph.pathlets[pid].residual < demand:
                raise GraphError(f"pathlet {pid} cannot carry {demand}")


def _check_endpoints(graph: Multigraph, src: str, dst: str) -> None:
    for e in (src, dst):
        if e not in graph.endpoints:
            raise GraphError(f"unknown endpoint {e!r}")
    if src == dst:
        raise GraphError("source and destination must differ")


def _neighbours(view: FeasibleView, dst: str) -> dict[str, dict[str, list[tuple[int, int]]]]:
    """Feasible adjacency ``node -> other -> [(latency, pathlet id), ...]``, sorted.

    Endpoints other than ``dst`` appear only as sources, never as targets.
    """
    graph = view.graph
    table: dict[str, dict[str, list]] = {n: {} for n in graph.adjacency}
    for p in graph.pathlets.values():
        if not view.admits(p.id):
            continue
        for here, there in ((p.end_a, p.end_b), (p.end_b, p.end_a)):
            if there != dst and there in graph.endpoints:
                continue
            table[here].setdefault(there, []).append((p.latency, p.id))
    for row in table.values():
        for edges in row.values():
            edges.sort()
    return table


def _distances_to(adj, dst: str) -> dict[str, int]:
    """Unconstrained latency from every node to ``dst``; a lower bound for pruning."""
    rev: dict[str, list[tuple[int, str]]] = {}
    for node, row in adj.items():
        for other, edges in row.items():
            rev.setdefault(other, []).append((edges[0][0], node))
    dist = {dst: 0}
    heap = [(0, dst)]
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist[node]:
            continue
        for lat, prev in rev.get(node, ()):
            nd = d + lat
            if nd < dist.get(prev, nd + 1):
                dist[prev] = nd
                heapq.heappush(heap, (nd, prev))
    return dist


def _dijkstra(adj, start: str, dst: str, blocked=frozenset(), skip=frozenset(), budget=None, lower=None):
    """Smallest ``(latency, pathlet ids)`` path from ``start`` to ``dst``.

    Returns ``(latency, pathlets, nodes)`` or None. Nodes in ``blocked`` and
    pathlets in ``skip`` are unusable. Of parallel pathlets only the best
    usable ``(latency, id)`` is relaxed, which cannot change the result.
    ``lower`` maps nodes to a lower bound on their remaining latency and
    only prunes labels that could never meet ``budget``.
    """
    best = {start: (0, ())}
    prev = {start: None}
    heap = [(0, (), start)]
    settled = set()
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        dist, seq, node = pop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node == dst:
            nodes = [node]
            while prev[nodes[-1]] is not None:
                nodes.append(prev[nodes[-1]])
            return dist, seq, tuple(reversed(nodes))
        for other, edges in adj[node].items():
            if other in settled or other in blocked:
                continue
            lat, pid = edges[0]
            if skip and pid in skip:
                for lat, pid in edges:
                    if pid not in skip:
                        break
                else:
                    continue
            nd = dist + lat
            if budget is not None:
                if lower is not None:
                    bound = lower.get(other)
                    if bound is None or nd + bound > budget:
                        continue
                elif nd > budget:
                    continue
            old = best.get(other)
            if old is not None and nd > old[0]:
                continue
            label = (nd, seq + (pid,))
            if old is None or label < old:
                best[other] = label
                prev[other] = node
                push(heap, (nd, label[1], other))
    return None


def shortest(adj, src: str, dst: str, latency_bound: int, skip=frozenset()) -> Path | None:
    found = _dijkstra(adj, src, dst, skip=skip, budget=latency_bound)
    if found is None:
        return None
    dist, seq, nodes = found
    return Path(seq, nodes, dist)


def yen(adj, src: str, dst: str, latency_bound: int, k: int, skip=frozenset()) -> list[Path]:
    """Yen's k shortest simple paths over a prebuilt neighbour table."""
    if k < 1:
        raise ValueError("k must be positive")
    lower = _distances_to(adj, dst)
    found = _dijkstra(adj, src, dst, skip=skip, budget=latency_bound, lower=lower)
    if found is None:
        return []
    first = Path(found[1], found[2], found[0])
    accepted = [first]
    deviations = [0]
    seen = {first.pathlets}
    candidates: list[tuple] = []
    while len(accepted) < k:
        last = accepted[-1]
        root_latency = 0
        for i in range(last.hops):
            root = last.pathlets[:i]
            if i:
                prev, here = last.nodes[i - 1], last.nodes[i]
                root_latency += next(lat for lat, pid in adj[prev][here] if pid == root[-1])
            # spurs before the deviation point only regenerate known candidates
            if i < deviations[-1]:
                continue
            spur_skip = {a.pathlets[i] for a in accepted if a.hops > i and a.pathlets[:i] == root}
            found = _dijkstra(
                adj,
                last.nodes[i],
                dst,
                blocked=frozenset(last.nodes[:i]),
                skip=skip | spur_skip,
                budget=latency_bound - root_latency,
                lower=lower,
            )
            if found is None:
                continue
            dist, seq, nodes = found
            full = root + seq
            if full in seen:
                continue
            seen.add(full)
            path = Path(full, last.nodes[:i] + nodes, root_latency + dist)
            heapq.heappush(candidates, (path.key(), i, path))
        if not candidates:
            break
        _, dev, path = heapq.heappop(candidates)
        accepted.append(path)
        deviations.append(dev)
    return accepted


def neighbour_table(graph: Multigraph, dst: str, demand: int, excluded=()):
    return _neighbours(graph.feasible_view(demand, excluded), dst)


def min_latency_path(
    graph: Multigraph, src: str, dst: str, demand: int, latency_bound: int, excluded=()
) -> Path | None:
    """Minimum-latency feasible path, or None if none meets ``latency_bound``."""
    _check_endpoints(graph, src, dst)
    return shortest(neighbour_table(graph, dst, demand, excluded), src, dst, latency_bound)


def k_shortest_paths(
    graph: Multigraph, src: str, dst: str, demand: int, latency_bound: int, k: int, excluded=()
) -> list[Path]:
    """The ``k`` best feasible paths; parallel pathlets count as distinct paths."""
    _check_endpoints(graph, src, dst)
    return yen(neighbour_table(graph, dst, demand, excluded), src, dst, latency_bound, k)


def random_walk_paths(
    graph: Multigraph,
    src: str,
    dst: str,
    demand: int,
    latency_bound: int,
    walks: int,
    max_len: int,
    seed: int,
    excluded=(),
) -> list[Path]:
    """Distinct src-dst paths found by uniform random walks, sorted."""
    _check_endpoints(graph, src, dst)
    view = graph.feasible_view(demand, excluded)
    rng = stream(seed, "random_walk")
    found: dict[tuple, Path] = {}
    for _ in range(walks):
        node, nodes, seq, latency = src, [src], [], 0
        visited = {src}
        while node != dst and len(seq) < max_len:
            options = [
                p
                for p in view.incident(node)
                if p.other(node) not in visited
                and (p.other(node) == dst or not graph.is_endpoint(p.other(node)))
            ]
            if not options:
                break
            p = rng.choice(options)
            node = p.other(node)
            visited.add(node)
            nodes.append(node)
            seq.append(p.id)
            latency += p.latency
        if node == dst and latency <= latency_bound:
            found.setdefault(tuple(seq), Path(tuple(seq), tuple(nodes), latency))
    return sorted(found.values(), key=Path.key)


def enumerate_paths(
    graph: Multigraph, src: str, dst: str, demand: int, latency_bound: int, excluded=(), limit=None
) -> list[Path]:
    """Every feasible node-simple path within the bound, by depth-first search."""
    _check_endpoints(graph, src, dst)
    view = graph.feasible_view(demand, excluded)
    out: list[Path] = []

    def dfs(node, nodes, seq, latency):
        if node == dst:
            out.append(Path(tuple(seq), tuple(nodes), latency))
            if limit is not None and len(out) > limit:
                raise OverflowError(f"more than {limit} paths between {src} and {dst}")
            return
        for p in view.incident(node):
            other = p.other(node)
            if other in nodes or latency + p.latency > latency_bound:
                continue
            if other != dst and graph.is_endpoint(other):
                continue
            nodes.append(other)
            seq.append(p.id)
            dfs(other, nodes, seq, latency + p.latency)
            nodes.pop()
            seq.pop()

    dfs(src, [src], [], 0)
    return sorted(out, key=Path.key)

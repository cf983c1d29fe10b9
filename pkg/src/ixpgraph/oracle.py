"""Exhaustive offline optimum for small admission instances."""

from __future__ import annotations

from dataclasses import dataclass

from .engine import Request
from .multigraph import Multigraph
from .paths import Path, enumerate_paths

MAX_REQUESTS = 8
MAX_IXPS = 8
MAX_PATHS_PER_REQUEST = 5000


class OracleRefused(ValueError):
    """Instance exceeds the configured size guard."""


@dataclass
class OracleResult:
    optimum: int
    assignment: dict[int, Path]  # request id -> path, accepted requests only


def offline_optimal(
    graph: Multigraph,
    requests: list[Request],
    max_requests: int = MAX_REQUESTS,
    max_ixps: int = MAX_IXPS,
    max_paths: int = MAX_PATHS_PER_REQUEST,
) -> OracleResult:
    """Largest set of requests that can be embedded concurrently.

    Arrival times and durations are ignored; backups are not considered.
    Capacities are the graph's current residuals. Raises
    :class:`OracleRefused` instead of truncating large instances.
    """
    if len(requests) > max_requests:
        raise OracleRefused(f"{len(requests)} requests exceed the oracle limit of {max_requests}")
    if len(graph.ixps) > max_ixps:
        raise OracleRefused(f"{len(graph.ixps)} IXPs exceed the oracle limit of {max_ixps}")

    options = []
    for r in requests:
        try:
            paths = enumerate_paths(graph, r.src, r.dst, r.demand, r.latency_bound, limit=max_paths)
        except OverflowError as exc:
            raise OracleRefused(str(exc)) from None
        if paths:
            options.append((r, paths))
    # fewest choices first keeps the search tree narrow
    options.sort(key=lambda item: (len(item[1]), item[0].id))

    residual = {pid: p.residual for pid, p in graph.pathlets.items()}
    best = [0, {}]
    chosen: dict[int, Path] = {}

    def search(i: int) -> None:
        if len(chosen) + (len(options) - i) <= best[0]:
            return
        if i == len(options):
            best[0], best[1] = len(chosen), dict(chosen)
            return
        req, paths = options[i]
        for path in paths:
            if all(residual[pid] >= req.demand for pid in path.pathlets):
                for pid in path.pathlets:
                    residual[pid] -= req.demand
                chosen[req.id] = path
                search(i + 1)
                del chosen[req.id]
                for pid in path.pathlets:
                    residual[pid] += req.demand
                if best[0] == len(options):
                    return
        search(i + 1)

    search(0)
    return OracleResult(best[0], dict(sorted(best[1].items())))

"""Online admission, sample-select embedding, re-embedding and failure recovery.

The engine keeps one :class:`EngineState` (substrate plus live embeddings)
and mutates it from a single thread. Rejections are reported as ``None``,
never as exceptions, and always leave the state untouched.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .multigraph import GraphError, Multigraph
from .paths import Path, neighbour_table, random_walk_paths, shortest, yen
from .streams import derive_seed

log = logging.getLogger(__name__)


class EngineError(ValueError):
    pass


class SelectionPolicy(str, Enum):
    MIN_LATENCY = "min_latency"
    MIN_HOPS = "min_hops"
    WIDEST = "widest"
    LEAST_STRESS = "least_stress"


@dataclass(frozen=True)
class SamplerConfig:
    method: str = "ksp"
    k: int = 3
    walks: int = 32
    max_len: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("dijkstra", "ksp", "random_walk"):
            raise ValueError(f"unknown sampler method {self.method!r}")
        if self.k < 1 or self.walks < 0 or self.max_len < 1:
            raise ValueError("sampler parameters must be positive")


@dataclass(frozen=True)
class Request:
    id: int
    src: str
    dst: str
    demand: int
    latency_bound: int
    arrival: float = 0.0
    duration: float = 1.0
    wants_backup: bool = False

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"request {self.id}: src and dst must differ")
        if self.demand <= 0 or self.latency_bound <= 0:
            raise ValueError(f"request {self.id}: demand and latency bound must be positive")


@dataclass
class Embedding:
    request_id: int
    primary_path: Path
    backup_path: Path | None
    demand: int

    def paths(self) -> list[Path]:
        return [self.primary_path] + ([self.backup_path] if self.backup_path else [])


@dataclass
class Reembed:
    request_id: int
    old_path: Path
    new_path: Path
    reason: str


@dataclass
class FailureReport:
    reembedded: list[int] = field(default_factory=list)
    dropped: list[int] = field(default_factory=list)
    downgraded: list[int] = field(default_factory=list)
    moves: list[Reembed] = field(default_factory=list)


@dataclass
class EngineState:
    graph: Multigraph
    embeddings: dict[int, Embedding] = field(default_factory=dict)
    requests: dict[int, Request] = field(default_factory=dict)

    def fingerprint(self):
        return (
            tuple(self.graph.reservations().items()),
            tuple(
                (rid, e.primary_path.pathlets, e.backup_path.pathlets if e.backup_path else None)
                for rid, e in sorted(self.embeddings.items())
            ),
        )


# -- sampling and selection ---------------------------------------------------


def sample_paths(
    graph: Multigraph, request: Request, config: SamplerConfig, excluded: Iterable[int] = (), purpose: str = "primary"
) -> list[Path]:
    """Candidate paths for ``request``, pooled over every access pathlet pairing.

    Candidates are sorted by latency, hop count and pathlet ids. The
    ``dijkstra`` method yields at most one candidate.
    """
    for e in (request.src, request.dst):
        if e not in graph.endpoints:
            raise GraphError(f"unknown endpoint {e!r}")
    excluded = frozenset(excluded)
    src_access = sorted(graph.endpoints[request.src].access_pathlet_ids)
    dst_access = sorted(graph.endpoints[request.dst].access_pathlet_ids)
    pool: dict[tuple, Path] = {}
    adj = None
    if config.method != "random_walk":
        adj = neighbour_table(graph, request.dst, request.demand, excluded)
    for sa in src_access:
        for da in dst_access:
            if sa in excluded or da in excluded:
                continue
            others = frozenset(a for a in src_access + dst_access if a not in (sa, da))
            if config.method == "dijkstra":
                p = shortest(adj, request.src, request.dst, request.latency_bound, others)
                found = [p] if p else []
            elif config.method == "ksp":
                found = yen(adj, request.src, request.dst, request.latency_bound, config.k, others)
            else:
                seed = derive_seed("walk", config.seed, request.id, purpose, sa, da)
                found = random_walk_paths(
                    graph, request.src, request.dst, request.demand, request.latency_bound,
                    config.walks, config.max_len, seed, excluded=excluded | others,
                )
            for p in found:
                pool.setdefault(p.pathlets, p)
    if config.method == "dijkstra":
        return [min(pool.values(), key=Path.key)] if pool else []
    return sorted(pool.values(), key=_tie_key)


def _tie_key(path: Path):
    return (path.latency, path.hops, path.pathlets)


def policy_key(path: Path, policy: SelectionPolicy, demand: int, graph: Multigraph):
    policy = SelectionPolicy(policy)
    tie = _tie_key(path)
    if policy is SelectionPolicy.MIN_LATENCY:
        return tie
    if policy is SelectionPolicy.MIN_HOPS:
        return (path.hops,) + tie
    residuals = [graph.pathlets[pid].residual for pid in path.pathlets]
    if policy is SelectionPolicy.WIDEST:
        return (-min(residuals),) + tie
    stress = sum((Fraction(demand, r) for r in residuals), Fraction(0))
    return (stress,) + tie


def rank_paths(candidates, policy, demand: int, graph: Multigraph) -> list[Path]:
    return sorted(candidates, key=lambda p: policy_key(p, policy, demand, graph))


def select_path(candidates, policy, demand: int, graph: Multigraph) -> Path:
    """Pick one candidate by ``policy``, ties by latency, hops and pathlet ids.

    Widest and least-stress read residuals from ``graph`` before any
    reservation for this demand is made.
    """
    if not candidates:
        raise EngineError("no candidate paths to select from")
    return min(candidates, key=lambda p: policy_key(p, policy, demand, graph))


# -- reservation helpers -------------------------------------------------------


def _reserve_path(graph: Multigraph, path: Path, demand: int) -> None:
    done = []
    try:
        for pid in path.pathlets:
            graph.reserve(pid, demand)
            done.append(pid)
    except GraphError:
        for pid in done:
            graph.release(pid, demand)
        raise


def _release_path(graph: Multigraph, path: Path, demand: int) -> None:
    for pid in path.pathlets:
        graph.release(pid, demand)


def _exclusion_around(graph: Multigraph, path: Path) -> set[int]:
    """Transit pathlets of ``path`` and everything touching its intermediate IXPs."""
    ex = set(path.transit)
    for x in path.intermediate_ixps:
        ex.update(graph.adjacency.get(x, ()))
    return ex


def _find_backup(graph, request, primary, config, policy, purpose="backup") -> Path | None:
    cands = sample_paths(graph, request, config, _exclusion_around(graph, primary), purpose)
    cands = [c for c in cands if c.pathlets != primary.pathlets]
    return select_path(cands, policy, request.demand, graph) if cands else None


def disjoint(primary: Path, backup: Path) -> bool:
    return not (set(primary.transit) & set(backup.transit)) and not (
        set(primary.intermediate_ixps) & set(backup.intermediate_ixps)
    )


# -- admission -------------------------------------------------------------------


def try_embed(state: EngineState, request: Request, config: SamplerConfig, policy) -> Embedding | None:
    """Admit ``request`` on a sampled path (plus a disjoint backup if wanted).

    Returns None on rejection; the state is then unchanged.
    """
    if request.id in state.embeddings:
        raise EngineError(f"request {request.id} is already embedded")
    graph = state.graph
    cands = sample_paths(graph, request, config)
    if not cands:
        return None
    primary = select_path(cands, policy, request.demand, graph)
    _reserve_path(graph, primary, request.demand)
    backup = None
    if request.wants_backup:
        backup = _find_backup(graph, request, primary, config, policy)
        if backup is None:
            _release_path(graph, primary, request.demand)
            return None
        _reserve_path(graph, backup, request.demand)
    emb = Embedding(request.id, primary, backup, request.demand)
    state.embeddings[request.id] = emb
    state.requests[request.id] = request
    return emb


def release_embedding(state: EngineState, embedding) -> None:
    """Free every reservation of a live embedding (by object or request id)."""
    rid = embedding.request_id if isinstance(embedding, Embedding) else embedding
    emb = state.embeddings.pop(rid, None)
    if emb is None:
        raise EngineError(f"embedding {rid} is not live")
    for path in emb.paths():
        _release_path(state.graph, path, emb.demand)


def _alternatives(state: EngineState, emb: Embedding, config, policy) -> list[Path]:
    """Other feasible primaries for ``emb``, assuming its primary is released."""
    graph = state.graph
    req = state.requests[emb.request_id]
    base = _exclusion_around(graph, emb.backup_path) if emb.backup_path else set()
    pool: dict[tuple, Path] = {}
    for extra in [()] + [(pid,) for pid in emb.primary_path.pathlets]:
        for p in sample_paths(graph, req, config, base | set(extra), purpose=f"move{extra}"):
            pool.setdefault(p.pathlets, p)
    pool.pop(emb.primary_path.pathlets, None)
    return rank_paths(pool.values(), policy, req.demand, graph)


def hybrid_admit(
    state: EngineState, request: Request, config: SamplerConfig, policy, max_reembeds: int
) -> tuple[Embedding | None, list[Reembed]]:
    """Fallback admission that may move one live embedding to make room.

    Live embeddings are tried smallest demand first (then by request id),
    at most ``max_reembeds`` of them. For each, every alternative primary
    is tried in policy order; the first that lets ``request`` in is
    committed. Otherwise the state is restored exactly.
    """
    if max_reembeds <= 0:
        return None, []
    graph = state.graph
    order = sorted(state.embeddings.values(), key=lambda e: (e.demand, e.request_id))
    for emb in order[:max_reembeds]:
        old = emb.primary_path
        _release_path(graph, old, emb.demand)
        for alt in _alternatives(state, emb, config, policy):
            _reserve_path(graph, alt, emb.demand)
            admitted = try_embed(state, request, config, policy)
            if admitted is not None:
                emb.primary_path = alt
                move = Reembed(emb.request_id, old, alt, "hybrid")
                log.debug("request %d admitted after moving %d", request.id, emb.request_id)
                return admitted, [move]
            _release_path(graph, alt, emb.demand)
        _reserve_path(graph, old, emb.demand)
    return None, []


def handle_pathlet_failure(state: EngineState, pathlet_id: int, config: SamplerConfig, policy) -> FailureReport:
    """Remove a pathlet and repair every embedding that used it.

    A broken primary is replaced by its backup when one exists, after
    which a fresh backup is sought; otherwise a new primary is sampled
    and the embedding is dropped if none fits. Losing only the backup (or
    failing to replace it) downgrades the embedding but keeps it live.
    """
    graph = state.graph
    graph.pathlet(pathlet_id)
    report = FailureReport()
    affected = sorted(
        rid for rid, e in state.embeddings.items() if any(pathlet_id in p.pathlets for p in e.paths())
    )
    broken_primary = {}
    for rid in affected:
        e = state.embeddings[rid]
        if pathlet_id in e.primary_path.pathlets:
            _release_path(graph, e.primary_path, e.demand)
            broken_primary[rid] = e.primary_path
        if e.backup_path and pathlet_id in e.backup_path.pathlets:
            _release_path(graph, e.backup_path, e.demand)
            e.backup_path = None
    graph.remove_pathlet(pathlet_id)

    for rid in affected:
        e = state.embeddings[rid]
        req = state.requests[rid]
        if rid in broken_primary:
            old = broken_primary[rid]
            if e.backup_path is not None:
                e.primary_path, e.backup_path = e.backup_path, None
                reason = "failover"
            else:
                cands = sample_paths(graph, req, config, purpose=f"repair{pathlet_id}")
                if not cands:
                    del state.embeddings[rid]
                    report.dropped.append(rid)
                    continue
                e.primary_path = select_path(cands, policy, req.demand, graph)
                _reserve_path(graph, e.primary_path, req.demand)
                reason = "failure"
            report.moves.append(Reembed(rid, old, e.primary_path, reason))
        report.reembedded.append(rid)
        if req.wants_backup and e.backup_path is None:
            backup = _find_backup(graph, req, e.primary_path, config, policy, f"rebackup{pathlet_id}")
            if backup is None:
                report.downgraded.append(rid)
            else:
                _reserve_path(graph, backup, req.demand)
                e.backup_path = backup
    return report


def check_conservation(state: EngineState) -> list[str]:
    """Describe every pathlet whose reservation differs from its live demand."""
    expected: Counter = Counter()
    for e in state.embeddings.values():
        for path in e.paths():
            for pid in path.pathlets:
                expected[pid] += e.demand
    problems = []
    for pid, p in state.graph.pathlets.items():
        if p.reserved != expected.get(pid, 0):
            problems.append(f"pathlet {pid}: reserved {p.reserved}, live demand {expected.get(pid, 0)}")
        if not 0 <= p.reserved <= p.capacity:
            problems.append(f"pathlet {pid}: reserved {p.reserved} outside [0, {p.capacity}]")
    for pid in expected.keys() - state.graph.pathlets.keys():
        problems.append(f"embedding uses missing pathlet {pid}")
    return problems

"""Stochastic workloads and the discrete-event admission loop."""

from __future__ import annotations

import csv
import json
import math
import os
from bisect import bisect_right
from dataclasses import asdict, dataclass, field, replace
from itertools import accumulate

from .engine import (
    EngineState,
    Request,
    SamplerConfig,
    SelectionPolicy,
    check_conservation,
    handle_pathlet_failure,
    hybrid_admit,
    release_embedding,
    try_embed,
)
from .multigraph import GraphError, Multigraph
from .prefixes import PrefixSet
from .streams import derive_seed, stream

DEPARTURE, FAILURE, ARRIVAL = 0, 1, 2  # tie order at equal timestamps
KIND_NAMES = {DEPARTURE: "departure", FAILURE: "failure", ARRIVAL: "arrival"}


class ConservationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo <= 0 or self.hi < self.lo:
            raise ValueError(f"invalid range {self.lo}..{self.hi}")


@dataclass(frozen=True)
class HybridConfig:
    enabled: bool = True
    max_reembeds: int = 3


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    arrival_rate: float = 1.0
    mean_duration: float = 30.0
    demand: IntRange = IntRange(10, 100)
    latency_bound: IntRange = IntRange(40, 150)
    horizon: float = 100.0
    endpoint_weighting: str = "uniform"
    backup_probability: float = 0.1
    failure_rate: float = 0.02
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    policy: SelectionPolicy = SelectionPolicy.MIN_LATENCY
    hybrid: HybridConfig = field(default_factory=HybridConfig)

    def __post_init__(self):
        if self.arrival_rate <= 0 or self.mean_duration <= 0 or self.horizon <= 0:
            raise ValueError("arrival_rate, mean_duration and horizon must be positive")
        if not 0 <= self.backup_probability <= 1:
            raise ValueError("backup_probability must be in [0, 1]")
        if self.failure_rate < 0:
            raise ValueError("failure_rate must be non-negative")
        if self.endpoint_weighting not in ("uniform", "by_prefix_size"):
            raise ValueError(f"unknown endpoint_weighting {self.endpoint_weighting!r}")
        object.__setattr__(self, "policy", SelectionPolicy(self.policy))

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        """Build a scenario from JSON; an optional ``preset`` name supplies
        defaults that the remaining keys override."""
        doc = dict(doc)
        preset = doc.pop("preset", None)
        if preset is not None and preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        unknown = doc.keys() - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        for key in ("demand", "latency_bound"):
            if key in doc:
                doc[key] = IntRange(**doc[key])
        if "sampler" in doc:
            doc["sampler"] = SamplerConfig(**doc["sampler"])
        if "hybrid" in doc:
            doc["hybrid"] = HybridConfig(**doc["hybrid"])
        return cls(**{**PRESETS.get(preset, {}), **doc})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["policy"] = self.policy.value
        return d

    def with_overrides(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)


PRESETS = {
    "light": dict(arrival_rate=0.5, mean_duration=20.0),
    "heavy": dict(arrival_rate=3.0, mean_duration=60.0),
    "tight": dict(latency_bound=IntRange(20, 60)),
    "loose": dict(latency_bound=IntRange(100, 300)),
}


@dataclass(frozen=True)
class Event:
    time: float
    kind: int
    id: int
    request: Request | None = None
    pathlet_id: int | None = None

    def order(self):
        return (self.time, self.kind, self.id)


@dataclass
class Workload:
    events: list[Event]

    def arrivals(self) -> list[Request]:
        return [e.request for e in self.events if e.kind == ARRIVAL]

    def validate(self, graph: Multigraph) -> None:
        arrived = set()
        last = -math.inf
        for ev in self.events:
            if ev.time < last:
                raise ValueError("workload timestamps must be non-decreasing")
            last = ev.time
            if ev.kind == ARRIVAL:
                r = ev.request
                for e in (r.src, r.dst):
                    if e not in graph.endpoints:
                        raise GraphError(f"request {r.id} references unknown endpoint {e!r}")
                if r.id in arrived:
                    raise ValueError(f"request id {r.id} arrives twice")
                arrived.add(r.id)
            elif ev.kind == DEPARTURE:
                if ev.id not in arrived:
                    raise ValueError(f"departure of request {ev.id} before its arrival")
            elif ev.pathlet_id not in graph.pathlets:
                raise GraphError(f"failure references unknown pathlet {ev.pathlet_id}")


def scripted_workload(requests: list[Request], departures=None, failures=()) -> Workload:
    """Workload from explicit events.

    ``departures`` is a list of ``(time, request_id)``; when omitted every
    request departs at arrival + duration. ``failures`` is a list of
    ``(time, pathlet_id)``.
    """
    events = [Event(r.arrival, ARRIVAL, r.id, request=r) for r in requests]
    if departures is None:
        departures = [(r.arrival + r.duration, r.id) for r in requests]
    events += [Event(t, DEPARTURE, rid) for t, rid in departures]
    events += [Event(t, FAILURE, i, pathlet_id=pid) for i, (t, pid) in enumerate(failures)]
    events.sort(key=Event.order)
    return Workload(events)


def endpoint_weights(graph: Multigraph, weighting: str) -> tuple[list[str], list[int]]:
    names = sorted(graph.endpoints)
    if weighting == "uniform":
        return names, [1] * len(names)
    weights = [PrefixSet.from_cidrs(graph.endpoints[n].prefixes).size for n in names]
    if sum(weights) == 0:
        raise ValueError("by_prefix_size weighting needs endpoints with prefixes")
    return names, weights


def _weighted_pick(rng, names, cum):
    x = rng.random() * cum[-1]
    return names[bisect_right(cum, x)]


def generate_workload(graph: Multigraph, scenario: ScenarioConfig) -> Workload:
    """Poisson arrivals until the horizon, exponential holding times, uniform demands.

    Departures may fall after the horizon. Failures hit distinct, uniformly
    chosen transit pathlets at Poisson times within the horizon.
    """
    names, weights = endpoint_weights(graph, scenario.endpoint_weighting)
    if len(names) < 2:
        raise ValueError("workload generation needs at least two endpoints")
    arrivals = stream(scenario.seed, "workload", "arrivals")
    draws = stream(scenario.seed, "workload", "requests")
    events: list[Event] = []
    t = 0.0
    rid = 0
    while True:
        t += arrivals.expovariate(scenario.arrival_rate)
        if t >= scenario.horizon:
            break
        duration = max(1, math.ceil(draws.expovariate(1.0 / scenario.mean_duration)))
        demand = draws.randint(scenario.demand.lo, scenario.demand.hi)
        bound = draws.randint(scenario.latency_bound.lo, scenario.latency_bound.hi)
        src = _weighted_pick(draws, names, list(accumulate(weights)))
        rest = [(n, w) for n, w in zip(names, weights) if n != src]
        if sum(w for _, w in rest) == 0:
            rest = [(n, 1) for n, _ in rest]
        dst = _weighted_pick(draws, [n for n, _ in rest], list(accumulate(w for _, w in rest)))
        backup = draws.random() < scenario.backup_probability
        req = Request(rid, src, dst, demand, bound, t, float(duration), backup)
        events.append(Event(t, ARRIVAL, rid, request=req))
        events.append(Event(t + duration, DEPARTURE, rid))
        rid += 1

    if scenario.failure_rate > 0:
        fails = stream(scenario.seed, "workload", "failures")
        candidates = sorted(p.id for p in graph.transit_pathlets())
        t = 0.0
        fid = 0
        while candidates:
            t += fails.expovariate(scenario.failure_rate)
            if t >= scenario.horizon:
                break
            pid = candidates.pop(fails.randrange(len(candidates)))
            events.append(Event(t, FAILURE, fid, pathlet_id=pid))
            fid += 1
    events.sort(key=Event.order)
    return Workload(events)


@dataclass
class RequestRecord:
    request: Request
    decision: str
    latency: int | None = None
    hops: int | None = None
    reembeds_triggered: int = 0


@dataclass
class Metrics:
    accepted: int = 0
    rejected: int = 0
    acceptance_ratio: float = 0.0
    mean_accepted_latency: float = 0.0
    mean_utilization: float = 0.0
    reembed_count: int = 0
    drop_count: int = 0
    records: list[RequestRecord] = field(default_factory=list)

    def summary(self, seed: int) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "acceptance_ratio": self.acceptance_ratio,
            "mean_accepted_latency_ms": self.mean_accepted_latency,
            "mean_utilization": self.mean_utilization,
            "reembed_count": self.reembed_count,
            "drop_count": self.drop_count,
            "seed": seed,
        }


@dataclass
class SimulationResult:
    metrics: Metrics
    log: list[dict]
    state: EngineState
    conservation_checks: int = 0


def _transit_utilization(graph: Multigraph) -> float:
    reserved = capacity = 0
    for p in graph.transit_pathlets():
        reserved += p.reserved
        capacity += p.capacity
    return reserved / capacity if capacity else 0.0


def run_simulation(graph: Multigraph, workload: Workload, scenario: ScenarioConfig) -> SimulationResult:
    """Replay ``workload`` against a private copy of ``graph``.

    Arrivals go through online admission and, if rejected and hybrid mode
    is on, through the re-embedding fallback. The reservation conservation
    invariant is checked after every event; a violation raises
    :class:`ConservationError`.
    """
    workload.validate(graph)
    state = EngineState(graph.copy())
    sampler = replace(scenario.sampler, seed=derive_seed("sampler", scenario.seed, scenario.sampler.seed))
    policy = scenario.policy
    metrics = Metrics()
    records: dict[int, RequestRecord] = {}
    log: list[dict] = []
    area = 0.0
    last_t = 0.0
    checks = 0

    for ev in workload.events:
        area += _transit_utilization(state.graph) * (ev.time - last_t)
        last_t = ev.time
        entry = {"time": ev.time, "event": KIND_NAMES[ev.kind], "id": ev.id}
        if ev.kind == ARRIVAL:
            req = ev.request
            emb = try_embed(state, req, sampler, policy)
            moves = []
            if emb is None and scenario.hybrid.enabled:
                emb, moves = hybrid_admit(state, req, sampler, policy, scenario.hybrid.max_reembeds)
            metrics.reembed_count += len(moves)
            if emb is None:
                records[req.id] = RequestRecord(req, "reject")
            else:
                p = emb.primary_path
                records[req.id] = RequestRecord(req, "accept", p.latency, p.hops, len(moves))
            entry["outcome"] = records[req.id].decision
        elif ev.kind == DEPARTURE:
            if ev.id in state.embeddings:
                release_embedding(state, ev.id)
                entry["outcome"] = "released"
            else:
                entry["outcome"] = "not live"
        else:
            if ev.pathlet_id in state.graph.pathlets:
                report = handle_pathlet_failure(state, ev.pathlet_id, sampler, policy)
                metrics.reembed_count += len(report.moves)
                metrics.drop_count += len(report.dropped)
                entry["outcome"] = {
                    "pathlet": ev.pathlet_id,
                    "reembedded": report.reembedded,
                    "dropped": report.dropped,
                    "downgraded": report.downgraded,
                }
            else:
                entry["outcome"] = "already failed"
        problems = check_conservation(state)
        checks += 1
        if problems:
            raise ConservationError(f"after {entry}: " + "; ".join(problems[:5]))
        log.append(entry)

    recs = sorted(records.values(), key=lambda r: r.request.id)
    metrics.records = recs
    metrics.accepted = sum(r.decision == "accept" for r in recs)
    metrics.rejected = len(recs) - metrics.accepted
    metrics.acceptance_ratio = metrics.accepted / len(recs) if recs else 0.0
    lats = [r.latency for r in recs if r.decision == "accept"]
    metrics.mean_accepted_latency = sum(lats) / len(lats) if lats else 0.0
    metrics.mean_utilization = area / last_t if last_t > 0 else 0.0
    return SimulationResult(metrics, log, state, checks)


def simulate(graph: Multigraph, scenario: ScenarioConfig) -> SimulationResult:
    return run_simulation(graph, generate_workload(graph, scenario), scenario)


REQUESTS_HEADER = [
    "request_id",
    "arrival_s",
    "src",
    "dst",
    "demand_mbps",
    "latency_bound_ms",
    "decision",
    "latency_ms",
    "hops",
    "reembeds_triggered",
]


def write_results(result: SimulationResult, out_dir, seed: int) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "requests.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REQUESTS_HEADER)
        for rec in result.metrics.records:
            r = rec.request
            w.writerow([
                r.id,
                repr(r.arrival),
                r.src,
                r.dst,
                r.demand,
                r.latency_bound,
                rec.decision,
                "" if rec.latency is None else rec.latency,
                "" if rec.hops is None else rec.hops,
                rec.reembeds_triggered,
            ])
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(result.metrics.summary(seed), fh, indent=2)
        fh.write("\n")

"""Membership parsing, multigraph synthesis and graph (de)serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations

from .multigraph import ACCESS, TRANSIT, GraphError, Multigraph, Pathlet
from .streams import stream

MembershipTable = dict  # IXP id -> set of member ASNs

PAPER_INTERCONNECTIONS = 49_000
SNAPSHOT_DRIFT_TOLERANCE = 0.10


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


def _read_text(data) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8")
    if isinstance(data, str):
        return data
    raw = data.read()
    return raw.decode("utf-8") if isinstance(raw, bytes) else raw


def read_csv_rows(data, header: tuple[str, ...]):
    """Yield ``(line_number, row)`` for a headed UTF-8 CSV, LF or CRLF."""
    text = _read_text(data)
    if text.startswith("﻿"):
        text = text[1:]
    lines = text.splitlines()
    if not lines or tuple(c.strip() for c in next(csv.reader([lines[0]]))) != header:
        raise ParseError(f"expected header {','.join(header)!r}", line=1)
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(row)}", line=lineno)
        yield lineno, [c.strip() for c in row]


def parse_asn(text: str, lineno: int) -> int:
    try:
        asn = int(text)
    except ValueError:
        raise ParseError(f"ASN {text!r} is not an integer", line=lineno) from None
    if asn <= 0:
        raise ParseError(f"ASN must be positive, got {asn}", line=lineno)
    return asn


def parse_membership(data) -> MembershipTable:
    """Parse an ``ixp_id,asn`` CSV into ``{ixp_id: {asn, ...}}``.

    ``data`` may be bytes, str or a (binary or text) file object.
    """
    table: MembershipTable = {}
    for lineno, (ixp, asn_text) in read_csv_rows(data, ("ixp_id", "asn")):
        if not ixp:
            raise ParseError("empty ixp_id", line=lineno)
        table.setdefault(ixp, set()).add(parse_asn(asn_text, lineno))
    return table


@dataclass(frozen=True)
class AttributeModel:
    """Constant value or uniform integer range ``lo..hi`` (inclusive)."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo <= 0 or self.hi < self.lo:
            raise ValueError(f"invalid attribute range {self.lo}..{self.hi}")

    @classmethod
    def constant(cls, value: int) -> "AttributeModel":
        return cls(value, value)

    @classmethod
    def parse(cls, text: str) -> "AttributeModel":
        """Parse ``constant:N`` or ``uniform:LO:HI``."""
        parts = text.split(":")
        try:
            if parts[0] == "constant" and len(parts) == 2:
                return cls.constant(int(parts[1]))
            if parts[0] == "uniform" and len(parts) == 3:
                return cls(int(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise ValueError(f"bad attribute model {text!r}: {exc}") from None
        raise ValueError(f"bad attribute model {text!r}; use constant:N or uniform:LO:HI")

    def draw(self, rng) -> int:
        # constant models consume no randomness
        return self.lo if self.lo == self.hi else rng.randint(self.lo, self.hi)

    def __str__(self):
        return f"constant:{self.lo}" if self.lo == self.hi else f"uniform:{self.lo}:{self.hi}"


@dataclass(frozen=True)
class SynthesisPolicy:
    capacity: AttributeModel = field(default_factory=lambda: AttributeModel(100, 1000))
    latency: AttributeModel = field(default_factory=lambda: AttributeModel(5, 50))
    seed: int = 0


def transit_triples(table: MembershipTable) -> list[tuple[str, str, int]]:
    """All ``(ixp_a, ixp_b, asn)`` with ``ixp_a < ixp_b`` and a shared member, sorted."""
    triples = []
    for a, b in combinations(sorted(table), 2):
        for asn in sorted(table[a] & table[b]):
            triples.append((a, b, asn))
    return triples


def build_multigraph(table: MembershipTable, policy: SynthesisPolicy | None = None) -> Multigraph:
    """One transit pathlet per IXP pair and shared member AS.

    Pathlets are numbered and given attributes in ``(ixp_a, ixp_b, asn)``
    order, so the result does not depend on how the table was assembled.
    """
    if not table:
        raise ValueError("membership table is empty")
    policy = policy or SynthesisPolicy()
    rng = stream(policy.seed, "synthesis")
    g = Multigraph(sorted(table))
    for pid, (a, b, asn) in enumerate(transit_triples(table)):
        cap = policy.capacity.draw(rng)
        lat = policy.latency.draw(rng)
        g.add_pathlet(Pathlet(pid, TRANSIT, a, b, asn, cap, lat))
    return g


def attach_endpoints(
    graph: Multigraph,
    table: MembershipTable,
    count: int,
    policy: SynthesisPolicy | None = None,
    access_per_endpoint: int = 1,
    capacity: AttributeModel | None = None,
    latency: AttributeModel | None = None,
) -> list[str]:
    """Add ``count`` synthetic client endpoints ``E0, E1, ...`` to ``graph``.

    Each endpoint gets one synthetic IPv4 prefix and ``access_per_endpoint``
    access pathlets to distinct random IXPs, each offered by a random
    member AS of that IXP. Access capacity/latency default to 10 Gbps and
    1 ms so that transit pathlets are the bottleneck.
    """
    policy = policy or SynthesisPolicy()
    capacity = capacity or AttributeModel.constant(10_000)
    latency = latency or AttributeModel.constant(1)
    rng = stream(policy.seed, "endpoints")
    ixps = sorted(x for x in graph.ixps if table.get(x))
    if not ixps:
        raise ValueError("no IXP with members to anchor endpoints")
    if not 1 <= access_per_endpoint <= len(ixps):
        raise ValueError(f"access_per_endpoint must be in 1..{len(ixps)}")
    if count > 223 * 256:
        raise ValueError("too many synthetic endpoints")
    pid = graph.next_pathlet_id()
    names = []
    for i in range(count):
        name = f"E{i}"
        length = rng.randint(16, 24)
        graph.add_endpoint(name, [f"{1 + i % 223}.{i // 223}.0.0/{length}"])
        for ixp in rng.sample(ixps, access_per_endpoint):
            asn = rng.choice(sorted(table[ixp]))
            graph.add_pathlet(
                Pathlet(pid, ACCESS, name, ixp, asn, capacity.draw(rng), latency.draw(rng))
            )
            pid += 1
        names.append(name)
    return names


# -- graph JSON ---------------------------------------------------------------


def graph_to_dict(graph: Multigraph) -> dict:
    return {
        "ixps": sorted(graph.ixps),
        "endpoints": [
            {
                "id": e.id,
                "prefixes": list(e.prefixes),
                "access_pathlets": sorted(e.access_pathlet_ids),
            }
            for e in sorted(graph.endpoints.values(), key=lambda e: e.id)
        ],
        "pathlets": [
            {
                "id": p.id,
                "kind": p.kind,
                "a": p.end_a,
                "b": p.end_b,
                "asn": p.isp,
                "capacity_mbps": p.capacity,
                "latency_ms": p.latency,
            }
            for _, p in sorted(graph.pathlets.items())
        ],
    }


def dumps_graph(graph: Multigraph) -> str:
    return json.dumps(graph_to_dict(graph), indent=1) + "\n"


def save_graph(graph: Multigraph, sink) -> None:
    """Write ``graph`` as JSON to a path or text file object; reservations are dropped."""
    text = dumps_graph(graph)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    value = obj[key]
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise ParseError(f"{where}: {key!r} must be {kind.__name__}")
    return value


def graph_from_dict(doc: dict) -> Multigraph:
    if not isinstance(doc, dict):
        raise ParseError("graph JSON must be an object")
    ixps = _require(doc, "ixps", list, "graph")
    endpoints = _require(doc, "endpoints", list, "graph")
    pathlets = _require(doc, "pathlets", list, "graph")
    g = Multigraph()
    declared_access: dict[str, list[int]] = {}
    try:
        for x in ixps:
            if not isinstance(x, str):
                raise ParseError("graph: IXP ids must be strings")
            if x in g.ixps:
                raise ParseError(f"graph: duplicate IXP {x!r}")
            g.add_ixp(x)
        for i, e in enumerate(endpoints):
            where = f"endpoints[{i}]"
            eid = _require(e, "id", str, where)
            prefixes = _require(e, "prefixes", list, where)
            access = _require(e, "access_pathlets", list, where)
            g.add_endpoint(eid, prefixes)
            declared_access[eid] = access
        for i, p in enumerate(pathlets):
            where = f"pathlets[{i}]"
            g.add_pathlet(
                Pathlet(
                    _require(p, "id", int, where),
                    _require(p, "kind", str, where),
                    _require(p, "a", str, where),
                    _require(p, "b", str, where),
                    _require(p, "asn", int, where),
                    _require(p, "capacity_mbps", int, where),
                    _require(p, "latency_ms", int, where),
                )
            )
    except GraphError as exc:
        raise ParseError(str(exc)) from None
    for eid, access in declared_access.items():
        if sorted(access) != sorted(g.endpoints[eid].access_pathlet_ids):
            raise ParseError(f"endpoint {eid!r}: access_pathlets do not match pathlets")
        if not access:
            raise ParseError(f"endpoint {eid!r} has no access pathlets")
    return g


def loads_graph(text: str) -> Multigraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return graph_from_dict(doc)


def load_graph(source) -> Multigraph:
    """Read a graph from a path or file object."""
    if hasattr(source, "read"):
        return loads_graph(_read_text(source))
    with open(source, encoding="utf-8") as fh:
        try:
            return loads_graph(fh.read())
        except ParseError as exc:
            raise ParseError(str(exc), source=str(source)) from None


def snapshot_report(table: MembershipTable, graph: Multigraph) -> dict:
    """Size summary for an ingested snapshot, compared to the 49k EuroIX figure.

    Deviation beyond 10% is flagged as snapshot drift (the reference
    snapshot is not available), not as a failure.
    """
    edges = sum(1 for _ in graph.transit_pathlets())
    deviation = (edges - PAPER_INTERCONNECTIONS) / PAPER_INTERCONNECTIONS
    return {
        "ixps": len(table),
        "member_asns": len(set().union(*table.values())) if table else 0,
        "transit_pathlets": edges,
        "reference_interconnections": PAPER_INTERCONNECTIONS,
        "relative_deviation": round(deviation, 4),
        "snapshot_drift": abs(deviation) > SNAPSHOT_DRIFT_TOLERANCE,
    }


def format_report(report: dict) -> str:
    buf = io.StringIO()
    for key, value in report.items():
        buf.write(f"{key}: {value}\n")
    if report.get("snapshot_drift"):
        buf.write(
            "note: transit pathlet count deviates more than 10% from the 49k "
            "EuroIX reference; treat as snapshot drift\n"
        )
    return buf.getvalue()

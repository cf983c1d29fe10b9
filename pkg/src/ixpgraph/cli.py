"""Command-line pipelines: ingest, stats, coverage, simulate, oracle.

Exit status is 0 on success, 1 on usage errors (bad flags, unreadable
paths) and 2 on data errors (parse failures, invariant violations,
refused oracle instances).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .analytics import greedy_anchors, pair_multiplicity_stats, parse_as_prefixes, parse_relationships
from .engine import Request
from .ingest import (
    AttributeModel,
    ParseError,
    SynthesisPolicy,
    attach_endpoints,
    build_multigraph,
    format_report,
    load_graph,
    parse_membership,
    save_graph,
    snapshot_report,
)
from .multigraph import GraphError
from .oracle import MAX_IXPS, MAX_REQUESTS, OracleRefused, offline_optimal
from .sim import ConservationError, ScenarioConfig, simulate, write_results


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _parse(path, parser):
    try:
        return parser(_read_bytes(path))
    except ParseError as exc:
        raise DataError(f"{path}:{exc.line}: {exc}" if exc.line else f"{path}: {exc}") from None


def _load_graph(path):
    _read_bytes(path)
    try:
        return load_graph(path)
    except (ParseError, GraphError) as exc:
        raise DataError(str(exc)) from None


def _attr(text):
    try:
        return AttributeModel.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_ingest(args, out):
    table = _parse(args.members, parse_membership)
    if not table:
        raise DataError(f"{args.members}: no memberships")
    policy = SynthesisPolicy(args.capacity, args.latency, args.seed)
    graph = build_multigraph(table, policy)
    report = snapshot_report(table, graph)
    if args.endpoints:
        attach_endpoints(graph, table, args.endpoints, policy, args.access_per_endpoint)
    save_graph(graph, args.out)
    out.write(format_report(report))


def cmd_stats(args, out):
    graph = _load_graph(args.graph)
    try:
        stats = pair_multiplicity_stats(graph)
    except ValueError as exc:
        raise DataError(f"{args.graph}: {exc}") from None
    prefix = args.out_prefix
    _write_csv(f"{prefix}pairs.csv", ["ixp_a", "ixp_b", "multiplicity"],
               [(a, b, m) for (a, b), m in stats.pairs.items()])
    _write_csv(f"{prefix}multiplicity_ccdf.csv", ["value", "fraction"],
               [(v, repr(f)) for v, f in stats.ccdf])
    _write_csv(f"{prefix}degree_ccdf.csv", ["value", "fraction"],
               [(v, repr(f)) for v, f in stats.degree_ccdf])
    out.write(f"connected_pairs: {len(stats.pairs)}\n")
    out.write(f"transit_pathlets: {sum(stats.pairs.values())}\n")
    out.write(f"median_multiplicity: {stats.median_multiplicity}\n")
    out.write(f"diversity_ratio_vs_direct: {stats.diversity_ratio}\n")


def cmd_coverage(args, out):
    table = _parse(args.members, parse_membership)
    prefixes = _parse(args.prefixes, parse_as_prefixes)
    rels = _parse(args.relationships, parse_relationships) if args.relationships else None
    try:
        result = greedy_anchors(table, prefixes, rels, args.k, cone=args.cone)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    rows = [
        (i + 1, x, g, repr(f4), repr(fa))
        for i, (x, g, f4, fa) in enumerate(
            zip(result.order, result.gains, result.fraction_of_ipv4, result.fraction_of_announced)
        )
    ]
    _write_csv(args.out, ["rank", "ixp", "gain_addresses", "fraction_of_ipv4", "fraction_of_announced"], rows)
    for r in rows:
        out.write(f"{r[0]}. {r[1]}  ipv4={float(r[3]):.4f}  announced={float(r[4]):.4f}\n")


def cmd_simulate(args, out):
    graph = _load_graph(args.graph)
    try:
        scenario = ScenarioConfig.from_dict(json.loads(_read_bytes(args.scenario)))
    except (ValueError, TypeError) as exc:
        raise DataError(f"{args.scenario}: {exc}") from None
    try:
        result = simulate(graph, scenario)
    except (GraphError, ConservationError, ValueError) as exc:
        raise DataError(str(exc)) from None
    write_results(result, args.out_dir, scenario.seed)
    m = result.metrics
    out.write(f"accepted {m.accepted} rejected {m.rejected} ratio {m.acceptance_ratio:.4f}\n")


def parse_requests(doc) -> list[Request]:
    if not isinstance(doc, list):
        raise ValueError("requests JSON must be an array")
    reqs = []
    for i, item in enumerate(doc):
        try:
            reqs.append(
                Request(i, item["src"], item["dst"], int(item["demand_mbps"]), int(item["latency_bound_ms"]))
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"requests[{i}]: missing or bad field {exc}") from None
    return reqs


def cmd_oracle(args, out):
    graph = _load_graph(args.graph)
    try:
        reqs = parse_requests(json.loads(_read_bytes(args.requests)))
        result = offline_optimal(graph, reqs, max_requests=args.max_requests, max_ixps=args.max_ixps)
    except OracleRefused as exc:
        raise DataError(f"oracle refused: {exc}") from None
    except (ValueError, GraphError) as exc:
        raise DataError(f"{args.requests}: {exc}") from None
    out.write(f"optimum {result.optimum}\n")
    for rid, path in result.assignment.items():
        ids = " ".join(str(p) for p in path.pathlets)
        out.write(f"request {rid}: pathlets [{ids}] latency {path.latency}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ixpgraph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("ingest", help="membership CSV -> multigraph JSON")
    s.add_argument("--members", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--capacity", type=_attr, default=AttributeModel(100, 1000))
    s.add_argument("--latency", type=_attr, default=AttributeModel(5, 50))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--endpoints", type=int, default=0, help="attach N synthetic client endpoints")
    s.add_argument("--access-per-endpoint", type=int, default=1)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("stats", help="pair multiplicity and degree CCDFs")
    s.add_argument("--graph", required=True)
    s.add_argument("--out-prefix", required=True)
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("coverage", help="greedy anchor selection and IPv4 coverage")
    s.add_argument("--members", required=True)
    s.add_argument("--prefixes", required=True)
    s.add_argument("--relationships")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--cone", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_coverage)

    s = sub.add_parser("simulate", help="run a discrete-event admission simulation")
    s.add_argument("--graph", required=True)
    s.add_argument("--scenario", required=True)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("oracle", help="exhaustive offline optimum for small instances")
    s.add_argument("--graph", required=True)
    s.add_argument("--requests", required=True)
    s.add_argument("--max-requests", type=int, default=MAX_REQUESTS)
    s.add_argument("--max-ixps", type=int, default=MAX_IXPS)
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("ixpgraph: a subcommand is required (ingest, stats, coverage, simulate, oracle)")
        args.func(args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except DataError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

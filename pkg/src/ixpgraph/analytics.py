"""Path-diversity distributions and IPv4 coverage of IXP anchor deployments."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .ingest import MembershipTable, ParseError, _read_text, parse_asn, read_csv_rows
from .multigraph import Multigraph
from .prefixes import IPV4_SPACE, PrefixSet

AsPrefixes = dict  # ASN -> list of CIDR strings
AsRelationships = dict  # provider ASN -> set of customer ASNs


def ccdf(values: Iterable) -> list[tuple]:
    """Empirical CCDF using the ``>=`` convention.

    Returns ``[(v, fraction of samples >= v), ...]`` for each distinct
    value, in increasing order.

    >>> ccdf([1, 1, 2, 5])
    [(1, 1.0), (2, 0.5), (5, 0.25)]
    """
    arr = np.asarray(list(values))
    if arr.size == 0:
        return []
    distinct, counts = np.unique(arr, return_counts=True)
    at_least = np.cumsum(counts[::-1])[::-1]
    fractions = at_least / arr.size
    return [(v.item(), float(f)) for v, f in zip(distinct, fractions)]


@dataclass
class MultiplicityStats:
    """Per IXP pair pathlet counts, plus the collapsed simple-graph baseline."""

    pairs: dict[tuple[str, str], int]
    ccdf: list[tuple]
    direct: dict[tuple[str, str], int]
    degree: dict[str, int]
    degree_ccdf: list[tuple]

    @property
    def median_multiplicity(self) -> float:
        return float(np.median(list(self.pairs.values())))

    @property
    def diversity_ratio(self) -> float:
        """Median multiplicity over the direct-connectivity baseline of 1."""
        return self.median_multiplicity / 1.0


def pair_multiplicity_stats(graph: Multigraph) -> MultiplicityStats:
    pairs: Counter = Counter()
    for p in graph.transit_pathlets():
        a, b = sorted((p.end_a, p.end_b))
        pairs[(a, b)] += 1
    if not pairs:
        raise ValueError("graph has no transit pathlets")
    pairs = dict(sorted(pairs.items()))
    degree: Counter = Counter({x: 0 for x in graph.ixps})
    for a, b in pairs:
        degree[a] += 1
        degree[b] += 1
    degree = dict(sorted(degree.items()))
    return MultiplicityStats(
        pairs=pairs,
        ccdf=ccdf(pairs.values()),
        direct={k: 1 for k in pairs},
        degree=degree,
        degree_ccdf=ccdf(degree.values()),
    )


# -- coverage -----------------------------------------------------------------


def parse_as_prefixes(data) -> AsPrefixes:
    """Parse an ``asn,prefix`` CSV."""
    out: AsPrefixes = {}
    for lineno, (asn_text, prefix) in read_csv_rows(data, ("asn", "prefix")):
        asn = parse_asn(asn_text, lineno)
        try:
            PrefixSet.from_cidrs([prefix])
        except ValueError as exc:
            raise ParseError(f"bad prefix {prefix!r}: {exc}", line=lineno) from None
        out.setdefault(asn, []).append(prefix)
    return out


def parse_relationships(data) -> AsRelationships:
    """Parse ``provider|customer|-1`` lines; comments and other codes are skipped."""
    rels: AsRelationships = {}
    for lineno, line in enumerate(_read_text(data).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("|")
        if len(fields) < 3:
            raise ParseError(f"expected provider|customer|code, got {line!r}", line=lineno)
        if fields[2].strip() != "-1":
            continue
        provider = parse_asn(fields[0], lineno)
        customer = parse_asn(fields[1], lineno)
        if provider != customer:
            rels.setdefault(provider, set()).add(customer)
    return rels


@dataclass
class CoverageReport:
    covered: PrefixSet
    fraction_of_ipv4: float
    fraction_of_announced: float
    ases: frozenset = field(default_factory=frozenset)


class CoverageModel:
    """Precomputed per-IXP address sets for repeated coverage queries."""

    def __init__(
        self,
        table: MembershipTable,
        as_prefixes: Mapping[int, list],
        relationships: Mapping[int, set] | None = None,
        cone: bool = False,
    ):
        self.table = table
        self.cone = cone
        self.relationships = relationships or {}
        self._as_space = {asn: PrefixSet.from_cidrs(cidrs) for asn, cidrs in as_prefixes.items()}
        self.announced = PrefixSet().union(*self._as_space.values())
        self._ixp_space: dict[str, PrefixSet] = {}

    def ases_of(self, ixps: Iterable[str]) -> frozenset:
        ases: set[int] = set()
        for x in ixps:
            if x not in self.table:
                raise KeyError(f"unknown anchor IXP {x!r}")
            ases |= self.table[x]
        if self.cone:
            for asn in list(ases):
                ases |= self.relationships.get(asn, set())
        return frozenset(ases)

    def space_of(self, ixp: str) -> PrefixSet:
        if ixp not in self._ixp_space:
            ases = self.ases_of([ixp])
            self._ixp_space[ixp] = PrefixSet().union(
                *(self._as_space[a] for a in sorted(ases) if a in self._as_space)
            )
        return self._ixp_space[ixp]

    def fractions(self, covered: PrefixSet) -> tuple[float, float]:
        announced = self.announced.size
        return covered.size / IPV4_SPACE, (covered.size / announced if announced else 0.0)

    def report(self, anchors: Iterable[str]) -> CoverageReport:
        anchors = sorted(set(anchors))
        ases = self.ases_of(anchors)
        covered = PrefixSet().union(*(self.space_of(x) for x in anchors))
        f4, fa = self.fractions(covered)
        return CoverageReport(covered, f4, fa, ases)


def coverage(
    table: MembershipTable,
    as_prefixes: Mapping[int, list],
    relationships: Mapping[int, set] | None,
    anchors: Iterable[str],
    cone: bool = False,
) -> CoverageReport:
    """Address space reachable through the members of ``anchors``.

    With ``cone=True`` the direct customers of every member AS are added
    (1-hop customer cone, not the recursive cone).
    """
    return CoverageModel(table, as_prefixes, relationships, cone).report(anchors)


@dataclass
class GreedyResult:
    order: list[str]
    gains: list[int]
    fraction_of_ipv4: list[float]
    fraction_of_announced: list[float]


def greedy_anchors(
    table: MembershipTable,
    as_prefixes: Mapping[int, list],
    relationships: Mapping[int, set] | None,
    k: int,
    cone: bool = False,
) -> GreedyResult:
    """Pick ``k`` IXPs one at a time by largest marginal address gain.

    Ties go to the lexicographically smallest IXP id. Zero-gain IXPs are
    still picked to reach ``k``.
    """
    if not 1 <= k <= len(table):
        raise ValueError(f"k must be in 1..{len(table)}, got {k}")
    model = CoverageModel(table, as_prefixes, relationships, cone)
    remaining = sorted(table)
    covered = PrefixSet()
    result = GreedyResult([], [], [], [])
    for _ in range(k):
        best = None
        for x in remaining:
            gain = covered.union(model.space_of(x)).size - covered.size
            if best is None or gain > best[0]:
                best = (gain, x)
        gain, pick = best
        remaining.remove(pick)
        covered = covered.union(model.space_of(pick))
        f4, fa = model.fractions(covered)
        result.order.append(pick)
        result.gains.append(gain)
        result.fraction_of_ipv4.append(f4)
        result.fraction_of_announced.append(fa)
    return result

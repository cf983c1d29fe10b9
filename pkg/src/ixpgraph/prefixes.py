"""IPv4 address sets as merged half-open intervals over [0, 2**32)."""

from __future__ import annotations

import ipaddress
from bisect import bisect_right
from typing import Iterable

IPV4_SPACE = 2**32


def cidr_interval(cidr: str) -> tuple[int, int]:
    net = ipaddress.IPv4Network(cidr.strip(), strict=False)
    start = int(net.network_address)
    return start, start + net.num_addresses


def _merge(intervals: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for start, end in sorted(intervals):
        if start >= end:
            continue
        if out and start <= out[-1][1]:
            if end > out[-1][1]:
                out[-1][1] = end
        else:
            out.append([start, end])
    return tuple((s, e) for s, e in out)


class PrefixSet:
    """Disjoint, sorted, fully merged address intervals.

    >>> PrefixSet.from_cidrs(["1.0.0.0/8", "1.0.0.0/16", "2.0.0.0/8"]).size == 2**25
    True
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple[int, int]] = ()):
        intervals = list(intervals)
        for s, e in intervals:
            if not 0 <= s <= e <= IPV4_SPACE:
                raise ValueError(f"interval [{s}, {e}) outside IPv4 space")
        self.intervals = _merge(intervals)

    @classmethod
    def from_cidrs(cls, cidrs: Iterable[str]) -> "PrefixSet":
        return cls([cidr_interval(c) for c in cidrs])

    @property
    def size(self) -> int:
        return sum(e - s for s, e in self.intervals)

    def union(self, *others: "PrefixSet") -> "PrefixSet":
        ivs = list(self.intervals)
        for o in others:
            ivs.extend(o.intervals)
        return PrefixSet(ivs)

    __or__ = union

    def __contains__(self, address) -> bool:
        if isinstance(address, str):
            address = int(ipaddress.IPv4Address(address))
        i = bisect_right(self.intervals, (address, IPV4_SPACE + 1)) - 1
        return i >= 0 and self.intervals[i][0] <= address < self.intervals[i][1]

    def issubset(self, other: "PrefixSet") -> bool:
        return self.union(other) == other

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        return isinstance(other, PrefixSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __repr__(self):
        shown = ", ".join(
            f"{ipaddress.IPv4Address(s)}-{ipaddress.IPv4Address(e - 1)}" for s, e in self.intervals[:4]
        )
        more = ", ..." if len(self.intervals) > 4 else ""
        return f"PrefixSet([{shown}{more}], size={self.size})"

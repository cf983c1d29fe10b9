"""Fixtures and brute-force oracles shared by the test modules.

The oracles here deliberately avoid the package's search code: paths are
enumerated as ordered IXP sequences (permutations) crossed with every
choice of parallel pathlet per hop.
"""

import ipaddress
import random
from itertools import combinations, permutations, product

from ixpgraph import ACCESS, TRANSIT, Multigraph, Pathlet

# lines printed by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

# G1 pathlet ids
P1, P2, P3, P4, A1, A2 = 1, 2, 3, 4, 10, 11


def make_g1():
    g = Multigraph(["X1", "X2", "X3"])
    g.add_endpoint("E1", ["10.0.0.0/24"])
    g.add_endpoint("E2", ["10.0.1.0/24"])
    g.add_pathlet(Pathlet(A1, ACCESS, "E1", "X1", 10, 1000, 1))
    g.add_pathlet(Pathlet(A2, ACCESS, "E2", "X3", 20, 1000, 1))
    g.add_pathlet(Pathlet(P1, TRANSIT, "X1", "X2", 100, 100, 10))
    g.add_pathlet(Pathlet(P2, TRANSIT, "X1", "X2", 200, 50, 5))
    g.add_pathlet(Pathlet(P3, TRANSIT, "X2", "X3", 100, 100, 10))
    g.add_pathlet(Pathlet(P4, TRANSIT, "X1", "X3", 300, 50, 30))
    return g


def random_instance(rng: random.Random, max_ixps=6, max_transit=15, lat_hi=20, cap=(10, 100)):
    """Small random substrate with endpoints E1, E2 (1-2 access pathlets each)."""
    n = rng.randint(2, max_ixps)
    ixps = [f"X{i}" for i in range(n)]
    g = Multigraph(ixps)
    pid = 0
    pairs = list(combinations(ixps, 2))
    for _ in range(rng.randint(1, max_transit)):
        a, b = rng.choice(pairs)
        g.add_pathlet(Pathlet(pid, TRANSIT, a, b, rng.randint(1, 9), rng.randint(*cap), rng.randint(1, lat_hi)))
        pid += 1
    for e in ("E1", "E2"):
        g.add_endpoint(e)
        for x in rng.sample(ixps, rng.randint(1, min(2, n))):
            g.add_pathlet(Pathlet(pid, ACCESS, e, x, rng.randint(1, 9), rng.randint(*cap), rng.randint(1, 5)))
            pid += 1
    return g


def brute_force_paths(g, src, dst, demand, bound):
    """All feasible simple paths as sorted ``(latency, pathlet ids)`` tuples."""
    ok = {pid: p for pid, p in g.pathlets.items() if p.residual >= demand}
    between = {}
    for pid, p in ok.items():
        if p.kind == TRANSIT:
            between.setdefault(frozenset((p.end_a, p.end_b)), []).append(p)
    found = set()
    src_access = [ok[i] for i in g.endpoints[src].access_pathlet_ids if i in ok]
    dst_access = [ok[i] for i in g.endpoints[dst].access_pathlet_ids if i in ok]
    others = sorted(g.ixps)
    for sa in src_access:
        for da in dst_access:
            first, last = sa.end_b, da.end_b
            if first == last:
                seqs = [[first]]
            else:
                mid = [x for x in others if x not in (first, last)]
                seqs = [
                    [first, *m, last] for r in range(len(mid) + 1) for m in permutations(mid, r)
                ]
            for seq in seqs:
                hops = [between.get(frozenset(pair), []) for pair in zip(seq, seq[1:])]
                for choice in product(*hops):
                    ids = (sa.id, *(p.id for p in choice), da.id)
                    lat = sa.latency + da.latency + sum(p.latency for p in choice)
                    if lat <= bound:
                        found.add((lat, ids))
    return sorted(found)


def brute_force_optimum(g, requests):
    """Max concurrently admissible requests by trying every subset and path combo."""
    options = [brute_force_paths(g, r.src, r.dst, r.demand, r.latency_bound) for r in requests]
    n = len(requests)
    for size in range(n, 0, -1):
        for subset in combinations(range(n), size):
            for combo in product(*(options[i] for i in subset)):
                load = {}
                for i, (_, ids) in zip(subset, combo):
                    for pid in ids:
                        load[pid] = load.get(pid, 0) + requests[i].demand
                if all(load[pid] <= g.pathlets[pid].residual for pid in load):
                    return size
    return 0


def random_membership(rng, n_ixps=10, n_asns=30, density=0.3):
    table = {}
    for i in range(n_ixps):
        members = {a for a in range(1, n_asns + 1) if rng.random() < density}
        if members:
            table[f"IX{i:02d}"] = members
    return table or {"IX00": {1}}


def oracle_size(cidrs):
    nets = [ipaddress.IPv4Network(c, strict=False) for c in cidrs]
    return sum(n.num_addresses for n in ipaddress.collapse_addresses(nets))


def random_coverage_instance(rng, n_ixps=10, n_asns=40):
    table = {f"IX{i}": {rng.randint(1, n_asns) for _ in range(rng.randint(1, 6))} for i in range(n_ixps)}
    prefixes = {}
    for asn in range(1, n_asns + 1):
        prefixes[asn] = [
            str(ipaddress.IPv4Network((rng.randrange(2**32), rng.randint(8, 20)), strict=False))
            for _ in range(rng.randint(0, 3))
        ]
    rels = {}
    for _ in range(n_asns):
        p, c = rng.sample(range(1, n_asns + 1), 2)
        rels.setdefault(p, set()).add(c)
    return table, prefixes, rels


def greedy_oracle(table, prefixes, rels, k, cone):
    """Re-derive each greedy step with collapse_addresses over all candidates."""

    def cidrs_of(ixps):
        ases = set().union(*(table[x] for x in ixps)) if ixps else set()
        if cone:
            ases |= set().union(*(rels.get(a, set()) for a in list(ases))) if ases else set()
        return [c for a in ases for c in prefixes.get(a, [])]

    chosen = []
    for _ in range(k):
        base = oracle_size(cidrs_of(chosen))
        gains = {x: oracle_size(cidrs_of(chosen + [x])) - base for x in table if x not in chosen}
        top = max(gains.values())
        chosen.append(min(x for x, g in gains.items() if g == top))
    return chosen

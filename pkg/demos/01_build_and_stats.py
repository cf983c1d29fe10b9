"""
Building an IXP multigraph from membership data
===============================================

Every pair of IXPs that shares a member ISP gets one transit pathlet per
shared ISP, so well-connected IXP pairs end up with many parallel edges.
"""

import random

from ixpgraph import SynthesisPolicy, build_multigraph, format_report, pair_multiplicity_stats, snapshot_report

# a toy membership table: 12 IXPs, 40 ASNs, each AS present at ~35% of IXPs
rng = random.Random(1)
table = {f"IX{i:02d}": {a for a in range(1, 41) if rng.random() < 0.35} for i in range(12)}

g = build_multigraph(table, SynthesisPolicy(seed=1))
print(g)
print(format_report(snapshot_report(table, g)))

# per-pair multiplicity: how many parallel pathlets connect each IXP pair
stats = pair_multiplicity_stats(g)
print("median multiplicity", stats.median_multiplicity)
print("diversity vs one direct link", stats.diversity_ratio)
for value, frac in stats.ccdf[:8]:
    print(f"  P[multiplicity >= {value}] = {frac:.3f}")

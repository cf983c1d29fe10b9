"""
A small simulation sweep
========================

Poisson arrivals on a synthetic substrate, with and without hybrid
re-embedding, across a handful of seeds.
"""

import random

import numpy as np

from ixpgraph import AttributeModel, ScenarioConfig, SynthesisPolicy, attach_endpoints, build_multigraph, run_simulation
from ixpgraph.sim import HybridConfig, IntRange, generate_workload

ratios = {True: [], False: []}
for seed in range(5):
    rng = random.Random(seed)
    table = {f"IX{i}": {a for a in range(1, 21) if rng.random() < 0.7} for i in range(8)}
    pol = SynthesisPolicy(AttributeModel(50, 200), AttributeModel(5, 30), seed=seed)
    g = build_multigraph(table, pol)
    attach_endpoints(g, table, 8, pol)

    base = ScenarioConfig(seed=seed, arrival_rate=3.0, mean_duration=40, demand=IntRange(30, 120),
                          latency_bound=IntRange(15, 50), horizon=60, failure_rate=0.01)
    # one workload, replayed under both admission modes
    workload = generate_workload(g, base)
    for hybrid in (True, False):
        sc = base.with_overrides(hybrid=HybridConfig(hybrid, 3 if hybrid else 0))
        m = run_simulation(g, workload, sc).metrics
        ratios[hybrid].append(m.acceptance_ratio)
        print(seed, "hybrid" if hybrid else "online", m.summary(seed))

print("mean acceptance: hybrid %.3f, online %.3f" % (np.mean(ratios[True]), np.mean(ratios[False])))

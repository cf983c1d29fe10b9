"""
Admitting QoS requests online
=============================

Three IXPs, two endpoints.  The first request grabs the fastest path; a
second, tighter request only fits if the first one moves aside.
"""

from ixpgraph import (
    ACCESS, TRANSIT, EngineState, Multigraph, Pathlet, Request, SamplerConfig, SelectionPolicy,
    check_conservation, handle_pathlet_failure, hybrid_admit, try_embed,
)

g = Multigraph(["X1", "X2", "X3"])
g.add_endpoint("E1", ["10.0.0.0/24"])
g.add_endpoint("E2", ["10.0.1.0/24"])
g.add_pathlet(Pathlet(10, ACCESS, "E1", "X1", 10, 1000, 1))
g.add_pathlet(Pathlet(11, ACCESS, "E2", "X3", 20, 1000, 1))
g.add_pathlet(Pathlet(1, TRANSIT, "X1", "X2", 100, 100, 10))
g.add_pathlet(Pathlet(2, TRANSIT, "X1", "X2", 200, 50, 5))
g.add_pathlet(Pathlet(3, TRANSIT, "X2", "X3", 100, 100, 10))
g.add_pathlet(Pathlet(4, TRANSIT, "X1", "X3", 300, 50, 30))

sampler = SamplerConfig("ksp", k=10)
policy = SelectionPolicy.MIN_LATENCY
state = EngineState(g)

first = try_embed(state, Request(1, "E1", "E2", demand=40, latency_bound=40), sampler, policy)
print("r1 on", first.primary_path.pathlets, f"({first.primary_path.latency} ms)")

r2 = Request(2, "E1", "E2", demand=70, latency_bound=25)
print("r2 plain admission:", try_embed(state, r2, sampler, policy))

# hybrid admission may move one live embedding to make room
second, moves = hybrid_admit(state, r2, sampler, policy, max_reembeds=3)
print("r2 on", second.primary_path.pathlets, "after moving", [(m.request_id, m.new_path.pathlets) for m in moves])
print("conservation problems:", check_conservation(state))

# pathlet 3 fails: r2 is repaired if any feasible path remains
report = handle_pathlet_failure(state, 3, sampler, policy)
print("after failure: reembedded", report.reembedded, "dropped", report.dropped)

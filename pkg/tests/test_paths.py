import random

import pytest

from helpers import A1, A2, P1, P2, P3, P4, brute_force_paths, make_g1, random_instance
from ixpgraph import GraphError, enumerate_paths, k_shortest_paths, min_latency_path, random_walk_paths
from ixpgraph.paths import check_path

# frozen from brute_force_paths on G1
G1_PATHS = [(17, (A1, P2, P3, A2)), (22, (A1, P1, P3, A2)), (32, (A1, P4, A2))]


@pytest.mark.parametrize(
    "demand, bound, expected",
    [(20, 40, (17, (A1, P2, P3, A2))), (60, 40, (22, (A1, P1, P3, A2))), (20, 10, None)],
)
def test_min_latency_path_g1(g1, demand, bound, expected):
    p = min_latency_path(g1, "E1", "E2", demand, bound)
    assert (p and (p.latency, p.pathlets)) == expected


def test_min_latency_path_unknown_endpoint(g1):
    with pytest.raises(GraphError):
        min_latency_path(g1, "E1", "E7", 1, 10)


@pytest.mark.parametrize("bound, k, expected", [(40, 3, G1_PATHS), (25, 3, G1_PATHS[:2]), (40, 1, G1_PATHS[:1])])
def test_ksp_g1(g1, bound, k, expected):
    got = k_shortest_paths(g1, "E1", "E2", 20, bound, k)
    assert [(p.latency, p.pathlets) for p in got] == expected


def test_path_structure(g1):
    p = min_latency_path(g1, "E1", "E2", 20, 40)
    assert p.nodes == ("E1", "X1", "X2", "X3", "E2")
    assert p.transit == (P2, P3)
    assert p.intermediate_ixps == ("X2",)
    assert p.anchors == ("X1", "X3")
    check_path(g1, p, "E1", "E2", 20)


def test_random_walk_sound_and_deterministic(g1):
    runs = [random_walk_paths(g1, "E1", "E2", 20, 40, 200, 6, seed) for seed in (1, 2, 3)]
    for got in runs:
        assert {(p.latency, p.pathlets) for p in got} <= set(G1_PATHS)
    assert {(p.latency, p.pathlets) for p in runs[0]} == set(G1_PATHS)
    assert random_walk_paths(g1, "E1", "E2", 20, 40, 200, 6, 9) == random_walk_paths(g1, "E1", "E2", 20, 40, 200, 6, 9)
    assert random_walk_paths(g1, "E1", "E2", 20, 40, 0, 6, 1) == []
    # max_len=3 only admits the 3-pathlet path
    short = random_walk_paths(g1, "E1", "E2", 20, 40, 100, 3, 1)
    assert [p.pathlets for p in short] == [(A1, P4, A2)]


def test_random_instances_against_brute_force():
    rng = random.Random(2024)
    for _ in range(120):
        g = random_instance(rng)
        demand = rng.randint(5, 60)
        bound = rng.randint(5, 80)
        truth = brute_force_paths(g, "E1", "E2", demand, bound)
        best = min_latency_path(g, "E1", "E2", demand, bound)
        assert (best.latency if best else None) == (truth[0][0] if truth else None)
        ksp = k_shortest_paths(g, "E1", "E2", demand, bound, 10**6)
        assert [(p.latency, p.pathlets) for p in ksp] == truth
        assert [(p.latency, p.pathlets) for p in enumerate_paths(g, "E1", "E2", demand, bound)] == truth
        for k in (1, 2, 3, 5):
            got = k_shortest_paths(g, "E1", "E2", demand, bound, k)
            assert [(p.latency, p.pathlets) for p in got] == truth[:k]
        for p in ksp:
            check_path(g, p, "E1", "E2", demand)


def test_enumerate_limit(g1):
    with pytest.raises(OverflowError):
        enumerate_paths(g1, "E1", "E2", 1, 100, limit=2)

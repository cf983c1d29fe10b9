import pytest
from hypothesis import given, strategies as st

from helpers import A1, A2, P1, P2, P3, P4, make_g1
from ixpgraph import ACCESS, TRANSIT, GraphError, InsufficientResidual, Multigraph, Pathlet


def test_add_pathlet_parallel_edges():
    g = Multigraph(["X1", "X2"])
    g.add_pathlet(Pathlet(1, TRANSIT, "X1", "X2", 100, 100, 10))
    assert len(g.pathlets) == 1
    assert g.parallel_edge_count("X1", "X2") == 1
    g.add_pathlet(Pathlet(2, TRANSIT, "X1", "X2", 200, 50, 5))
    assert g.parallel_edge_count("X1", "X2") == 2
    assert g.parallel_edge_count("X2", "X1") == 2
    with pytest.raises(GraphError, match="duplicate"):
        g.add_pathlet(Pathlet(1, TRANSIT, "X1", "X2", 100, 100, 10))


@pytest.mark.parametrize(
    "pathlet, match",
    [
        (Pathlet(5, TRANSIT, "X1", "X9", 1, 10, 1), "unknown node"),
        (Pathlet(5, TRANSIT, "X1", "X2", 1, 0, 1), "positive"),
        (Pathlet(5, TRANSIT, "X1", "X2", 1, 10, -3), "positive"),
        (Pathlet(5, TRANSIT, "X1", "X1", 1, 10, 1), "self-loop"),
        (Pathlet(5, ACCESS, "X1", "X2", 1, 10, 1), "endpoint"),
        (Pathlet(5, TRANSIT, "X1", "E1", 1, 10, 1), "two IXPs"),
    ],
)
def test_add_pathlet_rejects(pathlet, match):
    g = Multigraph(["X1", "X2"])
    g.add_endpoint("E1")
    with pytest.raises(GraphError, match=match):
        g.add_pathlet(pathlet)


def test_reserve_and_release(g1):
    g1.reserve(P1, 40)
    assert (g1.pathlets[P1].reserved, g1.pathlets[P1].residual) == (40, 60)
    g1.reserve(P1, 20)
    with pytest.raises(InsufficientResidual):
        g1.reserve(P1, 41)
    g1.reserve(P1, 40)
    assert g1.pathlets[P1].residual == 0

    g2 = make_g1()
    g2.reserve(P1, 40)
    with pytest.raises(GraphError):
        g2.release(P1, 41)
    g2.release(P1, 40)
    assert g2.pathlets[P1].reserved == 0
    with pytest.raises(GraphError, match="unknown"):
        g2.reserve(99, 1)


@given(st.integers(1, 100), st.integers(0, 100))
def test_reserve_release_round_trip(d, pre):
    g = make_g1()
    if pre:
        g.reserve(P1, pre)
    before = g.canonical()
    if d <= g.pathlets[P1].residual:
        g.reserve(P1, d)
        g.release(P1, d)
        assert g.canonical() == before


def test_parallel_edge_count_g1(g1):
    assert g1.parallel_edge_count("X1", "X2") == 2
    assert g1.parallel_edge_count("X1", "X3") == 1
    assert g1.parallel_edge_count("X1", "X1") == 0
    with pytest.raises(GraphError):
        g1.parallel_edge_count("X1", "nope")


def test_feasible_view(g1):
    assert g1.feasible_view(60).pathlet_ids() == {A1, A2, P1, P3}
    assert g1.feasible_view(20, {P3}).pathlet_ids() == {A1, A2, P1, P2, P4}
    assert g1.feasible_view(10**6).pathlet_ids() == set()
    g1.reserve(P1, 50)
    assert P1 not in g1.feasible_view(51).pathlet_ids()
    assert g1.pathlets[P1].reserved == 50  # view does not mutate


def test_adjacency_consistency(g1):
    g1.check()
    for pid, p in g1.pathlets.items():
        holders = [n for n, ids in g1.adjacency.items() if pid in ids]
        assert sorted(holders) == sorted([p.end_a, p.end_b])
    g1.remove_pathlet(P3)
    g1.check()
    assert P3 not in g1.adjacency["X2"]


def test_copy_is_independent(g1):
    g1.reserve(P2, 10)
    c = g1.copy()
    assert c == g1
    c.reserve(P2, 10)
    assert c != g1

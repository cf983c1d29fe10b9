import random

import pytest

from helpers import A1, A2, P1, P2, P3, P4, brute_force_paths, make_g1, random_instance
from ixpgraph import (
    EngineState,
    Request,
    SamplerConfig,
    SelectionPolicy,
    check_conservation,
    handle_pathlet_failure,
    hybrid_admit,
    release_embedding,
    sample_paths,
    select_path,
    try_embed,
)
from ixpgraph.engine import EngineError, disjoint
from ixpgraph.paths import check_path

KSP = SamplerConfig("ksp", k=10)
DIJ = SamplerConfig("dijkstra")
WALK = SamplerConfig("random_walk", walks=100, max_len=6, seed=3)
ML = SelectionPolicy.MIN_LATENCY


def req(i, demand, bound, backup=False):
    return Request(i, "E1", "E2", demand, bound, wants_backup=backup)


def test_request_validation():
    with pytest.raises(ValueError):
        Request(0, "E1", "E1", 1, 1)
    with pytest.raises(ValueError):
        Request(0, "E1", "E2", 0, 1)


def test_sample_paths_g1(g1):
    assert [p.latency for p in sample_paths(g1, req(0, 20, 40), DIJ)] == [17]
    assert len(sample_paths(g1, req(0, 20, 40), KSP)) == 3
    assert sample_paths(g1, req(0, 10**6, 40), KSP) == []
    walks = sample_paths(g1, req(0, 20, 40), WALK)
    assert {p.pathlets for p in walks} <= {(A1, P2, P3, A2), (A1, P1, P3, A2), (A1, P4, A2)}


def test_sample_paths_pools_access_pairs():
    rng = random.Random(5)
    for _ in range(40):
        g = random_instance(rng)
        truth = brute_force_paths(g, "E1", "E2", 10, 60)
        got = sample_paths(g, req(0, 10, 60), SamplerConfig("ksp", k=10**6))
        assert sorted((p.latency, p.pathlets) for p in got) == truth
        dij = sample_paths(g, req(0, 10, 60), DIJ)
        assert [p.latency for p in dij] == [t[0] for t in truth[:1]]


@pytest.mark.parametrize(
    "policy, expected",
    [
        (SelectionPolicy.MIN_LATENCY, (A1, P2, P3, A2)),
        (SelectionPolicy.MIN_HOPS, (A1, P4, A2)),
        (SelectionPolicy.WIDEST, (A1, P1, P3, A2)),
    ],
)
def test_select_path_g1(g1, policy, expected):
    cands = sample_paths(g1, req(0, 20, 40), KSP)
    assert select_path(cands, policy, 20, g1).pathlets == expected


def test_least_stress_exact(g1):
    from fractions import Fraction as F

    cands = sample_paths(g1, req(0, 20, 40), KSP)
    stress = {
        (A1, P2, P3, A2): 2 * F(20, 1000) + F(20, 50) + F(20, 100),
        (A1, P1, P3, A2): 2 * F(20, 1000) + F(20, 100) + F(20, 100),
        (A1, P4, A2): 2 * F(20, 1000) + F(20, 50),
    }
    # p1+p3 and p4 tie on stress; latency 22 < 32 breaks it
    assert stress[(A1, P1, P3, A2)] == stress[(A1, P4, A2)] < stress[(A1, P2, P3, A2)]
    assert select_path(cands, SelectionPolicy.LEAST_STRESS, 20, g1).pathlets == (A1, P1, P3, A2)
    with pytest.raises(EngineError):
        select_path([], ML, 20, g1)


def test_try_embed_then_reject(g1):
    st = EngineState(g1)
    emb = try_embed(st, req(1, 40, 40), KSP, ML)
    assert emb.primary_path.pathlets == (A1, P2, P3, A2)
    assert g1.pathlets[P2].residual == 10 and g1.pathlets[P3].residual == 60
    before = st.fingerprint()
    assert try_embed(st, req(2, 70, 25), KSP, ML) is None
    assert st.fingerprint() == before


def test_try_embed_with_backup(g1):
    st = EngineState(g1)
    emb = try_embed(st, req(1, 20, 40, backup=True), KSP, ML)
    assert emb.primary_path.pathlets == (A1, P2, P3, A2)
    assert emb.backup_path.pathlets == (A1, P4, A2)
    assert disjoint(emb.primary_path, emb.backup_path)
    assert g1.pathlets[P4].reserved == 20 and g1.pathlets[A1].reserved == 40
    assert check_conservation(st) == []


def test_backup_unavailable_rejects_whole_request(g1):
    st = EngineState(g1)
    before = st.fingerprint()
    assert try_embed(st, req(1, 20, 25, backup=True), KSP, ML) is None
    assert st.fingerprint() == before


def test_release_embedding(g1):
    st = EngineState(g1)
    emb = try_embed(st, req(1, 20, 40, backup=True), KSP, ML)
    release_embedding(st, emb)
    assert all(p.reserved == 0 for p in g1.pathlets.values())
    with pytest.raises(EngineError):
        release_embedding(st, emb)


def test_hybrid_admit_moves_one(g1):
    st = EngineState(g1)
    try_embed(st, req(1, 40, 40), KSP, ML)
    r2 = req(2, 70, 25)
    assert try_embed(st, r2, KSP, ML) is None
    emb, moves = hybrid_admit(st, r2, KSP, ML, max_reembeds=3)
    assert emb.primary_path.pathlets == (A1, P1, P3, A2)
    assert st.embeddings[1].primary_path.pathlets == (A1, P4, A2)
    assert [(m.request_id, m.new_path.pathlets) for m in moves] == [(1, (A1, P4, A2))]
    assert check_conservation(st) == []


@pytest.mark.parametrize("sampler", [KSP, DIJ, WALK])
def test_hybrid_with_other_samplers(g1, sampler):
    st = EngineState(g1)
    try_embed(st, req(1, 40, 40), sampler, ML)
    emb, _ = hybrid_admit(st, req(2, 70, 25), sampler, ML, 1)
    assert emb is not None and len(st.embeddings) == 2


def test_hybrid_rollback(g1):
    st = EngineState(g1)
    try_embed(st, req(1, 40, 25), KSP, ML)
    before = st.fingerprint()
    assert hybrid_admit(st, req(2, 70, 25), KSP, ML, 3) == (None, [])
    assert st.fingerprint() == before
    st2 = EngineState(make_g1())
    try_embed(st2, req(1, 40, 40), KSP, ML)
    before = st2.fingerprint()
    assert hybrid_admit(st2, req(2, 70, 25), KSP, ML, 0) == (None, [])
    assert st2.fingerprint() == before


def test_failure_reembeds(g1):
    st = EngineState(g1)
    try_embed(st, req(1, 40, 40), KSP, ML)
    rep = handle_pathlet_failure(st, P3, KSP, ML)
    assert rep.reembedded == [1] and rep.dropped == []
    assert st.embeddings[1].primary_path.pathlets == (A1, P4, A2)
    assert P3 not in g1.pathlets
    assert check_conservation(st) == []


def test_failure_drops(g1):
    st = EngineState(g1)
    try_embed(st, req(1, 40, 25), KSP, ML)
    rep = handle_pathlet_failure(st, P3, KSP, ML)
    assert rep.dropped == [1] and 1 not in st.embeddings
    assert all(p.reserved == 0 for p in g1.pathlets.values())


def test_failure_unused_and_unknown(g1):
    st = EngineState(g1)
    try_embed(st, req(1, 40, 40), KSP, ML)
    rep = handle_pathlet_failure(st, P4, KSP, ML)
    assert (rep.reembedded, rep.dropped) == ([], [])
    assert P4 not in g1.pathlets
    with pytest.raises(Exception):
        handle_pathlet_failure(st, 999, KSP, ML)


def test_failure_promotes_backup(g1):
    st = EngineState(g1)
    try_embed(st, req(1, 20, 40, backup=True), KSP, ML)
    rep = handle_pathlet_failure(st, P2, KSP, ML)
    e = st.embeddings[1]
    assert e.primary_path.pathlets == (A1, P4, A2)
    # X2 is intermediate only for the old primary; the new backup may use it again
    assert e.backup_path.pathlets == (A1, P1, P3, A2)
    assert disjoint(e.primary_path, e.backup_path)
    assert rep.reembedded == [1] and rep.downgraded == []
    assert check_conservation(st) == []


def test_failure_downgrades_without_new_backup(g1):
    st = EngineState(g1)
    try_embed(st, req(1, 20, 40, backup=True), KSP, ML)
    handle_pathlet_failure(st, P1, KSP, ML)
    rep = handle_pathlet_failure(st, P2, KSP, ML)
    e = st.embeddings[1]
    assert e.primary_path.pathlets == (A1, P4, A2) and e.backup_path is None
    assert rep.downgraded == [1]
    assert check_conservation(st) == []


def test_random_admission_soundness():
    rng = random.Random(77)
    for _ in range(60):
        g = random_instance(rng)
        st = EngineState(g)
        sampler = rng.choice([KSP, DIJ, WALK])
        policy = rng.choice(list(SelectionPolicy))
        for i in range(6):
            r = Request(i, "E1", "E2", rng.randint(5, 50), rng.randint(10, 60), wants_backup=rng.random() < 0.5)
            before = st.fingerprint()
            emb = try_embed(st, r, sampler, policy)
            if emb is None:
                emb, _ = hybrid_admit(st, r, sampler, policy, 2)
            if emb is None:
                assert st.fingerprint() == before
                continue
            for p in emb.paths():
                check_path(g, p, "E1", "E2")
                assert p.latency <= r.latency_bound
            if emb.backup_path:
                assert disjoint(emb.primary_path, emb.backup_path)
            assert check_conservation(st) == []
        pid = rng.choice(sorted(g.pathlets))
        handle_pathlet_failure(st, pid, sampler, policy)
        assert check_conservation(st) == []
        for e in st.embeddings.values():
            if e.backup_path:
                assert disjoint(e.primary_path, e.backup_path)

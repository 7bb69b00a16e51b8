import math

import numpy as np
import pytest

from spantree.embedders import (
    ClaimInfeasible,
    Embedding,
    EmbeddingFailure,
    PreconditionError,
    RetriesExhausted,
    embed_high_range,
    embed_low_range,
    embed_tree,
    embed_with_bare_paths,
    embed_with_spread_leaves,
    find_dominating_clique,
    low_range_properties,
    sample_low_range_sets,
    verify_embedding,
)
from spantree.graph_core import (
    Graph,
    RegimeError,
    complete_minus_bounded_subgraph,
    gnp_sample,
    make_rng,
    min_degree,
    regime_params,
)
from spantree.oracle import OracleStatus, contains_spanning_tree
from spantree.trees import Tree, build_extremal, random_tree_bounded_degree


def dominating_pairs(g: Graph) -> np.ndarray:
    """Boolean matrix D with D[u, v] iff {u, v} dominates g (closed neighbourhoods)."""
    a = g.adjacency_matrix().astype(np.int32) + np.eye(g.n, dtype=np.int32)
    missed = (1 - a) @ (1 - a).T  # vertices outside both closed neighbourhoods
    return missed == 0


# -- verification ------------------------------------------------------------

def test_verify_identity_path_in_cycle():
    assert verify_embedding(Graph.cycle(5), Tree.path(5), Embedding({i: i for i in range(5)})) is None


def test_verify_catches_each_violation():
    g, t = Graph.cycle(5), Tree.path(5)
    assert verify_embedding(g, t, {0: 0, 1: 0, 2: 2, 3: 3, 4: 4}).kind == "injectivity"
    assert verify_embedding(g, t, {0: 0, 1: 2, 2: 1, 3: 3, 4: 4}).kind == "edge"
    assert verify_embedding(g, t, {0: 0, 1: 1}).kind == "totality"
    assert verify_embedding(g, t, {0: 0, 1: 1}, require_total=False) is None
    assert verify_embedding(g, t, {0: 9}).kind == "range"


def test_embedding_rejects_reuse():
    e = Embedding()
    e.place(0, 3)
    with pytest.raises(ValueError):
        e.place(1, 3)
    with pytest.raises(ValueError):
        e.place(0, 4)


# -- bare paths ---------------------------------------------------------------

def test_bare_paths_complete_host():
    g, t = Graph.complete(100), Tree.path(100)
    assert verify_embedding(g, t, embed_with_bare_paths(g, t, 1)) is None


def test_bare_paths_near_complete_host():
    # removing a max-degree-4 subgraph leaves n - δ <= 5 = m
    g = complete_minus_bounded_subgraph(500, 4, 1)
    t = Tree.path(500)
    assert min_degree(g) >= 495
    assert verify_embedding(g, t, embed_with_bare_paths(g, t, 5)) is None


def test_bare_paths_needs_paths():
    with pytest.raises(PreconditionError):
        embed_with_bare_paths(Graph.complete(30), Tree.star(30), 0.2)


def test_bare_paths_strict_hypotheses():
    g = complete_minus_bounded_subgraph(200, 4, 0)
    with pytest.raises(PreconditionError):
        embed_with_bare_paths(g, Tree.path(200), 3)  # m > n/100
    with pytest.raises(PreconditionError):
        embed_with_bare_paths(g, Tree.path(200), 1)  # δ < n - m


def test_bare_paths_relaxed_on_spider():
    g = complete_minus_bounded_subgraph(301, 3, 2)
    t = Tree.spider(10, 30)
    assert verify_embedding(g, t, embed_with_bare_paths(g, t, 4, strict=False)) is None


# -- spread leaves ------------------------------------------------------------

@pytest.mark.parametrize("seed", range(3))
def test_spread_leaves_complete_host_first_attempt(seed):
    n = 120
    g = Graph.complete(n)
    for t in (Tree.star(n), random_tree_bounded_degree(n, 8, seed), build_extremal(n, 40)[0]):
        e = embed_with_spread_leaves(g, t, t.leaves(), 1, retries=1, seed=seed, strict=False)
        assert verify_embedding(g, t, e) is None


@pytest.mark.parametrize("seed", range(5))
def test_spread_leaves_spider(seed):
    legs, length = 160, 10
    n = 1 + legs * length
    m = math.sqrt(n) / 5
    g = complete_minus_bounded_subgraph(n, 7, seed)
    assert min_degree(g) >= n - m
    t = Tree.spider(legs, length)
    e = embed_with_spread_leaves(g, t, t.leaves(), m, seed=seed)
    assert verify_embedding(g, t, e) is None


def test_spread_leaves_rejects_concentrated_leaves():
    n = 200
    t, _ = build_extremal(n, 100)
    with pytest.raises(PreconditionError, match="carries"):
        embed_with_spread_leaves(Graph.complete(n), t, t.leaves(), 1)


def test_spread_leaves_rejects_non_leaves():
    t = Tree.path(6)
    with pytest.raises(PreconditionError):
        embed_with_spread_leaves(Graph.complete(6), t, [0, 2], 1, strict=False)


def test_spread_leaves_gives_up_with_diagnostics():
    # a star cannot be placed in a cycle: every attempt must fail and be recorded
    g, t = Graph.cycle(8), Tree.star(8)
    with pytest.raises(RetriesExhausted) as exc:
        embed_with_spread_leaves(g, t, t.leaves(), 5, retries=4, strict=False)
    assert exc.value.retries == 4 and len(exc.value.detail) == 4


# -- dominating cliques ---------------------------------------------------------

def test_dominating_clique_complete_and_star():
    c = find_dominating_clique(Graph.complete(30), 2)
    assert len(c) == 2
    assert find_dominating_clique(Graph.star(20), 1) == (0,)


def test_dominating_clique_against_pair_scan():
    for seed in range(5):
        g = gnp_sample(400, 0.9, seed)
        d = dominating_pairs(g) & g.adjacency_matrix()
        if d.any():
            u, v = find_dominating_clique(g, 2, seed=seed)
            assert g.has_edge(u, v) and d[u, v]
        else:
            with pytest.raises(EmbeddingFailure):
                find_dominating_clique(g, 2, seed=seed)


# -- high range ----------------------------------------------------------------

def test_high_range_broom_complete_host():
    n, delta = 400, 134
    t, _ = build_extremal(n, delta)
    params = regime_params(n, delta, 1.0, regime="high")
    g = Graph.complete(n)
    assert verify_embedding(g, t, embed_high_range(g, t, params)) is None


def test_high_range_requires_two_core_vertices():
    with pytest.raises(RegimeError):
        regime_params(400, 200, 1.0, regime="high")


def test_high_range_relaxed_on_random_host():
    n, delta = 400, 134
    t, _ = build_extremal(n, delta)
    params = regime_params(n, delta, 0.6, regime="high")
    ok = 0
    for seed in range(5):
        g = gnp_sample(n, 1 - n ** -0.8, seed)
        try:
            e = embed_high_range(g, t, params, seed=seed, strict=False)
        except EmbeddingFailure:
            continue
        assert verify_embedding(g, t, e) is None
        ok += 1
    assert ok >= 1


def test_high_range_strict_rejects_deficient_host():
    n, delta = 400, 134
    t, _ = build_extremal(n, delta)
    params = regime_params(n, delta, 0.6, regime="high")
    g = gnp_sample(n, 1 - n ** -0.8, 0)
    with pytest.raises(PreconditionError):
        embed_high_range(g, t, params, strict=True)


# -- low range -----------------------------------------------------------------

def test_low_range_properties_hold_on_complete_graph():
    params = regime_params(2000, 200, 2.0, 12, 0.1, regime="low")
    g = Graph.complete(2000)
    for s in range(3):
        state = sample_low_range_sets(g, params, 20, make_rng(s))
        assert low_range_properties(state, params) == []


def test_low_range_broom_on_complete_graph():
    params = regime_params(2000, 200, 2.0, 12, 0.1, regime="low")
    g = Graph.complete(2000)
    t, _ = build_extremal(2000, 200)
    with pytest.raises(ClaimInfeasible):
        embed_low_range(g, t, params)
    assert verify_embedding(g, t, embed_low_range(g, t, params, strict=False)) is None


def test_low_range_claim_fails_at_desk_scale():
    params = regime_params(2000, 200, 2.0, 12, 0.1, regime="low")
    g = complete_minus_bounded_subgraph(2000, math.floor(params.deficiency), 0)
    t, _ = build_extremal(2000, 200)
    with pytest.raises(ClaimInfeasible):
        embed_low_range(g, t, params, strict=False)


def test_low_range_random_tree_case_one():
    n, delta = 500, 100
    params = regime_params(n, delta, 1.0, 12, 0.1, regime="low")
    g = complete_minus_bounded_subgraph(n, math.floor(params.deficiency), 4)
    t = random_tree_bounded_degree(n, delta, 4)
    assert verify_embedding(g, t, embed_low_range(g, t, params, seed=4, strict=False)) is None


# -- dispatch ------------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 10, 60, 200, 500])
def test_embed_tree_complete_host(n):
    g = Graph.complete(n)
    for t in (Tree.path(n), Tree.star(n), random_tree_bounded_degree(n, max(2, n // 5), n)):
        e, report = embed_tree(g, t, use_oracle=False)
        assert e is not None, report.summary()
        assert verify_embedding(g, t, e) is None


def test_embed_tree_broom_400_200():
    g = Graph.complete(400)
    t, _ = build_extremal(400, 200)
    e, report = embed_tree(g, t, eps=1.0)
    assert e is not None and verify_embedding(g, t, e) is None


def test_embed_tree_size_mismatch():
    with pytest.raises(ValueError):
        embed_tree(Graph.complete(5), Tree.path(4))


def test_embed_tree_tiny_hosts_use_oracle():
    e, report = embed_tree(Graph.complete(2), Tree.path(2))
    assert e is not None and report.strategy == "fallback_oracle"
    e, report = embed_tree(Graph.cycle(5), Tree.star(5))
    assert e is None and report.oracle == "absent"


def test_embed_tree_matches_oracle_on_all_six_vertex_trees():
    from spantree.oracle import enumerate_labeled_trees

    graphs = [gnp_sample(6, 0.6, s) for s in range(4)]
    for t in enumerate_labeled_trees(6):
        for g in graphs:
            e, report = embed_tree(g, t)
            status, _ = contains_spanning_tree(g, t)
            assert (e is not None) == (status is OracleStatus.FOUND)
            if e is not None:
                assert verify_embedding(g, t, e) is None


def test_report_summary_lists_attempts():
    g = complete_minus_bounded_subgraph(500, 41, 0)
    t, _ = build_extremal(500, 100)
    e, report = embed_tree(g, t, 1.0, 12, 0.1, use_oracle=False)
    text = report.summary()
    assert "low_range" in text and e is not None
    assert report.attempts[-1].success

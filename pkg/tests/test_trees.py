import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from spantree.graph_core import GraphFormatError, regime_params
from spantree.oracle import enumerate_labeled_trees
from spantree.trees import (
    BarePathSet,
    LeafWitness,
    Tree,
    TreeError,
    TreeGenerationError,
    build_extremal,
    classify_parents,
    dichotomy,
    dichotomy_holds,
    disjoint_bare_paths,
    is_left_ordering,
    is_valid_bare_path_set,
    left_ordering,
    maximal_bare_paths,
    prufer_decode,
    random_tree_bounded_degree,
    tree_from_edge_list,
)


@st.composite
def trees(draw, min_n=2, max_n=40):
    n = draw(st.integers(min_n, max_n))
    if n == 2:
        return Tree(2, [(0, 1)])
    seq = draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    return prufer_decode(seq, n)


def _is_acyclic_connected(t: Tree) -> bool:
    parent = list(range(t.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in t.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return len({find(v) for v in range(t.n)}) == 1


def test_tree_validation():
    with pytest.raises(TreeError):
        Tree(3, [(0, 1)])
    with pytest.raises(TreeError):
        Tree(4, [(0, 1), (1, 0), (2, 3)])
    with pytest.raises(GraphFormatError):
        tree_from_edge_list("3 3\n0 1\n1 2\n0 2\n")


@given(trees())
def test_tree_edge_list_round_trip(t):
    assert tree_from_edge_list(t.to_edge_list()) == t


@pytest.mark.parametrize("n,count", [(3, 3), (4, 16), (5, 125)])
def test_labeled_tree_counts(n, count):
    ts = list(enumerate_labeled_trees(n))
    assert len(ts) == count
    assert len(set(ts)) == count
    assert all(_is_acyclic_connected(t) for t in ts)


def test_random_tree_small_cases():
    assert random_tree_bounded_degree(2, 1, 0).edges == ((0, 1),)
    t = random_tree_bounded_degree(5, 2, 4)
    assert sorted(t.degrees) == [1, 1, 2, 2, 2]


def test_random_tree_degree_bound_and_determinism():
    t = random_tree_bounded_degree(50, 5, 3)
    assert t.max_degree <= 5
    assert t == random_tree_bounded_degree(50, 5, 3)
    assert tree_from_edge_list(t.to_edge_list()) == t


def test_random_tree_budget_exhausted():
    with pytest.raises(TreeGenerationError):
        random_tree_bounded_degree(200, 3, 0, budget=5)


def test_random_tree_is_uniform_on_small_n():
    # all 16 labelled trees on 4 vertices should appear with roughly equal frequency
    counts = Counter(random_tree_bounded_degree(4, 3, s) for s in range(3200))
    assert len(counts) == 16
    assert max(counts.values()) < 2 * min(counts.values())


def test_dichotomy_examples():
    res = dichotomy(Tree.path(10), 4, 3)
    assert isinstance(res, BarePathSet)
    assert res.paths == ((0, 1, 2, 3, 4), (5, 6, 7, 8, 9))
    star = dichotomy(Tree.star(10), 4, 5)
    assert isinstance(star, LeafWitness) and len(star) == 9


def test_dichotomy_random_tree_200():
    t = random_tree_bounded_degree(200, 6, 1)
    for ell in (10, 200):
        res = dichotomy(t, 4, ell)
        assert dichotomy_holds(t, 4, ell, res)


@settings(max_examples=200)
@given(trees(), st.integers(1, 5), st.integers(1, 8))
def test_dichotomy_property(t, k, ell):
    res = dichotomy(t, k, ell)
    assert dichotomy_holds(t, k, ell, res)


@given(trees())
def test_maximal_bare_paths_partition_edges(t):
    paths = maximal_bare_paths(t)
    seen = Counter()
    for p in paths:
        assert t.degrees[p[0]] != 2 and t.degrees[p[-1]] != 2
        assert all(t.degrees[v] == 2 for v in p[1:-1])
        for a, b in zip(p, p[1:]):
            seen[(min(a, b), max(a, b))] += 1
    assert sorted(seen) == sorted(t.edges) and set(seen.values()) <= {1}


@given(trees(), st.integers(1, 5))
def test_disjoint_bare_paths_count(t, k):
    # every maximal bare path with s internal vertices contributes floor((s+1)/(k+1))
    bps = disjoint_bare_paths(t, k)
    assert is_valid_bare_path_set(t, bps)
    expected = sum((len(p) - 2 + 1) // (k + 1) for p in maximal_bare_paths(t))
    assert len(bps) >= expected


def test_left_ordering_examples():
    assert left_ordering(Tree.path(6), 0).order == (0, 1, 2, 3, 4, 5)
    lo = left_ordering(Tree.star(6), 0)
    assert lo.order[0] == 0 and set(lo.order[1:]) == {1, 2, 3, 4, 5}


@given(trees(), st.data())
def test_left_ordering_property(t, data):
    root = data.draw(st.integers(0, t.n - 1))
    lo = left_ordering(t, root)
    assert is_left_ordering(t, lo.order)
    idx = lo.parent_index()
    assert all(idx[i] < i for i in range(1, t.n))


def test_left_ordering_excluding_leaves():
    t = random_tree_bounded_degree(100, 4, 9)
    leaves = t.leaves()
    root = next(v for v in range(100) if t.degrees[v] > 1)
    lo = left_ordering(t, root, exclude=leaves)
    assert len(lo.order) == 100 - len(leaves)
    assert is_left_ordering(t, lo.order)


def test_classify_parents_examples():
    part = classify_parents(Tree.star(10), 5)
    assert part.p_plus == {0} and len(part.l_plus) == 9
    part = classify_parents(Tree.path(5), 2)
    assert part.p_plus == frozenset() and part.p_minus == {1, 3}


def test_classify_parents_on_broom():
    n, delta = 400, 134
    t, core = build_extremal(n, delta)
    p = regime_params(n, delta, 1.0, regime="low")
    part = classify_parents(t, p.leaf_threshold_low)
    assert part.p_plus == set(core)
    for x in core:
        assert part.leaf_degree[x] == t.degrees[x] - 1


def test_build_extremal_examples():
    t, core = build_extremal(10, 5)
    assert core == (1, 2) and t.n == 10 and len(t.edges) == 9
    assert sorted(t.degrees[x] for x in core) == [4, 5]
    assert t.max_degree == 5
    t, core = build_extremal(7, 6)
    assert len(core) == 1 and sorted(t.degrees)[-1] == 6
    t, core = build_extremal(9, 3)
    assert len(core) == 3 and t.max_degree <= 3


@pytest.mark.parametrize("n,delta", [(9, 3), (100, 10), (400, 200), (500, 100), (2000, 200)])
def test_build_extremal_core_dominates(n, delta):
    t, core = build_extremal(n, delta)
    assert len(core) == math.ceil((n - 1) / delta)
    assert t.max_degree <= delta
    covered = set(core)
    for x in core:
        covered.update(t.adj[x])
    assert covered == set(range(n))


def test_build_extremal_infeasible():
    with pytest.raises(TreeError):
        build_extremal(50, 3)

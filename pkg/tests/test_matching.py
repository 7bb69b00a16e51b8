import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spantree.graph_core import make_rng
from spantree.matching import (
    HallInstance,
    HallViolator,
    StarAssignment,
    is_hall_violator,
    perfect_matching,
    star_matching,
    validate_star_assignment,
)


def brute_force_feasible(demands: list[int], adj: list[set[int]], pool: set[int]) -> bool:
    """Try every way of handing each pool vertex to one centre (or nobody)."""
    pool = sorted(pool)
    a = len(demands)
    for owners in itertools.product(range(a + 1), repeat=len(pool)):
        load = [0] * a
        ok = True
        for b, o in zip(pool, owners):
            if o < a:
                if b not in adj[o]:
                    ok = False
                    break
                load[o] += 1
        if ok and load == demands:
            return True
    return False


def hall_feasible(demands: list[int], adj: list[set[int]]) -> bool:
    """Hall's condition checked over every subset of centres."""
    for r in range(1, len(demands) + 1):
        for s in itertools.combinations(range(len(demands)), r):
            nb = set().union(*(adj[a] for a in s))
            if len(nb) < sum(demands[a] for a in s):
                return False
    return True


def test_complete_bipartite_uses_every_vertex():
    inst = HallInstance.from_sets({"a": 2, "b": 3, "c": 1}, {x: range(6) for x in "abc"})
    res = star_matching(inst)
    assert isinstance(res, StarAssignment)
    assert validate_star_assignment(inst, res)
    assert sorted(v for leaves in res.leaves.values() for v in leaves) == list(range(6))


def test_single_centre_short_of_neighbours():
    inst = HallInstance.from_sets({"a": 3}, {"a": [0, 1]})
    res = star_matching(inst)
    assert isinstance(res, HallViolator)
    assert res.centers == {"a"} and res.deficit == 1
    assert is_hall_violator(inst, res)


def test_two_centre_example():
    inst = HallInstance.from_sets({1: 2, 2: 1}, {1: [1, 2], 2: [2, 3]})
    res = star_matching(inst)
    assert isinstance(res, StarAssignment)
    assert res.leaves == {1: (1, 2), 2: (3,)}
    assert brute_force_feasible([2, 1], [{1, 2}, {2, 3}], {1, 2, 3})


def test_augmenting_path_needed():
    # greedy would give a 0 then block b; the augmenting step must reroute
    inst = HallInstance.from_sets({"a": 1, "b": 1, "c": 1}, {"a": [0, 1], "b": [0], "c": [1, 2]})
    res = star_matching(inst)
    assert isinstance(res, StarAssignment) and validate_star_assignment(inst, res)


def test_perfect_matching_identity_and_pigeonhole():
    inst = HallInstance.from_sets({i: 1 for i in range(5)}, {i: [i] for i in range(5)})
    assert perfect_matching(inst) == {i: i for i in range(5)}
    inst = HallInstance.from_sets({i: 1 for i in range(3)}, {i: [0, 1] for i in range(3)})
    res = perfect_matching(inst)
    assert isinstance(res, HallViolator)
    assert len(res.neighborhood) < len(res.centers)
    with pytest.raises(ValueError):
        perfect_matching(HallInstance.from_sets({0: 2}, {0: [0, 1]}))


def test_negative_demand_rejected():
    with pytest.raises(ValueError):
        HallInstance.from_sets({0: -1}, {0: [1]})


def test_pool_restricts_adjacency():
    inst = HallInstance.from_sets({0: 2}, {0: [0, 1, 2]}, pool=[1, 2])
    res = star_matching(inst)
    assert isinstance(res, StarAssignment) and set(res.leaves[0]) == {1, 2}


def test_random_bipartite_perfect_matching_against_brute_force():
    rng = make_rng(11)
    for _ in range(100):
        a = (rng.random((10, 10)) < 0.5)
        # bipartite perfect matching via permutations is too slow; use Hall over subsets of a small side
        adj = [set(np.flatnonzero(a[i]).tolist()) for i in range(10)]
        inst = HallInstance.from_sets({i: 1 for i in range(10)}, {i: adj[i] for i in range(10)})
        res = perfect_matching(inst)
        assert isinstance(res, dict) == hall_feasible([1] * 10, adj)
        if isinstance(res, dict):
            assert len(set(res.values())) == 10 and all(res[i] in adj[i] for i in range(10))
        else:
            assert is_hall_violator(inst, res)


@settings(max_examples=300)
@given(
    st.lists(st.integers(0, 3), min_size=1, max_size=4),
    st.data(),
)
def test_star_matching_matches_brute_force(demands, data):
    nb = data.draw(st.integers(0, 5))
    adj = [set(data.draw(st.lists(st.integers(0, nb - 1), max_size=nb))) if nb else set() for _ in demands]
    inst = HallInstance.from_sets(dict(enumerate(demands)), dict(enumerate(adj)), pool=range(nb))
    res = star_matching(inst)
    feasible = brute_force_feasible(demands, adj, set(range(nb)))
    assert feasible == hall_feasible(demands, adj)
    if feasible:
        assert isinstance(res, StarAssignment) and validate_star_assignment(inst, res)
    else:
        assert isinstance(res, HallViolator) and is_hall_violator(inst, res)

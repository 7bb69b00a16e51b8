"""Exact ground truth at desk scale."""

from __future__ import annotations

import enum
import itertools
from typing import Iterator, Sequence

from .embedders import Embedding
from .graph_core import Graph, bits, make_rng
from .trees import Tree, left_ordering, prufer_decode

MAX_ENUMERATION_N = 9


class OracleStatus(enum.Enum):
    FOUND = "found"
    ABSENT = "absent"
    UNKNOWN = "unknown"


class _Budget(Exception):
    pass


def contains_spanning_tree(
    g: Graph,
    t: Tree,
    node_limit: int = 2_000_000,
    root: int | None = None,
    candidate_order: Sequence[int] | None = None,
) -> tuple[OracleStatus, Embedding | None]:
    """Complete backtracking search for a copy of ``t`` in ``g`` (|t| = |g|).

    Tree vertices are placed in BFS order from ``root`` (default: a maximum-degree
    vertex), each into the free neighbours of its parent's image, skipping host
    vertices of too small degree and images with fewer free neighbours than
    children still to place. ``candidate_order`` fixes the order in which host
    vertices are tried.
    """
    if g.n != t.n:
        raise ValueError("|T| must equal |G|")
    n = g.n
    if root is None:
        root = max(range(n), key=lambda v: (t.degrees[v], -v))
    lo = left_ordering(t, root)
    order = lo.order
    parent = [lo.parent.get(x, -1) for x in range(n)]
    children = [0] * n
    for x in order[1:]:
        children[parent[x]] += 1
    rank = list(range(n)) if candidate_order is None else _ranks(candidate_order, n)
    by_rank = sorted(range(n), key=lambda v: rank[v])
    gdeg = g.degrees
    rows = g.rows

    phi = [-1] * n
    remaining = children[:]  # unplaced children per tree vertex
    nodes = 0

    def candidates(pool: int) -> list[int]:
        if candidate_order is None:
            return bits(pool)
        return [v for v in by_rank if pool >> v & 1]

    def rec(i: int, free: int) -> bool:
        nonlocal nodes
        if i == n:
            return True
        x = order[i]
        px = parent[x]
        pool = free if px < 0 else rows[phi[px]] & free
        for v in candidates(pool):
            if gdeg[v] < t.degrees[x]:
                continue
            nodes += 1
            if nodes > node_limit:
                raise _Budget
            nfree = free & ~(1 << v)
            if (rows[v] & nfree).bit_count() < children[x]:
                continue
            if px >= 0 and (rows[phi[px]] & nfree).bit_count() < remaining[px] - 1:
                continue
            phi[x] = v
            if px >= 0:
                remaining[px] -= 1
            if rec(i + 1, nfree):
                return True
            if px >= 0:
                remaining[px] += 1
            phi[x] = -1
        return False

    try:
        found = rec(0, g.all_mask)
    except _Budget:
        return OracleStatus.UNKNOWN, None
    if not found:
        return OracleStatus.ABSENT, None
    return OracleStatus.FOUND, Embedding({x: phi[x] for x in range(n)})


def _ranks(order: Sequence[int], n: int) -> list[int]:
    if sorted(order) != list(range(n)):
        raise ValueError("candidate_order must be a permutation of the host vertices")
    rank = [0] * n
    for i, v in enumerate(order):
        rank[v] = i
    return rank


def has_dominating_set_of_size(
    g: Graph,
    k: int,
    exhaustive_limit: int = 3,
    random_budget: int = 1000,
    seed: int = 0,
) -> tuple[OracleStatus, tuple[int, ...] | None]:
    """Decide whether ``g`` has a dominating set of size exactly k.

    For k <= ``exhaustive_limit`` the search is complete: some chosen vertex must
    dominate the lowest undominated vertex, so it branches over that vertex's
    closed neighbourhood. Larger k falls back to randomised greedy search, which
    can only answer FOUND or UNKNOWN.
    """
    n = g.n
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > n:
        return OracleStatus.ABSENT, None
    full = g.all_mask
    closed = [g.closed_mask(v) for v in range(n)]

    def pad(chosen: list[int]) -> tuple[int, ...]:
        s = set(chosen)
        extra = (v for v in range(n) if v not in s)
        while len(s) < k:
            s.add(next(extra))
        return tuple(sorted(s))

    if k <= exhaustive_limit:
        def rec(covered: int, chosen: list[int]) -> list[int] | None:
            if covered == full:
                return chosen
            if len(chosen) == k:
                return None
            missing = full & ~covered
            x = (missing & -missing).bit_length() - 1
            if len(chosen) == k - 1:
                for v in bits(closed[x]):
                    if closed[v] & missing == missing:
                        return chosen + [v]
                return None
            for v in bits(closed[x]):
                found = rec(covered | closed[v], chosen + [v])
                if found is not None:
                    return found
            return None

        found = rec(0, [])
        if found is None:
            return OracleStatus.ABSENT, None
        return OracleStatus.FOUND, pad(found)

    rng = make_rng(seed)
    for _ in range(random_budget):
        covered = 0
        chosen: list[int] = []
        start = int(rng.integers(n))
        chosen.append(start)
        covered |= closed[start]
        while covered != full and len(chosen) < k:
            gains = [(closed[v] & ~covered).bit_count() for v in range(n)]
            top = max(gains)
            ties = [v for v in range(n) if gains[v] == top]
            v = ties[int(rng.integers(len(ties)))]
            chosen.append(v)
            covered |= closed[v]
        if covered == full:
            return OracleStatus.FOUND, pad(chosen)
    return OracleStatus.UNKNOWN, None


def enumerate_labeled_trees(n: int) -> Iterator[Tree]:
    """All n^(n-2) labelled trees on n vertices, streamed in Prüfer order."""
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise ValueError(f"enumeration limited to 1 <= n <= {MAX_ENUMERATION_N}")
    if n == 1:
        yield Tree(1, [])
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        yield prufer_decode(seq, n)


def core_image_dominates(g: Graph, core: Sequence[int], e: Embedding) -> bool:
    """For a copy of a tree whose ``core`` dominates it, the image of the core
    dominates G: every host vertex is the image of a core vertex or of one of its
    tree neighbours. Spanning copies only."""
    return g.is_dominating(e[x] for x in core)

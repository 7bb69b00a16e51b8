"""Trees: construction, Prüfer sampling, left orderings, leaf/parent structure,
the leaves-or-bare-paths decomposition and the extremal broom."""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph_core import Graph, GraphFormatError, make_rng, parse_edge_list


class TreeError(ValueError):
    pass


class TreeGenerationError(RuntimeError):
    """Rejection sampling ran out of budget."""


class Tree:
    """An n-vertex tree on ``0..n-1``; validated and immutable."""

    __slots__ = ("n", "edges", "adj", "degrees")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        edges = [(min(u, v), max(u, v)) for u, v in edges]
        if n < 1:
            raise TreeError("a tree needs at least one vertex")
        if len(edges) != n - 1:
            raise TreeError(f"{n}-vertex tree needs {n - 1} edges, got {len(edges)}")
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if u == v or not 0 <= u < n or not 0 <= v < n:
                raise TreeError(f"invalid edge ({u}, {v})")
            adj[u].append(v)
            adj[v].append(u)
        seen = [False] * n
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        if count != n:
            raise TreeError("edges do not form a connected graph")
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(edges))
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self.degrees: tuple[int, ...] = tuple(len(a) for a in adj)

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.n > 1 else 0

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if self.degrees[v] == 1]

    def parent_of_leaf(self, leaf: int) -> int:
        return self.adj[leaf][0]

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.n, self.edges)

    def to_edge_list(self) -> str:
        return "\n".join([f"{self.n} {self.n - 1}", *(f"{u} {v}" for u, v in self.edges)]) + "\n"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tree) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, Δ={self.max_degree})"

    # -- named trees --------------------------------------------------------------
    @classmethod
    def path(cls, n: int) -> "Tree":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def star(cls, n: int) -> "Tree":
        return cls(n, [(0, i) for i in range(1, n)])

    @classmethod
    def spider(cls, legs: int, leg_length: int) -> "Tree":
        """Centre 0 with ``legs`` paths of ``leg_length`` edges each."""
        edges = []
        nxt = 1
        for _ in range(legs):
            prev = 0
            for _ in range(leg_length):
                edges.append((prev, nxt))
                prev = nxt
                nxt += 1
        return cls(nxt, edges)


def tree_from_edge_list(text: str) -> Tree:
    n, edges = parse_edge_list(text)
    if len(edges) != n - 1:
        raise GraphFormatError(f"tree file must have m = n-1 = {n - 1} edges, got {len(edges)}")
    try:
        return Tree(n, edges)
    except TreeError as exc:
        raise GraphFormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# Prüfer
# ---------------------------------------------------------------------------

def prufer_decode(seq: Sequence[int], n: int) -> Tree:
    """Linear-time Prüfer decoding; ``seq`` has length n-2 over 0..n-1."""
    if n == 1:
        return Tree(1, [])
    if len(seq) != n - 2:
        raise ValueError(f"Prüfer sequence for n={n} must have length {n - 2}")
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    heap = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(heap)
    edges = []
    for x in seq:
        leaf = heapq.heappop(heap)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(heap, x)
    u, v = heapq.heappop(heap), heapq.heappop(heap)
    edges.append((u, v))
    return Tree(n, edges)


def random_tree_bounded_degree(n: int, delta_max: int, seed: int, budget: int = 10_000) -> Tree:
    """Uniform labelled tree conditioned on Δ(T) <= delta_max, by rejection on Prüfer codes.

    A vertex's degree is one more than its multiplicity in the code. Δ = 2 returns a
    random labelled path directly.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if n == 2:
        if delta_max < 1:
            raise ValueError("Δ must be at least 1")
        return Tree(2, [(0, 1)])
    if not 2 <= delta_max <= n - 1:
        raise ValueError(f"Δ={delta_max} outside [2, n-1]")
    rng = make_rng(seed)
    if delta_max == 2:
        order = rng.permutation(n).tolist()
        return Tree(n, list(zip(order, order[1:])))
    for _ in range(budget):
        seq = rng.integers(0, n, size=n - 2)
        counts = [0] * n
        ok = True
        for x in seq.tolist():
            counts[x] += 1
            if counts[x] >= delta_max:
                ok = False
                break
        if ok:
            return prufer_decode(seq.tolist(), n)
    raise TreeGenerationError(f"no tree with Δ <= {delta_max} on {n} vertices after {budget} draws")


# ---------------------------------------------------------------------------
# bare paths and the leaves-or-paths decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BarePathSet:
    length: int
    paths: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class LeafWitness:
    leaves: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.leaves)


def maximal_bare_paths(t: Tree, root: int | None = None) -> list[list[int]]:
    """Maximal bare paths, each listed from the end nearer ``root``.

    Every edge lies on exactly one of them; their ends have degree != 2. They are
    returned in BFS order of the tree obtained by contracting each to an edge.
    """
    if t.n < 2:
        return []
    branch = [v for v in range(t.n) if t.degrees[v] != 2]
    if root is None:
        root = branch[0]
    elif t.degrees[root] == 2:
        raise ValueError("root must have degree != 2")
    out = []
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in t.adj[u]:
            if w in seen:
                continue
            path = [u, w]
            prev = u
            while t.degrees[path[-1]] == 2:
                a, b = t.adj[path[-1]]
                nxt = b if a == prev else a
                prev = path[-1]
                path.append(nxt)
            seen.update(path[1:])
            out.append(path)
            queue.append(path[-1])
    return out


def disjoint_bare_paths(t: Tree, k: int) -> BarePathSet:
    """Greedy collection of pairwise vertex-disjoint bare paths with k edges.

    Each maximal bare path is cut into consecutive blocks of k+1 still-unused
    vertices starting from its root side. Processing in BFS order leaves every path
    at least its far end, so a path with s internal vertices yields
    floor((s+1)/(k+1)) blocks regardless of what earlier paths took.
    """
    if k < 1:
        raise ValueError("k must be positive")
    used: set[int] = set()
    found = []
    for path in maximal_bare_paths(t):
        run: list[int] = []
        for v in path:
            if v in used:
                run = []
                continue
            run.append(v)
            if len(run) == k + 1:
                found.append(tuple(run))
                used.update(run)
                run = []
    return BarePathSet(length=k, paths=tuple(found))


def dichotomy(t: Tree, k: int, ell: int) -> LeafWitness | BarePathSet:
    """Either at least ``ell`` leaves, or at least n/(k+1) - (2ell-2) disjoint bare k-paths."""
    if k < 1 or ell < 1:
        raise ValueError("k and ell must be positive")
    if t.n < 2:
        raise ValueError("dichotomy needs n >= 2")
    leaves = t.leaves()
    if len(leaves) >= ell:
        return LeafWitness(tuple(leaves))
    return disjoint_bare_paths(t, k)


def dichotomy_holds(t: Tree, k: int, ell: int, result: LeafWitness | BarePathSet) -> bool:
    """Independent recheck of a dichotomy result against the tree itself."""
    if isinstance(result, LeafWitness):
        return len(set(result.leaves)) >= ell and all(t.degrees[v] == 1 for v in result.leaves)
    if not is_valid_bare_path_set(t, result):
        return False
    return len(result.paths) >= t.n / (k + 1) - (2 * ell - 2)


def is_valid_bare_path_set(t: Tree, bps: BarePathSet) -> bool:
    seen: set[int] = set()
    edges = set(t.edges)
    for path in bps.paths:
        if len(path) != bps.length + 1:
            return False
        if any(v in seen for v in path) or len(set(path)) != len(path):
            return False
        seen.update(path)
        for a, b in zip(path, path[1:]):
            if (min(a, b), max(a, b)) not in edges:
                return False
        if any(t.degrees[v] != 2 for v in path[1:-1]):
            return False
    return True


# ---------------------------------------------------------------------------
# left orderings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeftOrdering:
    order: tuple[int, ...]
    parent: dict[int, int]  # vertex -> its unique earlier neighbour

    def parent_index(self) -> list[int]:
        """j_i for every position i >= 1 (0-based), with -1 for the root."""
        pos = {v: i for i, v in enumerate(self.order)}
        return [-1] + [pos[self.parent[v]] for v in self.order[1:]]


def left_ordering(t: Tree, root: int, exclude: Iterable[int] = ()) -> LeftOrdering:
    """BFS order (ascending ids) of the subtree T - ``exclude``, starting at ``root``.

    ``exclude`` must be a set of vertices whose removal keeps T connected (for
    instance a set of leaves).
    """
    excluded = set(exclude)
    if root in excluded:
        raise ValueError("root is excluded")
    order = [root]
    parent: dict[int, int] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in t.adj[u]:
            if w in seen or w in excluded:
                continue
            seen.add(w)
            parent[w] = u
            order.append(w)
            queue.append(w)
    if len(order) + len(excluded) != t.n:
        raise ValueError("removing the excluded vertices disconnects the tree")
    return LeftOrdering(tuple(order), parent)


def is_left_ordering(t: Tree, order: Sequence[int]) -> bool:
    placed: set[int] = set()
    for i, v in enumerate(order):
        earlier = sum(1 for w in t.adj[v] if w in placed)
        if i > 0 and earlier != 1:
            return False
        placed.add(v)
    return True


# ---------------------------------------------------------------------------
# leaves and parents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeafPartition:
    threshold: float
    leaves: frozenset[int]
    parents: frozenset[int]
    p_plus: frozenset[int]
    p_minus: frozenset[int]
    l_plus: frozenset[int]
    l_minus: frozenset[int]
    leaf_degree: dict[int, int]


def leaf_degrees(t: Tree, leaves: Iterable[int]) -> dict[int, int]:
    """d(p, L) for every parent p of the given leaves."""
    d: dict[int, int] = {}
    for leaf in leaves:
        p = t.parent_of_leaf(leaf)
        d[p] = d.get(p, 0) + 1
    return d


def classify_parents(t: Tree, threshold: float, strict: bool = True) -> LeafPartition:
    """Split parents into heavy P+ (d(p, L) > threshold) and light P-.

    ``strict=False`` uses d(p, L) >= threshold instead.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    leaves = t.leaves()
    d = leaf_degrees(t, leaves)
    heavy = {p for p, c in d.items() if (c > threshold if strict else c >= threshold)}
    l_plus = frozenset(x for x in leaves if t.parent_of_leaf(x) in heavy)
    return LeafPartition(
        threshold=threshold,
        leaves=frozenset(leaves),
        parents=frozenset(d),
        p_plus=frozenset(heavy),
        p_minus=frozenset(d) - heavy,
        l_plus=l_plus,
        l_minus=frozenset(leaves) - l_plus,
        leaf_degree=d,
    )


# ---------------------------------------------------------------------------
# extremal broom
# ---------------------------------------------------------------------------

def build_extremal(n: int, delta_max: int) -> tuple[Tree, tuple[int, ...]]:
    """Tree whose k = ceil((n-1)/Δ) core vertices dominate it.

    Vertex 0 is the centre, 1..k the core X, the rest leaves spread over X as evenly
    as possible with at most Δ-1 per core vertex. Returns (tree, X).
    """
    if n < 2:
        raise TreeError("n must be at least 2")
    if delta_max < 1:
        raise TreeError("Δ must be at least 1")
    k = math.ceil((n - 1) / delta_max)
    if k > delta_max:
        raise TreeError(f"centre degree k = {k} exceeds Δ = {delta_max}")
    n_leaves = n - 1 - k
    if n_leaves > k * (delta_max - 1):
        raise TreeError(f"{n_leaves} leaves exceed capacity k(Δ-1) = {k * (delta_max - 1)}")
    core = tuple(range(1, k + 1))
    edges = [(0, x) for x in core]
    base, extra = divmod(n_leaves, k)
    nxt = k + 1
    for i, x in enumerate(core):
        for _ in range(base + (1 if i < extra else 0)):
            edges.append((x, nxt))
            nxt += 1
    return Tree(n, edges), core

"""Spanning-tree embedders for hosts of high minimum degree.

Four constructive procedures plus the top-level dispatch:

* ``embed_with_bare_paths``: greedy on T minus the middles of disjoint bare
  4-paths, a Hamilton cycle on what is left, a perfect matching to stitch.
* ``embed_with_spread_leaves``: random embedding of T - L, check that leaf demand
  is spread over every host vertex, finish with a star matching.
* ``embed_high_range`` / ``embed_low_range``: the case analyses for
  Δ >= 2n log log n / log n and for C n / log n <= Δ << n.
* ``embed_tree``: regime dispatch with a fallback chain ending in the exact oracle.

Every probabilistic step of the underlying arguments is a check-then-resample
loop with an explicit retry budget. Each procedure either returns an
``Embedding`` or raises an ``EmbeddingFailure`` subclass carrying diagnostics.

``strict=True`` enforces the quantitative hypotheses as stated and works with
the deficiency bound n^(1-(1+ε)/k). ``strict=False`` replaces that bound by the
host's actual deficiency n - δ(G), which is what the Hall-type finishing
arguments consume, and skips the asymptotic size conditions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .graph_core import (
    Graph,
    RegimeError,
    RegimeParams,
    bits,
    deficiency,
    derive_seed,
    high_regime_cutoff,
    low_range_claim_holds,
    make_rng,
    mask_of,
    min_degree,
    regime_params,
)
from .hamilton import DiracError, HamiltonStall, dirac_hamilton_cycle
from .matching import HallInstance, HallViolator, star_matching
from .trees import Tree, classify_parents, disjoint_bare_paths, leaf_degrees, left_ordering

DEFAULT_RETRIES = 50


# ---------------------------------------------------------------------------
# failures
# ---------------------------------------------------------------------------

class EmbeddingFailure(RuntimeError):
    kind = "failure"

    def __init__(self, message: str, *, retries: int = 0, violators: Iterable[HallViolator] = (), detail=None):
        super().__init__(message)
        self.retries = retries
        self.violators = list(violators)
        self.detail = detail


class PreconditionError(EmbeddingFailure):
    kind = "precondition"


class GreedyStall(EmbeddingFailure):
    kind = "greedy_stall"


class HallFailure(EmbeddingFailure):
    kind = "hall_violator"


class RetriesExhausted(EmbeddingFailure):
    kind = "retries_exhausted"


class SearchBudgetExhausted(EmbeddingFailure):
    kind = "search_budget"


class ClaimInfeasible(EmbeddingFailure):
    kind = "claim_infeasible"


class HamiltonFailure(EmbeddingFailure):
    kind = "hamilton"


# ---------------------------------------------------------------------------
# embeddings and verification
# ---------------------------------------------------------------------------

class Embedding:
    """Partial map ψ from tree vertices to host vertices with its inverse."""

    __slots__ = ("phi", "inverse")

    def __init__(self, phi: Mapping[int, int] | None = None):
        self.phi: dict[int, int] = dict(phi or {})
        self.inverse: dict[int, int] = {v: x for x, v in self.phi.items()}

    def place(self, x: int, v: int) -> None:
        if x in self.phi:
            raise ValueError(f"tree vertex {x} already placed")
        if v in self.inverse:
            raise ValueError(f"host vertex {v} already used by {self.inverse[v]}")
        self.phi[x] = v
        self.inverse[v] = x

    def __getitem__(self, x: int) -> int:
        return self.phi[x]

    def __contains__(self, x: int) -> bool:
        return x in self.phi

    def __len__(self) -> int:
        return len(self.phi)

    def items(self):
        return sorted(self.phi.items())

    def __repr__(self) -> str:
        return f"Embedding({len(self.phi)} placed)"


@dataclass(frozen=True)
class Violation:
    kind: str  # "range" | "totality" | "injectivity" | "edge"
    detail: str


def verify_embedding(g: Graph, t: Tree, e: Embedding | Mapping[int, int], require_total: bool = True) -> Violation | None:
    """None if ``e`` is a valid (total, when required) embedding of t into g."""
    phi = e.phi if isinstance(e, Embedding) else dict(e)
    for x, v in sorted(phi.items()):
        if not 0 <= x < t.n:
            return Violation("range", f"tree vertex {x} not in T")
        if not 0 <= v < g.n:
            return Violation("range", f"host vertex {v} not in G")
    if require_total:
        missing = [x for x in range(t.n) if x not in phi]
        if missing:
            return Violation("totality", f"tree vertex {missing[0]} unmapped ({len(missing)} total)")
    owner: dict[int, int] = {}
    for x, v in sorted(phi.items()):
        if v in owner:
            return Violation("injectivity", f"tree vertices {owner[v]} and {x} both map to {v}")
        owner[v] = x
    for a, b in t.edges:
        if a in phi and b in phi and not g.has_edge(phi[a], phi[b]):
            return Violation("edge", f"tree edge ({a}, {b}) maps to non-edge ({phi[a]}, {phi[b]})")
    return None


# ---------------------------------------------------------------------------
# placement engine
# ---------------------------------------------------------------------------

class _Placer:
    """Mutable embedding state over a numpy view of the host.

    ``choose`` implements the two selection rules: uniform at random, or
    the candidate with most free neighbours (ties to the lowest id).
    """

    def __init__(self, g: Graph, rng: np.random.Generator | None = None):
        self.g = g
        self.adj = g.adjacency_matrix()
        self.free = np.ones(g.n, dtype=bool)
        self.residual = np.array(g.degrees, dtype=np.int64)
        self.emb = Embedding()
        self.rng = rng

    def candidates(self, parent_image: int | None, allowed: np.ndarray | None = None) -> np.ndarray:
        mask = self.free.copy() if parent_image is None else self.adj[parent_image] & self.free
        if allowed is not None:
            mask &= allowed
        return np.flatnonzero(mask)

    def choose(self, cand: np.ndarray) -> int:
        if self.rng is not None:
            return int(cand[self.rng.integers(cand.size)])
        return int(cand[np.argmax(self.residual[cand])])

    def place(self, x: int, v: int) -> None:
        self.emb.place(x, v)
        self.free[v] = False
        self.residual[self.adj[v]] -= 1

    @property
    def used(self) -> int:
        return len(self.emb)


def _working_deficiency(g: Graph, bound: float, strict: bool, what: str) -> float:
    actual = deficiency(g)
    if strict:
        if actual > bound:
            raise PreconditionError(f"{what}: δ(G) = {g.n - actual} < n - {bound:.4g}")
        return bound
    return float(actual)


def _finish_leaves(
    placer: _Placer,
    t: Tree,
    leaves_of: Mapping[int, list[int]],
) -> HallViolator | None:
    """Star-match the leaves of each placed parent into the free host vertices."""
    free_mask = mask_of(np.flatnonzero(placer.free).tolist())
    centers = {p: len(ls) for p, ls in leaves_of.items()}
    adjacency = {p: placer.g.rows[placer.emb[p]] & free_mask for p in leaves_of}
    res = star_matching(HallInstance(centers, adjacency, free_mask))
    if isinstance(res, HallViolator):
        return res
    for p, targets in res.leaves.items():
        for leaf, v in zip(sorted(leaves_of[p]), targets):
            placer.place(leaf, v)
    return None


def _group_leaves(t: Tree, leaves: Iterable[int]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for leaf in sorted(leaves):
        out.setdefault(t.parent_of_leaf(leaf), []).append(leaf)
    return out


def _check_sizes(g: Graph, t: Tree) -> None:
    if g.n != t.n:
        raise PreconditionError(f"|T| = {t.n} differs from |G| = {g.n}")


# ---------------------------------------------------------------------------
# many bare paths
# ---------------------------------------------------------------------------

def embed_with_bare_paths(g: Graph, t: Tree, m: float, seed: int = 0, strict: bool = True) -> Embedding:
    """Embed T using 10m vertex-disjoint bare paths of length 4 (all found ones if not strict).

    Greedy placement of T' (T without the three middle vertices of each path), then
    a Hamilton cycle x_1 w_1 y_1 x_2 w_2 y_2 ... on the 3ℓ leftover vertices, then a
    perfect matching of path i to triple σ(i) with u_i ~ x_σ(i) and v_i ~ y_σ(i).
    """
    del seed  # the procedure is deterministic
    _check_sizes(g, t)
    n = g.n
    bps = disjoint_bare_paths(t, 4)
    if not bps.paths:
        raise PreconditionError("tree has no bare path of length 4")
    if strict:
        if m > n / 100:
            raise PreconditionError(f"m = {m} exceeds n/100 = {n / 100}")
        if min_degree(g) < n - m:
            raise PreconditionError(f"δ(G) = {min_degree(g)} < n - m = {n - m}")
        ell = math.ceil(10 * m)
        if len(bps) < ell:
            raise PreconditionError(f"need {ell} disjoint bare 4-paths, tree has {len(bps)}")
        paths = bps.paths[:ell]
    else:
        paths = bps.paths
    ell = len(paths)
    middles = {v for p in paths for v in p[1:4]}
    delta = min_degree(g)

    placer = _Placer(g)
    for comp_root, order, parent in _forest_orders(t, middles):
        for x in order:
            if x == comp_root:
                cand = placer.candidates(None)
            else:
                cand = placer.candidates(placer.emb[parent[x]])
            if cand.size < delta - placer.used:
                raise AssertionError("greedy pool smaller than δ(G) - placed")
            if cand.size == 0:
                raise GreedyStall(f"no free neighbour for tree vertex {x}")
            placer.place(x, placer.choose(cand))

    rest = np.flatnonzero(placer.free).tolist()
    sub = g.induced(rest)
    try:
        cycle = [rest[i] for i in dirac_hamilton_cycle(sub)]
    except (DiracError, HamiltonStall) as exc:
        raise HamiltonFailure(f"leftover graph on {len(rest)} vertices: {exc}") from None
    xs, ws, ys = cycle[0::3], cycle[1::3], cycle[2::3]

    adj = g.adjacency_matrix()
    x_idx, y_idx = np.array(xs), np.array(ys)
    adjacency = {}
    for i, p in enumerate(paths):
        u, v = placer.emb[p[0]], placer.emb[p[4]]
        ok = adj[u, x_idx] & adj[v, y_idx]
        adjacency[i] = mask_of(np.flatnonzero(ok).tolist())
    inst = HallInstance({i: 1 for i in range(ell)}, adjacency, (1 << ell) - 1)
    res = star_matching(inst)
    if isinstance(res, HallViolator):
        raise HallFailure("auxiliary path/triple graph has no perfect matching", violators=[res])
    for i, p in enumerate(paths):
        j = res.leaves[i][0]
        placer.place(p[1], xs[j])
        placer.place(p[2], ws[j])
        placer.place(p[3], ys[j])
    return placer.emb


def _forest_orders(t: Tree, removed: set[int]):
    """(root, BFS order, parent map) for each component of T - removed."""
    seen = set(removed)
    for r in range(t.n):
        if r in seen:
            continue
        order = [r]
        parent: dict[int, int] = {}
        seen.add(r)
        i = 0
        while i < len(order):
            u = order[i]
            i += 1
            for w in t.adj[u]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    order.append(w)
        yield r, order, parent


# ---------------------------------------------------------------------------
# many spread-out leaves
# ---------------------------------------------------------------------------

@dataclass
class SpreadDiagnostics:
    attempt: int
    reason: str
    worst_vertex: int | None = None
    worst_sum: float | None = None


def embed_with_spread_leaves(
    g: Graph,
    t: Tree,
    leaves: Iterable[int],
    m: float,
    retries: int = DEFAULT_RETRIES,
    seed: int = 0,
    strict: bool = True,
) -> Embedding:
    """Random embedding of T - L, checked for spread, finished by a star matching.

    Vertices of T - L are placed along a left ordering rooted at a parent p_1, each
    uniformly among free neighbours of its parent's image. An attempt is kept if
    every still free host vertex w satisfies sum of d_i over parents p_i with w in N(ψ(p_i))
    >= |L|/4; the leaves are then matched into the unused vertices.
    """
    _check_sizes(g, t)
    n = g.n
    L = sorted(set(leaves))
    if not L:
        raise PreconditionError("empty leaf set")
    Lset = set(L)
    for x in L:
        if t.degrees[x] != 1 or t.parent_of_leaf(x) in Lset:
            raise PreconditionError(f"{x} is not a leaf whose parent survives in T - L")
    d = leaf_degrees(t, L)
    if strict:
        if m > n / 20:
            raise PreconditionError(f"m = {m} exceeds n/20 = {n / 20}")
        if min_degree(g) < n - m:
            raise PreconditionError(f"δ(G) = {min_degree(g)} < n - m = {n - m}")
        if len(L) < 5 * m:
            raise PreconditionError(f"|L| = {len(L)} < 5m = {5 * m}")
        cap = len(L) / (10 * math.log(n))
        worst = max(d.values())
        if worst > cap:
            raise PreconditionError(f"a parent carries {worst} > |L|/(10 log n) = {cap:.3g} leaves")

    p1 = min(d)
    lo = left_ordering(t, p1, exclude=L)
    parents = [x for x in lo.order if x in d]
    demand = np.array([d[p] for p in parents], dtype=np.int64)
    need = len(L) / 4
    leaves_of = _group_leaves(t, L)

    diagnostics: list[SpreadDiagnostics] = []
    violators: list[HallViolator] = []
    for attempt in range(retries):
        placer = _Placer(g, make_rng(seed, attempt))
        try:
            for x in lo.order:
                cand = placer.candidates(None if x == p1 else placer.emb[lo.parent[x]])
                if cand.size == 0:
                    raise GreedyStall(f"empty pool Y_i for tree vertex {x}")
                placer.place(x, placer.choose(cand))
        except GreedyStall as exc:
            diagnostics.append(SpreadDiagnostics(attempt, str(exc)))
            continue
        images = np.array([placer.emb[p] for p in parents])
        spread = demand @ placer.adj[images].astype(np.int64)
        # only vertices still free can receive leaves
        spread[~placer.free] = len(L)
        w = int(np.argmin(spread))
        if spread[w] < need:
            diagnostics.append(SpreadDiagnostics(attempt, "spread", w, float(spread[w])))
            continue
        violator = _finish_leaves(placer, t, leaves_of)
        if violator is not None:
            violators.append(violator)
            diagnostics.append(SpreadDiagnostics(attempt, "hall"))
            continue
        return placer.emb
    raise RetriesExhausted(
        f"spread-leaves: {retries} attempts failed",
        retries=retries,
        violators=violators,
        detail=diagnostics,
    )


# ---------------------------------------------------------------------------
# dominating cliques
# ---------------------------------------------------------------------------

def find_dominating_clique(g: Graph, k: int, budget: int = 200, seed: int = 0) -> tuple[int, ...]:
    """k pairwise adjacent vertices whose closed neighbourhoods cover V(G).

    Randomised greedy: v_1 is uniform (the first attempt starts from a maximum
    degree vertex instead), each later v_i is drawn from the common neighbourhood of
    the earlier ones, preferring candidates that dominate the most still
    undominated vertices.
    """
    n = g.n
    if k < 1 or k > n:
        raise ValueError(f"k = {k} outside [1, n]")
    rng = make_rng(seed)
    full = g.all_mask
    best: tuple[int, tuple[int, ...]] = (-1, ())
    for attempt in range(budget):
        if attempt == 0:
            v = max(range(n), key=lambda u: (g.degrees[u], -u))
        else:
            v = int(rng.integers(n))
        chosen = [v]
        common = g.rows[v]
        covered = g.closed_mask(v)
        while len(chosen) < k and common:
            cand = bits(common)
            gains = [(g.closed_mask(c) & ~covered).bit_count() for c in cand]
            top = max(gains)
            ties = [c for c, s in zip(cand, gains) if s == top]
            c = ties[int(rng.integers(len(ties)))] if len(ties) > 1 else ties[0]
            chosen.append(c)
            common &= g.rows[c]
            covered |= g.closed_mask(c)
        if len(chosen) == k and covered == full:
            return tuple(sorted(chosen))
        score = covered.bit_count() if len(chosen) == k else -1
        if score > best[0]:
            best = (score, tuple(sorted(chosen)))
    raise SearchBudgetExhausted(
        f"no dominating {k}-clique in {budget} attempts (best covers {best[0]} of {n})",
        retries=budget,
        detail=best,
    )


# ---------------------------------------------------------------------------
# high range
# ---------------------------------------------------------------------------

@dataclass
class CaseInfo:
    """Which branch of a regime embedder ran; filled in as the embedder proceeds."""

    branch: str = ""
    notes: list[str] = field(default_factory=list)


def embed_high_range(
    g: Graph,
    t: Tree,
    params: RegimeParams,
    seed: int = 0,
    strict: bool = True,
    retries: int = DEFAULT_RETRIES,
    clique_budget: int = 200,
    info: CaseInfo | None = None,
) -> Embedding:
    """High-range embedding (Δ >= 2n log log n / log n, k = ceil((n-1)/Δ) - 1 >= 2).

    Many bare paths: delegate. Otherwise split parents at the deficiency threshold.
    Case I (fewer than k heavy parents): spread-leaves on the leaves of light parents.
    Case II: pin k heavy parents onto a dominating k-clique, embed T - L' greedily
    and match their leaves.
    """
    info = info if info is not None else CaseInfo()
    _check_sizes(g, t)
    if params.regime != "high":
        raise PreconditionError("params are not high-regime")
    if params.n != g.n:
        raise PreconditionError("params.n differs from |G|")
    n = g.n
    k = params.k_int
    m = _working_deficiency(g, params.deficiency, strict, "high range")

    n_paths = len(disjoint_bare_paths(t, 4))
    path_target = params.delta_max / 100 if strict else max(params.delta_max / 100, 10 * m, 1)
    if n_paths >= path_target:
        info.branch = "bare_paths"
        return embed_with_bare_paths(g, t, m, seed=seed, strict=strict)

    part = classify_parents(t, m)
    if len(part.p_plus) <= k - 1:
        info.branch = "case_I"
        light = sorted(part.l_minus)
        if not light:
            raise PreconditionError("case I with no leaves on light parents")
        return embed_with_spread_leaves(g, t, light, m, retries=retries, seed=seed, strict=strict)

    info.branch = "case_II"
    ranked = sorted(part.p_plus, key=lambda p: (-part.leaf_degree[p], p))
    chosen = set(ranked[:k])
    l_prime = sorted(x for x in part.leaves if t.parent_of_leaf(x) in chosen)
    clique = find_dominating_clique(g, k, budget=clique_budget, seed=seed)

    root = min(chosen)
    lo = left_ordering(t, root, exclude=l_prime)
    pinned_order = [x for x in lo.order if x in chosen]
    target = dict(zip(pinned_order, clique))
    d = {p: part.leaf_degree[p] for p in pinned_order}
    # proper subsets: sum_{i in I} d_i <= |L'| - m because every excluded d_j > m
    if min(d.values()) <= m:
        raise AssertionError("heavy parent with leaf degree <= threshold")

    pinned_children: dict[int, list[int]] = {}
    for p in pinned_order:
        if p != root:
            pinned_children.setdefault(lo.parent[p], []).append(p)

    placer = _Placer(g)
    adj = placer.adj
    reserved = np.zeros(n, dtype=bool)
    reserved[list(clique)] = True
    for x in lo.order:
        if x in target:
            v = target[x]
            if x != root and not adj[placer.emb[lo.parent[x]], v]:
                raise GreedyStall(f"pinned vertex {x}: parent image not adjacent to {v}")
            placer.place(x, v)
            continue
        allowed = ~reserved
        for c in pinned_children.get(x, ()):
            allowed = allowed & adj[target[c]]
        cand = placer.candidates(placer.emb[lo.parent[x]], allowed)
        if cand.size == 0:
            raise GreedyStall(f"no common neighbour available for tree vertex {x}")
        placer.place(x, placer.choose(cand))

    free = int(placer.free.sum())
    if free != len(l_prime) or sum(d.values()) != len(l_prime):
        raise AssertionError("|W| = |L'| = sum d_i violated")
    violator = _finish_leaves(placer, t, _group_leaves(t, l_prime))
    if violator is not None:
        raise HallFailure("case II star matching failed", violators=[violator])
    return placer.emb


# ---------------------------------------------------------------------------
# low range
# ---------------------------------------------------------------------------

@dataclass
class LowRangeState:
    r1: tuple[int, ...]
    r2: tuple[int, ...]
    q: frozenset[int]
    p_plus: tuple[int, ...]
    # closed-neighbourhood counts; non-neighbours X_v = |R1| - r1_hits[v]
    r1_hits: np.ndarray = field(repr=False)
    r2_hits: np.ndarray = field(repr=False)


def sample_low_range_sets(
    g: Graph,
    params: RegimeParams,
    r2_size: int,
    rng: np.random.Generator,
) -> LowRangeState:
    """Disjoint uniform R1 (size k') and R2, with per-vertex hit counts."""
    n = g.n
    kp = params.k_prime
    perm = rng.permutation(n)
    r1 = np.sort(perm[:kp])
    r2 = np.sort(perm[kp:kp + r2_size])
    adj = g.adjacency_matrix()
    hits1 = adj[:, r1].sum(axis=1)
    hits1[r1] += 1
    hits2 = adj[:, r2].sum(axis=1)
    hits2[r2] += 1
    return LowRangeState(tuple(r1.tolist()), tuple(r2.tolist()), frozenset(), (), hits1, hits2)


def low_range_properties(state: LowRangeState, params: RegimeParams) -> list[str]:
    """Names of the three sample properties that fail (empty list if all hold)."""
    kp = params.k_prime
    eps = params.eps
    failed = []
    if np.any(state.r1_hits < eps * kp / 10):
        failed.append("every v sees >= εk'/10 of R1")
    inner = list(state.r1) + list(state.r2)
    if inner and np.any(state.r1_hits[inner] < (1 - eps / 20) * kp):
        failed.append("every v in R1 ∪ R2 sees >= (1-ε/20)k' of R1")
    if np.any(state.r2_hits < len(state.r2) / 2):
        failed.append("every v sees >= half of R2")
    return failed


def embed_low_range(
    g: Graph,
    t: Tree,
    params: RegimeParams,
    retries: int = DEFAULT_RETRIES,
    seed: int = 0,
    strict: bool = True,
    info: CaseInfo | None = None,
) -> Embedding:
    """Low-range embedding (C n / log n <= Δ << n, k = n / Δ).

    Many bare paths: delegate. Case I (at most k' parents with >= n/(C log n) leaves):
    spread-leaves on the remaining leaves. Case II: sample R1, R2 until the three
    adjacency properties hold, embed T - L+ sending heavy parents into R1 and their
    left neighbours into R2, place stray leaves greedily and match the rest.
    """
    info = info if info is not None else CaseInfo()
    _check_sizes(g, t)
    if params.regime != "low":
        raise PreconditionError("params are not low-regime")
    if params.n != g.n:
        raise PreconditionError("params.n differs from |G|")
    n = g.n
    eps = params.eps
    kp = params.k_prime
    m = _working_deficiency(g, params.deficiency, strict, "low range")

    n_paths = len(disjoint_bare_paths(t, 4))
    mu_n = params.mu * n
    if strict:
        if n_paths >= mu_n / 100:
            info.branch = "bare_paths"
            return embed_with_bare_paths(g, t, mu_n / 1000, seed=seed, strict=True)
    elif n_paths >= max(mu_n / 100, 10 * m, 1):
        info.branch = "bare_paths"
        return embed_with_bare_paths(g, t, m, seed=seed, strict=False)

    part = classify_parents(t, params.leaf_threshold_low, strict=False)
    if len(part.p_plus) <= kp:
        info.branch = "case_I"
        rest = sorted(part.l_minus)
        if not rest:
            raise PreconditionError("case I with no leaves outside heavy parents")
        return embed_with_spread_leaves(g, t, rest, m, retries=retries, seed=seed, strict=strict)

    info.branch = "case_II"
    if kp < 1:
        raise PreconditionError("k' = 0: no room for heavy parents in R1")
    if not low_range_claim_holds(params, m):
        raise ClaimInfeasible(
            f"εk'n/(100 C log n) = {eps * kp * n / (100 * params.c_const * math.log(n)):.4g} < {m:.4g}"
        )
    ranked = sorted(part.p_plus, key=lambda p: (-part.leaf_degree[p], p))
    p_plus = sorted(ranked[:kp])
    p_set = set(p_plus)
    l_plus = sorted(x for x in part.leaves if t.parent_of_leaf(x) in p_set)
    t1 = p_plus[0]
    lo = left_ordering(t, t1, exclude=l_plus)
    q = frozenset(lo.parent[p] for p in p_plus if p != t1)
    r2_size = max(math.ceil(n ** (eps / 100)), 2 * len(q) + 1)
    if kp + r2_size > n:
        raise PreconditionError("R1 and R2 do not fit in V(G)")

    rejected: dict[str, int] = {}
    stalls: list[str] = []
    violators: list[HallViolator] = []
    for attempt in range(retries):
        rng = make_rng(seed, attempt)
        state = sample_low_range_sets(g, params, r2_size, rng)
        failed = low_range_properties(state, params)
        if failed:
            for f in failed:
                rejected[f] = rejected.get(f, 0) + 1
            continue
        state.q = q
        state.p_plus = tuple(p_plus)
        try:
            emb = _low_range_embed(g, t, params, state, lo, l_plus, p_set, q)
        except GreedyStall as exc:
            stalls.append(str(exc))
            continue
        except HallFailure as exc:
            violators.extend(exc.violators)
            continue
        return emb
    raise RetriesExhausted(
        f"low range: {retries} samples failed (rejected {sum(rejected.values())}, "
        f"stalls {len(stalls)}, hall {len(violators)})",
        retries=retries,
        violators=violators,
        detail={"rejected": rejected, "stalls": stalls},
    )


def _low_range_embed(g, t, params, state: LowRangeState, lo, l_plus, p_set, q) -> Embedding:
    n = g.n
    placer = _Placer(g)
    adj = placer.adj
    in_r1 = np.zeros(n, dtype=bool)
    in_r1[list(state.r1)] = True
    in_r2 = np.zeros(n, dtype=bool)
    in_r2[list(state.r2)] = True
    outside = ~(in_r1 | in_r2)

    t1 = lo.order[0]
    placer.place(t1, placer.choose(np.flatnonzero(in_r1)))
    for x in lo.order[1:]:
        pv = placer.emb[lo.parent[x]]
        if x in p_set:
            cand = placer.candidates(pv, in_r1)
            if cand.size == 0:
                cand = placer.candidates(pv, outside)
        elif x in q:
            cand = placer.candidates(pv, in_r2)
        else:
            cand = placer.candidates(pv, outside)
        if cand.size == 0:
            raise GreedyStall(f"no admissible image for tree vertex {x}")
        placer.place(x, placer.choose(cand))

    # placement discipline
    for x, v in placer.emb.phi.items():
        if in_r1[v] and x not in p_set:
            raise AssertionError(f"non-heavy vertex {x} landed in R1")
        if in_r2[v] and x not in q:
            raise AssertionError(f"vertex {x} outside Q landed in R2")
    in_r1_parents = [p for p in p_set if in_r1[placer.emb[p]]]
    if len(in_r1_parents) < (1 - params.eps / 20) * params.k_prime:
        raise AssertionError("fewer than (1-ε/20)k' heavy parents placed in R1")

    p_prime = set(in_r1_parents)
    stray = [x for x in l_plus if t.parent_of_leaf(x) not in p_prime]
    for leaf in stray:
        cand = placer.candidates(placer.emb[t.parent_of_leaf(leaf)])
        if cand.size == 0:
            raise GreedyStall(f"no free neighbour for stray leaf {leaf}")
        placer.place(leaf, placer.choose(cand))

    l_prime = [x for x in l_plus if t.parent_of_leaf(x) in p_prime]
    violator = _finish_leaves(placer, t, _group_leaves(t, l_prime))
    if violator is not None:
        raise HallFailure("low range star matching failed", violators=[violator])
    return placer.emb


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

@dataclass
class Attempt:
    strategy: str
    success: bool
    reason: str = ""
    failure_kind: str = ""
    branch: str = ""
    retries: int = 0
    violators: list[HallViolator] = field(default_factory=list)
    elapsed_ms: float = 0.0


@dataclass
class EmbedReport:
    regime: str = ""
    attempts: list[Attempt] = field(default_factory=list)
    success: bool = False
    strategy: str = ""
    oracle: str = ""  # "", "found", "absent", "unknown"

    def summary(self) -> str:
        lines = [f"regime={self.regime or '-'} success={self.success} strategy={self.strategy or '-'}"]
        for a in self.attempts:
            status = "ok" if a.success else f"{a.failure_kind}: {a.reason}"
            branch = f"[{a.branch}]" if a.branch else ""
            lines.append(f"  {a.strategy}{branch} retries={a.retries} hall={len(a.violators)} {a.elapsed_ms:.1f}ms {status}")
        if self.oracle:
            lines.append(f"  oracle: {self.oracle}")
        return "\n".join(lines)


def _run(report: EmbedReport, name: str, g: Graph, t: Tree, fn) -> Embedding | None:
    info = CaseInfo()
    start = time.perf_counter()
    attempt = Attempt(strategy=name, success=False)
    try:
        emb = fn(info)
    except EmbeddingFailure as exc:
        attempt.reason = str(exc)
        attempt.failure_kind = exc.kind
        attempt.retries = exc.retries
        attempt.violators = exc.violators
        emb = None
    except RegimeError as exc:
        attempt.reason = str(exc)
        attempt.failure_kind = "regime"
        emb = None
    attempt.branch = info.branch
    attempt.elapsed_ms = (time.perf_counter() - start) * 1000
    if emb is not None:
        violation = verify_embedding(g, t, emb)
        if violation is not None:
            raise AssertionError(f"{name} returned an invalid embedding: {violation}")
        attempt.success = True
    report.attempts.append(attempt)
    return emb


def embed_tree(
    g: Graph,
    t: Tree,
    eps: float = 1.0,
    c_const: float | None = None,
    mu: float | None = None,
    seed: int = 0,
    *,
    retries: int = DEFAULT_RETRIES,
    oracle_limit: int = 16,
    use_oracle: bool = True,
    oracle_node_limit: int = 2_000_000,
    strict: bool = False,
) -> tuple[Embedding | None, EmbedReport]:
    """Find a copy of spanning tree ``t`` in ``g``.

    The regime embedder for Δ(T) runs first (high iff Δ >= 2n log log n / log n),
    then the other regime, bare paths, spread leaves over all leaves, and finally the
    exact oracle when n <= ``oracle_limit``. Returns (embedding or None, report);
    absence is claimed only via ``report.oracle == "absent"``.
    """
    from .oracle import OracleStatus, contains_spanning_tree

    if g.n != t.n:
        raise ValueError(f"|T| = {t.n} differs from |G| = {g.n}")
    n = g.n
    report = EmbedReport()

    def done(emb: Embedding, name: str):
        report.success = True
        report.strategy = name
        return emb, report

    if n >= 3:
        delta_t = t.max_degree
        first = "high" if delta_t >= high_regime_cutoff(n) else "low"
        report.regime = first
        for i, regime in enumerate((first, "low" if first == "high" else "high")):
            sub_seed = derive_seed(seed, i)

            def attempt(info, regime=regime, sub_seed=sub_seed):
                params = regime_params(n, delta_t, eps, c_const, mu, regime)
                if regime == "high":
                    return embed_high_range(g, t, params, seed=sub_seed, strict=strict, retries=retries, info=info)
                return embed_low_range(g, t, params, retries=retries, seed=sub_seed, strict=strict, info=info)

            emb = _run(report, f"{regime}_range", g, t, attempt)
            if emb is not None:
                return done(emb, f"{regime}_range")

        m = deficiency(g)
        emb = _run(report, "bare_paths", g, t, lambda info: embed_with_bare_paths(g, t, m, strict=False))
        if emb is not None:
            return done(emb, "bare_paths")
        leaves = t.leaves()
        emb = _run(
            report,
            "spread_leaves",
            g,
            t,
            lambda info: embed_with_spread_leaves(g, t, leaves, m, retries=retries, seed=derive_seed(seed, 3), strict=False),
        )
        if emb is not None:
            return done(emb, "spread_leaves")

    if use_oracle and n <= oracle_limit:
        start = time.perf_counter()
        status, emb = contains_spanning_tree(g, t, node_limit=oracle_node_limit)
        attempt = Attempt(strategy="fallback_oracle", success=emb is not None, elapsed_ms=(time.perf_counter() - start) * 1000)
        report.oracle = status.value
        if status is OracleStatus.ABSENT:
            attempt.reason, attempt.failure_kind = "no copy exists", "absent"
        elif status is OracleStatus.UNKNOWN:
            attempt.reason, attempt.failure_kind = "node budget exhausted", "unknown"
        report.attempts.append(attempt)
        if emb is not None:
            if verify_embedding(g, t, emb) is not None:
                raise AssertionError("oracle returned an invalid embedding")
            return done(emb, "fallback_oracle")
    return None, report

"""Host graphs, G(n, p) sampling, regime parameters and the Chernoff/KL calculator.

Adjacency is stored as one Python ``int`` per vertex used as a bitset, so
neighbourhood intersections and popcounts run in O(n / word) time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.special import rel_entr


class GraphFormatError(ValueError):
    """Raised when an edge-list file is malformed."""


class RegimeError(ValueError):
    """Raised when (n, Δ, ε, ...) lie outside the hypotheses of a regime."""


# ---------------------------------------------------------------------------
# bitset helpers
# ---------------------------------------------------------------------------

def bits(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    if not x:
        return []
    s = bin(x)[:1:-1]
    return [i for i, c in enumerate(s) if c == "1"]


def lowest_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


# ---------------------------------------------------------------------------
# RNG
# ---------------------------------------------------------------------------

def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed``, optionally split into a named sub-stream.

    Sub-streams use the SeedSequence spawn key, so (seed, 3, 7) and (seed, 7, 3)
    are independent and neither depends on how many other streams exist.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(stream))))


def derive_seed(seed: int, *stream: int) -> int:
    """A 63-bit integer seed for sub-stream ``stream`` of ``seed``."""
    state = np.random.SeedSequence(seed, spawn_key=tuple(stream)).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

class Graph:
    """Undirected simple graph on ``0..n-1``; immutable after construction."""

    __slots__ = ("n", "rows", "_degrees", "_matrix")

    def __init__(self, n: int, rows: Sequence[int]):
        if len(rows) != n:
            raise ValueError(f"expected {n} adjacency rows, got {len(rows)}")
        self.n = n
        self.rows: tuple[int, ...] = tuple(rows)
        self._degrees: tuple[int, ...] | None = None
        self._matrix: np.ndarray | None = None

    # -- construction -----------------------------------------------------
    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Graph":
        """Build from a symmetric boolean matrix with zero diagonal."""
        a = np.asarray(matrix, dtype=bool)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("adjacency matrix must be square")
        if n and (a.diagonal().any() or not np.array_equal(a, a.T)):
            raise ValueError("adjacency matrix must be symmetric with empty diagonal")
        packed = np.packbits(a, axis=1, bitorder="little")
        rows = [int.from_bytes(packed[i].tobytes(), "little") for i in range(n)]
        g = cls(n, rows)
        g._matrix = a.copy()
        g._matrix.setflags(write=False)
        return g

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, [full ^ (1 << v) for v in range(n)])

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((0, i) for i in range(1, n)))

    # -- queries ------------------------------------------------------------
    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def degrees(self) -> tuple[int, ...]:
        if self._degrees is None:
            self._degrees = tuple(r.bit_count() for r in self.rows)
        return self._degrees

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def neighbors(self, v: int) -> list[int]:
        return bits(self.rows[v])

    def closed_mask(self, v: int) -> int:
        return self.rows[v] | (1 << v)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in bits(self.rows[u] >> (u + 1)):
                yield u, u + 1 + v

    @property
    def num_edges(self) -> int:
        return sum(self.degrees) // 2

    def adjacency_matrix(self) -> np.ndarray:
        """Read-only boolean adjacency matrix (cached)."""
        if self._matrix is None:
            nbytes = (self.n + 7) // 8
            buf = b"".join(r.to_bytes(nbytes, "little") for r in self.rows)
            packed = np.frombuffer(buf, dtype=np.uint8).reshape(self.n, nbytes)
            m = np.unpackbits(packed, axis=1, count=self.n, bitorder="little").astype(bool)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph relabelled so that ``vertices[i]`` becomes ``i``."""
        idx = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            r = 0
            for u in bits(self.rows[v] & mask_of(vertices)):
                r |= 1 << idx[u]
            rows.append(r)
        return Graph(len(vertices), rows)

    def remove_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = list(self.rows)
        for u, v in edges:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        return Graph(self.n, rows)

    def is_dominating(self, vertices: Iterable[int]) -> bool:
        cover = 0
        for v in vertices:
            cover |= self.closed_mask(v)
        return cover == self.all_mask

    # -- dunder ----------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"

    # -- edge-list text format ----------------------------------------------------
    def to_edge_list(self) -> str:
        lines = [f"{self.n} {self.num_edges}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> tuple[int, list[tuple[int, int]]]:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"`` with ``0 <= u < v < n``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty input")
    try:
        n, m = (int(x) for x in lines[0].split())
    except ValueError:
        raise GraphFormatError(f"bad header line: {lines[0]!r}") from None
    if n < 1 or m < 0:
        raise GraphFormatError(f"bad header values n={n} m={m}")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(lines) - 1}")
    edges = []
    seen = set()
    for ln in lines[1:]:
        try:
            u, v = (int(x) for x in ln.split())
        except ValueError:
            raise GraphFormatError(f"bad edge line: {ln!r}") from None
        if not 0 <= u < v < n:
            raise GraphFormatError(f"edge {ln!r} violates 0 <= u < v < n")
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge {ln!r}")
        seen.add((u, v))
        edges.append((u, v))
    return n, edges


def graph_from_edge_list(text: str) -> Graph:
    n, edges = parse_edge_list(text)
    return Graph.from_edges(n, edges)


# ---------------------------------------------------------------------------
# random graphs
# ---------------------------------------------------------------------------

_DENSE_CUTOFF = 0.1


def gnp_sample(n: int, p: float, seed: int) -> Graph:
    """Sample G(n, p); identical output for identical (n, p, seed)."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    npairs = iu.size
    if p >= 1.0:
        chosen = np.ones(npairs, dtype=bool)
    elif p <= 0.0:
        chosen = np.zeros(npairs, dtype=bool)
    elif p > _DENSE_CUTOFF:
        chosen = rng.random(npairs) < p
    else:
        # geometric skipping: gaps between successive edges are Geometric(p) - 1
        chosen = np.zeros(npairs, dtype=bool)
        pos = -1
        batch = max(16, int(npairs * p * 1.2) + 16)
        while True:
            steps = np.cumsum(rng.geometric(p, size=batch)) + pos
            inside = steps[steps < npairs]
            chosen[inside] = True
            if inside.size < steps.size:
                break
            pos = int(steps[-1])
    a = np.zeros((n, n), dtype=bool)
    a[iu[chosen], ju[chosen]] = True
    a |= a.T
    return Graph.from_matrix(a)


def complete_minus_bounded_subgraph(n: int, max_degree: int, seed: int) -> Graph:
    """K_n with a random subgraph of maximum degree <= ``max_degree`` removed.

    Pairs are visited in random order and deleted whenever both endpoints still
    have spare capacity, so the removed subgraph is close to ``max_degree``-regular.
    """
    if max_degree <= 0 or n < 2:
        return Graph.complete(n)
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    order = rng.permutation(iu.size)
    used = np.zeros(n, dtype=np.int64)
    removed = []
    for idx in order:
        u, v = int(iu[idx]), int(ju[idx])
        if used[u] < max_degree and used[v] < max_degree:
            used[u] += 1
            used[v] += 1
            removed.append((u, v))
    return Graph.complete(n).remove_edges(removed)


def min_degree(g: Graph) -> int:
    return min(g.degrees) if g.n else 0


def deficiency(g: Graph) -> int:
    """n - δ(G): the largest number of non-neighbours of a vertex, itself included."""
    return g.n - min_degree(g)


# ---------------------------------------------------------------------------
# regime parameters
# ---------------------------------------------------------------------------

def default_c_const(eps: float) -> float:
    return max(12.0, 2.0 / eps)


def default_mu(eps: float) -> float:
    return min(eps / 10.0, 0.1)


def high_regime_cutoff(n: int) -> float:
    """Δ at or above which the high-range embedder applies: 2n log log n / log n."""
    ln = math.log(n)
    return 2.0 * n * math.log(ln) / ln


@dataclass(frozen=True)
class RegimeParams:
    n: int
    delta_max: int
    eps: float
    c_const: float
    mu: float
    regime: str
    k: float
    k_prime: int
    deficiency: float
    leaf_threshold_low: float

    @property
    def k_int(self) -> int:
        return int(self.k)


def regime_params(
    n: int,
    delta_max: int,
    eps: float,
    c_const: float | None = None,
    mu: float | None = None,
    regime: str = "high",
) -> RegimeParams:
    """Derived quantities for one regime.

    high: k = ceil((n-1)/Δ) - 1 (an integer, must be >= 2); low: k = n/Δ (real).
    In both, k' = floor((1-μ)k) and the deficiency bound is n^(1-(1+ε)/k).
    """
    if n < 3:
        raise RegimeError(f"n={n} < 3")
    if not 1 <= delta_max <= n - 1:
        raise RegimeError(f"Δ={delta_max} outside [1, n-1]")
    if eps <= 0:
        raise RegimeError(f"ε={eps} must be positive")
    c_const = default_c_const(eps) if c_const is None else c_const
    mu = default_mu(eps) if mu is None else mu
    if c_const <= 1:
        raise RegimeError(f"C={c_const} must exceed 1")
    if not 0 < mu < eps:
        raise RegimeError(f"μ={mu} must lie in (0, ε)")
    if regime == "high":
        k: float = math.ceil((n - 1) / delta_max) - 1
        if k < 2:
            raise RegimeError(f"k = ceil({n - 1}/{delta_max}) - 1 = {k} < 2")
    elif regime == "low":
        k = n / delta_max
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return RegimeParams(
        n=n,
        delta_max=delta_max,
        eps=eps,
        c_const=c_const,
        mu=mu,
        regime=regime,
        k=k,
        k_prime=math.floor((1 - mu) * k),
        deficiency=n ** (1 - (1 + eps) / k),
        leaf_threshold_low=n / (c_const * math.log(n)),
    )


def low_range_claim_holds(params: RegimeParams, deficiency_bound: float | None = None) -> bool:
    """εk'n / (100 C log n) >= deficiency bound (default n^(1-(1+ε)/k))."""
    m = params.deficiency if deficiency_bound is None else deficiency_bound
    lhs = params.eps * params.k_prime * params.n / (100 * params.c_const * math.log(params.n))
    return lhs >= m


# ---------------------------------------------------------------------------
# Chernoff / KL
# ---------------------------------------------------------------------------

def kl_bernoulli(x: float, y: float) -> float:
    """D(x || y) = x log(x/y) + (1-x) log((1-x)/(1-y))."""
    return float(rel_entr(x, y) + rel_entr(1 - x, 1 - y))


@dataclass(frozen=True)
class TailBound:
    q: float
    lam: float
    n_trials: int
    kl: float
    bound: float
    kl_floor: float = field(repr=False)


def tail_bound(q: float, lam: float, n_trials: int) -> TailBound:
    """Both forms of the upper-tail bound P(X >= (q+λ)n).

    Returns D(q+λ || q) and (2 q^λ)^n, after checking the link between them,
    D(q+λ || q) >= λ log(1/q) - log 2.
    """
    if not 0 < q < 1:
        raise ValueError(f"q={q} outside (0, 1)")
    if not 0 < lam < 1 - q:
        raise ValueError(f"λ={lam} outside (0, 1-q)")
    if n_trials < 0:
        raise ValueError("n_trials must be non-negative")
    kl = kl_bernoulli(q + lam, q)
    floor = lam * math.log(1 / q) - math.log(2)
    if kl < floor - 1e-12:
        raise ArithmeticError(f"D({q + lam}||{q}) = {kl} < {floor}")
    return TailBound(q=q, lam=lam, n_trials=n_trials, kl=kl, bound=(2 * q**lam) ** n_trials, kl_floor=floor)

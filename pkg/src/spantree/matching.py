"""Star matchings with prescribed demands, and perfect matchings, via augmenting paths.

The flow network is source -> centre (capacity f_a) -> pool vertex (1) -> sink (1).
Augmenting paths are found by BFS over centres, with neighbourhoods held as
bitsets. When a BFS from a deficient centre fails, the centres it reached form a
Hall violator: they are saturated onto exactly the pool vertices they can see,
and that set is smaller than their total demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .graph_core import bits, lowest_bit, mask_of

Center = Hashable


@dataclass(frozen=True)
class HallInstance:
    """Centres with demands, and for each centre a bitset of adjacent pool vertices."""

    demands: Mapping[Center, int]
    adjacency: Mapping[Center, int]
    pool: int

    @classmethod
    def from_sets(
        cls,
        demands: Mapping[Center, int],
        adjacency: Mapping[Center, Iterable[int]],
        pool: Iterable[int] | None = None,
    ) -> "HallInstance":
        adj = {a: mask_of(adjacency.get(a, ())) for a in demands}
        pool_mask = mask_of(pool) if pool is not None else 0
        if pool is None:
            for m in adj.values():
                pool_mask |= m
        return cls(dict(demands), {a: m & pool_mask for a, m in adj.items()}, pool_mask)

    def __post_init__(self) -> None:
        for a, f in self.demands.items():
            if f < 0:
                raise ValueError(f"negative demand {f} at centre {a!r}")
            if a not in self.adjacency:
                raise ValueError(f"centre {a!r} has no adjacency entry")


@dataclass(frozen=True)
class StarAssignment:
    leaves: dict[Center, tuple[int, ...]]


@dataclass(frozen=True)
class HallViolator:
    centers: frozenset
    neighborhood: frozenset[int]
    demand: int

    @property
    def deficit(self) -> int:
        return self.demand - len(self.neighborhood)


def star_matching(inst: HallInstance) -> StarAssignment | HallViolator:
    """Vertex-disjoint stars S_a centred at a with exactly f_a pool leaves, or a violator."""
    centers = [a for a in inst.demands]
    demand = dict(inst.demands)
    adj = dict(inst.adjacency)
    owned = {a: 0 for a in centers}
    load = {a: 0 for a in centers}
    free = inst.pool

    # greedy first pass, scarcest centres first
    for a in sorted(centers, key=lambda c: (adj[c].bit_count() - demand[c], repr(c))):
        avail = adj[a] & free
        need = demand[a]
        while need and avail:
            b = avail & -avail
            avail ^= b
            free ^= b
            owned[a] |= b
            need -= 1
        load[a] = demand[a] - need

    for a in centers:
        while load[a] < demand[a]:
            violator = _augment(a, centers, adj, owned, load, demand, free)
            if isinstance(violator, HallViolator):
                return violator
            free &= ~violator
            load[a] += 1

    return StarAssignment({a: tuple(bits(owned[a])) for a in centers})


def _augment(start, centers, adj, owned, load, demand, free):
    """One augmenting path from ``start``; returns the freed pool bit or a violator."""
    reached_b = 0
    via_center: dict[int, object] = {}  # pool vertex -> centre that reached it
    parent_b: dict[object, int] = {}  # centre -> pool vertex through which it was reached
    visited = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for a in frontier:
            new = adj[a] & ~reached_b
            if not new:
                continue
            reached_b |= new
            hit = new & free
            if hit:
                b = lowest_bit(hit)
                _flip(b, a, start, parent_b, via_center, owned)
                return 1 << b
            for b in bits(new):
                via_center[b] = a
            for c in centers:
                if c not in visited and owned[c] & new:
                    visited.add(c)
                    parent_b[c] = lowest_bit(owned[c] & new)
                    nxt.append(c)
        frontier = nxt
    return HallViolator(
        centers=frozenset(visited),
        neighborhood=frozenset(bits(reached_b)),
        demand=sum(demand[c] for c in visited),
    )


def _flip(b: int, a, start, parent_b, via_center, owned) -> None:
    # a takes b; whoever a displaced reclaims along the path back to start
    while True:
        owned[a] |= 1 << b
        if a == start:
            return
        b_prev = parent_b[a]
        owned[a] &= ~(1 << b_prev)
        a, b = via_center[b_prev], b_prev


def perfect_matching(inst: HallInstance) -> dict[Center, int] | HallViolator:
    """Matching covering every centre (all demands must be 1)."""
    if any(f != 1 for f in inst.demands.values()):
        raise ValueError("perfect_matching requires unit demands")
    res = star_matching(inst)
    if isinstance(res, HallViolator):
        return res
    return {a: leaves[0] for a, leaves in res.leaves.items()}


def validate_star_assignment(inst: HallInstance, sa: StarAssignment) -> bool:
    """Disjointness, adjacency and exact demands, checked from scratch."""
    used: set[int] = set()
    if set(sa.leaves) != set(inst.demands):
        return False
    for a, leaves in sa.leaves.items():
        if len(leaves) != inst.demands[a] or len(set(leaves)) != len(leaves):
            return False
        for b in leaves:
            if b in used or not (inst.adjacency[a] >> b) & 1 or not (inst.pool >> b) & 1:
                return False
            used.add(b)
    return True


def is_hall_violator(inst: HallInstance, v: HallViolator) -> bool:
    """Recount |N(S)| < sum of demands over S directly from the instance."""
    nbhd = 0
    for a in v.centers:
        nbhd |= inst.adjacency[a]
    return nbhd.bit_count() < sum(inst.demands[a] for a in v.centers)

"""Constructive Hamilton cycles in graphs with δ(G) >= n/2.

Grow a path greedily at both ends. When both ends are stuck, try Pósa rotations
at the tail to expose an extension; failing that, close the path into a cycle
through a crossing pair (v_0 ~ v_{i+1}, v_end ~ v_i), which exists whenever the
two end degrees sum to at least the path length. If the cycle misses vertices,
open it next to an outside neighbour and keep growing.
"""

from __future__ import annotations

from .graph_core import Graph, bits, lowest_bit, min_degree


class DiracError(ValueError):
    """Input violates n >= 3 and δ(G) >= n/2."""


class HamiltonStall(RuntimeError):
    pass


def _rotate(path: list[int], g: Graph, outside: int) -> bool:
    """Pósa rotations at the tail; True if the tail gained an outside neighbour."""
    end = path[-1]
    pos = {v: i for i, v in enumerate(path)}
    for u in bits(g.rows[end]):
        i = pos[u]
        if i >= len(path) - 2:
            continue
        # path v0..v_i v_{i+1}..v_end  ->  v0..v_i v_end..v_{i+1}
        new_end = path[i + 1]
        if g.rows[new_end] & outside:
            path[i + 1:] = path[:i:-1]
            return True
    return False


def _crossing_cycle(path: list[int], g: Graph) -> list[int] | None:
    first, last = path[0], path[-1]
    if g.has_edge(first, last):
        return list(path)
    # i with first ~ path[i+1] and last ~ path[i]
    for i in range(len(path) - 1):
        if g.has_edge(first, path[i + 1]) and g.has_edge(last, path[i]):
            return path[: i + 1] + path[:i:-1]
    return None


def dirac_hamilton_cycle(g: Graph, require_dirac: bool = True) -> list[int]:
    """Hamilton cycle of ``g`` as a vertex sequence (closing edge implied).

    With ``require_dirac=False`` the degree check is skipped and the same procedure
    runs anyway; it then either returns a cycle or raises HamiltonStall.
    """
    n = g.n
    if n < 3:
        raise DiracError(f"n = {n} < 3")
    delta = min_degree(g)
    if require_dirac and 2 * delta < n:
        v = g.degrees.index(delta)
        raise DiracError(f"vertex {v} has degree {delta} < n/2 = {n / 2}")
    return _hamilton(g)


def _hamilton(g: Graph) -> list[int]:
    n = g.n
    path = [0]
    outside = g.all_mask & ~1
    while True:
        # greedy extension at both ends
        grown = True
        while grown:
            grown = False
            ext = g.rows[path[-1]] & outside
            if ext:
                v = lowest_bit(ext)
                path.append(v)
                outside &= ~(1 << v)
                grown = True
                continue
            ext = g.rows[path[0]] & outside
            if ext:
                path.reverse()
                grown = True
                continue
            if outside and len(path) > 2 and _rotate(path, g, outside):
                grown = True
        if not outside and g.has_edge(path[0], path[-1]):
            return path
        cycle = _crossing_cycle(path, g)
        if cycle is None:
            raise HamiltonStall(f"no crossing on a maximal path of length {len(path)}")
        if not outside:
            return cycle
        # open the cycle next to a vertex with an outside neighbour
        for j, v in enumerate(cycle):
            ext = g.rows[v] & outside
            if ext:
                w = lowest_bit(ext)
                path = cycle[j + 1:] + cycle[: j + 1] + [w]
                outside &= ~(1 << w)
                break
        else:
            raise HamiltonStall("graph is disconnected")


def is_hamilton_cycle(g: Graph, cycle: list[int]) -> bool:
    if len(cycle) != g.n or sorted(cycle) != list(range(g.n)):
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % g.n]) for i in range(g.n))

"""Digraph diagnostics on the majorization pattern.

The pattern is read as a digraph with an edge j -> u exactly when entry
(u, j) is positive (source = column index); every walk, cycle, and BFS here
uses that orientation and no other.  The layer provides the necessary
prechecks that certify non-primitivity cheaply, the set H of vertices lying
on a cycle of length at most n-1 (with witness cycles), and reachability
witnesses from vertices outside H into H.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .tensor import PatternMatrix, PatternVector, Tensor, majorization


class WitnessNotFound(RuntimeError):
    """No short-cycle vertex was reachable within the guaranteed depth.

    For a primitive tensor this cannot happen; seeing it means the instance
    is not primitive or the short-cycle vertex set was mis-declared.
    """


@dataclass(frozen=True)
class CycleInfo:
    """Short cycles of the majorization digraph and the vertices on them.

    H is the set of vertices lying on some cycle of length <= n-1, s = |H|,
    and short_cycles lists one shortest witness cycle per vertex of H
    (deduplicated up to rotation).  Cycles are vertex tuples (j_1, ..., j_t)
    with the closing edge j_t -> j_1 implicit; a 1-tuple is a self-loop.
    """

    adjacency: PatternMatrix
    short_cycles: tuple[tuple[int, ...], ...]
    H: PatternVector
    s: int


def necessary_conditions(a: Tensor) -> str | None:
    """Cheap checks every primitive tensor passes; a violation certifies
    non-primitivity.

    Checked in order: every column of the majorization matrix has a positive
    off-diagonal entry, some column has two positive entries, and every row
    of the tensor has a positive entry.  The two column conditions require
    another index to exist, so they only apply for n >= 2; for n = 1 the
    row condition alone decides (the single diagonal entry is the whole
    pattern).  Returns a description of the first violation, or None.
    """
    n = a.dim
    m = majorization(a)
    if n >= 2:
        for j in range(n):
            if m.col_mask(j) & ~(1 << j) == 0:
                return (
                    f"column {j + 1} of the majorization matrix has no positive "
                    "off-diagonal entry"
                )
        if all(m.col_mask(j).bit_count() <= 1 for j in range(n)):
            return "every column of the majorization matrix has at most one positive entry"
    rows_hit = 0
    for idx in a.entries:
        rows_hit |= 1 << idx[0]
    for u in range(n):
        if not rows_hit >> u & 1:
            return f"row {u + 1} of the tensor has no positive entry"
    return None


def verify_walk(a: Tensor, walk: list[int] | tuple[int, ...]) -> bool:
    """True iff consecutive pairs of the sequence are edges of the digraph.

    A repeated vertex j -> j is a valid step exactly when the diagonal entry
    (j, j) is positive (a cycle of length 1); the edge test covers that
    uniformly.
    """
    if len(walk) < 2:
        raise ValueError("a walk needs at least two vertices")
    m = majorization(a)
    for v in walk:
        if not 0 <= v < m.dim:
            raise ValueError(f"vertex {v} out of range [0, {m.dim})")
    return all(m.get(walk[k + 1], walk[k]) for k in range(len(walk) - 1))


def walk_positivity_check(a: Tensor, walk: list[int] | tuple[int, ...]) -> bool:
    """Whether the iterated pattern at the walk's length links its endpoints.

    For a verified walk of length t-1 this must always return True (it is a
    theorem); it is exposed as a test hook, not a decision aid.
    """
    if not verify_walk(a, walk):
        raise ValueError("sequence is not a walk of the majorization digraph")
    from .engine import step

    pat = majorization(a)
    for _ in range(len(walk) - 2):
        pat = step(a, pat)
    return pat.get(walk[-1], walk[0])


def _bfs(out_neighbors: list[int], src: int) -> tuple[list[int], list[int]]:
    """Distances and BFS parents from src over the out-edge masks (-1 = unreached)."""
    n = len(out_neighbors)
    dist = [-1] * n
    parent = [-1] * n
    dist[src] = 0
    q = deque([src])
    while q:
        x = q.popleft()
        m = out_neighbors[x]
        while m:
            low = m & -m
            m ^= low
            u = low.bit_length() - 1
            if dist[u] < 0:
                dist[u] = dist[x] + 1
                parent[u] = x
                q.append(u)
    return dist, parent


def _shortest_cycle_through(
    adj: PatternMatrix, out_neighbors: list[int], v: int
) -> tuple[int, ...] | None:
    """One shortest cycle through v, as a vertex tuple, or None if acyclic at v.

    The shortest closed walk through a vertex is automatically a simple
    cycle, so BFS from v plus the best in-edge back into v finds it.
    """
    dist, parent = _bfs(out_neighbors, v)
    best: tuple[int, int] | None = None
    in_mask = adj.rows[v]
    while in_mask:
        low = in_mask & -in_mask
        in_mask ^= low
        x = low.bit_length() - 1
        if dist[x] >= 0:
            cand = (dist[x] + 1, x)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    path = [best[1]]
    while path[-1] != v:
        path.append(parent[path[-1]])
    path.reverse()
    return tuple(path)


def short_cycles_and_H(a: Tensor) -> CycleInfo:
    """Vertices on cycles of length <= n-1, with one witness cycle each.

    Membership is decided by diagonal positivity of Boolean adjacency powers
    for lengths 1..n-1 (closed-walk criterion); a closed walk of length t
    through a vertex contains a simple cycle of length <= t through it, so
    this coincides with simple-cycle membership, and the BFS witnesses are
    required to agree.
    """
    adj = majorization(a)
    n = adj.dim
    out_neighbors = adj.col_masks()
    h_mask = 0
    reach = out_neighbors[:]
    for t in range(1, n):
        for v in range(n):
            if reach[v] >> v & 1:
                h_mask |= 1 << v
        if t < n - 1:
            nxt = []
            for j in range(n):
                acc = 0
                m = reach[j]
                while m:
                    low = m & -m
                    m ^= low
                    acc |= out_neighbors[low.bit_length() - 1]
                nxt.append(acc)
            reach = nxt

    cycles = set()
    witnessed = 0
    for v in range(n):
        cyc = _shortest_cycle_through(adj, out_neighbors, v)
        if cyc is not None and len(cyc) <= n - 1:
            witnessed |= 1 << v
            pivot = cyc.index(min(cyc))
            cycles.add(cyc[pivot:] + cyc[:pivot])
    if witnessed != h_mask:
        raise AssertionError(
            "closed-walk and shortest-cycle criteria disagree on the short-cycle set"
        )
    short_cycles = tuple(sorted(cycles, key=lambda c: (len(c), c)))
    return CycleInfo(adj, short_cycles, PatternVector(n, h_mask), h_mask.bit_count())


def escape_witness(a: Tensor, info: CycleInfo, j: int) -> tuple[int, int]:
    """A pair (i, l): i in H reachable from j in l <= n-s steps.

    Existence is guaranteed for primitive tensors; the lexicographically
    smallest (l, i) is returned for determinism.  Raises WitnessNotFound
    when no short-cycle vertex is reachable within the depth cap.
    """
    n = a.dim
    if not 0 <= j < n:
        raise ValueError(f"vertex {j} out of range [0, {n})")
    if j in info.H:
        raise ValueError(f"vertex {j} lies on a short cycle")
    if info.s == 0:
        raise ValueError("there are no short-cycle vertices to escape to")
    cap = n - info.s
    dist, _ = _bfs(majorization(a).col_masks(), j)
    best: tuple[int, int] | None = None
    for i in info.H.indices():
        if 0 < dist[i] <= cap:
            cand = (dist[i], i)
            if best is None or cand < best:
                best = cand
    if best is None:
        raise WitnessNotFound(
            f"no short-cycle vertex is reachable from vertex {j + 1} within "
            f"{cap} steps; the tensor is not primitive or the short-cycle set "
            "was mis-declared"
        )
    return best[1], best[0]

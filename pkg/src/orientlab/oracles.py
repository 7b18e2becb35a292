"""Independent ground truth: exact arboricity, pseudoarboricity, matching and
forest-decomposition checkers.

None of these share code paths with the orientation algorithms; they only
read a graph snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .core import OrientedGraph, VertexId

EXHAUSTIVE_LIMIT = 20
DEFAULT_LIMIT = 12


@dataclass(frozen=True)
class DensityCertificate:
    subset: frozenset
    edges_inside: int
    value: Fraction  # |E(U)| / (|U| - 1)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: tuple

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


def _vertices_and_edges(graph) -> tuple[list, list[tuple]]:
    if isinstance(graph, OrientedGraph):
        return graph.vertices(), graph.edges()
    edges = [tuple(e) for e in graph]
    return sorted({x for e in edges for x in e}), edges


def _subset_edge_counts(graph, exhaustive: bool):
    verts, edges = _vertices_and_edges(graph)
    n = len(verts)
    limit = EXHAUSTIVE_LIMIT if exhaustive else DEFAULT_LIMIT
    if n > limit:
        hint = "" if exhaustive else " (pass exhaustive=True to allow up to 20)"
        raise ValueError(f"subset scan refused: n={n} exceeds limit {limit}{hint}")
    pos = {v: i for i, v in enumerate(verts)}
    adj = [0] * n
    for u, w in edges:
        adj[pos[u]] |= 1 << pos[w]
        adj[pos[w]] |= 1 << pos[u]
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        lo = np.arange(1 << i, dtype=np.int64)
        counts[(1 << i):(1 << (i + 1))] = counts[:1 << i] + np.bitwise_count(lo & adj[i])
    sizes = np.bitwise_count(np.arange(1 << n, dtype=np.int64)).astype(np.int64)
    return verts, counts, sizes


def _decode(verts, mask: int) -> frozenset:
    return frozenset(v for i, v in enumerate(verts) if mask >> i & 1)


def arboricity_bruteforce(graph, exhaustive: bool = False) -> tuple[int, DensityCertificate | None]:
    """Exact Nash-Williams arboricity by scanning every vertex subset.

    Refuses graphs above 12 vertices unless ``exhaustive`` (hard cap 20).
    """
    verts, counts, sizes = _subset_edge_counts(graph, exhaustive)
    if len(verts) < 2:
        return 0, None
    ok = sizes >= 2
    denom = np.where(ok, sizes - 1, 1)
    alpha = int(np.max(np.where(ok, -(-counts // denom), 0)))
    # witness: the subset with the largest exact ratio among those attaining alpha
    best, best_mask = Fraction(-1), 0
    for mask in np.flatnonzero(ok & (-(-counts // denom) == alpha)):
        r = Fraction(int(counts[mask]), int(sizes[mask]) - 1)
        if r > best:
            best, best_mask = r, int(mask)
    return alpha, DensityCertificate(_decode(verts, best_mask), int(counts[best_mask]), best)


def max_density_bruteforce(graph, exhaustive: bool = False) -> tuple[Fraction, frozenset]:
    """max over nonempty U of |E(U)|/|U|, with a maximizing subset."""
    verts, counts, sizes = _subset_edge_counts(graph, exhaustive)
    best, best_mask = Fraction(0), 0
    for mask in range(1, len(counts)):
        r = Fraction(int(counts[mask]), int(sizes[mask]))
        if r > best:
            best, best_mask = r, mask
    return best, _decode(verts, best_mask)


def _orientation_flow(verts, edges, cap: int):
    """Max flow source -> edge nodes -> endpoint -> sink (capacity cap)."""
    m, n = len(edges), len(verts)
    pos = {v: i for i, v in enumerate(verts)}
    src, sink = 0, m + n + 1
    rows, cols, caps = [], [], []
    for k, (u, w) in enumerate(edges):
        e = 1 + k
        rows += [src, e, e]
        cols += [e, 1 + m + pos[u], 1 + m + pos[w]]
        caps += [1, 1, 1]
    for i in range(n):
        rows.append(1 + m + i)
        cols.append(sink)
        caps.append(cap)
    size = m + n + 2
    mat = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(size, size))
    return maximum_flow(mat, src, sink, method="dinic"), pos


def min_max_outdegree(graph) -> tuple[int, OrientedGraph]:
    """Minimum achievable maximum outdegree and a witness orientation.

    Binary search over the threshold with a max-flow feasibility test: every
    edge sends one unit to the endpoint that will be its tail, each vertex
    absorbs at most the threshold.
    """
    verts, edges = _vertices_and_edges(graph)
    m, n = len(edges), len(verts)
    if m == 0:
        return 0, OrientedGraph.from_edges([], verts)
    lo = -(-m // n)
    hi = max(sum(1 for e in edges if v in e) for v in verts)
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        res, pos = _orientation_flow(verts, edges, mid)
        if res.flow_value == m:
            best, hi = (mid, res, pos), mid - 1
        else:
            lo = mid + 1
    delta, res, pos = best
    flow = res.flow.tocsr()
    oriented = []
    for k, (u, w) in enumerate(edges):
        tail_first = flow[1 + k, 1 + m + pos[u]] > 0
        oriented.append((u, w) if tail_first else (w, u))
    return delta, OrientedGraph.from_edges(oriented, verts)


def _undirected(edges: Iterable) -> set[frozenset]:
    return {frozenset(e) for e in edges}


def check_maximal_matching(graph, matching: Iterable) -> Violation | None:
    """None if ``matching`` is a maximal matching of ``graph``."""
    _, edges = _vertices_and_edges(graph)
    e_set = _undirected(edges)
    covered: dict[VertexId, frozenset] = {}
    for pair in matching:
        e = frozenset(pair)
        if e not in e_set:
            return Violation("not-an-edge", tuple(sorted(e)))
        for x in e:
            if x in covered:
                return Violation("shared-vertex", (x,))
            covered[x] = e
    for u, w in sorted(tuple(sorted(e)) for e in e_set):
        if u not in covered and w not in covered:
            return Violation("augmentable", (u, w))
    return None


def check_forest_decomposition(graph, assignment: dict) -> Violation | None:
    """None if every color class of ``assignment`` is acyclic and the classes
    cover exactly the edges of ``graph``."""
    _, edges = _vertices_and_edges(graph)
    e_set = _undirected(edges)
    seen = set()
    forests: dict[int, DisjointSet] = {}
    for edge, idx in sorted(assignment.items(), key=lambda kv: (kv[1], sorted(kv[0]))):
        e = frozenset(edge)
        if e not in e_set:
            return Violation("not-an-edge", tuple(sorted(e)))
        if e in seen:
            return Violation("edge-assigned-twice", tuple(sorted(e)))
        seen.add(e)
        ds = forests.setdefault(idx, DisjointSet())
        u, w = tuple(edge)
        for x in (u, w):
            if x not in ds:
                ds.add(x)
        if ds.connected(u, w):
            return Violation("cycle", (idx, tuple(sorted(e))))
        ds.merge(u, w)
    missing = e_set - seen
    if missing:
        return Violation("unassigned-edge", tuple(sorted(min(missing, key=sorted))))
    return None

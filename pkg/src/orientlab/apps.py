"""Applications on top of orientations: maximal matching, adjacency queries,
forest decomposition and adjacency labels."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .core import OpKind, OrientedGraph, SequenceError, UpdateOp, apply_raw, de
from .orient import AntiReset, BrodalFagerberg, OrientConfig

MATCHING_ENGINES = ("bf", "antireset", "flipgame")


def htz_threshold(alpha: int, n: int) -> int:
    """ceil(sqrt(alpha * log2 n)), the balanced HTZ-style outdegree threshold."""
    return max(1, math.ceil(math.sqrt(alpha * math.log2(max(n, 2)))))


class MatchState:
    """Matching plus, per vertex, the set of its currently free in-neighbors.

    Installed as the graph observer so free_in follows every insertion,
    deletion and flip made by whichever engine drives the orientation.
    """

    def __init__(self, graph: OrientedGraph):
        self.graph = graph
        self.partner: dict[int, int] = {}
        self.free_in: dict[int, set[int]] = {v: set() for v in graph.vertices()}
        self.work = 0
        for u, w in graph.edges():
            self.free_in[w].add(u)
        graph.observer = self

    @property
    def matching(self) -> set[tuple[int, int]]:
        return {(u, w) for u, w in self.partner.items() if u < w}

    def is_free(self, v: int) -> bool:
        return v not in self.partner

    # observer hooks
    def on_insert(self, tail, head):
        self.free_in.setdefault(tail, set())
        fi = self.free_in.setdefault(head, set())
        if tail not in self.partner:
            fi.add(tail)

    def on_delete(self, tail, head):
        self.free_in[head].discard(tail)

    def on_flip(self, tail, head):
        self.work += 1
        self.free_in[head].discard(tail)
        if head not in self.partner:
            self.free_in[tail].add(head)

    def notify(self, v: int) -> None:
        """v tells its out-neighbors about its (new) status."""
        out = self.graph.out[v]
        self.work += len(out)
        free = v not in self.partner
        for w in out:
            if free:
                self.free_in[w].add(v)
            else:
                self.free_in[w].discard(v)

    def check_free_in(self) -> None:
        g = self.graph
        for v in g.vertices():
            want = {u for u in g.inn[v] if u not in self.partner}
            if self.free_in.get(v, set()) != want:
                raise AssertionError(f"free_in[{v}] = {sorted(self.free_in.get(v, ()))}, "
                                     f"expected {sorted(want)}")


class MatchingRunner:
    """Maximal matching over a dynamic orientation.

    ``engine`` is ``bf`` or ``antireset`` (a Δ-orientation maintained by
    cascades, with the Neiman-Solomon reduction on top) or ``flipgame`` (no
    cascades; every vertex that scans its out-neighbors is reset, or only
    when its outdegree exceeds ``threshold`` if one is given).
    """

    def __init__(self, config: OrientConfig | None = None, engine: str = "flipgame",
                 threshold: int | None = None):
        if engine not in MATCHING_ENGINES:
            raise ValueError(f"engine must be one of {MATCHING_ENGINES}")
        self.engine = engine
        self.config = config
        self.threshold = threshold
        if engine == "bf":
            self.orienter = BrodalFagerberg(config)
        elif engine == "antireset":
            self.orienter = AntiReset(config)
        else:
            self.orienter = None
        self.graph = self.orienter.graph if self.orienter else OrientedGraph()
        self.rule = config.insert_rule if config else "fixed"
        self.state = MatchState(self.graph)
        self.touched: set[int] = set()  # vertices whose status or edges changed in the last op

    @property
    def metrics(self):
        m = self.graph.metrics
        m.extra["work"] = self.state.work
        m.extra["matching_size"] = len(self.state.partner) // 2
        return m

    # -- helpers ------------------------------------------------------------
    def _scanned(self, v: int) -> None:
        """Hook after v scanned its out-neighbors: the flipping-game reset."""
        if self.engine != "flipgame":
            return
        g = self.graph
        if g.out[v] and (self.threshold is None or len(g.out[v]) > self.threshold):
            g.reset(v)
            g.metrics.resets += 1

    def _set_status(self, v: int) -> None:
        self.state.notify(v)
        self._scanned(v)
        self.touched.add(v)

    def _match(self, u: int, w: int) -> None:
        self.state.partner[u] = w
        self.state.partner[w] = u
        self._set_status(u)
        self._set_status(w)

    def _rematch(self, u: int) -> None:
        st, g = self.state, self.graph
        if u not in g.out or not st.is_free(u):
            return
        if st.free_in[u]:
            self.state.work += 1
            self._match(u, min(st.free_in[u]))
            return
        out = g.out[u]
        st.work += len(out)
        cands = [x for x in out if x not in st.partner]
        self._scanned(u)
        if cands:
            self._match(u, min(cands))

    def _insert_edge(self, op: UpdateOp, index: int) -> None:
        if self.orienter is not None:
            self.orienter.apply(op, index)
        else:
            g = self.graph
            g.begin_update(op.endpoints())
            apply_raw(g, op, self.rule, index)
            g.end_update()
        self.state.work += 1
        u, v = op.u, op.v
        self.touched.update((u, v))
        if self.state.is_free(u) and self.state.is_free(v):
            self._match(u, v)

    def _delete_edge(self, op: UpdateOp, index: int) -> None:
        u, v = op.u, op.v
        if self.orienter is not None:
            self.orienter.apply(op, index)
        else:
            g = self.graph
            g.begin_update(op.endpoints())
            apply_raw(g, op, self.rule, index)
            g.end_update()
        st = self.state
        st.work += 1
        if st.partner.get(u) == v:
            del st.partner[u], st.partner[v]
            self._set_status(u)
            self._set_status(v)
            self._rematch(u)
            self._rematch(v)

    def apply(self, op: UpdateOp, index: int = -1) -> None:
        self.touched = set()
        k = op.kind
        g = self.graph
        if k is OpKind.INSERT_EDGE:
            self._insert_edge(op, index)
        elif k is OpKind.DELETE_EDGE:
            if op.u not in g.out or op.v not in g.out or not g.has_edge(op.u, op.v):
                raise SequenceError(index, f"edge {{{op.u},{op.v}}} not present")
            self._delete_edge(op, index)
        elif k is OpKind.INSERT_VERTEX:
            apply_raw(g, op, self.rule, index)
            self.state.free_in[op.u] = set()
            self.touched.add(op.u)
        elif k is OpKind.DELETE_VERTEX:
            if op.u not in g.out:
                raise SequenceError(index, f"vertex {op.u} is not live")
            for w in g.neighbors(op.u):
                self._delete_edge(de(op.u, w), index)
            st = self.state
            if op.u in st.partner:  # isolated now, but may still be matched? never: its edge is gone
                raise AssertionError("matched vertex without edges")
            g.remove_vertex(op.u)
            st.free_in.pop(op.u, None)
        # queries and value updates do not affect the matching

    def local_violation(self, vertices=None):
        """Maximality and consistency checked around ``vertices`` only.

        Sufficient after an update when ``vertices`` covers every vertex
        whose status or incident edge set changed (``self.touched``).
        """
        g, partner = self.graph, self.state.partner
        for x in sorted(self.touched if vertices is None else vertices):
            if x not in g.out:
                continue
            p = partner.get(x)
            if p is not None:
                if partner.get(p) != x or not g.has_edge(x, p):
                    return ("bad-partner", x, p)
                continue
            for y in sorted(g.out[x] | g.inn[x]):
                if y not in partner:
                    return ("augmentable", x, y)
        return None


def matching_update(runner: MatchingRunner, op: UpdateOp, index: int = -1) -> set:
    runner.apply(op, index)
    return runner.state.matching


class AdjStruct:
    """Local adjacency structure on the Δ'-flipping game.

    A query at (u, v) resets each endpoint whose outdegree exceeds Δ', then
    binary-searches the two sorted out-neighbor indexes.  A vertex's index
    is (re)built when its outdegree drops below 2Δ' and dropped once the
    outdegree exceeds 2Δ', so it always exists while outdeg <= Δ'.  After a
    query both endpoints have outdegree at most Δ'+1 <= 2Δ' and keep theirs.
    """

    def __init__(self, delta_prime: int, insert_rule: str = "fixed"):
        if delta_prime < 1:
            raise ValueError("delta_prime must be >= 1")
        self.dp = delta_prime
        self.rule = insert_rule
        self.graph = OrientedGraph()
        self.graph.observer = self
        self.index: dict[int, list[int]] = {}
        self.index_work = 0
        self.queries = 0
        self.resets = 0

    @property
    def metrics(self):
        m = self.graph.metrics
        m.extra.update({"index_work": self.index_work, "queries": self.queries})
        return m

    def _gain(self, v, w):
        idx = self.index.get(v)
        if idx is None:
            return
        if len(self.graph.out[v]) > 2 * self.dp:
            del self.index[v]
        else:
            bisect.insort(idx, w)
            self.index_work += 1

    def _lose(self, v, w):
        idx = self.index.get(v)
        if idx is not None:
            idx.pop(bisect.bisect_left(idx, w))
            self.index_work += 1
        elif len(self.graph.out[v]) < 2 * self.dp:
            self.index[v] = sorted(self.graph.out[v])
            self.index_work += len(self.index[v]) + 1

    def on_insert(self, tail, head):
        self._gain(tail, head)

    def on_delete(self, tail, head):
        self._lose(tail, head)

    def on_flip(self, tail, head):
        self._lose(tail, head)
        self._gain(head, tail)

    def apply(self, op: UpdateOp, index: int = -1):
        g = self.graph
        if op.kind is OpKind.QUERY and op.v is not None:
            return adjacency_query(self, op.u, op.v)
        if op.kind in (OpKind.QUERY, OpKind.SET_VALUE):
            return None
        g.begin_update(op.endpoints())
        try:
            apply_raw(g, op, self.rule, index)
            if op.kind is OpKind.DELETE_VERTEX:
                self.index.pop(op.u, None)
            elif op.kind is OpKind.INSERT_VERTEX:
                self.index[op.u] = []
        finally:
            g.end_update()
        return None

    def check_index(self) -> None:
        for v in self.graph.vertices():
            d = self.graph.outdegree(v)
            idx = self.index.get(v)
            if d <= self.dp and idx is None:
                raise AssertionError(f"no index at {v} with outdegree {d}")
            if idx is not None and idx != sorted(self.graph.out[v]):
                raise AssertionError(f"stale index at {v}")


def _contains(sorted_list: list[int], x: int) -> bool:
    i = bisect.bisect_left(sorted_list, x)
    return i < len(sorted_list) and sorted_list[i] == x


def adjacency_query(adj: AdjStruct, u: int, v: int) -> bool:
    g = adj.graph
    for x in (u, v):
        if x not in g.out:
            raise KeyError(f"vertex {x} is not live")
    g.begin_update((u, v))
    for x in (u, v):
        if len(g.out[x]) > adj.dp:
            g.reset(x)
            g.metrics.resets += 1
            adj.resets += 1
    g.end_update()
    adj.queries += 1
    return _contains(adj.index[u], v) or _contains(adj.index[v], u)


def forest_decompose(graph: OrientedGraph, delta: int | None = None) -> dict[tuple[int, int], int]:
    """Split an orientation of max outdegree delta into <= 2*delta forests.

    Slot j holds the j-th out-edge (by head id) of every vertex; each slot is
    a functional graph, so each of its components has at most one cycle.
    One edge per cycle moves to the overflow class delta + j; those edges
    are vertex-disjoint, hence a forest too.  Keys are (tail, head).
    """
    top = graph.max_outdegree()
    if delta is None:
        delta = top
    if top > delta:
        raise ValueError(f"outdegree {top} exceeds delta={delta}")
    assignment: dict[tuple[int, int], int] = {}
    slots: list[dict[int, int]] = [{} for _ in range(delta)]
    for v in graph.vertices():
        for j, w in enumerate(graph.out_neighbors(v)):
            slots[j][v] = w
            assignment[(v, w)] = j
    for j, succ in enumerate(slots):
        state: dict[int, int] = {}  # 1 = on current walk, 2 = finished
        for start in sorted(succ):
            if start in state:
                continue
            path, x = [], start
            while x in succ and x not in state:
                state[x] = 1
                path.append(x)
                x = succ[x]
            if state.get(x) == 1:  # closed a new cycle at x
                assignment[(x, succ[x])] = delta + j
            for y in path:
                state[y] = 2
    return assignment


@dataclass(frozen=True)
class ForestLabel:
    id: int
    parents: tuple  # parent per forest, None where v is a root


def make_labels(assignment: dict[tuple[int, int], int], vertices=(),
                num_forests: int | None = None) -> dict[int, ForestLabel]:
    """Label(v) = (v, parent of v in forest 0, ..., forest f-1).

    Every class of :func:`forest_decompose` gives each vertex at most one
    out-edge, so the head of that edge is v's parent in the rooted forest.
    """
    f = num_forests if num_forests is not None else max(assignment.values(), default=-1) + 1
    parents: dict[int, list] = {v: [None] * f for v in vertices}
    for (tail, head), c in assignment.items():
        row = parents.setdefault(tail, [None] * f)
        parents.setdefault(head, [None] * f)
        if row[c] is not None:
            raise ValueError(f"vertex {tail} has two parents in forest {c}")
        row[c] = head
    return {v: ForestLabel(v, tuple(p)) for v, p in parents.items()}


def label_adjacent(a: ForestLabel, b: ForestLabel) -> bool:
    return a.id in b.parents or b.id in a.parents

"""Dynamic oriented graph, the update-sequence model and run metrics.

Every orientation algorithm in the package mutates an :class:`OrientedGraph`
through the same two primitives, :func:`apply_raw` and
:meth:`OrientedGraph.flip`, so instantaneous outdegree peaks, flip counts and
flip distances are metered in one place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

VertexId = int


class SequenceError(ValueError):
    """An update op violated its preconditions (names the op index)."""

    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"op #{index}: {message}")


class InvariantError(RuntimeError):
    """Internal consistency failure; aborts the run."""


class OpKind(str, Enum):
    INSERT_VERTEX = "iv"
    DELETE_VERTEX = "dv"
    INSERT_EDGE = "ie"
    DELETE_EDGE = "de"
    QUERY = "q"
    SET_VALUE = "val"

    @property
    def is_edge_update(self) -> bool:
        return self in (OpKind.INSERT_EDGE, OpKind.DELETE_EDGE)


@dataclass(frozen=True)
class UpdateOp:
    kind: OpKind
    u: VertexId
    v: VertexId | None = None
    value: int | None = None
    # ``ied u v``: insert with the initial orientation u -> v fixed by the sequence
    directed: bool = False

    def endpoints(self) -> tuple[VertexId, ...]:
        return (self.u,) if self.v is None else (self.u, self.v)

    def to_line(self) -> str:
        if self.kind is OpKind.INSERT_EDGE and self.directed:
            return f"ied {self.u} {self.v}"
        if self.kind is OpKind.SET_VALUE:
            return f"val {self.u} {self.value}"
        return " ".join([self.kind.value, *map(str, self.endpoints())])

    @classmethod
    def parse(cls, line: str) -> "UpdateOp":
        parts = line.split()
        tag, args = parts[0], [int(p) for p in parts[1:]]
        if tag == "ied":
            _expect(tag, args, 2)
            return cls(OpKind.INSERT_EDGE, args[0], args[1], directed=True)
        kind = OpKind(tag)
        if kind is OpKind.SET_VALUE:
            _expect(tag, args, 2)
            return cls(kind, args[0], value=args[1])
        if kind in (OpKind.INSERT_VERTEX, OpKind.DELETE_VERTEX):
            _expect(tag, args, 1)
            return cls(kind, args[0])
        if kind is OpKind.QUERY and len(args) == 1:  # vertex query (flipping game)
            _expect(tag, args, 1)
            return cls(kind, args[0])
        _expect(tag, args, 2)
        return cls(kind, args[0], args[1])


def _expect(tag: str, args: list[int], n: int) -> None:
    if len(args) != n:
        raise ValueError(f"'{tag}' takes {n} operands, got {len(args)}")
    if any(a < 0 for a in args):
        raise ValueError(f"negative vertex id in '{tag}'")


def iv(v: VertexId) -> UpdateOp:
    return UpdateOp(OpKind.INSERT_VERTEX, v)


def dv(v: VertexId) -> UpdateOp:
    return UpdateOp(OpKind.DELETE_VERTEX, v)


def ie(u: VertexId, v: VertexId, directed: bool = False) -> UpdateOp:
    return UpdateOp(OpKind.INSERT_EDGE, u, v, directed=directed)


def de(u: VertexId, v: VertexId) -> UpdateOp:
    return UpdateOp(OpKind.DELETE_EDGE, u, v)


def query(u: VertexId, v: VertexId | None = None) -> UpdateOp:
    return UpdateOp(OpKind.QUERY, u, v)


def setval(v: VertexId, x: int) -> UpdateOp:
    return UpdateOp(OpKind.SET_VALUE, v, value=x)


class UpdateSequence:
    """An ordered, replayable stream of :class:`UpdateOp`.

    Text format, one op per line: ``iv <id>``, ``dv <id>``, ``ie <u> <v>``,
    ``ied <u> <v>`` (insert oriented u -> v), ``de <u> <v>``, ``q <u> [<v>]``,
    ``val <v> <x>``.  ``#`` starts a comment.
    """

    def __init__(self, ops: Iterable[UpdateOp] = ()):
        self.ops: list[UpdateOp] = list(ops)

    def __iter__(self) -> Iterator[UpdateOp]:
        return iter(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return UpdateSequence(self.ops[i])
        return self.ops[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, UpdateSequence) and self.ops == other.ops

    def append(self, op: UpdateOp) -> None:
        self.ops.append(op)

    def extend(self, ops: Iterable[UpdateOp]) -> None:
        self.ops.extend(ops)

    @property
    def edge_updates(self) -> int:
        return sum(1 for op in self.ops if op.kind.is_edge_update)

    def dumps(self) -> str:
        return "".join(op.to_line() + "\n" for op in self.ops)

    @classmethod
    def loads(cls, text: str) -> "UpdateSequence":
        ops = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                ops.append(UpdateOp.parse(line))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(ops)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "UpdateSequence":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


METRIC_KEYS = ("t", "f", "resets", "peak_outdeg", "peak_outdeg_steady",
               "rounds", "messages", "peak_mem_entries")


@dataclass
class Metrics:
    t: int = 0
    f: int = 0
    resets: int = 0
    peak_outdeg: int = 0
    peak_outdeg_steady: int = 0
    rounds: int = 0
    messages: int = 0
    peak_mem_entries: int = 0
    flip_distance_hist: dict[int, int] = field(default_factory=dict)
    # algorithm-specific counters (cost ledger, cascade stats) appended to the JSON
    extra: dict[str, float] = field(default_factory=dict)

    @property
    def max_flip_distance(self) -> int:
        return max(self.flip_distance_hist, default=0)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in METRIC_KEYS}
        d["flip_distance_hist"] = {str(k): v for k, v in sorted(self.flip_distance_hist.items())}
        for k in sorted(self.extra):
            d[k] = self.extra[k]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    def snapshot(self) -> "Metrics":
        return Metrics(**{k: getattr(self, k) for k in METRIC_KEYS},
                       flip_distance_hist=dict(self.flip_distance_hist),
                       extra=dict(self.extra))


class _DistanceProbe:
    """Lazy multi-source BFS over the undirected graph.

    Layers are expanded only as far as the farthest flip of the current
    update, so the cost tracks the ball the cascade actually touched.
    """

    def __init__(self, graph: "OrientedGraph", sources: Iterable[VertexId]):
        self.graph = graph
        self.dist = {s: 0 for s in sources if s in graph.out}
        self.frontier = list(self.dist)
        self.depth = 0

    def distance(self, x: VertexId) -> int | None:
        dist = self.dist
        while x not in dist and self.frontier:
            self.depth += 1
            nxt = []
            for y in self.frontier:
                for z in self.graph.out[y] | self.graph.inn[y]:
                    if z not in dist:
                        dist[z] = self.depth
                        nxt.append(z)
            self.frontier = nxt
        return dist.get(x)


class OrientedGraph:
    """Per-vertex out-neighbor sets with maintained in/out counters.

    Iteration helpers return out-neighbors sorted by id so every algorithm's
    traversal order, and hence every run, is deterministic.
    """

    def __init__(self, track_distance: bool = False):
        self.out: dict[VertexId, set[VertexId]] = {}
        self.inn: dict[VertexId, set[VertexId]] = {}
        self.metrics = Metrics()
        self.track_distance = track_distance
        self.observer = None  # optional: on_insert(t, h), on_delete(t, h), on_flip(t, h)
        self._retired: set[VertexId] = set()
        self._deg_count: list[int] = [0]
        self._max_out = 0
        self._sources: tuple[VertexId, ...] = ()
        self._probe: _DistanceProbe | None = None

    # -- queries -----------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.out)

    @property
    def m(self) -> int:
        return sum(len(s) for s in self.out.values())

    def __contains__(self, v: VertexId) -> bool:
        return v in self.out

    def vertices(self) -> list[VertexId]:
        return sorted(self.out)

    def outdegree(self, v: VertexId) -> int:
        try:
            return len(self.out[v])
        except KeyError:
            raise KeyError(f"vertex {v} is not live") from None

    def indegree(self, v: VertexId) -> int:
        try:
            return len(self.inn[v])
        except KeyError:
            raise KeyError(f"vertex {v} is not live") from None

    def degree(self, v: VertexId) -> int:
        return self.outdegree(v) + self.indegree(v)

    def out_neighbors(self, v: VertexId) -> list[VertexId]:
        return sorted(self.out[v])

    def in_neighbors(self, v: VertexId) -> list[VertexId]:
        return sorted(self.inn[v])

    def neighbors(self, v: VertexId) -> list[VertexId]:
        return sorted(self.out[v] | self.inn[v])

    def has_edge(self, u: VertexId, v: VertexId) -> bool:
        return u in self.out and (v in self.out[u] or v in self.inn[u])

    def is_oriented(self, tail: VertexId, head: VertexId) -> bool:
        return tail in self.out and head in self.out[tail]

    def edges(self) -> list[tuple[VertexId, VertexId]]:
        """All edges as (tail, head), sorted."""
        return sorted((u, w) for u, s in self.out.items() for w in s)

    def undirected_edges(self) -> set[frozenset]:
        return {frozenset(e) for e in self.edges()}

    def max_outdegree(self) -> int:
        return self._max_out

    # -- mutation primitives -------------------------------------------------
    def add_vertex(self, v: VertexId) -> None:
        if v in self.out:
            raise ValueError(f"vertex {v} already live")
        if v in self._retired:
            raise ValueError(f"vertex id {v} was deleted earlier in this run")
        self.out[v] = set()
        self.inn[v] = set()
        self._deg_count[0] += 1

    def remove_vertex(self, v: VertexId) -> None:
        if self.out[v] or self.inn[v]:
            raise ValueError(f"vertex {v} still has incident edges")
        del self.out[v], self.inn[v]
        self._retired.add(v)
        self._deg_count[0] -= 1

    def _inc(self, v: VertexId) -> None:
        d = len(self.out[v])  # already incremented
        cnt = self._deg_count
        cnt[d - 1] -= 1
        if d == len(cnt):
            cnt.append(0)
        cnt[d] += 1
        if d > self._max_out:
            self._max_out = d
            if d > self.metrics.peak_outdeg:
                self.metrics.peak_outdeg = d

    def _dec(self, v: VertexId) -> None:
        d = len(self.out[v])  # already decremented
        cnt = self._deg_count
        cnt[d + 1] -= 1
        cnt[d] += 1
        while self._max_out > 0 and cnt[self._max_out] == 0:
            self._max_out -= 1

    def insert_edge(self, tail: VertexId, head: VertexId) -> None:
        out = self.out
        if tail == head:
            raise ValueError(f"self-loop at {tail}")
        if tail not in out or head not in out:
            missing = tail if tail not in out else head
            raise ValueError(f"vertex {missing} is not live")
        if head in out[tail] or tail in out[head]:
            raise ValueError(f"edge {{{tail},{head}}} already present")
        out[tail].add(head)
        self.inn[head].add(tail)
        self._inc(tail)
        if self.observer is not None:
            self.observer.on_insert(tail, head)

    def delete_edge(self, u: VertexId, v: VertexId) -> VertexId:
        """Remove edge {u, v}; returns its tail."""
        out = self.out
        if u not in out or v not in out:
            raise ValueError(f"vertex {u if u not in out else v} is not live")
        if v in out[u]:
            tail, head = u, v
        elif u in out[v]:
            tail, head = v, u
        else:
            raise ValueError(f"edge {{{u},{v}}} not present")
        out[tail].discard(head)
        self.inn[head].discard(tail)
        self._dec(tail)
        if self.observer is not None:
            self.observer.on_delete(tail, head)
        return tail

    def flip(self, u: VertexId, v: VertexId) -> None:
        """Reverse the edge u -> v into v -> u."""
        out_u = self.out.get(u)
        if out_u is None or v not in out_u:
            raise InvariantError(f"flip of absent or reversed edge {u}->{v}")
        out_u.remove(v)
        self.inn[v].remove(u)
        self.out[v].add(u)
        self.inn[u].add(v)
        self._dec(u)
        self._inc(v)
        m = self.metrics
        m.f += 1
        if self.track_distance:
            if self._probe is None:
                self._probe = _DistanceProbe(self, self._sources)
            du, dv_ = self._probe.distance(u), self._probe.distance(v)
            known = [d for d in (du, dv_) if d is not None]
            d = min(known) + 1 if known else -1
            m.flip_distance_hist[d] = m.flip_distance_hist.get(d, 0) + 1
        if self.observer is not None:
            self.observer.on_flip(u, v)

    def reset(self, v: VertexId) -> int:
        """Flip every outgoing edge of v (in id order); returns the count."""
        targets = sorted(self.out[v])
        for w in targets:
            self.flip(v, w)
        return len(targets)

    # -- update bracketing ---------------------------------------------------
    def begin_update(self, endpoints: Iterable[VertexId]) -> None:
        self._sources = tuple(endpoints)
        self._probe = None

    def end_update(self) -> None:
        if self._max_out > self.metrics.peak_outdeg_steady:
            self.metrics.peak_outdeg_steady = self._max_out
        self._probe = None

    # -- verification ----------------------------------------------------------
    def check(self) -> None:
        """Full-scan invariant check; raises InvariantError."""
        counts = [0] * len(self._deg_count)
        for u, s in self.out.items():
            if u in s:
                raise InvariantError(f"self-loop at {u}")
            for w in s:
                if w not in self.out:
                    raise InvariantError(f"edge {u}->{w} to dead vertex")
                if u in self.out[w]:
                    raise InvariantError(f"edge {{{u},{w}}} oriented both ways")
                if u not in self.inn[w]:
                    raise InvariantError(f"in-set of {w} misses {u}")
            counts[len(s)] += 1
        for w, s in self.inn.items():
            for u in s:
                if w not in self.out[u]:
                    raise InvariantError(f"in-set of {w} has stale {u}")
        if counts != self._deg_count[:len(counts)] or any(self._deg_count[len(counts):]):
            raise InvariantError("outdegree histogram out of sync")
        real_max = max((len(s) for s in self.out.values()), default=0)
        if real_max != self._max_out:
            raise InvariantError(f"max outdegree {self._max_out} != {real_max}")

    def copy(self) -> "OrientedGraph":
        g = OrientedGraph()
        for v in self.out:
            g.add_vertex(v)
        for u, w in self.edges():
            g.insert_edge(u, w)
        return g

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[VertexId, VertexId]],
                   vertices: Iterable[VertexId] = ()) -> "OrientedGraph":
        """Build from directed (tail, head) pairs."""
        edges = list(edges)
        g = cls()
        for v in sorted(set(vertices) | {x for e in edges for x in e}):
            g.add_vertex(v)
        for u, w in edges:
            g.insert_edge(u, w)
        return g


INSERT_RULES = ("fixed", "higher-outdegree", "directive")


def choose_orientation(graph: OrientedGraph, op: UpdateOp, rule: str = "fixed") -> tuple[VertexId, VertexId]:
    """(tail, head) for an edge insertion.

    A directed op (``ied``) always wins.  ``fixed`` points the edge at the
    higher id; ``higher-outdegree`` points it from the endpoint of lower
    outdegree to the endpoint of higher outdegree, ties as ``fixed``.
    """
    u, v = op.u, op.v
    if op.directed:
        return u, v
    lo, hi = (u, v) if u < v else (v, u)
    if rule == "higher-outdegree":
        du, dv_ = len(graph.out[u]), len(graph.out[v])
        if du != dv_:
            return (u, v) if du < dv_ else (v, u)
        return lo, hi
    if rule in ("fixed", "directive"):
        return lo, hi
    raise ValueError(f"unknown insert rule {rule!r}")


def expand_vertex_deletion(graph: OrientedGraph, v: VertexId) -> list[UpdateOp]:
    """Edge deletions that precede removing v (billed to t)."""
    return [de(v, w) for w in graph.neighbors(v)]


def apply_raw(graph: OrientedGraph, op: UpdateOp, rule: str = "fixed", index: int = -1):
    """Apply op without any rebalancing.

    Returns the tail of an inserted edge, else None.  Precondition failures
    raise :class:`SequenceError` naming ``index``.
    """
    k = op.kind
    try:
        if k is OpKind.INSERT_EDGE:
            if op.u == op.v:
                raise ValueError(f"self-loop at {op.u}")
            for x in (op.u, op.v):
                if x not in graph.out:
                    raise ValueError(f"vertex {x} is not live")
            tail, head = choose_orientation(graph, op, rule)
            graph.insert_edge(tail, head)
            graph.metrics.t += 1
            return tail
        if k is OpKind.DELETE_EDGE:
            graph.delete_edge(op.u, op.v)
            graph.metrics.t += 1
            return None
        if k is OpKind.INSERT_VERTEX:
            graph.add_vertex(op.u)
            return None
        if k is OpKind.DELETE_VERTEX:
            if op.u not in graph.out:
                raise ValueError(f"vertex {op.u} is not live")
            for sub in expand_vertex_deletion(graph, op.u):
                graph.delete_edge(sub.u, sub.v)
                graph.metrics.t += 1
            graph.remove_vertex(op.u)
            return None
        for x in op.endpoints():
            if x not in graph.out:
                raise ValueError(f"vertex {x} is not live")
        return None
    except (ValueError, KeyError) as exc:
        raise SequenceError(index, str(exc).strip("'\"")) from None

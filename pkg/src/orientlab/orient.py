"""Orientation maintenance: BF reset cascades (FIFO / LIFO / largest-first)
and the anti-reset cascade.

All algorithms share the same driver shape: apply the op raw, and if the
tail of an inserted edge now has outdegree above the threshold, run the
cascade.  Instantaneous peaks are metered by the graph itself.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .core import (InvariantError, Metrics, OpKind, OrientedGraph, SequenceError,
                   UpdateOp, UpdateSequence, apply_raw, INSERT_RULES)

CASCADE_ORDERS = ("fifo", "lifo", "largest")


@dataclass
class OrientConfig:
    delta: int
    alpha: int = 1
    cascade_order: str = "fifo"
    insert_rule: str = "fixed"

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be >= 1")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.cascade_order not in CASCADE_ORDERS:
            raise ValueError(f"cascade_order must be one of {CASCADE_ORDERS}")
        if self.insert_rule not in INSERT_RULES:
            raise ValueError(f"insert_rule must be one of {INSERT_RULES}")

    @property
    def delta_prime(self) -> int:
        """Anti-reset exploration threshold."""
        return self.delta - 2 * self.alpha


class BucketHeap:
    """Max-priority queue over small integer keys.

    One lazy min-heap of ids per key, so extract-max returns the smallest id
    among the vertices of largest key.  Keys may move in either direction;
    superseded entries are skipped on extraction.
    """

    def __init__(self):
        self.buckets: list[list[int]] = [[]]
        self.key: dict[int, int] = {}
        self.top = 0

    def __len__(self) -> int:
        return len(self.key)

    def __contains__(self, v: int) -> bool:
        return v in self.key

    def push(self, v: int, key: int) -> None:
        if self.key.get(v) == key:
            return
        while key >= len(self.buckets):
            self.buckets.append([])
        self.key[v] = key
        heapq.heappush(self.buckets[key], v)
        if key > self.top:
            self.top = key

    def discard(self, v: int) -> None:
        self.key.pop(v, None)

    def peek_key(self) -> int | None:
        self._settle()
        return self.top if self.key else None

    def _settle(self) -> None:
        buckets, key = self.buckets, self.key
        while True:
            b = buckets[self.top]
            while b and key.get(b[0]) != self.top:
                heapq.heappop(b)
            if b or self.top == 0:
                return
            self.top -= 1

    def pop_max(self) -> int:
        self._settle()
        if not self.key:
            raise IndexError("pop from empty BucketHeap")
        v = heapq.heappop(self.buckets[self.top])
        del self.key[v]
        return v


class _Orienter:
    name = "?"

    def __init__(self, config: OrientConfig, graph: OrientedGraph | None = None,
                 record: bool = False):
        self.config = config
        self.graph = graph if graph is not None else OrientedGraph()
        self.record = record

    @property
    def metrics(self) -> Metrics:
        return self.graph.metrics

    def apply(self, op: UpdateOp, index: int = -1) -> None:
        g = self.graph
        g.begin_update(op.endpoints())
        tail = apply_raw(g, op, self.config.insert_rule, index)
        if tail is not None and len(g.out[tail]) > self.config.delta:
            self._cascade(tail, index)
        g.end_update()

    def _watchdog(self, index: int) -> None:
        m = self.graph.metrics
        if m.f > 10 * (m.t + 1) * max(self.graph.n, 1):
            raise InvariantError(
                f"op #{index}: cascade exceeded {m.f} flips; the arboricity promise "
                f"is probably broken for delta={self.config.delta}")

    def _cascade(self, start: int, index: int) -> None:
        raise NotImplementedError


class BrodalFagerberg(_Orienter):
    """Reset cascade: while some vertex exceeds delta, flip all its out-edges.

    With ``record`` the (vertex, outdegree-at-reset) sequence of every reset
    is kept in :attr:`reset_log`.
    """

    name = "bf"

    def __init__(self, config, graph=None, record=False):
        super().__init__(config, graph, record)
        self.reset_log: list[tuple[int, int]] = []
        self.on_reset: Callable[[int], None] | None = None

    def _reset(self, x: int, index: int) -> list[int]:
        g = self.graph
        if self.record:
            self.reset_log.append((x, len(g.out[x])))
        if self.on_reset is not None:
            self.on_reset(x)
        targets = sorted(g.out[x])
        for w in targets:
            g.flip(x, w)
        g.metrics.resets += 1
        self._watchdog(index)
        return targets

    def _cascade(self, start, index):
        g, delta = self.graph, self.config.delta
        out = g.out
        if self.config.cascade_order == "largest":
            heap = BucketHeap()
            heap.push(start, len(out[start]))
            while heap:
                x = heap.pop_max()
                if len(out[x]) <= delta:
                    continue
                for w in self._reset(x, index):
                    d = len(out[w])
                    if d > delta:
                        heap.push(w, d)
            return
        lifo = self.config.cascade_order == "lifo"
        pending = deque([start])
        queued = {start}
        while pending:
            x = pending.pop() if lifo else pending.popleft()
            queued.discard(x)
            if len(out[x]) <= delta:
                continue
            for w in self._reset(x, index):
                if w not in queued and len(out[w]) > delta:
                    queued.add(w)
                    pending.append(w)


@dataclass
class CascadeRecord:
    trigger: int
    internal: int
    boundary: int
    edges: int  # |E(G_u)|
    flips: int
    max_edge_flips: int
    internal_max_end: int
    boundary_max: int
    min_internal_start: int
    flipped_per_internal: list[tuple[int, int]] = field(default_factory=list)


class AntiReset(_Orienter):
    """Anti-reset cascade over the explored digraph G_u.

    Exploration from the overloaded vertex u follows out-edges of vertices of
    outdegree above ``delta - 2*alpha`` (internal) and stops at the others
    (boundary).  All out-edges of internal vertices are colored; then any
    vertex with at most 2*alpha colored edges (smallest id first) flips its
    colored in-edges outward and uncolors its colored edges, until none are
    left.
    """

    name = "antireset"

    def __init__(self, config, graph=None, record=False):
        if config.delta < 5 * config.alpha:
            raise ValueError(f"anti-reset needs delta >= 5*alpha, got delta={config.delta}, "
                             f"alpha={config.alpha}")
        super().__init__(config, graph, record)
        self.cascades: list[CascadeRecord] = []

    def explore(self, u: int) -> tuple[list[int], list[int], list[tuple[int, int]]]:
        """(internal, boundary, colored edges) of G_u, classified at first visit."""
        out = self.graph.out
        dprime = self.config.delta_prime
        internal, boundary, edges = [], [], []
        visited = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            if len(out[x]) > dprime:
                internal.append(x)
                for w in sorted(out[x], reverse=True):
                    edges.append((x, w))
                    if w not in visited:
                        visited.add(w)
                        stack.append(w)
            else:
                boundary.append(x)
        return internal, boundary, edges

    def _cascade(self, u, index):
        g = self.graph
        out = g.out
        cap = 2 * self.config.alpha
        internal, boundary, edges = self.explore(u)
        colored: dict[int, set[int]] = {}
        for x, w in edges:
            colored.setdefault(x, set()).add(w)
            colored.setdefault(w, set()).add(x)
        start_out = {x: len(out[x]) for x in internal} if self.record else None
        ready = [v for v, s in colored.items() if len(s) <= cap]
        heapq.heapify(ready)
        done = set()
        remaining = len(edges)
        flips = 0
        edge_flips: dict[tuple[int, int], int] = {}
        boundary_set = set(boundary)
        boundary_max = max((len(out[b]) for b in boundary), default=0)
        while remaining:
            if not ready:
                raise InvariantError(
                    f"op #{index}: anti-reset stalled with {remaining} colored edges; "
                    f"every remaining vertex has more than {cap} (arboricity promise broken)")
            v = heapq.heappop(ready)
            if v in done:
                continue
            done.add(v)
            nbrs = colored[v]
            for w in sorted(nbrs):
                if v in out[w]:
                    g.flip(w, v)
                    flips += 1
                    if self.record:
                        key = (min(v, w), max(v, w))
                        edge_flips[key] = edge_flips.get(key, 0) + 1
                cw = colored[w]
                cw.discard(v)
                if len(cw) == cap and w not in done:
                    heapq.heappush(ready, w)
                remaining -= 1
            nbrs.clear()
            g.metrics.resets += 1
            if v in boundary_set and len(out[v]) > boundary_max:
                boundary_max = len(out[v])
        self._watchdog(index)
        g.metrics.extra["cascades"] = g.metrics.extra.get("cascades", 0) + 1
        if self.record:
            self.cascades.append(CascadeRecord(
                trigger=u, internal=len(internal), boundary=len(boundary), edges=len(edges),
                flips=flips, max_edge_flips=max(edge_flips.values(), default=0),
                internal_max_end=max(len(out[x]) for x in internal),
                boundary_max=boundary_max,
                min_internal_start=min(start_out.values()),
                flipped_per_internal=[(start_out[x], start_out[x] - len(out[x])) for x in internal],
            ))


def make_orienter(tag: str, config: OrientConfig, **kw):
    if tag == "bf":
        return BrodalFagerberg(config, **kw)
    if tag == "bf-largest":
        config = OrientConfig(config.delta, config.alpha, "largest", config.insert_rule)
        return BrodalFagerberg(config, **kw)
    if tag == "antireset":
        return AntiReset(config, **kw)
    raise ValueError(f"unknown orientation algorithm {tag!r}")


def run_sequence(algo, seq: UpdateSequence, config=None,
                 on_op: Callable[[int, UpdateOp, Metrics], None] | None = None,
                 check_every: int = 0, **kw) -> Metrics:
    """Replay ``seq`` through an algorithm tag or instance; returns its Metrics.

    ``on_op(index, op, metrics)`` is called after every op.  With
    ``check_every=k`` the graph's full invariant scan runs every k ops.
    """
    runner = make_runner(algo, config, **kw) if isinstance(algo, str) else algo
    for i, op in enumerate(seq):
        try:
            runner.apply(op, i)
        except InvariantError as exc:
            msg = str(exc)
            raise InvariantError(msg if msg.startswith("op #") else f"op #{i}: {msg}") from None
        if check_every and i % check_every == 0:
            runner.graph.check()
        if on_op is not None:
            on_op(i, op, runner.metrics)
    return runner.metrics


def make_runner(tag: str, config, **kw):
    """Any replayable engine by CLI tag."""
    if tag in ("bf", "bf-largest", "antireset"):
        return make_orienter(tag, config, **kw)
    if tag in ("flipgame", "flipgame-threshold"):
        from .flipgame import FlippingGame
        return FlippingGame(**kw) if tag == "flipgame" else FlippingGame(
            threshold=kw.pop("delta_prime"), **kw)
    if tag == "matching-local":
        from .apps import MatchingRunner
        return MatchingRunner(config, **kw)
    raise ValueError(f"unknown algorithm {tag!r}")

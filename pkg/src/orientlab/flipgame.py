"""Family-F value maintenance: the flipping game, its threshold variant, BF
as a family member, and exact cost accounting.

Every vertex caches the values of its in-neighbors.  Queries and value
updates are "operations at v": they are charged outdeg(v) for scanning the
out-neighbors.  Flipping an out-edge of v during an operation at v is free;
every other flip costs 1.  Edge updates are billed to t only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .core import InvariantError, OpKind, OrientedGraph, UpdateOp, apply_raw
from .orient import BrodalFagerberg, OrientConfig

AGGREGATES: dict[str, Callable[[Iterable[int]], int]] = {
    "sum": sum,
    "min": min,
    # number of neighbors whose value is 0 (the matching overlay uses 0 = free)
    "count-free": lambda vals: sum(1 for x in vals if x == 0),
}


@dataclass
class CostLedger:
    t: int = 0
    f_cost: int = 0
    free_flips: int = 0
    outdeg_charges: int = 0
    r: int = 0

    @property
    def c(self) -> int:
        return self.t + self.f_cost + self.outdeg_charges

    def as_dict(self) -> dict:
        return {"c": self.c, "f_cost": self.f_cost, "free_flips": self.free_flips,
                "outdeg_charges": self.outdeg_charges, "r": self.r}


class ValueGraph:
    """Oriented graph plus vertex values and in-neighbor value caches.

    Registered as the graph observer, so the caches follow every insertion,
    deletion and flip no matter which engine mutates the orientation.  The
    tail of a flip is billed at cost 0 iff it is the vertex currently being
    operated on.
    """

    def __init__(self, graph: OrientedGraph | None = None):
        self.graph = graph if graph is not None else OrientedGraph()
        self.graph.observer = self
        self.value: dict[int, int] = {}
        self.cache: dict[int, dict[int, int]] = {}
        self.ledger = CostLedger()
        self.operated: int | None = None
        for v in self.graph.vertices():
            self._ensure(v)
        for u, w in self.graph.edges():
            self.cache[w][u] = self.value[u]

    def _ensure(self, v: int) -> None:
        if v not in self.value:
            self.value[v] = 0
            self.cache[v] = {}

    def on_insert(self, tail, head):
        self._ensure(tail)
        self._ensure(head)
        self.cache[head][tail] = self.value[tail]

    def on_delete(self, tail, head):
        self.cache[head].pop(tail, None)

    def on_flip(self, tail, head):
        # tail -> head became head -> tail
        self.cache[head].pop(tail, None)
        self.cache[tail][head] = self.value[head]
        if tail == self.operated:
            self.ledger.free_flips += 1
        else:
            self.ledger.f_cost += 1

    def add_vertex(self, v: int) -> None:
        self._ensure(v)

    def drop_vertex(self, v: int) -> None:
        self.value.pop(v, None)
        self.cache.pop(v, None)

    def scan(self, v: int) -> list[int]:
        """Charged scan of v's out-neighbors; returns their values."""
        out = self.graph.out[v]
        self.ledger.outdeg_charges += len(out)
        return [self.value[w] for w in out]

    def set_value(self, v: int, x: int) -> None:
        self.scan(v)
        self.value[v] = x
        for w in self.graph.out[v]:
            self.cache[w][v] = x

    def aggregate(self, v: int, fn: Callable[[Iterable[int]], int]) -> int:
        if v not in self.graph.out:
            raise KeyError(f"vertex {v} is not live")
        return fn([self.value[v], *self.scan(v), *self.cache[v].values()])

    def check_caches(self) -> None:
        g = self.graph
        for v in g.vertices():
            expected = {u: self.value[u] for u in g.inn[v]}
            if self.cache[v] != expected:
                raise InvariantError(f"stale in-neighbor cache at {v}")


class _FamilyMember:
    """Shared op dispatch for members of F."""

    name = "?"

    def __init__(self, graph: OrientedGraph | None = None, aggregate: str = "sum",
                 insert_rule: str = "fixed", track_distance: bool = False):
        graph = graph if graph is not None else OrientedGraph(track_distance=track_distance)
        self.vg = ValueGraph(graph)
        self.aggregate_fn = AGGREGATES[aggregate]
        self.insert_rule = insert_rule
        self.answers: list = []

    @property
    def graph(self) -> OrientedGraph:
        return self.vg.graph

    @property
    def ledger(self) -> CostLedger:
        return self.vg.ledger

    @property
    def metrics(self):
        m = self.graph.metrics
        m.extra.update(self.ledger.as_dict())
        return m

    def apply(self, op: UpdateOp, index: int = -1):
        g, vg = self.graph, self.vg
        g.begin_update(op.endpoints())
        k = op.kind
        answer = None
        try:
            if k.is_edge_update or k is OpKind.DELETE_VERTEX:
                before = g.metrics.t
                if k is OpKind.INSERT_EDGE:
                    vg.add_vertex(op.u)
                    vg.add_vertex(op.v)
                self._edge_update(op, index)
                vg.ledger.t += g.metrics.t - before
                if k is OpKind.DELETE_VERTEX:
                    vg.drop_vertex(op.u)
            elif k is OpKind.INSERT_VERTEX:
                apply_raw(g, op, self.insert_rule, index)
                vg.add_vertex(op.u)
            elif k is OpKind.SET_VALUE:
                self._operate(op.u, lambda: vg.set_value(op.u, op.value))
            elif k is OpKind.QUERY:
                if op.v is None:
                    answer = self._operate(op.u, lambda: vg.aggregate(op.u, self.aggregate_fn))
                else:
                    self._operate(op.u, lambda: vg.scan(op.u))
                    self._operate(op.v, lambda: vg.scan(op.v))
                    answer = g.has_edge(op.u, op.v)
                self.answers.append(answer)
        finally:
            vg.operated = None
            g.end_update()
        return answer

    def _operate(self, v: int, body: Callable[[], object]):
        self.vg.operated = v
        result = body()
        self._after_operation(v)
        self.vg.operated = None
        return result

    def _edge_update(self, op: UpdateOp, index: int) -> None:
        apply_raw(self.graph, op, self.insert_rule, index)

    def _after_operation(self, v: int) -> None:
        pass


class FlippingGame(_FamilyMember):
    """The flipping game R: reset v on every query or value update at v.

    With ``threshold`` set this is the Δ'-flipping game, which resets only
    when outdeg(v) exceeds the threshold.
    """

    def __init__(self, threshold: int | None = None, **kw):
        super().__init__(**kw)
        self.threshold = threshold
        self.name = "flipgame" if threshold is None else "flipgame-threshold"
        self.on_reset: Callable[[int], None] | None = None

    def _after_operation(self, v: int) -> None:
        g = self.graph
        if self.threshold is not None and len(g.out[v]) <= self.threshold:
            return
        if g.out[v]:
            if self.on_reset is not None:
                self.on_reset(v)
            g.reset(v)
            g.metrics.resets += 1
            self.ledger.r += 1


class BFFamilyMember(_FamilyMember):
    """BF viewed as a member of F: cascades on edge updates, plain scans on
    queries and value updates.  All cascade flips are paid."""

    name = "bf-family"

    def __init__(self, delta: int, cascade_order: str = "fifo", **kw):
        super().__init__(**kw)
        self.bf = BrodalFagerberg(OrientConfig(delta, 1, cascade_order, self.insert_rule),
                                  graph=self.graph)

    def _edge_update(self, op, index):
        g = self.graph
        tail = apply_raw(g, op, self.insert_rule, index)
        if tail is not None and len(g.out[tail]) > self.bf.config.delta:
            self.bf._cascade(tail, index)


def bf_as_family_member(delta: int, **kw) -> BFFamilyMember:
    return BFFamilyMember(delta, **kw)


def run_game(member, seq) -> CostLedger:
    for i, op in enumerate(seq):
        member.apply(op, i)
    return member.ledger


def simulate_bf_via_resets(seq, delta: int, cascade_order: str = "fifo",
                           insert_rule: str = "fixed") -> dict:
    """Drive the game's reset primitive with BF's cascade.

    Every vertex whose out-edges BF's cascade flips is reset in the game.
    Each such reset flips at least delta+1 edges, so the reset count is at
    most f/(delta+1); this is asserted.
    """
    bf = BrodalFagerberg(OrientConfig(delta, 1, cascade_order, insert_rule), record=True)
    sizes: list[int] = []
    bf.on_reset = lambda x: sizes.append(len(bf.graph.out[x]))
    for i, op in enumerate(seq):
        bf.apply(op, i)
    m = bf.metrics
    r = len(sizes)
    small = [s for s in sizes if s < delta + 1]
    if small:
        raise InvariantError(f"simulated reset flipped only {small[0]} edges (< {delta + 1})")
    if r * (delta + 1) > m.f:
        raise InvariantError(f"r={r} exceeds f/(delta+1)={m.f / (delta + 1):.2f}")
    return {"t": m.t, "f": m.f, "r": r, "min_reset_size": min(sizes, default=0)}


def token_audit(seq, delta: int, cascade_order: str = "fifo", insert_rule: str = "fixed") -> dict:
    """Side-by-side per-edge token audit of the basic game against BF.

    Tokens are minted per edge: one at insertion, one per BF flip, and two
    for every edge BF orients out of v when the game resets v.  Each game
    flip spends one token of the flipped edge; a negative balance would
    break the charging argument behind t + f + 2*delta*r.
    """
    game = FlippingGame(insert_rule=insert_rule)
    bf = BrodalFagerberg(OrientConfig(delta, 1, cascade_order, insert_rule))
    tokens: dict[frozenset, int] = {}
    low = 0
    vg = game.vg

    class Spend:
        def on_insert(self, tail, head):
            tokens[frozenset((tail, head))] = 1
            vg.on_insert(tail, head)

        def on_delete(self, tail, head):
            tokens.pop(frozenset((tail, head)), None)
            vg.on_delete(tail, head)

        def on_flip(self, tail, head):
            nonlocal low
            e = frozenset((tail, head))
            tokens[e] -= 1
            low = min(low, tokens[e])
            vg.on_flip(tail, head)

    class Mint:
        def on_insert(self, tail, head):
            pass

        on_delete = on_insert

        def on_flip(self, tail, head):
            tokens[frozenset((tail, head))] += 1

    game.graph.observer = Spend()
    bf.graph.observer = Mint()

    def credit(v):
        for w in bf.graph.out[v]:
            tokens[frozenset((v, w))] += 2

    game.on_reset = credit
    for i, op in enumerate(seq):
        game.apply(op, i)  # the game first, so inserted edges own a token before BF flips them
        bf.apply(op, i)
    t, f, r = bf.metrics.t, bf.metrics.f, game.ledger.r
    return {"t": t, "f_bf": f, "r": r, "game_flips": game.graph.metrics.f,
            "bound": t + f + 2 * delta * r, "min_balance": low}

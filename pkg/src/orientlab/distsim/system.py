"""Distributed anti-reset orientation, complete sibling representation and
distributed maximal matching on top of :class:`RoundEngine`.

Handlers only touch the state of the node they run at.  The driver plays
the adversary: it injects each update as wakeup events at the endpoints
and separates the stages of one update by quiescence barriers.  A global
mirror graph is kept for metering and audits only; no handler reads it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..core import (InvariantError, OpKind, OrientedGraph, SequenceError, UpdateOp,
                    choose_orientation)
from .engine import RoundEngine, RoundReport, SimMessage, Tag
from .node import JOINING, LEAVING, LIVE, OutRec, SimNode

IN, FREE = 0, 1  # chain kinds
MEM_C = 8

PHASE_OF_TAG = {Tag.EXPLORE: "explore", Tag.ACCEPT: "explore", Tag.DONE: "explore",
                Tag.WAKE: "wake", Tag.PROBE: "cascade", Tag.FLIP: "cascade"}


@dataclass
class DistCascade:
    trigger: int
    n_u: int = 0  # processors in T_u (internal and boundary)
    internal: int = 0
    edges: int = 0  # |E(G_u)|
    start_round: int = 0  # first round of phase 3 (probes only)
    last_decision: int = 0
    cleared: int = 0  # round in which the last colored edge was uncolored
    decay: list[tuple[int, int]] = field(default_factory=list)  # (uncolored, remaining) per round
    messages: Counter = field(default_factory=Counter)
    flips: int = 0
    final_max_out: int = 0  # over the edges of G_u after the cascade
    boundary_max_end: int = 0
    members: set = field(default_factory=set)

    @property
    def cascade_rounds(self) -> int:
        # rounds of phase 3 until G_u holds no colored edge; later steps only
        # let vertices notice that and stop
        return max((self.cleared or self.last_decision) - self.start_round, 0)

    @property
    def total_messages(self) -> int:
        return sum(self.messages.values())


class DistSystem:
    """A network of :class:`SimNode` processors.

    ``matching=True`` layers the distributed maximal matching (free-in
    chains, partner search) over the anti-reset orientation.
    """

    def __init__(self, delta: int | None = None, alpha: int = 2, matching: bool = False,
                 insert_rule: str = "fixed", round_limit: int = 100_000, trace: bool = False,
                 audit_wakeups: bool = True):
        self.alpha = alpha
        self.delta = 7 * alpha if delta is None else delta
        self.dprime = self.delta - 5 * alpha
        if self.dprime < 2 * alpha:
            raise ValueError(f"distributed anti-reset needs delta - 5*alpha >= 2*alpha "
                             f"(delta >= {7 * alpha}), got delta={self.delta}")
        self.matching = matching
        self.rule = insert_rule
        self.round_limit = round_limit
        self.audit_wakeups = audit_wakeups
        self.nodes: dict[int, SimNode] = {}
        self.engine = RoundEngine(self._handle, trace=trace)
        self.engine.on_round_end = self._round_end
        self.mirror = OrientedGraph()
        self.cascades: list[DistCascade] = []
        self.ops = 0
        self.mem_violations: list[tuple] = []
        self.wake_violations: list[tuple] = []
        self.mem_ceiling = MEM_C * (self.delta + 2)
        self._cur: DistCascade | None = None
        self._colored: set[tuple[int, int]] = set()
        self._round_uncolored = 0
        self._round_decisions = 0
        self._pending_leave: set[int] = set()
        self._pending_join: set[int] = set()
        self._status_changed: set[int] = set()
        self._op_members: set[int] = set()

    # ------------------------------------------------------------------ metering
    @property
    def metrics(self):
        m = self.mirror.metrics
        m.messages = self.engine.messages
        m.peak_mem_entries = max((x.mem_peak for x in self.nodes.values()), default=m.peak_mem_entries)
        m.extra["ops"] = self.ops
        m.extra["cascades"] = len(self.cascades)
        return m

    def _send(self, src, dst, tag, f1=None, f2=None, f3=None):
        self.engine.send(SimMessage(src, dst, tag, f1, f2, f3))
        if self._cur is not None and tag in PHASE_OF_TAG:
            self._cur.messages[PHASE_OF_TAG[tag]] += 1

    def _round_end(self, report: RoundReport) -> None:
        for v in report.executed:
            node = self.nodes.get(v)
            if node is None:
                continue
            mem = node.meter()
            if mem > MEM_C * (len(node.out) + 1) or mem > self.mem_ceiling:
                self.mem_violations.append((report.round, v, mem, node.outdeg, len(node.out)))
        cur = self._cur
        if cur is not None and cur.start_round and report.round > cur.start_round:
            if self._round_decisions:
                cur.last_decision = report.round
                cur.decay.append((self._round_uncolored, len(self._colored)))
                if not self._colored and not cur.cleared:
                    cur.cleared = report.round
            elif self._colored:
                raise InvariantError(
                    f"distributed anti-reset stalled in round {report.round} with "
                    f"{len(self._colored)} colored edges")
        self._round_uncolored = 0
        self._round_decisions = 0

    def _stage(self, limit: int | None = None) -> int:
        r = self.engine.run_until_quiescent(limit or self.round_limit)
        self.mirror.metrics.rounds += r
        return r

    # ------------------------------------------------------------------ handlers
    def _handle(self, v: int, msgs: list[SimMessage], events: list) -> None:
        x = self.nodes[v]
        by_tag: dict[Tag, list[SimMessage]] = {}
        for m in msgs:
            by_tag.setdefault(m.tag, []).append(m)
        get = by_tag.get
        for m in get(Tag.FLIP, ()):
            self._on_flip(x, m.src)
        for m in get(Tag.SETLEFT, ()):
            r = x.out[m.src]
            if m.f1 == IN:
                r.left = m.f2
            else:
                r.fleft = m.f2
        for m in get(Tag.SETRIGHT, ()):
            r = x.out[m.src]
            if m.f1 == IN:
                r.right = m.f2
            else:
                r.fright = m.f2
        leaves = get(Tag.LEAVE, ())
        for kind in (IN, FREE):
            batch = [m for m in leaves if m.f1 == kind]
            if batch:
                self._splice_out(x, kind, batch)
        joins = get(Tag.JOIN, ())
        matched_now = None
        if joins:
            matched_now = self._maybe_match_on_insert(x, joins)
            for kind in (IN, FREE):
                batch = [m for m in joins if m.f1 == kind and not (kind == FREE and m.src == matched_now)]
                if batch:
                    self._splice_in(x, kind, batch)
        for m in get(Tag.LINKS, ()):
            r = x.out[m.src]
            if m.f1 == IN:
                r.left, r.right = m.f2, m.f3
                r.state = LIVE
            else:
                r.fleft, r.fright = m.f2, m.f3
                r.infree = True
        for m in get(Tag.MATCHED, ()):
            x.partner = m.src
            self._status_changed.add(x.id)
            self._free_leave(x)
        for m in get(Tag.MATCH, ()):
            x.partner = m.src
            self._status_changed.add(x.id)
            self._free_leave(x)
        for m in get(Tag.ASK, ()):
            if x.partner is None:
                self._send(x.id, m.src, Tag.FREEYES)
        explores = get(Tag.EXPLORE, ())
        if explores:
            self._on_explore(x, explores)
        for m in get(Tag.ACCEPT, ()):
            x.out[m.src].child = True
            if m.f1 == 1:
                x.subtree_h = max(x.subtree_h, m.f2)
            else:
                x.pending += 1
        for m in get(Tag.DONE, ()):
            x.pending -= 1
            x.subtree_h = max(x.subtree_h, m.f1)
            if x.children_known and x.pending == 0:
                self._finish_explore(x)
        for m in get(Tag.WAKE, ()):
            self._on_wake(x, m.f1)
        probers = sorted(m.src for m in get(Tag.PROBE, ()) if x.active)
        for ev in events:
            self._on_event(x, ev, by_tag, probers)

    def _on_event(self, x: SimNode, ev, by_tag, probers) -> None:
        kind = ev[0]
        if kind == "ins":
            self._start_insert(x, ev[1])
        elif kind == "del":
            self._start_delete(x, ev[1])
        elif kind == "trigger":
            if x.outdeg > self.delta:
                self._start_explore(x)
        elif kind == "children":
            x.children_known = True
            if x.pending == 0:
                self._finish_explore(x)
        elif kind == "start":
            self._start_cascade(x)
        elif kind == "step":
            self._cascade_step(x, probers)
        elif kind == "repair_leave":
            for w, r in sorted(x.out.items()):
                if r.state == LEAVING:
                    self._send(x.id, w, Tag.LEAVE, IN, r.left, r.right)
                    if r.infree:
                        self._send(x.id, w, Tag.LEAVE, FREE, r.fleft, r.fright)
                    del x.out[w]
        elif kind == "repair_join":
            for w, r in sorted(x.out.items()):
                if r.state == JOINING:
                    self._send(x.id, w, Tag.JOIN, IN, 0, 0)
                    if self.matching and x.partner is None:
                        self._send(x.id, w, Tag.JOIN, FREE, 0, 0)
        elif kind == "search":
            self._search(x)
        elif kind == "search2":
            self._search_finish(x, [m.src for m in by_tag.get(Tag.FREEYES, ())])
        elif kind == "freeleave":
            self._free_leave(x)
        else:
            raise ValueError(f"unknown event {ev!r}")

    # -- chains -------------------------------------------------------------
    def _splice_in(self, p: SimNode, kind: int, batch: list[SimMessage]) -> None:
        joiners = sorted(m.src for m in batch)
        old = p.handle if kind == IN else p.fhead
        for i, j in enumerate(joiners):
            left = joiners[i - 1] if i else None
            right = joiners[i + 1] if i + 1 < len(joiners) else old
            self._send(p.id, j, Tag.LINKS, kind, left, right)
        if old is not None:
            self._send(p.id, old, Tag.SETLEFT, kind, joiners[-1])
        if kind == IN:
            p.handle = joiners[0]
        else:
            p.fhead = joiners[0]

    def _splice_out(self, p: SimNode, kind: int, batch: list[SimMessage]) -> None:
        info = {m.src: (m.f2, m.f3) for m in batch}

        def survivor(x, side):
            while x is not None and x in info:
                x = info[x][side]
            return x

        pairs = set()
        for x, (l, r) in info.items():
            pairs.add((survivor(l, 0), survivor(r, 1)))
        for nl, nr in sorted(pairs, key=lambda t: (t[0] is None, t[0] or 0, t[1] is None, t[1] or 0)):
            if nl is not None:
                self._send(p.id, nl, Tag.SETRIGHT, kind, nr)
            if nr is not None:
                self._send(p.id, nr, Tag.SETLEFT, kind, nl)
        head = p.handle if kind == IN else p.fhead
        if head in info:
            head = survivor(head, 1)
        if kind == IN:
            p.handle = head
        else:
            p.fhead = head

    def _free_leave(self, x: SimNode) -> None:
        for w, r in sorted(x.out.items()):
            if r.infree:
                self._send(x.id, w, Tag.LEAVE, FREE, r.fleft, r.fright)
                r.infree = False
                r.fleft = r.fright = None

    def _free_join(self, x: SimNode) -> None:
        for w, r in sorted(x.out.items()):
            if r.state != LEAVING and not r.infree:
                self._send(x.id, w, Tag.JOIN, FREE, 0, 0)

    # -- edge updates ---------------------------------------------------------
    def _start_insert(self, x: SimNode, head: int) -> None:
        x.out[head] = OutRec(JOINING)
        x.outdeg += 1
        free = int(x.partner is None)
        self._send(x.id, head, Tag.JOIN, IN, free, 1)
        if self.matching and free:
            self._send(x.id, head, Tag.JOIN, FREE, 0, 1)

    def _maybe_match_on_insert(self, p: SimNode, joins) -> int | None:
        if not self.matching or p.partner is not None:
            return None
        for m in joins:
            if m.f1 == IN and m.f3 == 1 and m.f2 == 1:
                p.partner = m.src
                self._status_changed.update((p.id, m.src))
                self._send(p.id, m.src, Tag.MATCHED)
                # leave my free chains in the same round as the new partner does
                self.engine.wake_next(p.id, ("freeleave",))
                return m.src
        return None

    def _start_delete(self, x: SimNode, other: int) -> None:
        r = x.out.pop(other, None)
        if r is not None:
            x.outdeg -= 1
            self._send(x.id, other, Tag.LEAVE, IN, r.left, r.right)
            if r.infree:
                self._send(x.id, other, Tag.LEAVE, FREE, r.fleft, r.fright)
        if x.partner == other:
            x.partner = None
            self._status_changed.add(x.id)

    # -- matching search --------------------------------------------------------
    def _search(self, x: SimNode) -> None:
        if x.partner is not None:
            return
        outs = x.live_out()
        for w in outs:
            self._send(x.id, w, Tag.ASK)
        if outs:
            self.engine.wake_at(x.id, self.engine.round + 2, ("search2",))
        else:
            self._search_finish(x, [])

    def _search_finish(self, x: SimNode, yes: list[int]) -> None:
        if yes:
            partner = min(yes)
        elif x.fhead is not None:
            partner = x.fhead
        else:
            self._free_join(x)
            return
        x.partner = partner
        self._status_changed.update((x.id, partner))
        self._send(x.id, partner, Tag.MATCH)

    # -- anti-reset: exploration and countdown ------------------------------------
    def _color_and_forward(self, x: SimNode) -> None:
        x.internal = True
        cur = self._cur
        cur.internal += 1
        for w, r in sorted(x.out.items()):
            r.colored = True
            self._colored.add((x.id, w))
            cur.edges += 1
            self._send(x.id, w, Tag.EXPLORE, x.depth + 1)
        self.engine.wake_at(x.id, self.engine.round + 2, ("children",))

    def _join_tree(self, x: SimNode, parent, depth) -> None:
        x.in_tree = True
        x.parent = parent
        x.depth = depth
        self._cur.n_u += 1
        self._cur.members.add(x.id)

    def _start_explore(self, x: SimNode) -> None:
        self._cur = DistCascade(trigger=x.id)
        self._colored = set()
        self._join_tree(x, None, 0)
        self._color_and_forward(x)

    def _on_explore(self, x: SimNode, msgs) -> None:
        if x.in_tree:
            return
        parent = min(m.src for m in msgs)
        depth = min(m.f1 for m in msgs if m.src == parent)
        self._join_tree(x, parent, depth)
        if x.outdeg > self.dprime:
            self._send(x.id, parent, Tag.ACCEPT, 0, depth)
            self._color_and_forward(x)
        else:
            self._send(x.id, parent, Tag.ACCEPT, 1, depth)
            x.children_known = True

    def _finish_explore(self, x: SimNode) -> None:
        h = max(x.subtree_h, x.depth)
        if x.parent is not None:
            self._send(x.id, x.parent, Tag.DONE, h)
            return
        # root: countdown so that all of T_u starts phase 3 together
        self._on_wake(x, h + 1)

    def _on_wake(self, x: SimNode, remaining: int) -> None:
        if x.active or remaining < 1:
            return
        for w, r in sorted(x.out.items()):
            if r.child:
                self._send(x.id, w, Tag.WAKE, remaining - 1)
        x.active = True  # armed; first firing wins if a duplicate countdown arrives
        start = self.engine.round + remaining
        self.engine.wake_at(x.id, start, ("start",))
        if self._cur.start_round == 0:
            self._cur.start_round = start

    # -- anti-reset: phase 3 ----------------------------------------------------------
    def _start_cascade(self, x: SimNode) -> None:
        for w in x.colored_out():
            self._send(x.id, w, Tag.PROBE)
        self.engine.wake_next(x.id, ("step",))

    def _cascade_step(self, x: SimNode, probers: list[int]) -> None:
        colored = x.colored_out()
        if len(colored) + len(probers) > 5 * self.alpha:
            for w in colored:
                self._send(x.id, w, Tag.PROBE)
            self.engine.wake_next(x.id, ("step",))
            return
        self._round_decisions += 1
        for w in colored:
            x.out[w].colored = False
            self._uncolor((x.id, w))
        for w in probers:
            self._uncolor((w, x.id))
            self.mirror.flip(w, x.id)
            self._cur.flips += 1
            x.out[w] = OutRec(JOINING)
            x.outdeg += 1
            self._send(x.id, w, Tag.FLIP)
        if probers:
            self._pending_join.add(x.id)
        for r in x.out.values():
            r.child = False
        x.clear_scratch()

    def _uncolor(self, e) -> None:
        if e in self._colored:
            self._colored.discard(e)
            self._round_uncolored += 1

    def _on_flip(self, x: SimNode, head: int) -> None:
        r = x.out[head]
        r.state = LEAVING
        r.colored = False
        r.child = False
        x.outdeg -= 1
        self._pending_leave.add(x.id)

    # ------------------------------------------------------------------ driver
    def _run_cascade(self, u: int) -> DistCascade | None:
        if self.nodes[u].outdeg <= self.delta:
            return None
        self.engine.wake_next(u, ("trigger",))
        self._stage()
        cur = self._cur
        if self._colored:
            raise InvariantError(f"cascade at {u} ended with {len(self._colored)} colored edges")
        self._cur = None
        self._repair()
        members = cur.members
        self._op_members |= members
        colored_edges = self._cascade_edges
        out = self.mirror.out
        outs = Counter()
        for e in colored_edges:
            a, b = tuple(e)
            if b in out.get(a, ()):
                outs[a] += 1
            elif a in out.get(b, ()):
                outs[b] += 1
        cur.final_max_out = max(outs.values(), default=0)
        cur.boundary_max_end = max((self.mirror.outdegree(v) for v in members
                                    if v in self._boundary), default=0)
        self.cascades.append(cur)
        return cur

    def _repair(self) -> None:
        for v in sorted(self._pending_leave):
            self.engine.wake_next(v, ("repair_leave",))
        self._pending_leave.clear()
        self._stage()
        for v in sorted(self._pending_join):
            self.engine.wake_next(v, ("repair_join",))
        self._pending_join.clear()
        self._stage()

    def add_vertex(self, v: int) -> None:
        self.mirror.add_vertex(v)
        self.nodes[v] = SimNode(v)

    def apply(self, op: UpdateOp, index: int = -1) -> list[DistCascade]:
        """Apply one update; returns the cascades it triggered."""
        self.ops += 1
        self.engine.executed.clear()
        self._status_changed = set()
        self._op_members = set()
        k = op.kind
        done: list[DistCascade] = []
        g = self.mirror
        g.begin_update(op.endpoints())
        try:
            if k is OpKind.INSERT_VERTEX:
                if op.u in self.nodes or op.u in g._retired:
                    raise SequenceError(index, f"vertex {op.u} already used")
                self.add_vertex(op.u)
            elif k is OpKind.INSERT_EDGE:
                for x in (op.u, op.v):
                    if x not in self.nodes:
                        raise SequenceError(index, f"vertex {x} is not live")
                if op.u == op.v or g.has_edge(op.u, op.v):
                    raise SequenceError(index, f"bad insertion {{{op.u},{op.v}}}")
                tail, head = choose_orientation(g, op, self.rule)
                g.insert_edge(tail, head)
                g.metrics.t += 1
                self.engine.wake_next(tail, ("ins", head))
                self._stage()
                c = self._cascade_with_scope(tail)
                if c:
                    done.append(c)
            elif k is OpKind.DELETE_EDGE:
                self._delete(op.u, op.v, index)
            elif k is OpKind.DELETE_VERTEX:
                if op.u not in self.nodes:
                    raise SequenceError(index, f"vertex {op.u} is not live")
                for w in g.neighbors(op.u):
                    self._delete(op.u, w, index)
                node = self.nodes.pop(op.u)
                if node.out or node.handle is not None:
                    raise InvariantError(f"vertex {op.u} removed with live chain state")
                g.remove_vertex(op.u)
        finally:
            g.end_update()
        if self.audit_wakeups:
            self._audit_wakeups(op)
        return done

    def _cascade_with_scope(self, u: int) -> DistCascade | None:
        if self.nodes[u].outdeg <= self.delta:
            return None
        # audit-only snapshot of G_u: reachable through vertices above dprime
        out = self.mirror.out
        seen, stack, edges, boundary = {u}, [u], set(), set()
        while stack:
            x = stack.pop()
            if len(out[x]) > self.dprime:
                for w in out[x]:
                    edges.add(frozenset((x, w)))
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            else:
                boundary.add(x)
        self._cascade_edges, self._boundary = edges, boundary
        return self._run_cascade(u)

    def _delete(self, u: int, v: int, index: int) -> None:
        g = self.mirror
        if u not in self.nodes or v not in self.nodes or not g.has_edge(u, v):
            raise SequenceError(index, f"edge {{{u},{v}}} not present")
        g.delete_edge(u, v)
        g.metrics.t += 1
        was_matched = self.nodes[u].partner == v
        self._op_members.update((u, v))
        self.engine.wake_next(u, ("del", v))
        self.engine.wake_next(v, ("del", u))
        self._stage()
        if self.matching and was_matched:
            for x in (u, v):
                self.engine.wake_next(x, ("search",))
                self._stage()

    def run(self, seq, on_op=None, check_every: int = 0) -> None:
        for i, op in enumerate(seq):
            self.apply(op, i)
            if check_every and (i + 1) % check_every == 0:
                self.check_representation()
            if on_op is not None:
                on_op(i, op, self)

    # ------------------------------------------------------------------ audits
    def _audit_wakeups(self, op: UpdateOp) -> None:
        g = self.mirror
        affected = {x for x in op.endpoints() if x in g.out}
        for x in list(self._status_changed):
            if x in g.out:
                affected.add(x)
                affected.update(g.neighbors(x))
        core = affected | {x for x in self._op_members if x in g.out}
        allowed = set(core)
        for x in core:
            allowed.update(g.neighbors(x))
        allowed.update(op.endpoints())
        stray = self.engine.executed - allowed
        if stray:
            self.wake_violations.append((self.ops, op.to_line(), sorted(stray)[:5]))

    def in_chain(self, v: int, kind: int = IN) -> list[int]:
        node = self.nodes[v]
        cur = node.handle if kind == IN else node.fhead
        seen, prev = [], None
        while cur is not None:
            if cur in seen or len(seen) > len(self.nodes):
                raise InvariantError(f"cycle in chain of {v}")
            r = self.nodes[cur].out.get(v)
            if r is None:
                raise InvariantError(f"chain of {v} reaches {cur}, which has no record of {v}")
            left, right = (r.left, r.right) if kind == IN else (r.fleft, r.fright)
            if left != prev:
                raise InvariantError(f"chain of {v}: back link of {cur} is {left}, expected {prev}")
            seen.append(cur)
            prev, cur = cur, right
        return seen

    def check_representation(self) -> None:
        """Chains equal true in-neighbor sets (and free in-neighbors)."""
        g = self.mirror
        for v, node in self.nodes.items():
            if sorted(node.live_out()) != g.out_neighbors(v) or node.outdeg != g.outdegree(v):
                raise InvariantError(f"out-records of {v} disagree with the orientation")
            chain = self.in_chain(v, IN)
            if sorted(chain) != g.in_neighbors(v):
                raise InvariantError(f"in-chain of {v} = {sorted(chain)}, "
                                     f"true in-neighbors {g.in_neighbors(v)}")
            if self.matching:
                free = self.in_chain(v, FREE)
                want = [u for u in g.in_neighbors(v) if self.nodes[u].partner is None]
                if sorted(free) != want:
                    raise InvariantError(f"free chain of {v} = {sorted(free)}, expected {want}")

    def matching_pairs(self) -> set[tuple[int, int]]:
        out = set()
        for v, node in self.nodes.items():
            p = node.partner
            if p is not None:
                if self.nodes[p].partner != v:
                    raise InvariantError(f"asymmetric partner {v} -> {p}")
                if v < p:
                    out.add((v, p))
        return out


def dist_antireset(system: DistSystem, u: int) -> DistCascade | None:
    """Run the distributed cascade at u (if overloaded) plus chain repair."""
    system.mirror.begin_update((u,))
    try:
        return system._cascade_with_scope(u)
    finally:
        system.mirror.end_update()


def repr_insert_edge(system: DistSystem, u: int, v: int) -> None:
    """Insert u -> v with the chain splice only (no cascade)."""
    system.mirror.insert_edge(u, v)
    system.engine.wake_next(u, ("ins", v))
    system._stage()


def repr_delete_edge(system: DistSystem, u: int, v: int) -> None:
    system.mirror.delete_edge(u, v)
    system.engine.wake_next(u, ("del", v))
    system.engine.wake_next(v, ("del", u))
    system._stage()


def repr_flip(system: DistSystem, u: int, v: int) -> None:
    """Flip u -> v into v -> u and repair both chains."""
    a, b = system.nodes[u], system.nodes[v]
    system.mirror.flip(u, v)
    a.out[v].state = LEAVING
    a.outdeg -= 1
    b.out[u] = OutRec(JOINING)
    b.outdeg += 1
    system._pending_leave.add(u)
    system._pending_join.add(v)
    system._repair()


def dist_matching_update(system: DistSystem, op: UpdateOp, index: int = -1) -> set:
    if not system.matching:
        raise ValueError("system was built without the matching layer")
    system.apply(op, index)
    return system.matching_pairs()

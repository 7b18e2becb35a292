"""Arboricity-preserving workloads and adversarial gadget constructions.

Random workloads keep the graph a union of ``alpha`` forests at every prefix.
Gadgets are emitted with explicit ``ied`` directives so that replays start
from exactly the intended orientation under any insertion rule; each gadget
comes with the single trigger insertion that starts the cascade.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import UpdateOp, UpdateSequence, de, ie, iv, query, setval


@dataclass
class Gadget:
    setup: UpdateSequence
    trigger: UpdateOp | None
    roles: dict = field(default_factory=dict)

    def sequence(self) -> UpdateSequence:
        seq = UpdateSequence(self.setup.ops)
        if self.trigger is not None:
            seq.append(self.trigger)
        return seq


_NAIVE_TRIES = 8


class _DynamicForest:
    """Forest with O(1) connectivity tests under links and cuts.

    Every vertex carries a component label.  A link relabels the smaller
    side; a cut runs two interleaved searches from the endpoints and relabels
    whichever side is exhausted first, so each step costs about the size of
    the smaller piece.
    """

    def __init__(self, n: int):
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.label = list(range(n))
        self.members: dict[int, set[int]] = {v: {v} for v in range(n)}
        self._fresh = n
        self.n = n
        self.sq = n  # sum of squared component sizes

    @property
    def spanning(self) -> bool:
        return len(self.members) == 1

    def connected(self, u: int, v: int) -> bool:
        return self.label[u] == self.label[v]

    def link(self, u: int, v: int) -> bool:
        lu, lv = self.label[u], self.label[v]
        if lu == lv:
            return False
        if len(self.members[lu]) < len(self.members[lv]):
            lu, lv = lv, lu
        moved = self.members.pop(lv)
        self.sq += 2 * len(moved) * len(self.members[lu])
        for x in moved:
            self.label[x] = lu
        self.members[lu] |= moved
        self.adj[u].add(v)
        self.adj[v].add(u)
        return True

    def cut(self, u: int, v: int) -> None:
        if v not in self.adj[u]:
            raise KeyError((u, v))
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        side = self._smaller_side(u, v)
        old = self.label[u]
        new = self._fresh
        self._fresh += 1
        for x in side:
            self.label[x] = new
        self.members[new] = side
        self.members[old] -= side
        self.sq -= 2 * len(side) * len(self.members[old])

    def cross_pairs(self) -> int:
        """Ordered vertex pairs in different components."""
        return self.n * self.n - self.sq

    def sample_cross(self, rng: random.Random) -> tuple[int, int]:
        """Uniform ordered pair (u, v) with u, v in different components."""
        n, label, members = self.n, self.label, self.members
        pick = rng.random() * self.cross_pairs()
        comp = None
        for lab, mem in members.items():
            k = len(mem)
            pick -= k * (n - k)
            if pick < 0:
                comp = lab
                break
        if comp is None:  # float round-off on the last bucket
            comp = next(lab for lab, mem in members.items() if len(mem) < n)
        size = len(members[comp])
        if 2 * size > n:
            while label[u := int(rng.random() * n)] != comp:
                pass
        else:
            u = rng.choice(sorted(members[comp]))
        if 2 * size < n:
            while label[v := int(rng.random() * n)] == comp:
                pass
        else:
            v = rng.choice(sorted(x for lab, mem in members.items() if lab != comp for x in mem))
        return u, v

    def _smaller_side(self, u: int, v: int) -> set[int]:
        adj = self.adj
        seen_a, seen_b = {u}, {v}
        qa, qb = [u], [v]
        while True:  # expand one vertex per side per turn
            if not qa:
                return seen_a
            for y in adj[qa.pop()]:
                if y not in seen_a:
                    seen_a.add(y)
                    qa.append(y)
            if not qb:
                return seen_b
            for y in adj[qb.pop()]:
                if y not in seen_b:
                    seen_b.add(y)
                    qb.append(y)


def gen_random(alpha: int, n: int, t: int, seed: int, delete_fraction: float = 0.0,
               vertex_queries: float = 0.0, values: float = 0.0, pair_queries: float = 0.0,
               max_tries: int = 64) -> UpdateSequence:
    """Random arboricity-``alpha`` workload on vertices 0..n-1.

    Each of the ``t`` steps emits one edge update: with probability
    ``delete_fraction`` a uniformly random live edge is deleted, otherwise a
    random non-adjacent pair is inserted into a random one of ``alpha``
    forests, provided it closes no cycle there.  After a few failed blind
    proposals the pair is drawn directly among pairs split in some forest
    (uniform over valid (pair, forest) choices); the step is skipped only when
    ``max_tries`` attempts all hit existing edges or no valid pair exists.
    After each step, ``q v`` / ``val v x`` / ``q u v`` ops are interleaved
    with the given per-step probabilities.
    """
    if alpha < 1 or t < 1 or n < 2:
        raise ValueError("need alpha >= 1, t >= 1, n >= 2")
    rng = random.Random(seed)
    draw = rng.random
    forests = [_DynamicForest(n) for _ in range(alpha)]
    live: list[tuple[int, int]] = []
    where: dict[tuple[int, int], tuple[int, int]] = {}  # edge -> (slot in live, forest)
    ops = [iv(v) for v in range(n)]
    for _ in range(t):
        if live and rng.random() < delete_fraction:
            e = live[rng.randrange(len(live))]
            slot, f = where.pop(e)
            last = live.pop()
            if last != e:
                live[slot] = last
                where[last] = (slot, where[last][1])
            forests[f].cut(*e)
            ops.append(de(*e) if rng.random() < 0.5 else de(e[1], e[0]))
        elif not all(fo.spanning for fo in forests):  # otherwise no insertion can succeed
            for attempt in range(max_tries):
                if attempt < _NAIVE_TRIES:
                    u, v = int(draw() * n), int(draw() * n)
                    f = int(draw() * alpha)
                else:
                    # few valid pairs left: draw (pair, forest) exactly, which is
                    # what unbounded rejection sampling would converge to
                    weights = [fo.cross_pairs() for fo in forests]
                    f = rng.choices(range(alpha), weights)[0]
                    u, v = forests[f].sample_cross(rng)
                if u == v:
                    continue
                e = (u, v) if u < v else (v, u)
                if e in where:
                    continue
                if forests[f].link(u, v):
                    where[e] = (len(live), f)
                    live.append(e)
                    ops.append(ie(u, v))
                    break
        if vertex_queries and rng.random() < vertex_queries:
            ops.append(query(rng.randrange(n)))
        if values and rng.random() < values:
            ops.append(setval(rng.randrange(n), rng.randrange(1000)))
        if pair_queries and rng.random() < pair_queries:
            if live and rng.random() < 0.5:
                a, b = live[rng.randrange(len(live))]
            else:
                a, b = rng.randrange(n), rng.randrange(n)
                if a == b:
                    b = (a + 1) % n
            ops.append(query(a, b))
    return UpdateSequence(ops)


def gen_blowup_tree(delta: int, h: int) -> Gadget:
    """Almost-perfect delta-ary tree oriented towards the leaves.

    Levels 0..h; every vertex on levels 0..h-2 has ``delta`` children, the
    ``delta**(h-1)`` leaf-parents on level h-1 have ``delta - 1`` children
    plus an out-edge to the shared vertex v*.  Every vertex starts at
    outdegree <= delta; the trigger adds one more out-edge at the root.
    Roles: ``root``, ``vstar``, ``leaf_parents``.
    """
    if delta < 2 or h < 2:
        raise ValueError("need delta >= 2 and h >= 2")
    ids = iter(range(10 ** 9))
    root = next(ids)
    levels = [[root]]
    edges = []
    for depth in range(1, h + 1):
        fan = delta if depth < h else delta - 1
        level = []
        for p in levels[-1]:
            for _ in range(fan):
                c = next(ids)
                level.append(c)
                edges.append((p, c))
        levels.append(level)
    vstar = next(ids)
    extra = next(ids)
    edges += [(p, vstar) for p in levels[h - 1]]
    setup = UpdateSequence([iv(v) for v in range(extra + 1)])
    setup.extend(ie(p, c, directed=True) for p, c in edges)
    return Gadget(setup, ie(root, extra, directed=True),
                  {"root": root, "vstar": vstar, "leaf_parents": levels[h - 1],
                   "extra": extra})


def _gi_structure(i: int):
    """Vertex ids and directed edges of G_i, in insertion order.

    Ids decrease with the cycle level (C_{i-1} gets the smallest ids) so that
    smallest-id tie-breaking walks each cycle before descending a level.
    G_2 is a, b plus C_1 = {x, y}; the two antiparallel arcs of the length-2
    cycle are realized as x->y and y->a to keep the graph simple.
    """
    if i < 2:
        raise ValueError("need i >= 2")
    sizes = {j: 2 ** j for j in range(1, i)}
    next_id = 0
    cycles: dict[int, list[int]] = {}
    for j in range(i - 1, 0, -1):
        cycles[j] = list(range(next_id, next_id + sizes[j]))
        next_id += sizes[j]
    a, b = next_id, next_id + 1
    x, y = cycles[1]
    edges = [(x, a), (y, b), (x, y), (y, a)]
    members = [x, y, a, b]  # vertices of G_j, in id order
    for j in range(2, i):
        cyc = cycles[j]
        targets = sorted(members)
        edges += list(zip(cyc, targets))
        edges += [(cyc[k], cyc[(k + 1) % len(cyc)]) for k in range(len(cyc))]
        members += cyc
    return cycles, a, b, edges, 2 ** i


def gen_gi(i: int) -> Gadget:
    """G_i on 2**i vertices: every vertex has outdegree 2 except a and b.

    G_{j+1} adds a directed cycle C_j on 2**j vertices, each with one
    out-edge to a distinct vertex of G_j.  Edges are inserted G_2 first, then
    per level the C_j -> G_j edges and finally the cycle, so that (apart from
    the G_2 stand-in arc y->a, listed in ``roles['rule_exceptions']``) every
    edge points from the endpoint of lower to higher current outdegree.  The
    trigger adds an out-edge at the first vertex of C_{i-1} (for i = 2, at
    a vertex of C_1).
    """
    cycles, a, b, edges, n = _gi_structure(i)
    outdeg = [0] * (n + 1)
    exceptions = []
    for u, w in edges:
        if outdeg[u] > outdeg[w]:
            exceptions.append((u, w))
        outdeg[u] += 1
    extra = n
    setup = UpdateSequence([iv(v) for v in range(n + 1)])
    setup.extend(ie(u, w, directed=True) for u, w in edges)
    start = cycles[max(cycles)][0]
    return Gadget(setup, ie(start, extra, directed=True),
                  {"cycles": cycles, "a": a, "b": b, "extra": extra,
                   "rule_exceptions": exceptions, "edges": edges})


def gi_direct(i: int) -> set[tuple[int, int]]:
    """Directed edge set of G_i straight from the recursive definition."""
    cycles, a, b, _, _ = _gi_structure(i)
    x, y = cycles[1]
    arcs = {(x, a), (y, b), (x, y), (y, a)}
    g_vertices = {a, b, x, y}
    for j in range(2, i):
        cyc = cycles[j]
        for k, c in enumerate(cyc):
            arcs.add((c, cyc[(k + 1) % len(cyc)]))
        for c, target in zip(cyc, sorted(g_vertices)):
            arcs.add((c, target))
        g_vertices |= set(cyc)
    return arcs


def gen_gi_alpha(i: int, alpha: int) -> Gadget:
    """G_i^alpha: the modified G_i with every vertex replaced by ``alpha`` copies.

    Modified G_i: the base is a, b, c with c -> a, c -> b; each level adds a
    cycle C_j of length |V_j| + 1 whose extra vertex s_j has no edge into
    G_j.  Copies: C_j -> G_j edges and cycle edges become complete bipartite
    graphs oriented the same way; every s_j gets a partner set t_j, the s
    copies and the t copies each form a clique oriented from lower to higher
    copy index, and s_j^p -> t_j^q for q <= p, so each s_j^p has exactly
    ``alpha`` out-edges into the s/t sets.  Roles include ``s`` and ``t``
    per level.  The trigger adds an out-edge at s_{i-1}^1.
    """
    if i < 3 or alpha < 1:
        raise ValueError("need i >= 3 and alpha >= 1")
    # modified G_i on base vertices (ids assigned below)
    base_edges: list[tuple[str, str]] = [("c", "a"), ("c", "b")]
    members = ["a", "b", "c"]
    cycles: dict[int, list[str]] = {}
    for j in range(2, i):
        cyc = [f"s{j}"] + [f"c{j}_{k}" for k in range(len(members))]
        cycles[j] = cyc
        base_edges += [(c, g) for c, g in zip(cyc[1:], members)]
        base_edges += [(cyc[k], cyc[(k + 1) % len(cyc)]) for k in range(len(cyc))]
        members = members + cyc
    order = [v for j in range(i - 1, 1, -1) for v in cycles[j]] + ["c", "a", "b"]
    ids: dict[tuple[str, int], int] = {}
    for name in order:
        for p in range(alpha):
            ids[(name, p)] = len(ids)
    for j in range(i - 1, 1, -1):
        for p in range(alpha):
            ids[(f"t{j}", p)] = len(ids)
    arcs = []
    for u, w in base_edges:
        arcs += [(ids[(u, p)], ids[(w, q)]) for p in range(alpha) for q in range(alpha)]
    for j in range(2, i):
        s = [ids[(f"s{j}", p)] for p in range(alpha)]
        t = [ids[(f"t{j}", p)] for p in range(alpha)]
        arcs += [(s[p], s[q]) for p in range(alpha) for q in range(p + 1, alpha)]
        arcs += [(t[p], t[q]) for p in range(alpha) for q in range(p + 1, alpha)]
        arcs += [(s[p], t[q]) for p in range(alpha) for q in range(p + 1)]
    n = len(ids)
    extra = n
    setup = UpdateSequence([iv(v) for v in range(n + 1)])
    setup.extend(ie(u, w, directed=True) for u, w in arcs)
    roles = {
        "s": {j: [ids[(f"s{j}", p)] for p in range(alpha)] for j in range(2, i)},
        "t": {j: [ids[(f"t{j}", p)] for p in range(alpha)] for j in range(2, i)},
        "a": [ids[("a", p)] for p in range(alpha)],
        "b": [ids[("b", p)] for p in range(alpha)],
        "extra": extra,
    }
    return Gadget(setup, ie(roles["s"][i - 1][0], extra, directed=True), roles)


def gen_farflip_chain(n: int) -> Gadget:
    """Two saturated complete binary trees chained by the trigger edge.

    Both trees (the largest depth d with 2 * (2**(d+1) - 1) <= n) are
    oriented from the root towards the leaves, so every internal vertex has
    outdegree exactly 2 and the only vertices with spare capacity are the
    leaves, d hops away.  The trigger inserts root1 -> root2; any
    2-orientation must then flip a directed path from root1 down to a leaf.
    Roles: ``roots``, ``depth``.
    """
    if n < 8:
        raise ValueError("need n >= 8")
    d = 1
    while 2 * (2 ** (d + 2) - 1) <= n:
        d += 1
    size = 2 ** (d + 1) - 1
    edges = []
    for off in (0, size):
        for k in range(size // 2):  # heap layout: children of k are 2k+1, 2k+2
            edges += [(off + k, off + 2 * k + 1), (off + k, off + 2 * k + 2)]
    setup = UpdateSequence([iv(v) for v in range(2 * size)])
    setup.extend(ie(u, w, directed=True) for u, w in edges)
    return Gadget(setup, ie(0, size, directed=True), {"roots": (0, size), "depth": d})


@dataclass(frozen=True)
class GadgetSpec:
    kind: str  # blowup | farflip | gi | gi-alpha | random | saturated
    params: dict

    def compile(self) -> Gadget:
        p = dict(self.params)
        if self.kind == "blowup":
            return gen_blowup_tree(p["delta"], p["h"])
        if self.kind == "farflip":
            return gen_farflip_chain(p["n"])
        if self.kind == "gi":
            return gen_gi(p["i"])
        if self.kind == "gi-alpha":
            return gen_gi_alpha(p["i"], p["alpha"])
        if self.kind == "saturated":
            return Gadget(gen_saturated_forests(p["alpha"], p["n"], p["cap"], p["seed"]), None)
        if self.kind == "random":
            return Gadget(gen_random(p["alpha"], p["n"], p["t"], p["seed"],
                                     p.get("delete_fraction", 0.0)), None)
        raise ValueError(f"unknown gadget kind {self.kind!r}")


def gen_saturated_forests(alpha: int, n: int, cap: int, seed: int) -> UpdateSequence:
    """Union of ``alpha`` random forests oriented parent -> child, with up to
    ``cap`` children per parent in each forest.

    Vertices join one at a time; in each forest the new vertex hangs below a
    random earlier vertex that still has room, chosen with probability
    proportional to its child count plus one.  Most vertices end close to
    outdegree ``alpha * cap``, which makes single insertions at a saturated
    vertex start long cascades.
    """
    if alpha < 1 or cap < 1 or n < 2:
        raise ValueError("need alpha >= 1, cap >= 1, n >= 2")
    rng = random.Random(seed)
    ops = [iv(v) for v in range(n)]
    arcs: set[tuple[int, int]] = set()
    for _ in range(alpha):
        children = [0] * n
        open_: list[int] = [0]
        for v in range(1, n):
            weights = [children[p] + 1 for p in open_]
            p = rng.choices(open_, weights)[0]
            if (p, v) in arcs or (v, p) in arcs:
                continue  # the other forest already holds this pair
            arcs.add((p, v))
            ops.append(ie(p, v, directed=True))
            children[p] += 1
            if children[p] == cap:
                open_.remove(p)
            open_.append(v)
    return UpdateSequence(ops)

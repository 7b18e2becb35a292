"""Per-processor local state and its memory meter."""

from __future__ import annotations

LIVE, JOINING, LEAVING = 0, 1, 2


class OutRec:
    """What a node stores about one out-neighbor (its parent in a chain).

    ``left``/``right`` are the node's siblings in the parent's in-neighbor
    chain; ``fleft``/``fright`` the same for the parent's free-in chain,
    meaningful only while ``infree``.
    """

    __slots__ = ("left", "right", "infree", "fleft", "fright", "colored", "child", "state")

    def __init__(self, state: int = JOINING):
        self.left = self.right = None
        self.infree = False
        self.fleft = self.fright = None
        self.colored = False
        self.child = False
        self.state = state

    def entries(self) -> int:
        n = 1
        if self.state == JOINING:
            return n + 1
        n += (self.left is not None) + (self.right is not None)
        if self.infree:
            n += 1 + (self.fleft is not None) + (self.fright is not None)
        return n + self.colored + self.child


class SimNode:
    __slots__ = ("id", "out", "outdeg", "handle", "fhead", "partner",
                 "in_tree", "parent", "depth", "internal", "pending", "children_known",
                 "subtree_h", "active", "mem_peak")

    def __init__(self, vid: int):
        self.id = vid
        self.out: dict[int, OutRec] = {}
        self.outdeg = 0  # records that are not leaving
        self.handle: int | None = None  # first in-neighbor in my in-chain
        self.fhead: int | None = None  # first free in-neighbor
        self.partner: int | None = None
        self.mem_peak = 0
        self.clear_scratch()

    def clear_scratch(self) -> None:
        self.in_tree = False
        self.parent: int | None = None
        self.depth = 0
        self.internal = False
        self.pending = 0
        self.children_known = False
        self.subtree_h = 0
        self.active = False

    def live_out(self):
        return [w for w, r in sorted(self.out.items()) if r.state != LEAVING]

    def colored_out(self):
        return [w for w, r in sorted(self.out.items()) if r.colored]

    def mem(self) -> int:
        """Stored entries: per-record fields plus non-empty scalars."""
        total = sum(r.entries() for r in self.out.values())
        total += sum(x is not None for x in (self.handle, self.fhead, self.partner, self.parent))
        if self.in_tree:
            total += 4  # depth, pending count, subtree height, phase flags
        return total

    def meter(self) -> int:
        m = self.mem()
        if m > self.mem_peak:
            self.mem_peak = m
        return m

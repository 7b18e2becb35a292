"""Deterministic synchronous round engine.

Messages sent during round k are delivered at round k+1, sorted by
(src, dst, seq).  Only nodes with deliveries or explicit wakeups execute.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable


class Tag(IntEnum):
    EXPLORE = 1
    ACCEPT = 2
    DONE = 3
    WAKE = 4
    PROBE = 5
    FLIP = 6
    JOIN = 7
    LINKS = 8
    SETLEFT = 9
    SETRIGHT = 10
    LEAVE = 11
    MATCHED = 12
    ASK = 13
    FREEYES = 14
    MATCH = 15


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True, slots=True)
class SimMessage:
    """At most three O(log n)-bit payload fields, by construction."""

    src: int
    dst: int
    tag: Tag
    f1: int | None = None
    f2: int | None = None
    f3: int | None = None

    def payload(self) -> tuple:
        return tuple(x for x in (self.f1, self.f2, self.f3) if x is not None)


@dataclass
class RoundReport:
    round: int
    delivered: int
    executed: list[int] = field(default_factory=list)


Handler = Callable[[int, list[SimMessage], list[str]], None]


class RoundEngine:
    """``handler(node, messages, events)`` runs once per executing node per
    round; it may call :meth:`send` and :meth:`wake_at`."""

    def __init__(self, handler: Handler, trace: bool = False):
        self.handler = handler
        self.round = 0
        self._outbox: list[tuple[int, int, int, SimMessage]] = []
        self._seq = 0
        self._wakeups: dict[int, dict[int, list[str]]] = defaultdict(dict)
        self.messages = 0
        self.trace: list[dict] | None = [] if trace else None
        self.executed: set[int] = set()  # since the last reset_audit()
        self.on_round_end: Callable[[RoundReport], None] | None = None

    def send(self, msg: SimMessage) -> None:
        self._seq += 1
        self._outbox.append((msg.src, msg.dst, self._seq, msg))
        self.messages += 1

    def wake_at(self, node: int, rnd: int, event: str = "tick") -> None:
        """Explicit wakeup (local timer or adversary notification)."""
        if rnd <= self.round:
            raise SimulationError(f"wakeup for round {rnd} scheduled in round {self.round}")
        self._wakeups[rnd].setdefault(node, []).append(event)

    def wake_next(self, node: int, event: str = "tick") -> None:
        self.wake_at(node, self.round + 1, event)

    def pending(self) -> bool:
        return bool(self._outbox) or any(r > self.round for r in self._wakeups)

    def step(self) -> RoundReport:
        self.round += 1
        batch = sorted(self._outbox, key=lambda x: x[:3])
        self._outbox = []
        inbox: dict[int, list[SimMessage]] = defaultdict(list)
        for *_, msg in batch:
            inbox[msg.dst].append(msg)
            if self.trace is not None:
                self.trace.append({"round": self.round, "src": msg.src, "dst": msg.dst,
                                   "tag": msg.tag.name, "payload": list(msg.payload())})
        events = self._wakeups.pop(self.round, {})
        nodes = sorted(set(inbox) | set(events))
        for v in nodes:
            self.handler(v, inbox.get(v, []), events.get(v, []))
        self.executed.update(nodes)
        report = RoundReport(self.round, len(batch), nodes)
        if self.on_round_end is not None:
            self.on_round_end(report)
        return report

    def run_until_quiescent(self, limit: int = 100_000) -> int:
        start = self.round
        while self.pending():
            if self.round - start >= limit:
                tail = (self.trace or [])[-10:]
                raise SimulationError(f"round limit {limit} exceeded; trace tail: {tail}")
            self.step()
        return self.round - start

    def dump_trace(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.trace or []:
                fh.write(json.dumps(rec) + "\n")

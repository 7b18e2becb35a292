"""Named benchmark suites.

Each suite yields rows with a fixed column set so that one CSV writer serves
all of them; suite-specific quantities go into ``ratio`` and ``note``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass

from .apps import MatchingRunner, htz_threshold
from .core import OrientedGraph
from .flipgame import FlippingGame, bf_as_family_member, run_game, token_audit
from .generators import gen_farflip_chain, gen_random
from .orient import OrientConfig, run_sequence

COLUMNS = ["suite", "n", "t", "algo", "seed", "f_per_t", "c_per_op", "peak_outdeg",
           "rounds_per_op", "msgs_per_op", "ratio", "note"]


@dataclass
class Row:
    suite: str
    n: int
    t: int
    algo: str
    seed: int = 0
    f_per_t: float = 0.0
    c_per_op: float = 0.0
    peak_outdeg: int = 0
    rounds_per_op: float = 0.0
    msgs_per_op: float = 0.0
    ratio: float = 0.0
    note: str = ""


def _per(a, b) -> float:
    return round(a / b, 6) if b else 0.0


def scaling_bf(seed: int, scale: float = 1.0, alpha: int = 2):
    """BF at the smallest safe threshold 2*alpha+1, t = 3n, n = 2^10..2^16."""
    for k in range(10, 17):
        n = 2 ** k
        seq = gen_random(alpha, n, max(64, int(3 * n * scale)), seed, delete_fraction=0.2)
        m = run_sequence("bf", seq, OrientConfig(2 * alpha + 1, alpha))
        yield Row("scaling-bf", n, m.t, "bf", seed, _per(m.f, m.t), 0.0, m.peak_outdeg)


def competitive(seed: int, scale: float = 1.0, runs: int = 10, alpha: int = 2):
    """Flipping game R against BF_F on shared sequences with queries and values."""
    t = max(200, int(10_000 * scale))
    for r in range(runs):
        seq = gen_random(alpha, 1000, t, seed + r, delete_fraction=0.3,
                         vertex_queries=0.3, values=0.3)
        game = run_game(FlippingGame(), seq)
        bf = run_game(bf_as_family_member(4 * alpha), seq)
        yield Row("competitive", 1000, game.t, "flipgame", seed + r,
                  _per(game.f_cost, game.t), _per(game.c, len(seq)), 0, ratio=_per(game.c, bf.c),
                  note=f"c_R={game.c};c_A={bf.c}")


def tokens(seed: int, scale: float = 1.0, runs: int = 5, alpha: int = 2):
    t = max(200, int(10_000 * scale))
    for r in range(runs):
        seq = gen_random(alpha, 1000, t, seed + r, delete_fraction=0.3,
                         vertex_queries=0.3, values=0.3)
        audit = token_audit(seq, 4 * alpha)
        yield Row("tokens", 1000, audit["t"], "flipgame", seed + r,
                  _per(audit["game_flips"], audit["t"]), 0.0, 0,
                  ratio=_per(audit["game_flips"], audit["bound"]),
                  note=f"f_bf={audit['f_bf']};r={audit['r']};min_balance={audit['min_balance']}")


def largest_first(seed: int, scale: float = 1.0):
    n = 2 ** 12
    t = max(500, int(100_000 * scale))
    for alpha in (1, 2, 3):
        seq = gen_random(alpha, n, t, seed + alpha, delete_fraction=0.2)
        delta = 2 * alpha + 1
        m = run_sequence("bf-largest", seq, OrientConfig(delta, alpha))
        bound = 4 * alpha * math.ceil(math.log2(n / alpha)) + delta
        yield Row("largest-first", n, m.t, "bf-largest", seed + alpha, _per(m.f, m.t), 0.0,
                  m.peak_outdeg, ratio=_per(m.peak_outdeg, bound), note=f"alpha={alpha}")


def locality(seed: int, scale: float = 1.0):
    for k in range(6, 12 if scale >= 1 else 9):
        gadget = gen_farflip_chain(2 ** k)
        seq = gadget.sequence()
        m = run_sequence("bf", seq, OrientConfig(2, 1), graph=OrientedGraph(track_distance=True))
        n = len(m_vertices(seq))
        yield Row("locality", n, m.t, "bf", 0, _per(m.f, m.t), 0.0, m.peak_outdeg,
                  ratio=m.max_flip_distance, note=f"log2n={math.log2(n):.2f}")
    seq = gen_random(2, 1000, max(200, int(10_000 * scale)), seed, delete_fraction=0.3,
                     vertex_queries=0.3, values=0.3)
    game = FlippingGame(track_distance=True)
    run_game(game, seq)
    yield Row("locality", 1000, game.ledger.t, "flipgame", seed, 0.0, 0.0,
              game.graph.metrics.peak_outdeg, ratio=game.graph.metrics.max_flip_distance)


def m_vertices(seq) -> set:
    return {x for op in seq for x in op.endpoints()}


def matching(seed: int, scale: float = 1.0, alpha: int = 2, top: int = 16):
    """Local maximal matching (flipping-game engine, HTZ threshold)."""
    for k in range(10, top + 1):
        n = 2 ** k
        seq = gen_random(alpha, n, max(200, int(2 * n * scale)), seed + k, delete_fraction=0.3)
        runner = MatchingRunner(engine="flipgame", threshold=htz_threshold(alpha, n))
        for i, op in enumerate(seq):
            runner.apply(op, i)
        work = runner.state.work
        norm = alpha + math.sqrt(alpha * math.log2(n))
        yield Row("matching", n, runner.graph.metrics.t, "matching-local", seed + k,
                  _per(runner.graph.metrics.f, runner.graph.metrics.t), _per(work, len(seq)),
                  runner.graph.metrics.peak_outdeg, ratio=round(work / len(seq) / norm, 6))


def dist_matching(seed: int, scale: float = 1.0, alpha: int = 2, top: int = 14):
    from .distsim import DistSystem
    for k in range(10, top + 1):
        n = 2 ** k
        seq = gen_random(alpha, n, max(200, int(n * scale)), seed + k, delete_fraction=0.3)
        sim = DistSystem(alpha=alpha, matching=True)
        sim.run(seq)
        m = sim.metrics
        msgs = _per(m.messages, len(seq))
        yield Row("dist-matching", n, m.t, "matching-dist", seed + k, _per(m.f, m.t), 0.0,
                  m.peak_outdeg, _per(sim.engine.round, len(seq)), msgs,
                  ratio=round(msgs / (alpha + math.log2(n)), 6),
                  note=f"peak_mem={m.peak_mem_entries}")


SUITES = {
    "scaling-bf": scaling_bf,
    "competitive": competitive,
    "tokens": tokens,
    "largest-first": largest_first,
    "locality": locality,
    "matching": matching,
    "dist-matching": dist_matching,
}


def run_suite(name: str, seed: int = 0, scale: float = 1.0) -> list[Row]:
    return list(SUITES[name](seed, scale))


def write_csv(rows: list[Row], fh) -> None:
    w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(asdict(r))


def write_plot_data(rows: list[Row], fh) -> None:
    """One ``series<TAB>x<TAB>y`` line per row: x = n, y = the suite's headline
    quantity (the ratio column where a suite defines one, otherwise f/t)."""
    fh.write("series\tx\ty\n")
    for r in rows:
        y = r.ratio if r.ratio else r.f_per_t
        fh.write(f"{r.suite}:{r.algo}\t{r.n}\t{y}\n")

"""
How far from the update do flips happen?
========================================

Two saturated binary trees chained by a trigger edge force BF to flip a path
down to a leaf.  The flipping game only ever touches edges at the vertex it
operates on.
"""

import math

from orientlab.core import OrientedGraph
from orientlab.flipgame import FlippingGame, run_game
from orientlab.generators import gen_farflip_chain, gen_random
from orientlab.orient import OrientConfig, run_sequence

print(f"{'n':>6} {'log2 n':>7} {'BF flips':>9} {'BF max dist':>12}")
for k in range(6, 12):
    gadget = gen_farflip_chain(2 ** k)
    seq = gadget.sequence()
    n = len({x for op in seq for x in op.endpoints()})
    m = run_sequence("bf", seq, OrientConfig(2, 1), graph=OrientedGraph(track_distance=True))
    print(f"{n:>6} {math.log2(n):>7.2f} {m.f:>9} {m.max_flip_distance:>12}")

seq = gen_random(2, 1000, 5000, 0, delete_fraction=0.3, vertex_queries=0.3, values=0.3)
game = FlippingGame(track_distance=True)
ledger = run_game(game, seq)
print("\nflipping game on a random workload:")
print("  cost ledger:", ledger.as_dict())
print("  flip distance histogram:", game.graph.metrics.flip_distance_hist)

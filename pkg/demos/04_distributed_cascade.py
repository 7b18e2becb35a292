"""
One distributed anti-reset, round by round
==========================================

Saturated random forests leave many vertices at outdegree exactly delta.
Hanging one new leaf below such a vertex starts a cascade; the record shows
how many colored edges each round retired.
"""

import math

from orientlab.core import ie, iv
from orientlab.distsim import DistSystem
from orientlab.generators import gen_saturated_forests

n = 400
sim = DistSystem(alpha=2)  # delta = 14, threshold 4
sim.run(gen_saturated_forests(2, n, 7, seed=0))
u = next(v for v in sorted(sim.nodes) if sim.nodes[v].outdeg == sim.delta)
sim.apply(iv(n))
(rec,) = sim.apply(ie(u, n, directed=True))

print(f"trigger {u}: |N_u|={rec.n_u} internal={rec.internal} |E(G_u)|={rec.edges}")
print(f"cascade rounds {rec.cascade_rounds} (log bound {math.ceil(math.log2(rec.n_u)) + 2})")
for r, (gone, left) in enumerate(rec.decay, 1):
    print(f"  round {r}: uncolored {gone:4d}, still colored {left:4d}")
print("messages by phase:", dict(rec.messages))
print(f"peak memory entries {sim.metrics.peak_mem_entries}, ceiling {8 * (sim.delta + 2)}")
sim.check_representation()

"""
Maximal matching on top of an orientation
=========================================

Each vertex keeps its free in-neighbours; an update only scans out-edges,
which the orientation keeps short.  We replay a random workload and let the
oracle check the matching every few hundred ops.
"""

from orientlab.apps import MatchingRunner, htz_threshold
from orientlab.generators import gen_random
from orientlab.oracles import check_maximal_matching
from orientlab.orient import OrientConfig

n, alpha = 2000, 2
seq = gen_random(alpha, n, 20_000, 4, delete_fraction=0.3)

for engine, config, kw in [("flipgame", None, {"threshold": htz_threshold(alpha, n)}),
                           ("bf", OrientConfig(5, alpha), {})]:
    mr = MatchingRunner(config, engine=engine, **kw)
    for i, op in enumerate(seq):
        mr.apply(op, i)
        if i % 500 == 0:
            assert check_maximal_matching(mr.graph, mr.state.matching) is None
    print(f"{engine:9s} |M|={len(mr.state.matching):5d}  work/op={mr.state.work / len(seq):.3f}"
          f"  flips={mr.graph.metrics.f}")

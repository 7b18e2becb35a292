"""
Reset cascades can blow up; anti-resets do not
===============================================

A saturated ternary tree whose leaf-parents all point at one shared vertex
v*.  One extra edge at the root makes plain BF reset its way down the tree,
and every leaf-parent reset pushes one more edge onto v*.
"""

from orientlab.generators import gen_blowup_tree
from orientlab.orient import AntiReset, BrodalFagerberg, OrientConfig, run_sequence

delta, h = 3, 7
gadget = gen_blowup_tree(delta, h)
vstar = gadget.roles["vstar"]

bf = BrodalFagerberg(OrientConfig(delta, 2, "fifo", "directive"))
run_sequence(bf, gadget.setup)
peak = 0


def watch(_):
    global peak
    peak = max(peak, bf.graph.outdegree(vstar))


bf.on_reset = watch
bf.apply(gadget.trigger)
print(f"BF fifo:    v* peaked at outdegree {peak} (delta={delta})")
print(f"            flips for the single trigger: {bf.metrics.f}")

# Same gadget, anti-reset engine at delta = 7 * alpha.  The room above the
# gadget's outdegrees is large enough that the trigger needs no cascade at all.
ar = AntiReset(OrientConfig(14, 2, insert_rule="directive"), record=True)
m = run_sequence(ar, gadget.sequence())
print(f"anti-reset: peak outdegree anywhere {m.peak_outdeg}, cascades {len(ar.cascades)}")

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientlab.core import UpdateSequence, de, dv, ie, iv
from orientlab.distsim import (MEM_C, DistSystem, RoundEngine, SimMessage, SimulationError, Tag,
                               dist_antireset, dist_matching_update, repr_delete_edge, repr_flip,
                               repr_insert_edge)
from orientlab.generators import gen_random, gen_saturated_forests
from orientlab.oracles import check_maximal_matching


def saturated_trigger(seed, n=300, alpha=2):
    """Saturated random forests plus one leaf at a vertex sitting at delta."""
    sim = DistSystem(alpha=alpha)
    sim.run(gen_saturated_forests(alpha, n, 7 * alpha // 2, seed))
    u = next(v for v in sorted(sim.nodes) if sim.nodes[v].outdeg == sim.delta)
    sim.apply(iv(n))
    (rec,) = sim.apply(ie(u, n, directed=True))
    return sim, rec


# ---------------------------------------------------------------- engine

def test_empty_engine_is_quiescent():
    eng = RoundEngine(lambda *a: None)
    assert eng.run_until_quiescent() == 0


def test_single_message_takes_one_round():
    got = []
    eng = RoundEngine(lambda v, msgs, ev: got.append((eng.round, v, msgs)))
    eng.send(SimMessage(0, 1, Tag.PROBE))
    assert eng.run_until_quiescent() == 1
    assert got == [(1, 1, [SimMessage(0, 1, Tag.PROBE)])]
    assert eng.messages == 1


def test_round_limit_raises():
    def ping(v, msgs, ev):
        eng.send(SimMessage(v, 1 - v, Tag.PROBE))
    eng = RoundEngine(ping)
    eng.wake_next(0)
    with pytest.raises(SimulationError, match="round limit"):
        eng.run_until_quiescent(limit=5)


def test_cannot_wake_in_the_past():
    eng = RoundEngine(lambda *a: None)
    with pytest.raises(SimulationError):
        eng.wake_at(0, 0)


def test_traces_are_deterministic(tmp_path):
    seq = gen_random(2, 60, 400, 8, delete_fraction=0.3)
    dumps = []
    for k in range(2):
        sim = DistSystem(alpha=2, matching=True, trace=True)
        sim.run(seq)
        path = tmp_path / f"t{k}.jsonl"
        sim.engine.dump_trace(path)
        dumps.append(path.read_bytes())
    assert dumps[0] == dumps[1] and dumps[0]


def test_messages_carry_at_most_three_fields():
    sim = DistSystem(alpha=2, matching=True, trace=True)
    sim.run(gen_random(2, 50, 300, 4, delete_fraction=0.3))
    assert max(len(r["payload"]) for r in sim.engine.trace) <= 3


# ---------------------------------------------------------------- anti-reset

def test_delta_too_small():
    with pytest.raises(ValueError):
        DistSystem(delta=13, alpha=2)


def test_star_resolves_in_one_round():
    sim = DistSystem(alpha=1)
    k = sim.delta + 1
    sim.run(UpdateSequence([iv(v) for v in range(k + 1)] +
                           [ie(0, w, directed=True) for w in range(1, k + 1)]))
    (rec,) = sim.cascades
    assert (rec.internal, rec.cascade_rounds) == (1, 1)
    assert sim.mirror.outdegree(0) <= 5 * sim.alpha
    assert rec.boundary_max_end <= sim.delta


@pytest.mark.parametrize("seed", range(4))
def test_saturated_cascade(seed):
    sim, rec = saturated_trigger(seed)
    assert rec.internal > 20
    assert rec.cascade_rounds <= math.ceil(math.log2(rec.n_u)) + 2
    for uncolored, remaining in rec.decay:
        assert uncolored >= remaining
    assert rec.final_max_out <= 5 * sim.alpha
    assert rec.boundary_max_end <= sim.delta
    assert rec.total_messages <= 4 * rec.edges + 4 * rec.n_u
    assert sim.metrics.peak_outdeg <= sim.delta + 1
    sim.check_representation()


def test_direct_call_is_noop_below_threshold():
    sim = DistSystem(alpha=1)
    sim.run(UpdateSequence([iv(0), iv(1), ie(0, 1)]))
    assert dist_antireset(sim, 0) is None


def test_memory_and_wake_audits_on_saturated_graph():
    sim, _ = saturated_trigger(11)
    assert not sim.mem_violations
    assert not sim.wake_violations
    assert sim.metrics.peak_mem_entries <= MEM_C * (sim.delta + 2)


# ---------------------------------------------------------------- representation

def test_delete_middle_sibling():
    sim = DistSystem(alpha=1)
    for v in range(4):
        sim.add_vertex(v)
    for u in (1, 2, 3):
        repr_insert_edge(sim, u, 0)
    chain = sim.in_chain(0)
    assert sorted(chain) == [1, 2, 3]
    repr_delete_edge(sim, chain[1], 0)
    assert sim.in_chain(0) == [chain[0], chain[2]]
    sim.check_representation()


def test_flip_moves_between_chains():
    sim = DistSystem(alpha=1)
    for v in range(3):
        sim.add_vertex(v)
    repr_insert_edge(sim, 1, 0)
    repr_insert_edge(sim, 2, 0)
    repr_flip(sim, 1, 0)
    assert sim.in_chain(0) == [2]
    assert sim.in_chain(1) == [0]
    sim.check_representation()


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6), matching=st.booleans())
def test_representation_on_random_sequences(seed, matching):
    sim = DistSystem(alpha=2, matching=matching)
    sim.run(gen_random(2, 40, 300, seed, delete_fraction=0.35), check_every=25)
    sim.check_representation()
    assert not sim.mem_violations
    assert not sim.wake_violations


def test_vertex_deletion_clears_chains():
    sim = DistSystem(alpha=1, matching=True)
    sim.run(UpdateSequence([iv(v) for v in range(4)] +
                           [ie(1, 0), ie(2, 0), ie(3, 0), dv(0)]))
    sim.check_representation()
    assert 0 not in sim.nodes


# ---------------------------------------------------------------- matching

def test_free_pair_matches_quickly():
    sim = DistSystem(alpha=1, matching=True)
    sim.run(UpdateSequence([iv(0), iv(1)]))
    r0, m0 = sim.engine.round, sim.engine.messages
    assert dist_matching_update(sim, ie(0, 1)) == {(0, 1)}
    assert sim.engine.round - r0 <= 4
    assert sim.engine.messages - m0 <= 6


def test_rematch_after_delete():
    sim = DistSystem(alpha=1, matching=True)
    sim.run(UpdateSequence([iv(v) for v in range(4)] + [ie(1, 2), ie(0, 1), ie(2, 3)]))
    assert sim.matching_pairs() == {(1, 2)}
    assert dist_matching_update(sim, de(1, 2)) == {(0, 1), (2, 3)}


def test_matching_layer_required():
    with pytest.raises(ValueError):
        dist_matching_update(DistSystem(alpha=1), iv(0))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_matching_is_maximal_throughout(seed):
    def audit(i, op, sim):
        if i % 20 == 0:
            assert check_maximal_matching(sim.mirror, sim.matching_pairs()) is None

    sim = DistSystem(alpha=2, matching=True)
    sim.run(gen_random(2, 40, 300, seed, delete_fraction=0.35), on_op=audit)
    assert check_maximal_matching(sim.mirror, sim.matching_pairs()) is None

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientlab.core import (InvariantError, Metrics, OrientedGraph, SequenceError, UpdateOp,
                            UpdateSequence, apply_raw, de, dv, ie, iv, query, setval)
from orientlab.generators import gen_random


def graph_with(n):
    g = OrientedGraph()
    for v in range(n):
        apply_raw(g, iv(v))
    return g


def test_first_edge_fixed_rule():
    g = graph_with(3)
    apply_raw(g, ie(1, 2))
    assert g.out[1] == {2}
    assert g.indegree(2) == 1
    assert g.metrics.t == 1


def test_higher_outdegree_rule_points_at_busier_vertex():
    g = graph_with(6)
    for w in (3, 4, 5):
        apply_raw(g, ie(1, w, directed=True))
    apply_raw(g, ie(1, 2), rule="higher-outdegree")
    assert g.is_oriented(2, 1)


def test_directive_survives_any_rule():
    g = graph_with(2)
    apply_raw(g, ie(1, 0, directed=True), rule="fixed")
    assert g.is_oriented(1, 0)


def test_vertex_deletion_bills_each_edge():
    g = graph_with(4)
    for w in (1, 2, 3):
        apply_raw(g, ie(0, w))
    before = g.metrics.t
    apply_raw(g, dv(0))
    assert g.metrics.t - before == 3
    assert g.m == 0 and 0 not in g.out
    g.check()


def test_vertex_ids_are_never_reused():
    g = graph_with(2)
    apply_raw(g, dv(1))
    with pytest.raises(SequenceError):
        apply_raw(g, iv(1), index=7)


@pytest.mark.parametrize("op, needle", [
    (ie(0, 0), "self-loop"),
    (ie(0, 9), "not live"),
    (de(0, 1), ""),
])
def test_bad_ops_name_the_index(op, needle):
    g = graph_with(2)
    with pytest.raises(SequenceError) as info:
        apply_raw(g, op, index=41)
    assert "op #41" in str(info.value)
    assert needle in str(info.value)


def test_duplicate_edge_rejected():
    g = graph_with(2)
    apply_raw(g, ie(0, 1))
    with pytest.raises(SequenceError):
        apply_raw(g, ie(1, 0), index=3)


def test_flip_and_involution():
    g = graph_with(2)
    apply_raw(g, ie(0, 1))
    g.flip(0, 1)
    assert g.out[1] == {0} and g.metrics.f == 1
    g.flip(1, 0)
    assert g.out[0] == {1} and g.metrics.f == 2
    with pytest.raises(InvariantError):
        g.flip(1, 0)


def test_degrees_of_star():
    g = graph_with(6)
    for w in range(1, 6):
        apply_raw(g, ie(0, w))
    assert (g.outdegree(0), g.indegree(0)) == (5, 0)
    assert (g.outdegree(3), g.indegree(3)) == (0, 1)
    with pytest.raises(KeyError):
        g.outdegree(99)


def test_flip_distance_histogram():
    # path 0-1-2-3-4 oriented 0->1->2->3->4; update at 0, flip 3->4
    g = OrientedGraph(track_distance=True)
    for v in range(5):
        g.add_vertex(v)
    for v in range(4):
        g.insert_edge(v, v + 1)
    g.begin_update((0,))
    g.flip(3, 4)
    g.end_update()
    assert g.metrics.flip_distance_hist == {4: 1}
    assert g.metrics.max_flip_distance == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_counters_match_reference(seed):
    rng = random.Random(seed)
    seq = gen_random(2, 25, 150, seed, delete_fraction=0.3)
    g = OrientedGraph()
    ref: set[frozenset] = set()
    for i, op in enumerate(seq):
        apply_raw(g, op, rule=rng.choice(["fixed", "higher-outdegree"]), index=i)
        if op.kind.value == "ie":
            ref.add(frozenset((op.u, op.v)))
        elif op.kind.value == "de":
            ref.discard(frozenset((op.u, op.v)))
    g.check()
    assert g.undirected_edges() == ref
    for v in g.vertices():
        assert g.outdegree(v) + g.indegree(v) == sum(v in e for e in ref)


def test_sequence_roundtrip(tmp_path):
    seq = UpdateSequence([iv(0), iv(1), ie(0, 1), ie(1, 2, directed=True), query(0),
                          query(0, 1), setval(1, 9), de(0, 1), dv(1)])
    path = tmp_path / "s.txt"
    seq.save(path)
    assert UpdateSequence.load(path) == seq
    text = "# comment\niv 0\n\niv 1  # trailing\nie 0 1\n"
    assert [op.to_line() for op in UpdateSequence.loads(text)] == ["iv 0", "iv 1", "ie 0 1"]


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        UpdateOp.parse("ie 1")
    with pytest.raises(ValueError):
        UpdateOp.parse("zz 1 2")


def test_metrics_json_keys_are_stable():
    d = Metrics().to_dict()
    assert list(d)[:8] == ["t", "f", "resets", "peak_outdeg", "peak_outdeg_steady",
                           "rounds", "messages", "peak_mem_entries"]


def test_peak_counts_mid_update():
    g = graph_with(4)
    g.begin_update((0,))
    for w in (1, 2, 3):
        g.insert_edge(0, w)
    g.reset(0)
    g.end_update()
    assert g.metrics.peak_outdeg == 3
    assert g.metrics.peak_outdeg_steady == 1

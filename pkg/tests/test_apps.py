import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientlab.apps import (AdjStruct, MatchingRunner, adjacency_query, forest_decompose,
                            htz_threshold, label_adjacent, make_labels, matching_update)
from orientlab.core import OrientedGraph, UpdateSequence, de, dv, ie, iv, query
from orientlab.generators import gen_random
from orientlab.oracles import check_forest_decomposition, check_maximal_matching
from orientlab.orient import OrientConfig, run_sequence

ENGINES = [("flipgame", None), ("bf", OrientConfig(5, 2)), ("antireset", OrientConfig(10, 2))]


def test_htz_threshold():
    assert htz_threshold(2, 1024) == 5  # ceil(sqrt(20))
    assert htz_threshold(1, 2) == 1


@pytest.mark.parametrize("engine, config", ENGINES)
def test_insert_between_free_vertices_matches(engine, config):
    mr = MatchingRunner(config, engine=engine)
    for op in (iv(0), iv(1)):
        mr.apply(op)
    assert matching_update(mr, ie(0, 1)) == {(0, 1)}


@pytest.mark.parametrize("engine, config", ENGINES)
def test_path_rematch(engine, config):
    mr = MatchingRunner(config, engine=engine)
    ops = [iv(v) for v in range(4)] + [ie(1, 2), ie(0, 1), ie(2, 3)]
    for op in ops:
        mr.apply(op)
    assert mr.state.matching == {(1, 2)}
    mr.apply(de(1, 2))
    assert mr.state.matching == {(0, 1), (2, 3)}
    assert check_maximal_matching(mr.graph, mr.state.matching) is None


@pytest.mark.parametrize("engine, config", ENGINES)
@settings(max_examples=12, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_streaming_maximality(engine, config, seed):
    mr = MatchingRunner(config, engine=engine, threshold=3 if engine == "flipgame" else None)
    seq = gen_random(2, 50, 500, seed, delete_fraction=0.4)
    for i, op in enumerate(seq):
        mr.apply(op, i)
        assert mr.local_violation() is None
        if i % 25 == 0:
            assert check_maximal_matching(mr.graph, mr.state.matching) is None
            mr.state.check_free_in()
    assert check_maximal_matching(mr.graph, mr.state.matching) is None
    mr.state.check_free_in()


def test_vertex_deletion_in_matching():
    mr = MatchingRunner(engine="flipgame")
    for op in [iv(v) for v in range(4)] + [ie(0, 1), ie(1, 2), ie(2, 3), ie(0, 3), dv(1)]:
        mr.apply(op)
    assert check_maximal_matching(mr.graph, mr.state.matching) is None


def test_adjacency_basics():
    adj = AdjStruct(3)
    for op in (iv(0), iv(1), iv(2)):
        adj.apply(op)
    assert adjacency_query(adj, 0, 1) is False
    adj.apply(ie(0, 1))
    assert adj.apply(query(0, 1)) is True
    assert adj.apply(query(1, 0)) is True
    assert adj.apply(query(0, 2)) is False


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10 ** 6), dp=st.integers(1, 6))
def test_adjacency_agrees_with_reference(seed, dp):
    adj = AdjStruct(dp)
    ref = set()
    seq = gen_random(3, 60, 600, seed, delete_fraction=0.3, pair_queries=0.8)
    for i, op in enumerate(seq):
        ans = adj.apply(op, i)
        k = op.kind.value
        if k == "ie":
            ref.add(frozenset((op.u, op.v)))
        elif k == "de":
            ref.discard(frozenset((op.u, op.v)))
        elif k == "q" and op.v is not None:
            assert ans == (frozenset((op.u, op.v)) in ref)
        if i % 50 == 0:
            adj.check_index()
    adj.check_index()


def test_forest_decompose_examples():
    star = OrientedGraph.from_edges([(w, 0) for w in range(1, 6)])
    assert set(forest_decompose(star).values()) == {0}
    tri = OrientedGraph.from_edges([(0, 1), (1, 2), (2, 0)])
    a = forest_decompose(tri, 1)
    assert sorted(set(a.values())) == [0, 1]
    assert check_forest_decomposition(tri, a) is None
    with pytest.raises(ValueError):
        forest_decompose(OrientedGraph.from_edges([(0, 1), (0, 2)]), 1)


def test_forest_decompose_random_run():
    bf_graph = _steady(gen_random(2, 400, 4000, 6, delete_fraction=0.2), 8)
    a = forest_decompose(bf_graph, 8)
    assert len(set(a.values())) <= 16
    assert check_forest_decomposition(bf_graph, a) is None


def _steady(seq, delta):
    from orientlab.orient import BrodalFagerberg
    bf = BrodalFagerberg(OrientConfig(delta, 2))
    run_sequence(bf, seq)
    return bf.graph


def test_labels_small():
    labels = make_labels({}, vertices=[0, 1], num_forests=2)
    assert not label_adjacent(labels[0], labels[1])
    labels = make_labels({(5, 9): 3}, num_forests=4)
    assert labels[5].parents[3] == 9
    assert label_adjacent(labels[5], labels[9])


def test_labels_exhaustive():
    g = _steady(gen_random(2, 300, 1500, 8, delete_fraction=0.2), 8)
    a = forest_decompose(g, 8)
    labels = make_labels(a, g.vertices())
    f = max(a.values()) + 1
    assert all(len(lab.parents) == f <= 16 for lab in labels.values())
    for u, w in itertools.combinations(g.vertices(), 2):
        assert label_adjacent(labels[u], labels[w]) == g.has_edge(u, w)


def test_matching_runner_rejects_missing_edge():
    mr = MatchingRunner(engine="flipgame")
    mr.apply(iv(0))
    mr.apply(iv(1))
    with pytest.raises(ValueError):
        mr.apply(de(0, 1), 5)


def test_matching_runs_from_run_sequence():
    seq = UpdateSequence([iv(0), iv(1), iv(2), ie(0, 1), ie(1, 2), de(0, 1)])
    m = run_sequence("matching-local", seq, None)
    assert m.extra["matching_size"] == 1

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientlab.core import OrientedGraph
from orientlab.generators import gen_gi
from orientlab.oracles import (arboricity_bruteforce, check_forest_decomposition,
                               check_maximal_matching, min_max_outdegree)

K4 = [(a, b) for a, b in itertools.combinations(range(4), 2)]
TRIANGLE = [(0, 1), (1, 2), (2, 0)]


def ref_density(edges, ceil_of):
    """Independent subset scan, ceil(|E(U)| / ceil_of(|U|))."""
    verts = sorted({x for e in edges for x in e})
    best = 0
    for r in range(2, len(verts) + 1):
        for sub in itertools.combinations(verts, r):
            s = set(sub)
            inside = sum(1 for u, w in edges if u in s and w in s)
            best = max(best, math.ceil(Fraction(inside, ceil_of(r))))
    return best


small_graphs = st.integers(0, 2 ** 31).map(lambda s: _random_edges(s))


def _random_edges(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    p = rng.random()
    return [e for e in itertools.combinations(range(n), 2) if rng.random() < p]


def test_tree_has_arboricity_one():
    a, cert = arboricity_bruteforce([(0, 1), (1, 2), (1, 3), (3, 4)])
    assert a == 1
    assert cert.edges_inside == len(cert.subset) - 1


def test_k4():
    a, cert = arboricity_bruteforce(K4)
    assert a == 2
    assert cert.value == Fraction(6, 3)
    assert min_max_outdegree(K4)[0] == 2


def test_g3_has_arboricity_two():
    g = gen_gi(3).setup
    edges = [(op.u, op.v) for op in g if op.kind.value == "ie"]
    assert arboricity_bruteforce(edges)[0] == 2


def test_size_limit_refused():
    big = [(i, i + 1) for i in range(25)]
    with pytest.raises(ValueError, match="limit"):
        arboricity_bruteforce(big)


@pytest.mark.parametrize("edges, want", [
    (TRIANGLE, 1),
    (K4, 2),
    ([(0, k) for k in range(1, 9)], 1),
    ([], 0),
])
def test_min_max_outdegree_small(edges, want):
    d, witness = min_max_outdegree(edges)
    assert d == want
    witness.check()
    assert witness.max_outdegree() == d
    assert witness.undirected_edges() == {frozenset(e) for e in edges}


@settings(max_examples=60, deadline=None)
@given(small_graphs)
def test_pseudoarboricity_sandwich(edges):
    if not edges:
        return
    lower = ref_density(edges, lambda r: r)
    d, witness = min_max_outdegree(edges)
    a, _ = arboricity_bruteforce(edges)
    assert lower == d <= a
    assert a == ref_density(edges, lambda r: r - 1)
    assert witness.max_outdegree() == d


def test_matching_checks():
    assert check_maximal_matching([], []) is None
    path3 = [(0, 1), (1, 2)]
    assert check_maximal_matching(path3, [(0, 1)]) is None
    path4 = [(0, 1), (1, 2), (2, 3)]
    assert check_maximal_matching(path4, [(1, 2)]) is None
    bad = check_maximal_matching(path4, [])
    assert bad.kind == "augmentable" and bad.detail == (0, 1)
    assert check_maximal_matching(path4, [(0, 1), (1, 2)]).kind == "shared-vertex"
    assert check_maximal_matching(path4, [(0, 3)]).kind == "not-an-edge"


def test_matching_check_accepts_oriented_graph():
    g = OrientedGraph.from_edges([(0, 1), (2, 1)])
    assert check_maximal_matching(g, {(1, 2)}) is None


def test_forest_checks():
    tree = [(0, 1), (1, 2), (1, 3)]
    assert check_forest_decomposition(tree, {e: 0 for e in tree}) is None
    bad = check_forest_decomposition(TRIANGLE, {e: 0 for e in TRIANGLE})
    assert bad.kind == "cycle" and bad.detail[0] == 0
    split = {(0, 1): 0, (1, 2): 0, (2, 0): 1}
    assert check_forest_decomposition(TRIANGLE, split) is None
    assert check_forest_decomposition(TRIANGLE, {(0, 1): 0}).kind == "unassigned-edge"

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientlab.core import OrientedGraph, UpdateSequence, ie, iv, query, setval
from orientlab.flipgame import (CostLedger, FlippingGame, ValueGraph, bf_as_family_member,
                                run_game, simulate_bf_via_resets, token_audit)
from orientlab.generators import gen_random


def seq_of(*ops):
    return UpdateSequence(ops)


def test_ledger_formula():
    led = CostLedger(t=3, f_cost=4, free_flips=10, outdeg_charges=5, r=2)
    assert led.c == 12
    assert led.as_dict()["c"] == 12


def test_query_at_isolated_vertex():
    game = FlippingGame()
    run_game(game, seq_of(iv(0), setval(0, 7)))
    assert game.apply(query(0)) == 7
    assert game.ledger.outdeg_charges == 0


def test_basic_game_second_op_is_free():
    game = FlippingGame()
    run_game(game, seq_of(iv(0), iv(1), iv(2), ie(0, 1), ie(0, 2)))
    game.apply(query(0))
    charged = game.ledger.outdeg_charges
    assert charged == 2 and game.ledger.free_flips == 2
    game.apply(query(0))
    assert game.ledger.outdeg_charges == charged
    assert game.ledger.f_cost == 0


def test_threshold_game_keeps_small_outdegree():
    game = FlippingGame(threshold=5)
    ops = [iv(v) for v in range(6)] + [ie(0, w, directed=True) for w in range(1, 6)]
    run_game(game, ops)
    game.apply(query(0))
    assert game.graph.outdegree(0) == 5
    assert game.ledger.outdeg_charges == 5
    assert game.graph.metrics.f == 0


def test_aggregate_sees_all_neighbors():
    game = FlippingGame(aggregate="sum")
    run_game(game, seq_of(iv(0), iv(1), iv(2), ie(1, 0), ie(0, 2), setval(1, 3), setval(2, 4),
                          setval(0, 1)))
    assert game.apply(query(0)) == 8
    game.vg.check_caches()


def test_aggregate_dead_vertex():
    vg = ValueGraph(OrientedGraph())
    with pytest.raises(KeyError):
        vg.aggregate(3, sum)


def test_bf_member_insert_without_cascade():
    bf = bf_as_family_member(4)
    run_game(bf, seq_of(iv(0), iv(1), ie(0, 1)))
    assert bf.ledger.c == 1


def test_bf_member_pays_cascade_flips():
    # 0 -> 1..7 via directives, then one more insertion at 0 with delta 7
    bf = bf_as_family_member(7)
    ops = [iv(v) for v in range(9)] + [ie(0, w, directed=True) for w in range(1, 9)]
    run_game(bf, ops)
    assert bf.ledger.f_cost == 8
    assert bf.ledger.free_flips == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_two_competitive(seed):
    seq = gen_random(2, 60, 500, seed, delete_fraction=0.3, vertex_queries=0.4, values=0.4)
    r = run_game(FlippingGame(), seq)
    a = run_game(bf_as_family_member(8), seq)
    assert r.c <= 2 * a.c


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_caches_stay_coherent(seed):
    game = FlippingGame(threshold=3)
    seq = gen_random(2, 40, 300, seed, delete_fraction=0.3, vertex_queries=0.3, values=0.5)
    run_game(game, seq)
    game.vg.check_caches()


def test_game_flips_are_local():
    game = FlippingGame(track_distance=True)
    run_game(game, gen_random(2, 200, 3000, 4, delete_fraction=0.3, vertex_queries=0.3,
                              values=0.3))
    assert game.graph.metrics.f > 0
    assert game.graph.metrics.max_flip_distance <= 1


def test_simulation_reduction():
    assert simulate_bf_via_resets(gen_random(2, 200, 300, 1), 8)["r"] == 0
    out = simulate_bf_via_resets(gen_random(2, 300, 4000, 2, delete_fraction=0.2), 5)
    assert out["r"] > 0
    assert out["min_reset_size"] >= 6
    assert out["r"] * 6 <= out["f"]


def test_simulation_flip_total_against_game():
    delta = 5
    out = simulate_bf_via_resets(gen_random(2, 300, 4000, 9, delete_fraction=0.2), delta)
    # k = flips per game operation (t updates plus r resets) in the simulation
    t, f, r = out["t"], out["f"], out["r"]
    k = f / (t + r)
    assert r > 0 and k < delta + 1
    assert f <= k * t / (1 - k / (delta + 1)) + 1e-9


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_token_audit(seed):
    seq = gen_random(2, 300, 3000, seed, delete_fraction=0.3, vertex_queries=0.3, values=0.3)
    audit = token_audit(seq, 8)
    assert audit["min_balance"] >= 0
    assert audit["game_flips"] <= audit["bound"]


def test_boundedflip_at_3delta_minus_1():
    delta = 8
    seq = gen_random(2, 300, 4000, 5, delete_fraction=0.3, vertex_queries=0.3, values=0.3)
    game = FlippingGame(threshold=3 * delta - 1)
    run_game(game, seq)
    bf = bf_as_family_member(delta)
    run_game(bf, seq)
    t, f = bf.graph.metrics.t, bf.graph.metrics.f
    assert game.graph.metrics.f <= 3 * (t + f)

"""Data model, structural classification, builtins, and the game file format."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absorbing_games import (
    AbsorbingGame,
    BUILTIN_GAMES,
    builtin_game,
    classify,
    game_from_dict,
    game_to_dict,
    is_generalized_big_match,
    load_game,
    resolve_game,
    save_game,
)


def test_big_match_table():
    g = builtin_game("big-match")
    assert g.actions_p1 == ("Top", "Bottom")
    assert g.actions_p2 == ("Left", "Right")
    assert np.array_equal(g.reward, [[1.0, 0.0], [0.0, 1.0]])
    assert g.absorbing_states == ("1*", "0*")
    assert np.array_equal(g.absorbing_payoffs, [1.0, 0.0])
    # Top absorbs with probability 1 against both columns, Bottom never
    assert np.array_equal(g.absorption_prob, [[1.0, 1.0], [0.0, 0.0]])
    assert np.array_equal(g.absorption_value, [[1.0, 0.0], [0.0, 0.0]])


def test_modified_big_match_table():
    g = builtin_game("modified-big-match")
    assert g.actions_p2 == ("Left", "Middle", "Right")
    assert np.array_equal(g.reward[1], [0.0, 1.0, 0.5])
    # the extra column never absorbs
    assert np.array_equal(g.absorption_prob, [[1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])


def test_table3_table():
    g = builtin_game("table3")
    assert g.absorbing_states == ("1*", "0*", "half*")
    assert np.array_equal(g.absorption_prob, [[1.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
    # Right column absorbs at payoff 1/2 for both rows
    assert g.absorption_value[0, 2] == 0.5
    assert g.absorption_value[1, 2] == 0.5


def test_unknown_builtin_rejected():
    with pytest.raises(ValueError):
        builtin_game("no-such-game")


def test_classify_big_match():
    s = classify(builtin_game("big-match"))
    assert s.a_star == ("Top",)
    assert s.b_star == ("Left", "Right")
    assert s.is_product


def test_classify_no_absorption_is_vacuous_product():
    g = AbsorbingGame(
        actions_p1=("a", "b"),
        actions_p2=("c", "d"),
        reward=[[1.0, 2.0], [3.0, 4.0]],
        absorbing_states=(),
        absorbing_payoffs=[],
        absorption=np.zeros((2, 2, 0)),
    )
    s = classify(g)
    assert s.a_star == ()
    assert s.b_star == ()
    assert s.is_product


def test_classify_table3_not_product():
    # support {Top} x {L, M, R} union {Bottom} x {R} is not a product set
    s = classify(builtin_game("table3"))
    assert s.a_star == ("Top", "Bottom")
    assert s.b_star == ("Left", "Middle", "Right")
    assert not s.is_product


def test_classify_depends_only_on_support_pattern():
    g = builtin_game("table3")
    base = classify(g)
    for scale in (1.0, 0.37, 1e-9):
        scaled = AbsorbingGame(
            actions_p1=g.actions_p1,
            actions_p2=g.actions_p2,
            reward=g.reward,
            absorbing_states=g.absorbing_states,
            absorbing_payoffs=g.absorbing_payoffs,
            absorption=g.absorption * scale,
        )
        s = classify(scaled)
        assert s == base


def test_generalized_big_match_detection():
    assert is_generalized_big_match(builtin_game("big-match"))
    # third column never absorbs, so the opponent sets differ
    assert not is_generalized_big_match(builtin_game("modified-big-match"))
    assert not is_generalized_big_match(builtin_game("table3"))


@pytest.mark.parametrize("name", BUILTIN_GAMES)
def test_file_round_trip_bit_exact(name, tmp_path):
    g = builtin_game(name)
    path = tmp_path / f"{name}.json"
    save_game(g, path)
    back = load_game(path)
    assert back.same_game(g)
    assert resolve_game(str(path)).same_game(g)


def test_resolve_builtin_names():
    for name in BUILTIN_GAMES:
        assert resolve_game(name).same_game(builtin_game(name))
    with pytest.raises(ValueError):
        resolve_game("/nonexistent/path/game.json")


def test_to_dict_omits_zero_entries():
    d = game_to_dict(builtin_game("big-match"))
    assert d["absorption"][0][0] == {"1*": 1.0}
    assert d["absorption"][1][0] == {}
    assert d["reward"] == [[1.0, 0.0], [0.0, 1.0]]


def _valid_dict():
    return game_to_dict(builtin_game("big-match"))


def test_parser_rejects_negative_probability():
    d = _valid_dict()
    d["absorption"][0][0] = {"1*": -0.1}
    with pytest.raises(ValueError):
        game_from_dict(d)


def test_parser_rejects_probability_above_one():
    d = _valid_dict()
    d["absorption"][0][0] = {"1*": 1.2}
    with pytest.raises(ValueError):
        game_from_dict(d)


def test_parser_rejects_row_sum_above_one():
    d = _valid_dict()
    d["absorption"][0][0] = {"1*": 0.6, "0*": 0.6}
    with pytest.raises(ValueError):
        game_from_dict(d)


def test_parser_accepts_row_sum_within_tolerance():
    d = _valid_dict()
    d["absorption"][0][0] = {"1*": 0.5, "0*": 0.5 + 1e-13}
    game_from_dict(d)


def test_parser_rejects_unknown_absorbing_state():
    d = _valid_dict()
    d["absorption"][0][0] = {"2*": 1.0}
    with pytest.raises(ValueError):
        game_from_dict(d)


def test_parser_rejects_missing_field():
    d = _valid_dict()
    del d["reward"]
    with pytest.raises(ValueError):
        game_from_dict(d)


def test_constructor_rejects_bad_shapes():
    with pytest.raises(ValueError):
        AbsorbingGame(
            actions_p1=("a",),
            actions_p2=("b",),
            reward=[[1.0, 2.0]],
            absorbing_states=(),
            absorbing_payoffs=[],
            absorption=np.zeros((1, 2, 0)),
        )
    with pytest.raises(ValueError):
        AbsorbingGame(
            actions_p1=(),
            actions_p2=("b",),
            reward=np.zeros((0, 1)),
            absorbing_states=(),
            absorbing_payoffs=[],
            absorption=np.zeros((0, 1, 0)),
        )


def test_game_arrays_frozen():
    g = builtin_game("big-match")
    with pytest.raises(ValueError):
        g.reward[0, 0] = 5.0


def test_payoff_bounds_cover_absorbing_payoffs():
    g = builtin_game("table3")
    assert g.payoff_bounds == (0.0, 1.0)


@st.composite
def random_games(draw):
    na = draw(st.integers(1, 3))
    nb = draw(st.integers(1, 3))
    ns = draw(st.integers(0, 2))
    reals = st.floats(-5, 5, allow_nan=False)
    reward = draw(st.lists(st.lists(reals, min_size=nb, max_size=nb), min_size=na, max_size=na))
    payoffs = draw(st.lists(reals, min_size=ns, max_size=ns))
    kernel = np.zeros((na, nb, ns))
    if ns:
        raw = draw(
            st.lists(
                st.lists(
                    st.lists(st.floats(0, 1), min_size=ns, max_size=ns),
                    min_size=nb,
                    max_size=nb,
                ),
                min_size=na,
                max_size=na,
            )
        )
        kernel = np.asarray(raw)
        totals = kernel.sum(axis=2, keepdims=True)
        kernel = kernel / np.maximum(totals, 1.0)
    return AbsorbingGame(
        actions_p1=[f"r{i}" for i in range(na)],
        actions_p2=[f"c{j}" for j in range(nb)],
        reward=reward,
        absorbing_states=[f"s{t}" for t in range(ns)],
        absorbing_payoffs=payoffs,
        absorption=kernel,
    )


@settings(max_examples=60, deadline=None)
@given(random_games())
def test_dict_round_trip_property(g):
    back = game_from_dict(json.loads(json.dumps(game_to_dict(g))))
    assert back.same_game(g)


@settings(max_examples=60, deadline=None)
@given(random_games())
def test_classify_star_sets_property(g):
    s = classify(g)
    p = g.absorption_prob
    assert set(s.a_star) == {a for i, a in enumerate(g.actions_p1) if p[i].max() > 0}
    assert set(s.b_star) == {b for j, b in enumerate(g.actions_p2) if p[:, j].max() > 0}
    # product means the support is exactly the rectangle of starred pairs
    rect = {
        (a, b)
        for a in s.a_star
        for b in s.b_star
    }
    support = {
        (g.actions_p1[i], g.actions_p2[j])
        for i in range(g.n_p1)
        for j in range(g.n_p2)
        if p[i, j] > 0
    }
    assert s.is_product == (support == rect)

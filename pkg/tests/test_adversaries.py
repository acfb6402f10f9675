"""Certified counter-strategies, Poisson comparison, constant tuning, and the
numerical best-response search."""

import math

import numpy as np
import pytest

from absorbing_games import (
    Automaton,
    MarkovianStrategy,
    best_response_search,
    builtin_game,
    certified_blind_bound,
    certified_markovian_bound,
    coin_toss_automaton,
    counter_eps,
    eval_discounted,
    le_cam_max_deviation,
    simplex_grid,
    stationary_automaton,
    top_count_pgf,
    tune_counter_constants,
)


def markovian(prefix, tail):
    return MarkovianStrategy(actions_p1=("Top", "Bottom"), prefix=prefix, tail=tail)


def one_shot_top(p_start: float) -> Automaton:
    """Plays Top at stage 1 with probability p_start, then Bottom forever."""
    return Automaton(
        states=("first", "rest"),
        mu0=[p_start, 1.0 - p_start],
        transition=[[0.0, 1.0], [0.0, 1.0]],
        actions_p1=("Top", "Bottom"),
        action_map=[[1.0, 0.0], [0.0, 1.0]],
        autonomous=True,
    )


def test_markovian_bound_infinite_mass_case():
    b = certified_markovian_bound(markovian([[0.02, 0.98]], [0.1, 0.9]), c=0.85, q=0.05)
    assert b.certificate["case"] == "sum-infinite"
    assert b.bound == 0.0
    assert b.y.tolist() == [0.0, 1.0, 0.0]
    assert b.certificate["top_mass_sum"] == math.inf


def test_markovian_bound_large_mass_case():
    # one sure Top play: total mass 1 >= c, countered by pure Middle
    b = certified_markovian_bound(markovian([[1.0, 0.0]], [0.0, 1.0]), c=0.85, q=0.05)
    assert b.certificate["case"] == "sum-at-least-c"
    assert b.y.tolist() == [0.0, 1.0, 0.0]
    assert abs(b.bound - math.exp(-1.0)) <= 1e-15


def test_markovian_bound_small_mass_case():
    # never plays Top: bound collapses to the base payoff (1 - q) / 2
    b = certified_markovian_bound(markovian([], [0.0, 1.0]), c=0.85, q=0.05)
    assert b.certificate["case"] == "sum-below-c"
    assert abs(b.bound - 0.475) <= 1e-15
    assert b.y.tolist() == [0.05, 0.0, 0.95]
    assert b.certificate["poisson_term"] == 0.0

    # explicit mid-range value, frozen from the displayed formula
    m = markovian([[0.3, 0.7], [0.2, 0.8]], [0.0, 1.0])
    b2 = certified_markovian_bound(m, c=0.9, q=0.1)
    s = 0.5
    poisson_term = 1.0 - math.exp(-0.1 * s) + (0.1 * s) ** 2
    want = 0.45 + poisson_term * 0.55
    assert abs(b2.bound - want) <= 1e-15
    assert b2.certificate["top_mass_sum"] == 0.5


def test_markovian_bound_monotone_in_mass():
    bounds = []
    for s in (0.0, 0.2, 0.5, 0.85):
        m = markovian([[s, 1.0 - s]], [0.0, 1.0])
        bounds.append(certified_markovian_bound(m, c=0.9, q=0.1).bound)
    assert all(b2 > b1 for b1, b2 in zip(bounds, bounds[1:]))


def test_markovian_bound_constant_window():
    m = markovian([], [0.0, 1.0])
    for c in (math.log(2.0), 0.5, 1.0, 1.3):
        with pytest.raises(ValueError):
            certified_markovian_bound(m, c=c, q=0.1)
    for q in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            certified_markovian_bound(m, c=0.85, q=q)


def test_tuned_constants_frozen():
    c, q, eps_star = tune_counter_constants()
    assert (c, q) == (0.71, 0.1)
    assert abs(eps_star - 0.007263040670175691) <= 1e-15
    assert eps_star >= 0.002
    # the reported gap is the displayed min formula at (c, q)
    assert abs(eps_star - counter_eps(c, q)) <= 1e-15


def test_counter_eps_values():
    psi = math.exp(-0.08 * 0.8) * 1.08 / 2.0 - (0.08 * 0.8) ** 2
    want = min(psi - 0.5, 0.5 - math.exp(-0.8))
    got = counter_eps(0.8, 0.08)
    assert abs(got - want) <= 1e-15
    assert abs(got - 0.00242669974659393) <= 1e-12
    # q = 0 degenerates to the never-absorbing payoff 1/2 exactly
    assert abs((math.exp(0.0) * 1.0 / 2.0) - 0.5) <= 1e-15


def test_tuned_constants_dominate_small_mass_case():
    # the certified bound stays below 1/2 - eps_star across the whole
    # small-mass range, which is what makes the tuning sound
    c, q, eps_star = tune_counter_constants()
    for s in np.linspace(0.0, c - 1e-9, 200):
        poisson_term = 1.0 - math.exp(-q * s) + (q * s) ** 2
        bound = (1.0 - q) / 2.0 + poisson_term * (1.0 + q) / 2.0
        assert bound <= 0.5 - eps_star + 1e-12
    # and the large-mass case is covered by e^{-c} <= 1/2 - eps_star
    assert math.exp(-c) <= 0.5 - eps_star + 1e-15


def test_le_cam_single_bernoulli():
    # by hand: deviation at 0 is e^{-0.1} - 0.9, at 1 it is 0.1 (1 - e^{-0.1});
    # the latter is larger and stays below the classical bound 0.01
    want = 0.1 * (1.0 - math.exp(-0.1))
    got = le_cam_max_deviation([0.1], k_max=10)
    assert abs(got - want) <= 1e-15
    assert abs(got - 0.009516258196404032) <= 1e-15
    assert got <= 0.01


def test_le_cam_two_fair_coins():
    # exact pmf (1/4, 1/2, 1/4) vs Poisson(1): the peak gap is at one success
    want = 0.5 - math.exp(-1.0)
    got = le_cam_max_deviation([0.5, 0.5], k_max=10)
    assert abs(got - want) <= 1e-15
    assert abs(got - 0.13212055882855767) <= 1e-15
    assert got <= 0.5


def test_le_cam_zero_rates():
    assert le_cam_max_deviation([0.0, 0.0], k_max=5) == 0.0


@pytest.mark.parametrize("seed", range(10))
def test_le_cam_classical_bound(seed):
    rng = np.random.default_rng(seed)
    qs = rng.uniform(0.0, 0.5, size=int(rng.integers(1, 15)))
    got = le_cam_max_deviation(qs, k_max=30)
    assert got <= float((qs**2).sum()) + 1e-12


def test_le_cam_validation():
    with pytest.raises(ValueError):
        le_cam_max_deviation([], k_max=5)
    with pytest.raises(ValueError):
        le_cam_max_deviation([1.2], k_max=5)
    with pytest.raises(ValueError):
        le_cam_max_deviation([-0.1], k_max=5)
    with pytest.raises(ValueError):
        le_cam_max_deviation([0.5], k_max=-1)


def test_blind_bound_frequent_top():
    b = certified_blind_bound(one_shot_top(0.7), eps_inner=0.05)
    assert b.certificate["case"] == "frequent-top"
    assert abs(b.bound - 0.3) <= 1e-12
    assert b.y.tolist() == [0.0, 1.0, 0.0]
    # in the third-column game the counter is tight: Top absorbs at 0
    res = eval_discounted(builtin_game("table3"), one_shot_top(0.7), b.y, 1e-6)
    assert abs(res.gamma - 0.3) <= 1e-6

    sure = certified_blind_bound(stationary_automaton([1.0, 0.0], ("Top", "Bottom")), 0.05)
    assert sure.bound == 0.0


def test_blind_bound_rare_top():
    b = certified_blind_bound(one_shot_top(0.2), eps_inner=0.05)
    assert b.certificate["case"] == "rare-top"
    assert abs(b.bound - 0.2) <= 1e-12
    assert b.y.tolist() == [1.0, 0.0, 0.0]
    res = eval_discounted(builtin_game("table3"), one_shot_top(0.2), b.y, 1e-6)
    assert res.gamma <= b.bound + 1e-3

    never = certified_blind_bound(stationary_automaton([0.0, 1.0], ("Top", "Bottom")), 0.05)
    assert never.bound == 0.0


def test_blind_bound_balanced_top_frozen():
    b = certified_blind_bound(coin_toss_automaton(), eps_inner=0.05)
    cert = b.certificate
    assert cert["case"] == "balanced-top"
    assert abs(cert["p_ever_top"] - 0.5) <= 1e-12
    # half the never-top mass is already revealed at stage 1
    assert cert["horizon"] == 1
    assert abs(cert["eta"] - 0.05) <= 1e-15
    assert abs(b.bound - (1.0 / 3.0 + 0.05)) <= 1e-15
    assert np.allclose(b.y, [0.0, 0.95, 0.05], atol=1e-15)
    res = eval_discounted(builtin_game("table3"), coin_toss_automaton(), b.y, 1e-6)
    assert res.gamma <= b.bound + 1e-3


def test_blind_bound_validation():
    with pytest.raises(ValueError):
        certified_blind_bound(coin_toss_automaton(), eps_inner=0.0)
    reactive = Automaton(
        states=("u",),
        mu0=[1.0],
        transition=np.ones((1, 2, 3, 1)),
        actions_p1=("Top", "Bottom"),
        action_map=[[0.5, 0.5]],
        autonomous=False,
        actions_p2=("Left", "Middle", "Right"),
    )
    with pytest.raises(ValueError):
        certified_blind_bound(reactive, eps_inner=0.05)


def test_simplex_grid_structure():
    g = simplex_grid(3, 0.5)
    assert g.shape == (6, 3)
    assert np.allclose(g.sum(axis=1), 1.0, atol=1e-15)
    assert np.all(g >= 0.0)
    rows = [tuple(r) for r in g]
    assert rows == sorted(rows)
    assert simplex_grid(2, 0.02).shape == (51, 2)
    with pytest.raises(ValueError):
        simplex_grid(3, 0.0)
    with pytest.raises(ValueError):
        simplex_grid(3, 0.7)


def test_best_response_pins_always_bottom():
    g = builtin_game("big-match")
    y, gamma = best_response_search(
        g, stationary_automaton([0.0, 1.0], g.actions_p1), lam=0.1
    )
    assert y.tolist() == [1.0, 0.0]
    assert gamma == 0.0


def test_best_response_cannot_break_coin_toss_guarantee():
    g = builtin_game("modified-big-match")
    y, gamma = best_response_search(g, coin_toss_automaton(), lam=1e-5)
    assert gamma >= 0.5 - 1e-2


@pytest.mark.parametrize("seed", range(4))
def test_best_response_beats_pure_columns(seed):
    rng = np.random.default_rng(seed)
    g = builtin_game("table3")
    f = rng.dirichlet(np.ones(2), size=2)
    sigma = Automaton(
        states=("u", "v"),
        mu0=rng.dirichlet(np.ones(2)),
        transition=rng.dirichlet(np.ones(2), size=2),
        actions_p1=("Top", "Bottom"),
        action_map=f,
        autonomous=True,
    )
    y, gamma = best_response_search(g, sigma, lam=0.1)
    for j in range(3):
        pure = np.eye(3)[j]
        assert gamma <= eval_discounted(g, sigma, pure, 0.1).gamma + 1e-9


def test_best_response_tie_breaks_lexicographically():
    # all opponents give payoff exactly 0.0, so every candidate ties bit-for-
    # bit and the lexicographically smallest mixture must be reported
    flat = type(builtin_game("big-match"))(
        actions_p1=("a", "b"),
        actions_p2=("c", "d", "e"),
        reward=np.zeros((2, 3)),
        absorbing_states=(),
        absorbing_payoffs=[],
        absorption=np.zeros((2, 3, 0)),
    )
    sigma = stationary_automaton([0.5, 0.5], ("a", "b"))
    y, gamma = best_response_search(flat, sigma, lam=0.2)
    assert y.tolist() == [0.0, 0.0, 1.0]
    assert gamma == 0.0

"""Discounted values, the optimal-profile accessor, sweeps, and the limit
one-shot payoff functional."""

import numpy as np
import pytest

from absorbing_games import (
    AbsorbingGame,
    LimitValueAction,
    LimitValueResponse,
    auxiliary_matrix,
    builtin_game,
    discounted_value,
    limit_game_payoff,
    limit_value_estimate,
    optimal_strategy_profile,
    solve_matrix_game,
    stationary_discounted_payoff,
)

ALL_LAMBDAS = (0.5, 0.1, 0.01, 1e-4, 1e-6)


def constant_absorbing_game(c: float) -> AbsorbingGame:
    """Every cell absorbs immediately at payoff c, so v_lam = c for all lam."""
    return AbsorbingGame(
        actions_p1=("a1", "a2"),
        actions_p2=("b1", "b2"),
        reward=np.full((2, 2), c),
        absorbing_states=("c*",),
        absorbing_payoffs=[c],
        absorption=np.ones((2, 2, 1)),
    )


@pytest.mark.parametrize("lam", ALL_LAMBDAS)
def test_big_match_value_half(lam):
    sol = discounted_value(builtin_game("big-match"), lam)
    assert abs(sol.value - 0.5) <= 1e-8
    assert sol.residual <= 1e-10


@pytest.mark.parametrize("lam", ALL_LAMBDAS)
def test_modified_big_match_value_half(lam):
    sol = discounted_value(builtin_game("modified-big-match"), lam)
    assert abs(sol.value - 0.5) <= 1e-8


@pytest.mark.parametrize("lam", (0.5, 0.01, 1e-4))
def test_table3_value_half(lam):
    sol = discounted_value(builtin_game("table3"), lam)
    assert abs(sol.value - 0.5) <= 1e-8


@pytest.mark.parametrize("lam,expected", [(0.5, 1.0 / 3.0), (0.01, 0.01 / 1.01)])
def test_big_match_top_weight(lam, expected):
    # the optimal row mixture puts weight lam / (1 + lam) on the absorbing row
    x, y = optimal_strategy_profile(builtin_game("big-match"), lam)
    assert abs(x[0] - expected) <= 1e-9
    assert abs(y.sum() - 1.0) <= 1e-12


@pytest.mark.parametrize("c", [-1.0, 0.0, 2.5])
@pytest.mark.parametrize("lam", (0.5, 1e-4))
def test_constant_absorbing_game(c, lam):
    sol = discounted_value(constant_absorbing_game(c), lam)
    assert abs(sol.value - c) <= 1e-8


def test_lambda_validation():
    g = builtin_game("big-match")
    for lam in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            discounted_value(g, lam)
    with pytest.raises(ValueError):
        discounted_value(g, 0.5, tol=0.0)


def test_fixed_point_residual_certifies_value():
    # at the returned v, the auxiliary matrix game's value is v again
    g = builtin_game("modified-big-match")
    sol = discounted_value(g, 0.1)
    aux = solve_matrix_game(auxiliary_matrix(g, 0.1, sol.value))
    assert abs(aux.value - sol.value) <= 1e-9


@pytest.mark.parametrize("name", ["big-match", "modified-big-match", "table3"])
@pytest.mark.parametrize("lam", (0.3, 0.05))
def test_optimal_profile_payoff_matches_value(name, lam):
    g = builtin_game(name)
    sol = discounted_value(g, lam)
    payoff = stationary_discounted_payoff(g, sol.x_opt, sol.y_opt, lam)
    assert abs(payoff - sol.value) <= 1e-7


@pytest.mark.parametrize("seed", range(8))
def test_value_inside_payoff_bounds(seed):
    rng = np.random.default_rng(seed)
    na, nb, ns = rng.integers(1, 4), rng.integers(1, 4), rng.integers(1, 3)
    kernel = rng.uniform(0, 1, (na, nb, ns))
    kernel /= np.maximum(kernel.sum(axis=2, keepdims=True), 1.0) * rng.uniform(1.0, 3.0)
    g = AbsorbingGame(
        actions_p1=[f"r{i}" for i in range(na)],
        actions_p2=[f"c{j}" for j in range(nb)],
        reward=rng.uniform(-2, 2, (na, nb)),
        absorbing_states=[f"s{t}" for t in range(ns)],
        absorbing_payoffs=rng.uniform(-2, 2, ns),
        absorption=kernel,
    )
    lo, hi = g.payoff_bounds
    for lam in (0.7, 0.05):
        sol = discounted_value(g, lam)
        assert lo - 1e-9 <= sol.value <= hi + 1e-9
        assert sol.residual <= 1e-10


def test_limit_value_estimate_plateau():
    sweep = limit_value_estimate(builtin_game("big-match"), (1e-2, 1e-3, 1e-4, 1e-5))
    assert sweep.lambdas == (1e-2, 1e-3, 1e-4, 1e-5)
    assert all(abs(v - 0.5) <= 1e-8 for v in sweep.values)
    assert sweep.value == sweep.values[-1]

    sweep3 = limit_value_estimate(builtin_game("table3"), (1e-2, 1e-3, 1e-4))
    assert all(abs(v - 0.5) <= 1e-8 for v in sweep3.values)

    const = limit_value_estimate(constant_absorbing_game(0.25), (0.5, 0.1, 0.01))
    assert all(abs(v - 0.25) <= 1e-8 for v in const.values)


def test_limit_value_estimate_grid_validation():
    g = builtin_game("big-match")
    with pytest.raises(ValueError):
        limit_value_estimate(g, (0.1, 0.01))
    with pytest.raises(ValueError):
        limit_value_estimate(g, (0.1, 0.1, 0.01))
    with pytest.raises(ValueError):
        limit_value_estimate(g, (0.01, 0.1, 0.001))


def test_limit_payoff_without_intensities_is_one_shot():
    g = builtin_game("modified-big-match")
    x = np.array([0.3, 0.7])
    y = np.array([0.2, 0.5, 0.3])
    got = limit_game_payoff(
        g,
        LimitValueAction(x=x, alpha=np.zeros(2)),
        LimitValueResponse(y=y, beta=np.zeros(3)),
    )
    assert abs(got - float(x @ g.reward @ y)) <= 1e-12


def test_limit_payoff_big_match_bottom_with_top_intensity():
    g = builtin_game("big-match")
    p1 = LimitValueAction(x=np.array([0.0, 1.0]), alpha=np.array([1.0, 0.0]))
    for y in ([1.0, 0.0], [0.0, 1.0]):
        got = limit_game_payoff(g, p1, LimitValueResponse(y=np.array(y), beta=np.zeros(2)))
        assert abs(got - 0.5) <= 1e-12


def test_limit_payoff_intensity_ratio_increases_to_one():
    # against Left, intensity n on the absorbing row pays n / (1 + n)
    g = builtin_game("big-match")
    left = LimitValueResponse(y=np.array([1.0, 0.0]), beta=np.zeros(2))
    prev = -1.0
    for n in (1.0, 10.0, 100.0, 1000.0):
        p1 = LimitValueAction(x=np.array([0.0, 1.0]), alpha=np.array([n, 0.0]))
        got = limit_game_payoff(g, p1, left)
        assert abs(got - n / (1.0 + n)) <= 1e-15
        assert got > prev
        prev = got
    assert prev > 0.999


def test_limit_payoff_validates_inputs():
    g = builtin_game("big-match")
    with pytest.raises(ValueError):
        limit_game_payoff(
            g,
            LimitValueAction(x=np.array([0.4, 0.4]), alpha=np.zeros(2)),
            LimitValueResponse(y=np.array([1.0, 0.0]), beta=np.zeros(2)),
        )
    with pytest.raises(ValueError):
        limit_game_payoff(
            g,
            LimitValueAction(x=np.array([0.5, 0.5]), alpha=np.array([-1.0, 0.0])),
            LimitValueResponse(y=np.array([1.0, 0.0]), beta=np.zeros(2)),
        )

"""Exact evaluation of automaton strategies against stationary opponents.

Against a stationary y the pair (internal state, not-yet-absorbed) is a
Markov chain, so the discounted payoff solves a K-dimensional linear system

    W = lam rbar + (1 - lam) (gbar + Q W)

where rbar, gbar average the stage reward and absorbing payoff mass over
f(k) and y, and Q(k, k') is the survival-weighted internal transition.  The
system matrix I - (1 - lam) Q has spectral radius bound (1 - lam) < 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .games import AbsorbingGame, a_star_indices
from .strategies import Automaton, TwoPhaseStrategy

SERIES_DOUBLINGS = 60


def _check_compatible(game: AbsorbingGame, sigma: Automaton) -> None:
    if sigma.actions_p1 != game.actions_p1:
        raise ValueError(
            f"automaton actions {sigma.actions_p1!r} do not match game actions {game.actions_p1!r}"
        )
    if not sigma.autonomous and sigma.actions_p2 != game.actions_p2:
        raise ValueError("automaton opponent actions do not match the game")


def _check_y(game: AbsorbingGame, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (game.n_p2,):
        raise ValueError(f"y must have shape {(game.n_p2,)}, got {y.shape}")
    if np.any(y < 0.0) or abs(y.sum() - 1.0) > 1e-9:
        raise ValueError("y must be a probability distribution")
    return y


def _chain_parts(
    game: AbsorbingGame, sigma: Automaton, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-state reward, absorbing mass, absorption probability, and the
    survival-weighted internal kernel Q."""
    f = sigma.action_map
    rbar = f @ game.reward @ y
    gbar = f @ game.absorption_value @ y
    pbar = f @ game.absorption_prob @ y
    survive = 1.0 - game.absorption_prob
    if sigma.autonomous:
        stay = f @ survive @ y
        q = stay[:, None] * sigma.transition
    else:
        q = np.einsum("ka,b,ab,kabj->kj", f, y, survive, sigma.transition)
    return rbar, gbar, pbar, q


@dataclass(frozen=True)
class EvalResult:
    gamma: float
    states: tuple[str, ...]
    state_values: np.ndarray
    absorb_prob: float
    terminal_mean: float

    @property
    def per_state(self) -> dict[str, float]:
        return dict(zip(self.states, map(float, self.state_values)))


def eval_discounted(game: AbsorbingGame, sigma: Automaton, y, lam: float) -> EvalResult:
    """Exact discounted payoff of the automaton against stationary y."""
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"discount rate must lie in (0, 1), got {lam}")
    _check_compatible(game, sigma)
    y = _check_y(game, y)
    rbar, gbar, pbar, q = _chain_parts(game, sigma, y)
    k = sigma.size
    w = np.linalg.solve(np.eye(k) - (1.0 - lam) * q, lam * rbar + (1.0 - lam) * gbar)

    # absorption probability and conditional terminal payoff via the series
    # sum_t Q^t v, accumulated by repeated squaring of the survival kernel
    u = pbar.copy()
    g = gbar.copy()
    m = q.copy()
    for _ in range(SERIES_DOUBLINGS):
        du = m @ u
        dg = m @ g
        u = u + du
        g = g + dg
        m = m @ m
        if max(np.abs(du).max(initial=0.0), np.abs(dg).max(initial=0.0)) <= 1e-15:
            break
    absorb = float(np.clip(sigma.mu0 @ u, 0.0, 1.0))
    terminal_total = float(sigma.mu0 @ g)
    terminal_mean = terminal_total / absorb if absorb > 1e-15 else 0.0

    return EvalResult(
        gamma=float(sigma.mu0 @ w),
        states=sigma.states,
        state_values=w,
        absorb_prob=absorb,
        terminal_mean=terminal_mean,
    )


def eval_discounted_batch(
    game: AbsorbingGame, sigma: Automaton, ys: np.ndarray, lam: float
) -> np.ndarray:
    """Discounted payoff against each row of ys, vectorized over opponents."""
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"discount rate must lie in (0, 1), got {lam}")
    _check_compatible(game, sigma)
    ys = np.asarray(ys, dtype=float)
    if ys.ndim != 2 or ys.shape[1] != game.n_p2:
        raise ValueError(f"ys must have shape (n, {game.n_p2})")
    f = sigma.action_map
    rbar = ys @ (f @ game.reward).T
    gbar = ys @ (f @ game.absorption_value).T
    survive = 1.0 - game.absorption_prob
    if sigma.autonomous:
        stay = ys @ (f @ survive).T
        q = stay[:, :, None] * sigma.transition[None, :, :]
    else:
        q = np.einsum("ka,nb,ab,kabj->nkj", f, ys, survive, sigma.transition)
    k = sigma.size
    lhs = np.eye(k)[None, :, :] - (1.0 - lam) * q
    rhs = lam * rbar + (1.0 - lam) * gbar
    w = np.linalg.solve(lhs, rhs[:, :, None])[:, :, 0]
    return w @ sigma.mu0


@dataclass(frozen=True)
class EvalSweep:
    """Discounted payoffs along a decreasing grid; `value` is the entry at
    the smallest rate, the limit diagnostic."""

    lambdas: tuple[float, ...]
    gammas: tuple[float, ...]

    @property
    def value(self) -> float:
        return self.gammas[-1]


def eval_limit(
    game: AbsorbingGame,
    sigma: Automaton,
    y,
    lambda_grid=(1e-2, 1e-4, 1e-6),
) -> EvalSweep:
    grid = [float(l) for l in lambda_grid]
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda_grid must be strictly decreasing")
    if grid[-1] > 1e-6:
        raise ValueError("lambda_grid must reach 1e-6 or below")
    gammas = tuple(eval_discounted(game, sigma, y, lam).gamma for lam in grid)
    return EvalSweep(lambdas=tuple(grid), gammas=gammas)


def stationary_discounted_payoff(game: AbsorbingGame, x, y, lam: float) -> float:
    """Closed form for stationary versus stationary:

        (lam r(x, y) + (1 - lam) g(x, y)) / (1 - (1 - lam)(1 - p(x, y)))
    """
    lam = float(lam)
    x = np.asarray(x, dtype=float)
    y = _check_y(game, y)
    r = x @ game.reward @ y
    g = x @ game.absorption_value @ y
    p = x @ game.absorption_prob @ y
    return float((lam * r + (1.0 - lam) * g) / (1.0 - (1.0 - lam) * (1.0 - p)))


def blind_limit_payoff_formula(pgf: Callable[[float], float], y) -> float:
    """Limit payoff of a blind strategy in the 2x3 game with columns
    (Left, Middle, Right), rows absorbing against Left and Middle only:

        (1 - E) y(L) / (y(L) + y(M)) + E (y(M) + y(R) / 2),  E = pgf(y(R)),

    with the y(R) = 1 case continuing to 1/2 by convention."""
    y = np.asarray(y, dtype=float)
    if y.shape != (3,):
        raise ValueError("formula applies to 3-column opponents")
    yl, ym, yr = (float(v) for v in y)
    if yl + ym <= 0.0:
        return 0.5
    e = float(pgf(yr))
    return (1.0 - e) * yl / (yl + ym) + e * (ym + 0.5 * yr)


def switch_survival_identity(
    game: AbsorbingGame, strategy: TwoPhaseStrategy, y
) -> tuple[float, float]:
    """Probability of surviving the whole probe phase, two ways.

    lhs sums the geometric series E[(1 - p(x_alpha, y))^D] with D the
    Geometric(delta) switch time; rhs is the closed form
    1 / (1 + p(alpha, y)).  They agree to machine precision."""
    if strategy.kind != "two-phase":
        raise ValueError("identity applies to two-phase strategies")
    y = _check_y(game, y)
    astar = a_star_indices(game)
    off = np.ones(game.n_p1, dtype=bool)
    off[astar] = False
    if np.any(strategy.x_alpha[off] > 0.0):
        raise ValueError("x_alpha must be supported on absorbing rows")
    p = float(strategy.x_alpha @ game.absorption_prob @ y)
    delta = strategy.delta
    ratio = (1.0 - delta) * (1.0 - p)
    term = delta
    total = 0.0
    while term / (1.0 - ratio) > 1e-17:
        total += term
        term *= ratio
    rhs = 1.0 / (1.0 + strategy.alpha_bar * p)
    return total, rhs

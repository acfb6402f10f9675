"""Discounted values of absorbing games and the limit one-shot payoff.

The discounted value solves a one-dimensional fixed point: v is the value of
the auxiliary matrix game

    M_lam(v)[a, b] = lam r(a, b) + (1 - lam) (g(a, b) + (1 - p(a, b)) v)

where p is the total absorption probability and g the expected absorbing
payoff mass.  The map w(v) = val(M_lam(v)) - v is strictly decreasing with
slope at most -lam, so bisection with the bracket [min payoff, max payoff]
converges and |w(v)| <= lam * tol certifies |v - v_lam| <= tol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import AbsorbingGame
from .matrix import MatrixGameSolution, solve_matrix_game

MAX_BISECTION_STEPS = 200


@dataclass(frozen=True)
class DiscountedSolution:
    lam: float
    value: float
    x_opt: np.ndarray
    y_opt: np.ndarray
    residual: float


def auxiliary_matrix(game: AbsorbingGame, lam: float, v: float) -> np.ndarray:
    cont = game.absorption_value + (1.0 - game.absorption_prob) * v
    return lam * game.reward + (1.0 - lam) * cont


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"discount rate must lie in (0, 1), got {lam}")
    return lam


def discounted_value(game: AbsorbingGame, lam: float, tol: float = 1e-10) -> DiscountedSolution:
    """Bisection on w(v) = val(M_lam(v)) - v.

    Stops when |w| <= lam * tol or the bracket width drops below tol; either
    certifies the returned value within tol of the exact discounted value,
    and the reported residual |w(value)| is then at most tol.
    """
    lam = _check_lambda(lam)
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lo, hi = game.payoff_bounds

    def step(v: float) -> tuple[MatrixGameSolution, float]:
        sol = solve_matrix_game(auxiliary_matrix(game, lam, v))
        return sol, sol.value - v

    if hi - lo <= tol:
        mid = 0.5 * (lo + hi)
        sol, w = step(mid)
        return DiscountedSolution(lam=lam, value=mid, x_opt=sol.x_opt, y_opt=sol.y_opt, residual=abs(w))

    mid = 0.5 * (lo + hi)
    sol, w = step(mid)
    for _ in range(MAX_BISECTION_STEPS):
        if abs(w) <= lam * tol or hi - lo <= tol:
            break
        if w > 0.0:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        sol, w = step(mid)
    return DiscountedSolution(lam=lam, value=mid, x_opt=sol.x_opt, y_opt=sol.y_opt, residual=abs(w))


def optimal_strategy_profile(
    game: AbsorbingGame, lam: float, tol: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    sol = discounted_value(game, lam, tol=tol)
    return sol.x_opt, sol.y_opt


@dataclass(frozen=True)
class ValueSweep:
    """Discounted values along a decreasing discount grid; `value` is the
    entry at the smallest rate, the plateau diagnostic for the limit."""

    lambdas: tuple[float, ...]
    values: tuple[float, ...]
    residuals: tuple[float, ...]

    @property
    def value(self) -> float:
        return self.values[-1]


def limit_value_estimate(game: AbsorbingGame, lambda_grid, tol: float = 1e-10) -> ValueSweep:
    grid = [_check_lambda(l) for l in lambda_grid]
    if len(grid) < 3:
        raise ValueError("lambda_grid needs at least 3 points")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda_grid must be strictly decreasing")
    sols = [discounted_value(game, lam, tol=tol) for lam in grid]
    return ValueSweep(
        lambdas=tuple(grid),
        values=tuple(s.value for s in sols),
        residuals=tuple(s.residual for s in sols),
    )


def _distribution(vec, n: int, what: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"{what} must have shape {(n,)}, got {v.shape}")
    if np.any(v < 0.0) or abs(v.sum() - 1.0) > 1e-9:
        raise ValueError(f"{what} must be a probability distribution")
    return v


def _intensity(vec, n: int, what: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"{what} must have shape {(n,)}, got {v.shape}")
    if not np.all(np.isfinite(v)) or np.any(v < 0.0):
        raise ValueError(f"{what} must be finite and nonnegative")
    return v


@dataclass(frozen=True)
class LimitValueAction:
    """Mixed action x plus a nonnegative absorption intensity vector alpha."""

    x: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class LimitValueResponse:
    y: np.ndarray
    beta: np.ndarray


def limit_game_payoff(
    game: AbsorbingGame, p1: LimitValueAction, p2: LimitValueResponse
) -> float:
    """Payoff of the one-shot game whose value is the limit of v_lam:

        (r(x, y) + g(alpha, y) + g(x, beta)) / (1 + p(alpha, y) + p(x, beta))

    with r, g, p extended bilinearly; alpha and beta range over nonnegative
    vectors, not distributions.
    """
    x = _distribution(p1.x, game.n_p1, "x")
    alpha = _intensity(p1.alpha, game.n_p1, "alpha")
    y = _distribution(p2.y, game.n_p2, "y")
    beta = _intensity(p2.beta, game.n_p2, "beta")
    r, g, p = game.reward, game.absorption_value, game.absorption_prob
    num = x @ r @ y + alpha @ g @ y + x @ g @ beta
    den = 1.0 + alpha @ p @ y + x @ p @ beta
    return float(num / den)

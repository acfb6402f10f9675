"""Monte Carlo play of an absorbing game under an automaton strategy and a
stationary opponent.

Sampling is stage-major and vectorized across plays.  Each stage consumes
uniforms in a fixed order (player-1 actions, player-2 actions, absorption,
then internal transitions for the surviving plays only), so results are
reproducible bit for bit from the seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evaluate import _check_compatible, _check_y
from .games import AbsorbingGame
from .strategies import Automaton

TRUNCATION_MASS = 1e-10


@dataclass(frozen=True)
class SimReport:
    n_plays: int
    lam: float
    mean: float
    std_error: float
    absorb_freq: float
    horizon: int
    seed: int


def default_horizon(lam: float) -> int:
    """Stage count after which the undiscounted tail weight drops below
    TRUNCATION_MASS, biasing the estimate by at most that times the payoff
    range."""
    return max(1, math.ceil(math.log(TRUNCATION_MASS) / math.log1p(-lam)))


def _sample_rows(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Categorical sample per row of probs from matching uniforms."""
    cum = np.cumsum(probs, axis=1)
    return (cum <= u[:, None]).sum(axis=1).astype(np.intp)


def simulate(
    game: AbsorbingGame,
    sigma: Automaton,
    y,
    lam: float,
    n_plays: int = 10_000,
    seed: int = 0,
    horizon: int | None = None,
) -> SimReport:
    """Estimate the discounted payoff of sigma against the stationary mix y
    from n_plays independent plays."""
    _check_compatible(game, sigma)
    y = _check_y(game, y)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"discount rate must lie in (0, 1), got {lam}")
    if n_plays < 1:
        raise ValueError("n_plays must be positive")
    if horizon is None:
        horizon = default_horizon(lam)
    if horizon < 1:
        raise ValueError("horizon must be positive")

    rng = np.random.default_rng(seed)
    f = sigma.action_map
    y_cum = np.cumsum(y)
    star = np.asarray(game.absorbing_payoffs)
    absorb_cum = np.cumsum(game.absorption, axis=2)
    pstar = game.absorption_prob

    payoff = np.zeros(n_plays)
    alive = np.arange(n_plays)
    k = _sample_rows(np.broadcast_to(sigma.mu0, (n_plays, sigma.size)), rng.random(n_plays))
    discount = 1.0
    for _ in range(horizon):
        n = alive.size
        if n == 0:
            break
        a = _sample_rows(f[k], rng.random(n))
        b = (y_cum <= rng.random(n)[:, None]).sum(axis=1).astype(np.intp)
        payoff[alive] += lam * discount * game.reward[a, b]
        u = rng.random(n)
        absorbed = u < pstar[a, b]
        if absorbed.any():
            which = (absorb_cum[a[absorbed], b[absorbed]] <= u[absorbed, None]).sum(axis=1)
            payoff[alive[absorbed]] += discount * (1.0 - lam) * star[which]
        survived = ~absorbed
        k = k[survived]
        if k.size:
            if sigma.autonomous:
                rows = sigma.transition[k]
            else:
                rows = sigma.transition[k, a[survived], b[survived]]
            k = _sample_rows(rows, rng.random(k.size))
        alive = alive[survived]
        discount *= 1.0 - lam

    mean = float(payoff.mean())
    std_error = float(payoff.std(ddof=1) / math.sqrt(n_plays)) if n_plays > 1 else 0.0
    return SimReport(
        n_plays=n_plays,
        lam=lam,
        mean=mean,
        std_error=std_error,
        absorb_freq=float(1.0 - alive.size / n_plays),
        horizon=horizon,
        seed=seed,
    )


def sample_top_counts(
    sigma: Automaton,
    top_set,
    n_plays: int = 10_000,
    horizon: int = 200,
    seed: int = 0,
) -> np.ndarray:
    """Sample, per play, how many of the first `horizon` stages an autonomous
    automaton emits an action from top_set; lets tests compare the empirical
    law against the closed-form transform."""
    if not sigma.autonomous:
        raise ValueError("counting plays requires an autonomous automaton")
    top = sigma.top_mass(top_set)
    rng = np.random.default_rng(seed)
    k = _sample_rows(np.broadcast_to(sigma.mu0, (n_plays, sigma.size)), rng.random(n_plays))
    counts = np.zeros(n_plays, dtype=np.int64)
    for _ in range(horizon):
        counts += rng.random(n_plays) < top[k]
        k = _sample_rows(sigma.transition[k], rng.random(n_plays))
    return counts

"""Opponent search and certified counter-strategies.

Two kinds of output live here.  `best_response_search` is a numerical
minimizer over stationary opponents (grid, pure, structured families, local
polish), useful against any automaton.  The `certified_*` routines return a
stationary opponent together with a closed-form upper bound on the limit
payoff, computed from certificate terms only, never from simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import poisson

from .evaluate import eval_discounted, eval_discounted_batch
from .games import AbsorbingGame
from .strategies import Automaton, MarkovianStrategy, top_count_pgf

LN2 = math.log(2.0)
POLISH_MIN_STEP = 1e-6
FIRST_TOP_CAP = 100_000


@dataclass(frozen=True)
class CertifiedBound:
    """Stationary opponent plus a proved upper bound on the limit payoff."""

    y: np.ndarray
    bound: float
    certificate: dict


def simplex_grid(n_coords: int, mesh: float) -> np.ndarray:
    """All points of the n-simplex with coordinates that are multiples of
    roughly `mesh` (denominators round(1 / mesh)), in lexicographic order."""
    if not 0.0 < mesh <= 0.5:
        raise ValueError("mesh must lie in (0, 0.5]")
    n = max(1, round(1.0 / mesh))
    points = []
    # compositions of n into n_coords parts via bars-and-stars
    for bars in combinations(range(n + n_coords - 1), n_coords - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(n + n_coords - 2 - prev)
        points.append(parts)
    return np.asarray(points, dtype=float) / n


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    for u, v in zip(a, b):
        if u != v:
            return u < v
    return False


def best_response_search(
    game: AbsorbingGame,
    sigma: Automaton,
    lam: float,
    grid_step: float = 0.02,
) -> tuple[np.ndarray, float]:
    """Approximate minimizer of the discounted payoff over stationary
    opponents: simplex grid plus pure strategies plus, for 3-column games,
    the one-parameter families (0, 1-q, q), (1-q, 0, q), (q, 0, 1-q), then
    coordinate-descent polish with step halving down to 1e-6.  Ties break
    toward the lexicographically smallest opponent."""
    nb = game.n_p2
    candidates = [simplex_grid(nb, grid_step), np.eye(nb)]
    if nb == 3:
        n = max(1, round(1.0 / grid_step))
        qs = np.arange(n + 1) / n
        zero = np.zeros_like(qs)
        candidates.append(np.column_stack([zero, 1.0 - qs, qs]))
        candidates.append(np.column_stack([1.0 - qs, zero, qs]))
        candidates.append(np.column_stack([qs, zero, 1.0 - qs]))
    pool = np.vstack(candidates)

    gammas = eval_discounted_batch(game, sigma, pool, lam)
    best = int(np.argmin(gammas))
    best_y, best_gamma = pool[best].copy(), float(gammas[best])
    for i in range(pool.shape[0]):
        if gammas[i] == best_gamma and _lex_less(pool[i], best_y):
            best_y = pool[i].copy()

    step = float(grid_step)
    while step >= POLISH_MIN_STEP:
        moves = []
        for i in range(nb):
            for j in range(nb):
                if i == j or best_y[j] < step:
                    continue
                cand = best_y.copy()
                cand[i] += step
                cand[j] -= step
                moves.append(cand)
        if moves:
            moves = np.asarray(moves)
            vals = eval_discounted_batch(game, sigma, moves, lam)
            k = int(np.argmin(vals))
            if vals[k] < best_gamma:
                best_y, best_gamma = moves[k].copy(), float(vals[k])
                continue
        step /= 2.0
    return best_y, best_gamma


def counter_eps(c: float, q: float) -> float:
    """Guaranteed gap below 1/2 for the Markovian counter-strategy run with
    constants (c, q): the minimum of psi(c, q) - 1/2 and 1/2 - e^{-c}, where
    psi(c, q) = e^{-qc} (1 + q) / 2 - q^2 c^2."""
    psi = math.exp(-q * c) * (1.0 + q) / 2.0 - (q * c) ** 2
    return min(psi - 0.5, 0.5 - math.exp(-c))


def tune_counter_constants() -> tuple[float, float, float]:
    """Grid-search (c, q) maximizing the certified gap; the window
    ln 2 < c < 1 is forced by the two cases of the certificate."""
    c_vals = np.array([i / 100.0 for i in range(70, 100)])
    q_vals = np.array([j / 200.0 for j in range(1, 101)])
    psi = np.exp(-np.outer(q_vals, c_vals)) * ((1.0 + q_vals) / 2.0)[:, None]
    psi = psi - np.outer(q_vals, c_vals) ** 2
    gap = np.minimum(psi - 0.5, 0.5 - np.exp(-c_vals)[None, :])
    j, i = np.unravel_index(int(np.argmax(gap)), gap.shape)
    eps_star = float(gap[j, i])
    if eps_star <= 0.0:
        raise ArithmeticError("no positive certified gap on the constant grid")
    return float(c_vals[i]), float(q_vals[j]), eps_star


def certified_markovian_bound(
    m: MarkovianStrategy, c: float, q: float, top: str = "Top"
) -> CertifiedBound:
    """Counter a Markovian strategy in the 2x3 game whose first two columns
    absorb against `top` (payoffs 1 and 0) and whose safe row pays (0, 1, 1/2).

    Let s be the total probability mass the strategy ever puts on `top`.
    Large s (>= c, or infinite) is punished by the pure Middle column: the
    payoff is the probability of never playing top, at most e^{-s}.  Small s
    is punished by mass q on Left and 1 - q on Right: absorption then needs
    a simultaneous (top, Left), and the Poisson comparison bounds its
    probability by 1 - e^{-qs} + (qs)^2."""
    c = float(c)
    q = float(q)
    if not LN2 < c < 1.0:
        raise ValueError(f"c must lie in (ln 2, 1), got {c}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    prefix_probs, tail_prob = m.action_probabilities(top)
    finite_sum = float(prefix_probs.sum())

    if tail_prob > 0.0:
        y = np.array([0.0, 1.0, 0.0])
        certificate = {
            "case": "sum-infinite",
            "top_mass_sum": math.inf,
            "c": c,
            "q": q,
        }
        return CertifiedBound(y=y, bound=0.0, certificate=certificate)

    if finite_sum >= c:
        y = np.array([0.0, 1.0, 0.0])
        bound = math.exp(-min(finite_sum, 745.0))
        certificate = {
            "case": "sum-at-least-c",
            "top_mass_sum": finite_sum,
            "c": c,
            "q": q,
            "never_top_bound": bound,
        }
        return CertifiedBound(y=y, bound=bound, certificate=certificate)

    s = finite_sum
    poisson_term = 1.0 - math.exp(-q * s) + (q * s) ** 2
    bound = (1.0 - q) / 2.0 + poisson_term * (1.0 + q) / 2.0
    y = np.array([q, 0.0, 1.0 - q])
    certificate = {
        "case": "sum-below-c",
        "top_mass_sum": s,
        "c": c,
        "q": q,
        "poisson_term": poisson_term,
        "base_payoff": (1.0 - q) / 2.0,
        "absorb_weight": (1.0 + q) / 2.0,
        # classical single-weight variant, kept for comparison only
        "phi_reference": math.exp(-q * s) * (0.5 + q) - (q * s) ** 2,
    }
    return CertifiedBound(y=y, bound=bound, certificate=certificate)


def le_cam_max_deviation(probs, k_max: int) -> float:
    """Max pointwise gap between the law of a sum of independent Bernoullis
    and the Poisson law with the same mean, over counts 0..k_max.  The gap
    is classically at most sum q_t^2."""
    qs = np.asarray(probs, dtype=float)
    if qs.ndim != 1 or qs.size == 0:
        raise ValueError("probs must be a nonempty 1-d sequence")
    if np.any(qs < 0.0) or np.any(qs > 1.0):
        raise ValueError("Bernoulli parameters must lie in [0, 1]")
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    pmf = np.array([1.0])
    for q in qs:
        pmf = np.convolve(pmf, [1.0 - q, q])
    exact = np.zeros(k_max + 1)
    upto = min(k_max + 1, pmf.size)
    exact[:upto] = pmf[:upto]
    approx = poisson.pmf(np.arange(k_max + 1), qs.sum())
    return float(np.abs(exact - approx).max())


def certified_blind_bound(
    sigma: Automaton, eps_inner: float, top: str = "Top"
) -> CertifiedBound:
    """Counter a blind (autonomous automaton) strategy in the 2x3 game whose
    third column absorbs at 1/2 for both rows.

    With h = P(the automaton ever plays top): h >= 2/3 is punished by pure
    Middle (payoff 1 - h), h <= 1/3 by pure Left (payoff h).  In between,
    find the smallest horizon T by which top has appeared with probability
    at least h - eps_inner, and play Right with the small rate
    eta = eps_inner / T so that Right almost surely comes after the first
    top; the payoff is then at most 1/3 + eps_inner."""
    if eps_inner <= 0.0:
        raise ValueError("eps_inner must be positive")
    if not sigma.autonomous:
        raise ValueError("certificate requires an autonomous automaton")
    p_never = top_count_pgf(sigma, {top}, 0.0)
    p_ever = 1.0 - p_never

    if p_ever >= 2.0 / 3.0:
        return CertifiedBound(
            y=np.array([0.0, 1.0, 0.0]),
            bound=p_never,
            certificate={"case": "frequent-top", "p_ever_top": p_ever},
        )
    if p_ever <= 1.0 / 3.0:
        return CertifiedBound(
            y=np.array([1.0, 0.0, 0.0]),
            bound=p_ever,
            certificate={"case": "rare-top", "p_ever_top": p_ever},
        )

    phi = 1.0 - sigma.top_mass({top})
    h = phi * (sigma.transition @ np.ones(sigma.size))
    t_bar = None
    survive = float(sigma.mu0 @ h)
    if 1.0 - survive >= p_ever - eps_inner:
        t_bar = 1
    else:
        for t in range(2, FIRST_TOP_CAP + 1):
            h = phi * (sigma.transition @ h)
            survive = float(sigma.mu0 @ h)
            if 1.0 - survive >= p_ever - eps_inner:
                t_bar = t
                break
    if t_bar is None:
        raise RuntimeError(
            f"first-top horizon search exceeded {FIRST_TOP_CAP} stages"
        )
    eta = eps_inner / t_bar
    return CertifiedBound(
        y=np.array([0.0, 1.0 - eta, eta]),
        bound=1.0 / 3.0 + eps_inner,
        certificate={
            "case": "balanced-top",
            "p_ever_top": p_ever,
            "horizon": t_bar,
            "eta": eta,
        },
    )

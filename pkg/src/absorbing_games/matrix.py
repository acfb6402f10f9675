"""Exact value and optimal strategies of a finite zero-sum matrix game.

Solved as a linear program in the (x, v) variables with the HiGHS backend,
after a pure saddle-point short circuit.  Both paths are deterministic, so
repeated calls on the same matrix return identical strategies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    x_opt: np.ndarray
    y_opt: np.ndarray
    duality_gap: float


def _clean_distribution(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if total <= 0.0:
        raise ArithmeticError("solver returned a degenerate mixed strategy")
    return p / total


def _equalizing_refit(sub: np.ndarray) -> np.ndarray | None:
    """Least-squares weights making every column of `sub` pay the same value."""
    k, l = sub.shape
    a = np.zeros((l + 1, k + 1))
    a[:l, :k] = sub.T
    a[:l, k] = -1.0
    a[l, :k] = 1.0
    b = np.zeros(l + 1)
    b[l] = 1.0
    sol = np.linalg.lstsq(a, b, rcond=None)[0]
    w = np.clip(sol[:k], 0.0, None)
    total = w.sum()
    if total <= 0.0:
        return None
    return w / total


def _bracket_gap(m: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    lower = float((x @ m).min())
    upper = float((m @ y).max())
    return lower, upper, upper - lower


def _closed_form_2x2(m: np.ndarray, tol: float) -> MatrixGameSolution | None:
    """Fully mixed 2x2 vertex; valid whenever there is no pure saddle point.

    Skipping the LP here matters: fixed-point iterations solve the same tiny
    game thousands of times.  The result is still certified by the bracket,
    with the LP as fallback on any degeneracy."""
    (a, b), (c, d) = m
    den = a + d - b - c
    if den == 0.0:
        return None
    x = np.array([(d - c) / den, (a - b) / den])
    y = np.array([(d - b) / den, (a - c) / den])
    if np.any(x < 0.0) or np.any(y < 0.0) or x.sum() <= 0.0 or y.sum() <= 0.0:
        return None
    x /= x.sum()
    y /= y.sum()
    lower, upper, gap = _bracket_gap(m, x, y)
    if gap > tol:
        return None
    return MatrixGameSolution(
        value=0.5 * (lower + upper),
        x_opt=x,
        y_opt=y,
        duality_gap=gap,
    )


def _polish(m: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Snap near-vertex LP output onto exact equalizing supports.

    The LP dual marginals lose accuracy on ill-conditioned bases (auxiliary
    matrices at tiny discount rates); refitting on the detected supports
    recovers the vertex to machine precision.  A candidate is kept only when
    it strictly shrinks the verified bracket, so this cannot loosen anything.
    """
    best_x, best_y = x, y
    best_gap = _bracket_gap(m, x, y)[2]
    for support_tol in (1e-10, 1e-8, 1e-6, 1e-4):
        rows = np.flatnonzero(x > support_tol)
        cols = np.flatnonzero(y > support_tol)
        if rows.size == 0 or cols.size == 0:
            continue
        xw = _equalizing_refit(m[np.ix_(rows, cols)])
        yw = _equalizing_refit(m[np.ix_(rows, cols)].T)
        cand_x = best_x
        if xw is not None:
            cand_x = np.zeros(m.shape[0])
            cand_x[rows] = xw
        cand_y = best_y
        if yw is not None:
            cand_y = np.zeros(m.shape[1])
            cand_y[cols] = yw
        for trial_x, trial_y in ((cand_x, cand_y), (cand_x, best_y), (best_x, cand_y)):
            gap = _bracket_gap(m, trial_x, trial_y)[2]
            if gap < best_gap:
                best_x, best_y, best_gap = trial_x, trial_y, gap
    return best_x, best_y


def solve_matrix_game(matrix, tol: float = DEFAULT_TOL) -> MatrixGameSolution:
    """Row player maximizes, column player minimizes.

    Returns optimal mixed strategies together with the weak-duality bracket
    gap = max_a (M y)_a - min_b (x^T M)_b, certified <= tol; the reported
    value lies inside that bracket.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError(f"matrix must be 2-d and nonempty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    na, nb = m.shape

    row_min = m.min(axis=1)
    col_max = m.max(axis=0)
    maximin = row_min.max()
    minimax = col_max.min()
    if maximin == minimax:
        # pure saddle point, exact; first indices keep tie-breaking deterministic
        i = int(row_min.argmax())
        j = int(col_max.argmin())
        x = np.zeros(na)
        y = np.zeros(nb)
        x[i] = 1.0
        y[j] = 1.0
        return MatrixGameSolution(value=float(maximin), x_opt=x, y_opt=y, duality_gap=0.0)

    if na == 2 and nb == 2:
        sol = _closed_form_2x2(m, tol)
        if sol is not None:
            return sol

    # maximize v subject to (x^T M)_b >= v for all b, x a distribution.
    # Solved on the affinely normalized matrix: near-constant matrices (the
    # auxiliary games at tiny discount rates) otherwise sit entirely inside
    # the LP solver's feasibility tolerance and it stops at a wrong vertex.
    lo = float(m.min())
    span = float(m.max()) - lo
    mn = (m - lo) / span
    c = np.zeros(na + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-mn.T, np.ones((nb, 1))])
    b_ub = np.zeros(nb)
    a_eq = np.concatenate([np.ones(na), [0.0]])[None, :]
    bounds = [(0.0, None)] * na + [(None, None)]
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if not res.success:
        raise ArithmeticError(f"matrix game LP failed: {res.message}")

    x = _clean_distribution(res.x[:na])
    y = _clean_distribution(-np.asarray(res.ineqlin.marginals))
    lower, upper, gap = _bracket_gap(m, x, y)
    if gap > tol:
        x, y = _polish(m, x, y)
        lower, upper, gap = _bracket_gap(m, x, y)
    if gap > tol:
        raise ArithmeticError(f"duality gap {gap:.3e} exceeds tolerance {tol:.3e}")
    return MatrixGameSolution(
        value=0.5 * (lower + upper),
        x_opt=x,
        y_opt=y,
        duality_gap=gap,
    )

"""Data model for zero-sum absorbing games with one non-absorbing state.

A game is a finite action set for each player, a stage reward matrix, and a
sub-probability absorption kernel: playing (a, b) in the non-absorbing state
pays reward[a, b] to player 1, then play moves to absorbing state t with
probability absorption[a, b, t] and stays put with the remaining mass.  An
absorbing state pays its fixed payoff at every later stage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ROW_SUM_TOL = 1e-12

BUILTIN_GAMES = ("big-match", "modified-big-match", "table3")


def _labels(seq, what: str) -> tuple[str, ...]:
    out = tuple(str(s) for s in seq)
    if not out:
        raise ValueError(f"{what} must be nonempty")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate {what}: {out!r}")
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class AbsorbingGame:
    """reward[a, b] is the stage payoff, absorption[a, b, t] the kernel mass."""

    actions_p1: tuple[str, ...]
    actions_p2: tuple[str, ...]
    reward: np.ndarray
    absorbing_states: tuple[str, ...]
    absorbing_payoffs: np.ndarray
    absorption: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "actions_p1", _labels(self.actions_p1, "actions_p1"))
        object.__setattr__(self, "actions_p2", _labels(self.actions_p2, "actions_p2"))
        stars = tuple(str(s) for s in self.absorbing_states)
        if len(set(stars)) != len(stars):
            raise ValueError(f"duplicate absorbing states: {stars!r}")
        object.__setattr__(self, "absorbing_states", stars)
        reward = _frozen(self.reward)
        payoffs = _frozen(self.absorbing_payoffs)
        kernel = _frozen(self.absorption)

        na, nb, ns = len(self.actions_p1), len(self.actions_p2), len(stars)
        if reward.shape != (na, nb):
            raise ValueError(f"reward shape {reward.shape}, expected {(na, nb)}")
        if payoffs.shape != (ns,):
            raise ValueError(f"absorbing_payoffs shape {payoffs.shape}, expected {(ns,)}")
        if kernel.shape != (na, nb, ns):
            raise ValueError(f"absorption shape {kernel.shape}, expected {(na, nb, ns)}")
        if not np.all(np.isfinite(reward)):
            raise ValueError("reward entries must be finite")
        if ns and not np.all(np.isfinite(payoffs)):
            raise ValueError("absorbing payoffs must be finite")
        if np.any(kernel < 0.0) or np.any(kernel > 1.0 + ROW_SUM_TOL):
            raise ValueError("absorption probabilities must lie in [0, 1]")
        totals = kernel.sum(axis=2) if ns else np.zeros((na, nb))
        if np.any(totals > 1.0 + ROW_SUM_TOL):
            raise ValueError("absorption mass exceeds 1 for some action pair")

        object.__setattr__(self, "reward", reward)
        object.__setattr__(self, "absorbing_payoffs", payoffs)
        object.__setattr__(self, "absorption", kernel)

    @property
    def n_p1(self) -> int:
        return len(self.actions_p1)

    @property
    def n_p2(self) -> int:
        return len(self.actions_p2)

    @property
    def absorption_prob(self) -> np.ndarray:
        """Total probability of absorbing, one entry per action pair."""
        if not self.absorbing_states:
            return np.zeros((self.n_p1, self.n_p2))
        return self.absorption.sum(axis=2)

    @property
    def absorption_value(self) -> np.ndarray:
        """Expected absorbing payoff mass sum_t p(t | a, b) payoff(t)."""
        if not self.absorbing_states:
            return np.zeros((self.n_p1, self.n_p2))
        return self.absorption @ self.absorbing_payoffs

    @property
    def payoff_bounds(self) -> tuple[float, float]:
        """(min, max) over stage rewards and absorbing payoffs."""
        lo = float(self.reward.min())
        hi = float(self.reward.max())
        if self.absorbing_states:
            lo = min(lo, float(self.absorbing_payoffs.min()))
            hi = max(hi, float(self.absorbing_payoffs.max()))
        return lo, hi

    def index_p1(self, label: str) -> int:
        return self.actions_p1.index(label)

    def index_p2(self, label: str) -> int:
        return self.actions_p2.index(label)

    def same_game(self, other: "AbsorbingGame") -> bool:
        return (
            self.actions_p1 == other.actions_p1
            and self.actions_p2 == other.actions_p2
            and self.absorbing_states == other.absorbing_states
            and np.array_equal(self.reward, other.reward)
            and np.array_equal(self.absorbing_payoffs, other.absorbing_payoffs)
            and np.array_equal(self.absorption, other.absorption)
        )


@dataclass(frozen=True)
class ProductStructure:
    """Rows/columns that carry positive absorption mass, and whether the
    support of the absorption kernel is exactly their product."""

    a_star: tuple[str, ...]
    b_star: tuple[str, ...]
    is_product: bool


def classify(game: AbsorbingGame) -> ProductStructure:
    """Absorbing action sets and product test, with strict positivity (no epsilon)."""
    support = game.absorption_prob > 0.0
    row_mask = support.any(axis=1)
    col_mask = support.any(axis=0)
    a_star = tuple(a for a, m in zip(game.actions_p1, row_mask) if m)
    b_star = tuple(b for b, m in zip(game.actions_p2, col_mask) if m)
    is_product = bool(np.array_equal(support, np.outer(row_mask, col_mask)))
    return ProductStructure(a_star=a_star, b_star=b_star, is_product=is_product)


def a_star_indices(game: AbsorbingGame) -> np.ndarray:
    return np.flatnonzero(game.absorption_prob.max(axis=1) > 0.0)


def is_generalized_big_match(game: AbsorbingGame) -> bool:
    """Product absorbing, every opponent column absorbing, two rows."""
    s = classify(game)
    return s.is_product and s.b_star == game.actions_p2 and game.n_p1 == 2


def builtin_game(name: str) -> AbsorbingGame:
    """Canonical 2-row instances used across the test battery.

    big-match:           Top absorbs against both columns (payoffs 1 and 0),
                         Bottom never absorbs.
    modified-big-match:  big-match plus a third column paying 1/2 to both
                         rows without absorbing.
    table3:              like modified-big-match but the third column absorbs
                         at payoff 1/2 for both rows, so the kernel support
                         is not a product set.
    """
    if name == "big-match":
        return AbsorbingGame(
            actions_p1=("Top", "Bottom"),
            actions_p2=("Left", "Right"),
            reward=[[1.0, 0.0], [0.0, 1.0]],
            absorbing_states=("1*", "0*"),
            absorbing_payoffs=[1.0, 0.0],
            absorption=[
                [[1.0, 0.0], [0.0, 1.0]],
                [[0.0, 0.0], [0.0, 0.0]],
            ],
        )
    if name == "modified-big-match":
        return AbsorbingGame(
            actions_p1=("Top", "Bottom"),
            actions_p2=("Left", "Middle", "Right"),
            reward=[[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]],
            absorbing_states=("1*", "0*"),
            absorbing_payoffs=[1.0, 0.0],
            absorption=[
                [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]],
                [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            ],
        )
    if name == "table3":
        return AbsorbingGame(
            actions_p1=("Top", "Bottom"),
            actions_p2=("Left", "Middle", "Right"),
            reward=[[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]],
            absorbing_states=("1*", "0*", "half*"),
            absorbing_payoffs=[1.0, 0.0, 0.5],
            absorption=[
                [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            ],
        )
    raise ValueError(f"unknown builtin game {name!r}, expected one of {BUILTIN_GAMES}")


def game_to_dict(game: AbsorbingGame) -> dict:
    """JSON-compatible tree; zero absorption entries are omitted."""
    kernel = []
    for i in range(game.n_p1):
        row = []
        for j in range(game.n_p2):
            cell = {
                s: float(game.absorption[i, j, t])
                for t, s in enumerate(game.absorbing_states)
                if game.absorption[i, j, t] != 0.0
            }
            row.append(cell)
        kernel.append(row)
    return {
        "actions_p1": list(game.actions_p1),
        "actions_p2": list(game.actions_p2),
        "absorbing_states": [
            {"name": s, "payoff": float(p)}
            for s, p in zip(game.absorbing_states, game.absorbing_payoffs)
        ],
        "reward": [[float(v) for v in row] for row in game.reward],
        "absorption": kernel,
    }


def game_from_dict(data: dict) -> AbsorbingGame:
    try:
        actions_p1 = data["actions_p1"]
        actions_p2 = data["actions_p2"]
        star_entries = data["absorbing_states"]
        reward = data["reward"]
        kernel_rows = data["absorption"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"game file missing field: {exc}") from exc

    stars = [str(e["name"]) for e in star_entries]
    payoffs = [float(e["payoff"]) for e in star_entries]
    na, nb = len(actions_p1), len(actions_p2)
    kernel = np.zeros((na, nb, len(stars)))
    if len(kernel_rows) != na:
        raise ValueError("absorption must have one row per player-1 action")
    for i, row in enumerate(kernel_rows):
        if len(row) != nb:
            raise ValueError("absorption rows must have one cell per player-2 action")
        for j, cell in enumerate(row):
            for name, prob in cell.items():
                if name not in stars:
                    raise ValueError(f"absorption references unknown state {name!r}")
                prob = float(prob)
                if prob < 0.0 or prob > 1.0:
                    raise ValueError(f"absorption probability {prob} outside [0, 1]")
                kernel[i, j, stars.index(name)] = prob
    return AbsorbingGame(
        actions_p1=actions_p1,
        actions_p2=actions_p2,
        reward=reward,
        absorbing_states=stars,
        absorbing_payoffs=payoffs,
        absorption=kernel,
    )


def load_game(path: str | Path) -> AbsorbingGame:
    with open(path) as fh:
        return game_from_dict(json.load(fh))


def save_game(game: AbsorbingGame, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(game_to_dict(game), fh, indent=2)
        fh.write("\n")


def resolve_game(spec: str) -> AbsorbingGame:
    """Accept a builtin name or a path to a game file."""
    if spec in BUILTIN_GAMES:
        return builtin_game(spec)
    if Path(spec).exists():
        return load_game(spec)
    raise ValueError(f"{spec!r} is neither a builtin game nor an existing file")

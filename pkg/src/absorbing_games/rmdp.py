"""Bridge between robust MDPs with s-rectangular polytopic uncertainty and
zero-sum stochastic games.

An adversary picking transition kernels from the extreme points of the
uncertainty set is exactly a minimizing player whose action set at state s
lists those extreme points, so robust values and game values coincide.  The
reverse direction must rewrite a reward r(s, a, b) as an expected arrival
reward r(s, a, s'); when several opponent columns share a transition row but
disagree on reward this is impossible as stated, and successor states are
duplicated per reward class to carry the missing information.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .games import AbsorbingGame
from .matrix import solve_matrix_game

ROW_TOL = 1e-9
LIFT_RESIDUAL_TOL = 1e-10
MAX_VALUE_ITERATIONS = 100_000
AUGMENT_CAP_FACTOR = 10


def _labels(seq, what: str) -> tuple[str, ...]:
    out = tuple(str(s) for s in seq)
    if not out:
        raise ValueError(f"{what} must be nonempty")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate {what}: {out!r}")
    return out


@dataclass(frozen=True, eq=False)
class StochasticGame:
    """General-form finite zero-sum stochastic game: global player-1 actions,
    per-state player-2 actions, reward[s][a, b], transition[s][a, b, s']."""

    states: tuple[str, ...]
    actions_p1: tuple[str, ...]
    actions_p2: tuple[tuple[str, ...], ...]
    reward: tuple[np.ndarray, ...]
    transition: tuple[np.ndarray, ...]

    def __post_init__(self):
        states = _labels(self.states, "states")
        actions = _labels(self.actions_p1, "actions_p1")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions_p1", actions)
        ns, na = len(states), len(actions)
        p2 = tuple(_labels(b, f"actions_p2[{s}]") for s, b in zip(states, self.actions_p2))
        if len(p2) != ns:
            raise ValueError("actions_p2 must list one action set per state")
        object.__setattr__(self, "actions_p2", p2)
        rewards = []
        transitions = []
        for s in range(ns):
            nb = len(p2[s])
            r = np.ascontiguousarray(np.asarray(self.reward[s], dtype=float))
            t = np.ascontiguousarray(np.asarray(self.transition[s], dtype=float))
            if r.shape != (na, nb):
                raise ValueError(f"reward[{s}] must have shape {(na, nb)}, got {r.shape}")
            if t.shape != (na, nb, ns):
                raise ValueError(f"transition[{s}] must have shape {(na, nb, ns)}")
            if not np.all(np.isfinite(r)):
                raise ValueError("rewards must be finite")
            if np.any(t < 0.0) or np.any(np.abs(t.sum(axis=2) - 1.0) > ROW_TOL):
                raise ValueError(f"transition[{s}] rows must be distributions over states")
            r.flags.writeable = False
            t.flags.writeable = False
            rewards.append(r)
            transitions.append(t)
        object.__setattr__(self, "reward", tuple(rewards))
        object.__setattr__(self, "transition", tuple(transitions))

    @property
    def n_states(self) -> int:
        return len(self.states)


@dataclass(frozen=True, eq=False)
class RmdpInstance:
    """Robust MDP with per-state uncertainty sets given by their extreme
    points; each extreme point is a full (A, S) row-stochastic kernel."""

    states: tuple[str, ...]
    actions: tuple[str, ...]
    reward: np.ndarray
    uncertainty: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        states = _labels(self.states, "states")
        actions = _labels(self.actions, "actions")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        ns, na = len(states), len(actions)
        reward = np.ascontiguousarray(np.asarray(self.reward, dtype=float))
        if reward.shape != (ns, na, ns):
            raise ValueError(f"reward must have shape {(ns, na, ns)}, got {reward.shape}")
        if not np.all(np.isfinite(reward)):
            raise ValueError("rewards must be finite")
        reward.flags.writeable = False
        object.__setattr__(self, "reward", reward)
        if len(self.uncertainty) != ns:
            raise ValueError("uncertainty must list one extreme-point set per state")
        cleaned = []
        for s, points in enumerate(self.uncertainty):
            if not points:
                raise ValueError(f"state {states[s]!r} has an empty uncertainty set")
            pts = []
            for p in points:
                p = np.ascontiguousarray(np.asarray(p, dtype=float))
                if p.shape != (na, ns):
                    raise ValueError(f"extreme points must have shape {(na, ns)}")
                if np.any(p < 0.0) or np.any(np.abs(p.sum(axis=1) - 1.0) > ROW_TOL):
                    raise ValueError("extreme-point rows must be distributions")
                p.flags.writeable = False
                pts.append(p)
            cleaned.append(tuple(pts))
        object.__setattr__(self, "uncertainty", tuple(cleaned))


def rmdp_to_game(m: RmdpInstance) -> StochasticGame:
    """Adversarial reformulation: opponent action j at state s commits to the
    j-th extreme kernel, paying the expected arrival reward."""
    rewards = []
    transitions = []
    p2 = []
    for s in range(len(m.states)):
        points = m.uncertainty[s]
        p2.append(tuple(f"u{j}" for j in range(len(points))))
        r = np.stack([(p * m.reward[s]).sum(axis=1) for p in points], axis=1)
        t = np.stack(list(points), axis=1)
        rewards.append(r)
        transitions.append(t)
    return StochasticGame(
        states=m.states,
        actions_p1=m.actions,
        actions_p2=tuple(p2),
        reward=tuple(rewards),
        transition=tuple(transitions),
    )


def _reward_lift(t: np.ndarray, r: np.ndarray) -> np.ndarray | None:
    """Vector rho with t @ rho == r when one exists (least squares)."""
    rho, *_ = np.linalg.lstsq(t, r, rcond=None)
    if np.abs(t @ rho - r).max() > LIFT_RESIDUAL_TOL:
        return None
    return rho


def game_to_rmdp(g: StochasticGame, cap_factor: int = AUGMENT_CAP_FACTOR) -> RmdpInstance:
    """Rewrite a stochastic game as a robust MDP.

    Per (state, action), try to lift the opponent-indexed reward vector onto
    arrival states through the transition matrix.  States where some action
    admits no lift get their successors duplicated, one copy per class of
    opponent actions with identical reward columns, so the copy's identity
    carries the reward.  Raises when the duplication would exceed
    cap_factor times the original state count."""
    ns = g.n_states
    na = len(g.actions_p1)
    lifts: list[list[np.ndarray] | None] = []
    for s in range(ns):
        per_action = []
        for a in range(na):
            rho = _reward_lift(g.transition[s][a], g.reward[s][a])
            if rho is None:
                per_action = None
                break
            per_action.append(rho)
        lifts.append(per_action)
    needs_split = [s for s in range(ns) if lifts[s] is None]

    if not needs_split:
        reward = np.zeros((ns, na, ns))
        for s in range(ns):
            for a in range(na):
                reward[s, a] = lifts[s][a]
        uncertainty = tuple(
            tuple(g.transition[s][:, b, :] for b in range(len(g.actions_p2[s])))
            for s in range(ns)
        )
        return RmdpInstance(
            states=g.states, actions=g.actions_p1, reward=reward, uncertainty=uncertainty
        )

    # reward classes of opponent actions at each splitting state
    class_of: dict[int, list[int]] = {}
    class_rep: dict[int, list[int]] = {}
    for s in needs_split:
        reps: list[int] = []
        assign = []
        for b in range(len(g.actions_p2[s])):
            col = g.reward[s][:, b]
            for ci, rep in enumerate(reps):
                if np.array_equal(col, g.reward[s][:, rep]):
                    assign.append(ci)
                    break
            else:
                assign.append(len(reps))
                reps.append(b)
        class_of[s] = assign
        class_rep[s] = reps

    index: dict[tuple[int, int | None, int | None], int] = {}
    labels: list[str] = []
    base_of: list[int] = []
    tag_of: list[tuple[int, int] | None] = []

    def add_state(base: int, tag: tuple[int, int] | None) -> None:
        key = (base, tag[0], tag[1]) if tag else (base, None, None)
        if key in index:
            return
        index[key] = len(labels)
        if tag is None:
            labels.append(g.states[base])
        else:
            labels.append(f"{g.states[base]}@{g.states[tag[0]]}.{tag[1]}")
        base_of.append(base)
        tag_of.append(tag)

    for s in range(ns):
        add_state(s, None)
    for s in needs_split:
        t = g.transition[s]
        for b in range(len(g.actions_p2[s])):
            c = class_of[s][b]
            for target in range(ns):
                if t[:, b, target].max() > 0.0:
                    add_state(target, (s, c))
    n_new = len(labels)
    if n_new > cap_factor * ns:
        raise ValueError(
            f"reward duplication needs {n_new} states, over the cap of {cap_factor * ns}"
        )

    reward = np.zeros((n_new, na, n_new))
    uncertainty = []
    for v in range(n_new):
        base = base_of[v]
        nb = len(g.actions_p2[base])
        kernel = np.zeros((na, nb, n_new))
        if base in class_of:
            for b in range(nb):
                c = class_of[base][b]
                rep = class_rep[base][c]
                for target in range(ns):
                    mass = g.transition[base][:, b, target]
                    if mass.max() > 0.0:
                        w = index[(target, base, c)]
                        kernel[:, b, w] = mass
                        reward[v, :, w] = g.reward[base][:, rep]
        else:
            for b in range(nb):
                for target in range(ns):
                    kernel[:, b, index[(target, None, None)]] = g.transition[base][:, b, target]
            for a in range(na):
                reward[v, a, :ns] = lifts[base][a]
        uncertainty.append(tuple(kernel[:, b, :] for b in range(nb)))
    return RmdpInstance(
        states=tuple(labels), actions=g.actions_p1, reward=reward, uncertainty=tuple(uncertainty)
    )


def shapley_discounted_values(sg: StochasticGame, lam: float, tol: float = 1e-9) -> np.ndarray:
    """Discounted state values by value iteration on the one-shot operator;
    stops when the sup-norm Bellman residual certifies accuracy tol."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"discount rate must lie in (0, 1), got {lam}")
    ns = sg.n_states
    v = np.zeros(ns)
    for _ in range(MAX_VALUE_ITERATIONS):
        new = np.empty(ns)
        for s in range(ns):
            m = lam * sg.reward[s] + (1.0 - lam) * (sg.transition[s] @ v)
            new[s] = solve_matrix_game(m).value
        if np.abs(new - v).max() <= lam * tol:
            return new
        v = new
    raise ArithmeticError("value iteration failed to converge")


def robust_discounted_values(m: RmdpInstance, lam: float, tol: float = 1e-9) -> np.ndarray:
    """Robust discounted values straight from the uncertainty sets: the
    adversary minimizes over extreme-point mixtures at every state."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"discount rate must lie in (0, 1), got {lam}")
    ns = len(m.states)
    v = np.zeros(ns)
    expected_r = [
        np.stack([(p * m.reward[s]).sum(axis=1) for p in m.uncertainty[s]], axis=1)
        for s in range(ns)
    ]
    for _ in range(MAX_VALUE_ITERATIONS):
        new = np.empty(ns)
        for s in range(ns):
            cont = np.stack([p @ v for p in m.uncertainty[s]], axis=1)
            new[s] = solve_matrix_game(lam * expected_r[s] + (1.0 - lam) * cont).value
        if np.abs(new - v).max() <= lam * tol:
            return new
        v = new
    raise ArithmeticError("value iteration failed to converge")


def absorbing_to_stochastic(game: AbsorbingGame, state_label: str = "play") -> StochasticGame:
    """Embed the one-non-absorbing-state model as a general stochastic game
    with a dummy opponent action at every absorbing state."""
    ns = 1 + len(game.absorbing_states)
    states = (state_label,) + game.absorbing_states
    na, nb = game.n_p1, game.n_p2
    rewards = [np.array(game.reward)]
    kernel = np.zeros((na, nb, ns))
    kernel[:, :, 1:] = game.absorption
    kernel[:, :, 0] = 1.0 - game.absorption_prob
    transitions = [kernel]
    p2 = [game.actions_p2]
    for t, payoff in enumerate(game.absorbing_payoffs):
        rewards.append(np.full((na, 1), float(payoff)))
        k = np.zeros((na, 1, ns))
        k[:, 0, 1 + t] = 1.0
        transitions.append(k)
        p2.append(("stay",))
    return StochasticGame(
        states=states,
        actions_p1=game.actions_p1,
        actions_p2=tuple(p2),
        reward=tuple(rewards),
        transition=tuple(transitions),
    )


def as_absorbing_game(sg: StochasticGame) -> AbsorbingGame:
    """Inverse embedding, when exactly one state is non-absorbing and every
    absorbing state pays a constant."""
    ns = sg.n_states
    absorbing = []
    payoffs = []
    live = []
    for s in range(ns):
        t = sg.transition[s]
        if np.all(t[:, :, s] == 1.0):
            r = sg.reward[s]
            if r.max() != r.min():
                raise ValueError(f"absorbing state {sg.states[s]!r} has non-constant reward")
            absorbing.append(s)
            payoffs.append(float(r.flat[0]))
        else:
            live.append(s)
    if len(live) != 1:
        raise ValueError(f"expected exactly one non-absorbing state, found {len(live)}")
    s0 = live[0]
    t = sg.transition[s0]
    return AbsorbingGame(
        actions_p1=sg.actions_p1,
        actions_p2=sg.actions_p2[s0],
        reward=sg.reward[s0],
        absorbing_states=tuple(sg.states[s] for s in absorbing),
        absorbing_payoffs=payoffs,
        absorption=t[:, :, absorbing],
    )


def stochastic_game_to_dict(sg: StochasticGame) -> dict:
    return {
        "states": list(sg.states),
        "actions_p1": list(sg.actions_p1),
        "actions_p2": [list(b) for b in sg.actions_p2],
        "reward": [r.tolist() for r in sg.reward],
        "transition": [t.tolist() for t in sg.transition],
    }


def stochastic_game_from_dict(data: dict) -> StochasticGame:
    try:
        return StochasticGame(
            states=data["states"],
            actions_p1=data["actions_p1"],
            actions_p2=tuple(tuple(b) for b in data["actions_p2"]),
            reward=tuple(np.asarray(r, dtype=float) for r in data["reward"]),
            transition=tuple(np.asarray(t, dtype=float) for t in data["transition"]),
        )
    except KeyError as exc:
        raise ValueError(f"stochastic game file missing field: {exc}") from exc


def rmdp_to_dict(m: RmdpInstance) -> dict:
    return {
        "states": list(m.states),
        "actions": list(m.actions),
        "reward": m.reward.tolist(),
        "uncertainty": [[p.tolist() for p in pts] for pts in m.uncertainty],
    }


def rmdp_from_dict(data: dict) -> RmdpInstance:
    try:
        return RmdpInstance(
            states=data["states"],
            actions=data["actions"],
            reward=np.asarray(data["reward"], dtype=float),
            uncertainty=tuple(
                tuple(np.asarray(p, dtype=float) for p in pts) for pts in data["uncertainty"]
            ),
        )
    except KeyError as exc:
        raise ValueError(f"robust MDP file missing field: {exc}") from exc


def load_rmdp(path: str | Path) -> RmdpInstance:
    with open(path) as fh:
        return rmdp_from_dict(json.load(fh))


def save_rmdp(m: RmdpInstance, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(rmdp_to_dict(m), fh, indent=2)
        fh.write("\n")


def load_stochastic_game(path: str | Path) -> StochasticGame:
    with open(path) as fh:
        return stochastic_game_from_dict(json.load(fh))


def save_stochastic_game(sg: StochasticGame, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(stochastic_game_to_dict(sg), fh, indent=2)
        fh.write("\n")

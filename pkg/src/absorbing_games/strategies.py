"""Finite-memory strategies for the maximizing player.

Three concrete families: stationary mixed actions, Markovian strategies (a
finite prefix of stage-indexed mixed actions followed by a stationary tail),
and finite automata (internal states K, initial distribution mu0, stochastic
internal transition, and a state-to-mixed-action map f).  An automaton is
autonomous when its internal transition ignores the actions played; those are
the strategies whose number-of-risky-plays law has a computable generating
function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .games import AbsorbingGame, a_star_indices, classify
from .values import discounted_value

DIST_TOL = 1e-12
PGF_DOUBLINGS = 60


def _labels(seq, what: str) -> tuple[str, ...]:
    out = tuple(str(s) for s in seq)
    if not out:
        raise ValueError(f"{what} must be nonempty")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate {what}: {out!r}")
    return out


def _dist(vec, n: int, what: str) -> np.ndarray:
    v = np.ascontiguousarray(np.asarray(vec, dtype=float))
    if v.shape != (n,):
        raise ValueError(f"{what} must have shape {(n,)}, got {v.shape}")
    if np.any(v < 0.0) or abs(v.sum() - 1.0) > 1e-9:
        raise ValueError(f"{what} must be a probability distribution")
    return v


def _stochastic_rows(mat: np.ndarray, what: str) -> None:
    if np.any(mat < 0.0) or np.any(np.abs(mat.sum(axis=-1) - 1.0) > 1e-9):
        raise ValueError(f"{what} rows must be probability distributions")


@dataclass(frozen=True, eq=False)
class Automaton:
    """Finite-state strategy (states, mu0, transition, action map).

    transition has shape (K, K) when autonomous and (K, A, B, K) otherwise,
    in which case actions_p2 must be supplied.
    """

    states: tuple[str, ...]
    mu0: np.ndarray
    transition: np.ndarray
    actions_p1: tuple[str, ...]
    action_map: np.ndarray
    autonomous: bool
    actions_p2: tuple[str, ...] | None = None

    def __post_init__(self):
        states = _labels(self.states, "automaton states")
        actions = _labels(self.actions_p1, "actions_p1")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions_p1", actions)
        k, na = len(states), len(actions)

        mu0 = _dist(self.mu0, k, "mu0")
        f = np.ascontiguousarray(np.asarray(self.action_map, dtype=float))
        if f.shape != (k, na):
            raise ValueError(f"action_map must have shape {(k, na)}, got {f.shape}")
        _stochastic_rows(f, "action_map")

        trans = np.ascontiguousarray(np.asarray(self.transition, dtype=float))
        if self.autonomous:
            if trans.shape != (k, k):
                raise ValueError(f"autonomous transition must have shape {(k, k)}")
            object.__setattr__(self, "actions_p2", None)
        else:
            if self.actions_p2 is None:
                raise ValueError("non-autonomous automaton requires actions_p2")
            p2 = _labels(self.actions_p2, "actions_p2")
            object.__setattr__(self, "actions_p2", p2)
            if trans.shape != (k, na, len(p2), k):
                raise ValueError(
                    f"transition must have shape {(k, na, len(p2), k)}, got {trans.shape}"
                )
        _stochastic_rows(trans, "transition")

        for arr in (mu0, f, trans):
            arr.flags.writeable = False
        object.__setattr__(self, "mu0", mu0)
        object.__setattr__(self, "action_map", f)
        object.__setattr__(self, "transition", trans)

    @property
    def size(self) -> int:
        return len(self.states)

    def transition_tensor(self) -> np.ndarray:
        """Transition as (K, A, B, K); autonomous automata need actions_p2
        only implicitly, so callers broadcast the shared row themselves."""
        if not self.autonomous:
            return self.transition
        raise ValueError("autonomous automaton stores a (K, K) transition")

    def top_mass(self, top_set) -> np.ndarray:
        """Per-state probability of playing an action from top_set."""
        idx = [self.actions_p1.index(a) for a in top_set]
        if not idx:
            return np.zeros(self.size)
        return self.action_map[:, idx].sum(axis=1)


def stationary_automaton(x, actions_p1) -> Automaton:
    actions_p1 = tuple(actions_p1)
    return Automaton(
        states=("settle",),
        mu0=[1.0],
        transition=[[1.0]],
        actions_p1=actions_p1,
        action_map=[list(np.asarray(x, dtype=float))],
        autonomous=True,
    )


def coin_toss_automaton(top: str = "Top", bottom: str = "Bottom") -> Automaton:
    """Starts with a fair coin between a risky state (plays `top`) and a safe
    state (plays `bottom`), re-flips after every risky stage, and the safe
    state is never left.  The number of `top` plays is Geometric(1/2) on
    {0, 1, 2, ...}."""
    return Automaton(
        states=("risk", "safe"),
        mu0=[0.5, 0.5],
        transition=[[0.5, 0.5], [0.0, 1.0]],
        actions_p1=(top, bottom),
        action_map=[[1.0, 0.0], [0.0, 1.0]],
        autonomous=True,
    )


@dataclass(frozen=True, eq=False)
class MarkovianStrategy:
    """Stage-indexed mixed actions: prefix[t] at stages 1..T, tail afterwards."""

    actions_p1: tuple[str, ...]
    prefix: np.ndarray
    tail: np.ndarray

    def __post_init__(self):
        actions = _labels(self.actions_p1, "actions_p1")
        object.__setattr__(self, "actions_p1", actions)
        na = len(actions)
        prefix = np.ascontiguousarray(np.asarray(self.prefix, dtype=float))
        if prefix.size == 0:
            prefix = prefix.reshape(0, na)
        if prefix.ndim != 2 or prefix.shape[1] != na:
            raise ValueError(f"prefix must have shape (T, {na}), got {prefix.shape}")
        if prefix.shape[0]:
            _stochastic_rows(prefix, "prefix")
        tail = _dist(self.tail, na, "tail")
        prefix.flags.writeable = False
        tail.flags.writeable = False
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", tail)

    @property
    def prefix_length(self) -> int:
        return self.prefix.shape[0]

    def action_probabilities(self, action: str) -> tuple[np.ndarray, float]:
        j = self.actions_p1.index(action)
        return self.prefix[:, j].copy(), float(self.tail[j])

    def as_automaton(self) -> Automaton:
        """Clock automaton with prefix_length + 1 states."""
        t = self.prefix_length
        k = t + 1
        states = tuple(f"t{i}" for i in range(t)) + ("tail",)
        mu0 = np.zeros(k)
        mu0[0] = 1.0
        trans = np.zeros((k, k))
        for i in range(t):
            trans[i, i + 1] = 1.0
        trans[k - 1, k - 1] = 1.0
        f = np.vstack([self.prefix, self.tail[None, :]]) if t else self.tail[None, :]
        return Automaton(
            states=states,
            mu0=mu0,
            transition=trans,
            actions_p1=self.actions_p1,
            action_map=f,
            autonomous=True,
        )


@dataclass(frozen=True, eq=False)
class StationaryStrategy:
    actions_p1: tuple[str, ...]
    x: np.ndarray

    def __post_init__(self):
        actions = _labels(self.actions_p1, "actions_p1")
        object.__setattr__(self, "actions_p1", actions)
        object.__setattr__(self, "x", _dist(self.x, len(actions), "x"))

    def as_automaton(self) -> Automaton:
        return stationary_automaton(self.x, self.actions_p1)


@dataclass(frozen=True, eq=False)
class TwoPhaseStrategy:
    """Either a plain stationary strategy, or a strategy that plays a risky
    mixture x_alpha for a Geometric(delta) number of stages and then settles
    on a non-absorbing mixture x forever.  delta = 1 / (1 + alpha_bar) ties
    the switch rate to the total absorption intensity alpha_bar."""

    kind: str
    actions_p1: tuple[str, ...]
    x: np.ndarray
    x_alpha: np.ndarray | None = None
    alpha_bar: float | None = None
    delta: float | None = None
    branch_stable: bool | None = None

    def __post_init__(self):
        if self.kind not in ("stationary", "two-phase"):
            raise ValueError(f"kind must be 'stationary' or 'two-phase', got {self.kind!r}")
        actions = _labels(self.actions_p1, "actions_p1")
        object.__setattr__(self, "actions_p1", actions)
        na = len(actions)
        object.__setattr__(self, "x", _dist(self.x, na, "x"))
        if self.kind == "stationary":
            if self.x_alpha is not None or self.alpha_bar is not None or self.delta is not None:
                raise ValueError("stationary strategy must not carry two-phase fields")
            return
        if self.x_alpha is None or self.alpha_bar is None or self.delta is None:
            raise ValueError("two-phase strategy requires x_alpha, alpha_bar, delta")
        object.__setattr__(self, "x_alpha", _dist(self.x_alpha, na, "x_alpha"))
        abar = float(self.alpha_bar)
        delta = float(self.delta)
        if abar <= 0.0:
            raise ValueError("alpha_bar must be positive")
        if abs(delta * (1.0 + abar) - 1.0) > DIST_TOL:
            raise ValueError("delta must equal 1 / (1 + alpha_bar)")
        object.__setattr__(self, "alpha_bar", abar)
        object.__setattr__(self, "delta", delta)

    @property
    def alpha(self) -> np.ndarray:
        if self.kind != "two-phase":
            raise ValueError("stationary strategy has no absorption intensity")
        return self.alpha_bar * self.x_alpha

    def as_automaton(self) -> Automaton:
        if self.kind == "stationary":
            return stationary_automaton(self.x, self.actions_p1)
        d = self.delta
        return Automaton(
            states=("probe", "settle"),
            mu0=[1.0 - d, d],
            transition=[[1.0 - d, d], [0.0, 1.0]],
            actions_p1=self.actions_p1,
            action_map=[list(self.x_alpha), list(self.x)],
            autonomous=True,
        )


def construct_blackwell_strategy(
    game: AbsorbingGame,
    eps: float,
    lambda_probe: float = 1e-4,
    threshold: float = 0.1,
) -> TwoPhaseStrategy:
    """Extract a near-optimal low-discount strategy from the discounted game.

    Probes the optimal mixed action at lambda_probe.  If it keeps at least
    `threshold` mass on absorbing rows the strategy is genuinely absorbing,
    so it is returned as-is (stationary).  Otherwise the absorbing mass is
    read as a vanishing intensity alpha = x(a) / lambda on the absorbing
    rows, and the two-phase strategy plays x_alpha = alpha / alpha_bar for a
    Geometric(1 / (1 + alpha_bar)) time before settling on the renormalized
    non-absorbing part of x.  A re-probe at lambda_probe / 10 records
    whether the branch choice is stable.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if not 0.0 < lambda_probe < 1.0:
        raise ValueError("lambda_probe must lie in (0, 1)")
    structure = classify(game)
    if not structure.is_product:
        raise ValueError("construction requires a product absorbing game")
    astar = a_star_indices(game)

    def probe(lam: float) -> tuple[str, np.ndarray]:
        x = discounted_value(game, lam).x_opt
        mass = float(x[astar].sum()) if astar.size else 0.0
        return ("stationary" if mass >= threshold else "two-phase"), x

    branch, x_lam = probe(lambda_probe)
    branch_check, _ = probe(lambda_probe / 10.0)
    stable = branch == branch_check

    if branch == "stationary":
        return TwoPhaseStrategy(
            kind="stationary", actions_p1=game.actions_p1, x=x_lam, branch_stable=stable
        )

    alpha = np.zeros(game.n_p1)
    alpha[astar] = x_lam[astar] / lambda_probe
    abar = float(alpha.sum())
    if abar == 0.0:
        # no absorbing mass at all, the settle action is already safe
        return TwoPhaseStrategy(
            kind="stationary", actions_p1=game.actions_p1, x=x_lam, branch_stable=stable
        )
    x_alpha = alpha / abar
    x_rest = x_lam.copy()
    x_rest[astar] = 0.0
    x_rest /= x_rest.sum()
    return TwoPhaseStrategy(
        kind="two-phase",
        actions_p1=game.actions_p1,
        x=x_rest,
        x_alpha=x_alpha,
        alpha_bar=abar,
        delta=1.0 / (1.0 + abar),
        branch_stable=stable,
    )


def top_count_pgf(sigma: Automaton, top_set, q: float) -> float:
    """E[q^N] where N counts the stages at which an autonomous automaton
    plays an action from top_set, with q^inf = 0.

    Computed as the monotone limit of truncated-horizon products by repeated
    squaring of the sub-stochastic kernel phi(k) pi(k, k')."""
    if not sigma.autonomous:
        raise ValueError("generating function requires an autonomous automaton")
    q = float(q)
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    phi = 1.0 - (1.0 - q) * sigma.top_mass(top_set)
    m = phi[:, None] * sigma.transition
    ones = np.ones(sigma.size)
    value = float(sigma.mu0 @ (m @ ones))
    for _ in range(PGF_DOUBLINGS):
        m = m @ m
        new = float(sigma.mu0 @ (m @ ones))
        if abs(new - value) <= 1e-15 * max(1.0, abs(value)):
            value = new
            break
        value = new
    return value


def _reachability(support: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean adjacency matrix."""
    k = support.shape[0]
    reach = support | np.eye(k, dtype=bool)
    for _ in range(max(1, int(np.ceil(np.log2(k))) + 1)):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return reach


def expected_top_plays(sigma: Automaton, top_set) -> float:
    """E[N] for an autonomous automaton; inf when a reachable recurrent
    internal state still plays top with positive probability."""
    if not sigma.autonomous:
        raise ValueError("expected play count requires an autonomous automaton")
    f_top = sigma.top_mass(top_set)
    reach = _reachability(sigma.transition > 0.0)
    k = sigma.size
    recurrent = np.array([np.all(~reach[i] | reach[:, i]) for i in range(k)])
    start = sigma.mu0 > 0.0
    reachable = reach[start].any(axis=0)
    if np.any(reachable & recurrent & (f_top > 0.0)):
        return float("inf")
    transient = reachable & ~recurrent
    if not transient.any():
        return 0.0
    idx = np.flatnonzero(transient)
    p_tt = sigma.transition[np.ix_(idx, idx)]
    visits = np.linalg.solve(np.eye(idx.size) - p_tt.T, sigma.mu0[idx])
    return float(visits @ f_top[idx])


@dataclass(frozen=True)
class GeometricPgfReport:
    """Deviation of an automaton's top-count PGF from the Geometric(1/2)
    transform 1 / (2 - q) over a q grid."""

    q_grid: tuple[float, ...]
    deviations: tuple[float, ...]
    max_deviation: float
    eps: float
    within_two_eps: bool
    expected_plays: float
    mean_finite: bool
    exact_geometric: bool


def geometric_pgf_report(sigma: Automaton, top_set, eps: float, q_grid) -> GeometricPgfReport:
    """Necessary condition check: a strategy that guarantees 1/2 - eps at all
    small discount rates in the generalized big match must keep its PGF
    within 2 eps of 1 / (2 - q); equality plus a finite mean is sufficient."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    qs = tuple(float(q) for q in q_grid)
    devs = tuple(abs(top_count_pgf(sigma, top_set, q) - 1.0 / (2.0 - q)) for q in qs)
    max_dev = max(devs) if devs else 0.0
    mean = expected_top_plays(sigma, top_set)
    finite = np.isfinite(mean)
    return GeometricPgfReport(
        q_grid=qs,
        deviations=devs,
        max_deviation=max_dev,
        eps=float(eps),
        within_two_eps=max_dev <= 2.0 * eps,
        expected_plays=mean,
        mean_finite=bool(finite),
        exact_geometric=bool(finite and max_dev <= 1e-9),
    )


def strategy_to_dict(strategy) -> dict:
    if isinstance(strategy, StationaryStrategy):
        return {
            "kind": "stationary",
            "actions_p1": list(strategy.actions_p1),
            "x": [float(v) for v in strategy.x],
        }
    if isinstance(strategy, MarkovianStrategy):
        return {
            "kind": "markovian",
            "actions_p1": list(strategy.actions_p1),
            "prefix": [[float(v) for v in row] for row in strategy.prefix],
            "tail": [float(v) for v in strategy.tail],
        }
    if isinstance(strategy, TwoPhaseStrategy):
        return strategy_to_dict(strategy.as_automaton())
    if isinstance(strategy, Automaton):
        data = {
            "kind": "automaton",
            "states": list(strategy.states),
            "mu0": [float(v) for v in strategy.mu0],
            "autonomous": strategy.autonomous,
            "actions_p1": list(strategy.actions_p1),
            "f": [[float(v) for v in row] for row in strategy.action_map],
            "transition": np.asarray(strategy.transition).tolist(),
        }
        if not strategy.autonomous:
            data["actions_p2"] = list(strategy.actions_p2)
        return data
    raise TypeError(f"cannot serialize strategy of type {type(strategy).__name__}")


def strategy_from_dict(data: dict):
    kind = data.get("kind")
    try:
        if kind == "stationary":
            return StationaryStrategy(actions_p1=data["actions_p1"], x=data["x"])
        if kind == "markovian":
            return MarkovianStrategy(
                actions_p1=data["actions_p1"], prefix=data["prefix"], tail=data["tail"]
            )
        if kind == "automaton":
            return Automaton(
                states=data["states"],
                mu0=data["mu0"],
                transition=data["transition"],
                actions_p1=data["actions_p1"],
                action_map=data["f"],
                autonomous=bool(data["autonomous"]),
                actions_p2=tuple(data["actions_p2"]) if "actions_p2" in data else None,
            )
    except KeyError as exc:
        raise ValueError(f"strategy file missing field: {exc}") from exc
    raise ValueError(f"unknown strategy kind {kind!r}")


def load_strategy(path: str | Path):
    with open(path) as fh:
        return strategy_from_dict(json.load(fh))


def save_strategy(strategy, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(strategy_to_dict(strategy), fh, indent=2)
        fh.write("\n")

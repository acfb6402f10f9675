"""End-to-end verification suite.

Every numerically checkable claim the library is built around is reproduced
here as a named check with an explicit computed value, target, tolerance,
and pass flag.  All randomness is drawn from seeds fixed in VerifyConfig, so
two runs with the same configuration produce byte-identical reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .adversaries import (
    best_response_search,
    certified_blind_bound,
    certified_markovian_bound,
    le_cam_max_deviation,
    simplex_grid,
    tune_counter_constants,
)
from .evaluate import eval_discounted, eval_discounted_batch, eval_limit, switch_survival_identity
from .games import AbsorbingGame, builtin_game
from .rmdp import StochasticGame, game_to_rmdp, rmdp_to_game, shapley_discounted_values
from .simulate import simulate
from .strategies import (
    Automaton,
    MarkovianStrategy,
    TwoPhaseStrategy,
    coin_toss_automaton,
    construct_blackwell_strategy,
    top_count_pgf,
)
from .values import discounted_value, optimal_strategy_profile

VALUE_LAMBDAS = (0.5, 0.1, 0.01, 1e-4, 1e-6)


@dataclass(frozen=True)
class VerifyConfig:
    """Seeds and tolerances for the verification suite; defaults reproduce
    the reference report."""

    seed: int = 20260815
    value_tol: float = 1e-8
    top_weight_tol: float = 1e-6
    pgf_tol: float = 1e-10
    grid_guarantee_slack: float = 5e-3
    eps_star_floor: float = 2e-3
    eval_slack: float = 1e-3
    construct_slack: float = 1e-3
    identity_tol: float = 1e-12
    se_multiplier: float = 3.0
    oracle_pass_rate: float = 0.95
    rmdp_tol: float = 1e-7
    markovian_trials: int = 100
    le_cam_trials: int = 1000
    random_product_games: int = 20
    blind_automata: int = 20
    identity_trials: int = 100
    oracle_trials: int = 200
    oracle_plays: int = 100_000
    rmdp_trials: int = 50


@dataclass(frozen=True)
class CheckResult:
    claim_id: str
    description: str
    computed: float
    target: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"[{status}] {c.claim_id}: {c.description}"
                f" | computed={c.computed:.12g} target={c.target:.12g}"
                f" tolerance={c.tolerance:.12g}"
            )
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        # numbers rounded to the same 12 significant digits the text shows
        return {
            "checks": [
                {
                    "claim_id": c.claim_id,
                    "description": c.description,
                    "computed": float(f"{c.computed:.12g}"),
                    "target": float(f"{c.target:.12g}"),
                    "tolerance": float(f"{c.tolerance:.12g}"),
                    "passed": c.passed,
                }
                for c in self.checks
            ],
            "overall": self.overall,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


# random instance generators, shared with the test suite


def random_product_game(rng: np.random.Generator) -> AbsorbingGame:
    """3x3 game whose absorbing action pairs form a full rectangle: one or
    two absorbing rows, a nonempty set of absorbing columns, absorption
    probabilities in [0.2, 0.9] split over two absorbing states."""
    reward = rng.uniform(0.0, 1.0, (3, 3))
    rows = sorted(rng.choice(3, size=int(rng.integers(1, 3)), replace=False).tolist())
    cols = sorted(rng.choice(3, size=int(rng.integers(1, 4)), replace=False).tolist())
    payoffs = np.sort(rng.uniform(0.0, 1.0, 2))
    absorption = np.zeros((3, 3, 2))
    for a in rows:
        for b in cols:
            p = rng.uniform(0.2, 0.9)
            w = rng.uniform()
            absorption[a, b] = p * np.array([w, 1.0 - w])
            reward[a, b] = w * payoffs[0] + (1.0 - w) * payoffs[1]
    return AbsorbingGame(
        actions_p1=("a0", "a1", "a2"),
        actions_p2=("b0", "b1", "b2"),
        reward=reward,
        absorbing_states=("lo", "hi"),
        absorbing_payoffs=payoffs,
        absorption=absorption,
    )


def random_markovian(rng: np.random.Generator) -> MarkovianStrategy:
    """Eventually stationary strategy on (Top, Bottom): a random prefix of
    length up to 50 whose top weights live on one of three scales, then
    either pure Bottom or a constant top weight of 0.1."""
    length = int(rng.integers(0, 51))
    scale = float(rng.choice(np.array([0.005, 0.05, 0.5])))
    p_top = rng.uniform(0.0, scale, size=length)
    tail_top = 0.0 if rng.integers(0, 2) == 0 else 0.1
    return MarkovianStrategy(
        actions_p1=("Top", "Bottom"),
        prefix=np.column_stack([p_top, 1.0 - p_top]),
        tail=np.array([tail_top, 1.0 - tail_top]),
    )


def random_blind_automaton(rng: np.random.Generator) -> Automaton:
    """Autonomous automaton with at most 3 states over (Top, Bottom).

    Three shapes keep all certificate branches reachable: a well-mixed
    chain that plays top often, and two trap shapes that stop playing top
    forever once a no-top state is reached.  Escape rates are bounded below
    so first-top tail probabilities decay within a few dozen stages."""
    k = int(rng.integers(1, 4))
    shape = int(rng.integers(0, 3))
    if k == 1:
        transition = np.array([[1.0]])
        states = ("s0",)
        if shape == 0:
            top = rng.uniform(0.3, 1.0)
        elif shape == 1:
            top = 0.0
        else:
            # single ergodic state: keep the top rate off zero, or the
            # first-top time outlives the 1e-6 evaluation horizon
            top = rng.uniform(0.02, 0.15)
        f_top = np.array([top])
    else:
        states = tuple(f"s{i}" for i in range(k))
        if shape == 0:
            transition = 0.7 * rng.dirichlet(np.ones(k), size=k) + 0.3 / k
            f_top = rng.uniform(0.3, 1.0, size=k)
        else:
            transition = np.zeros((k, k))
            for i in range(k - 1):
                escape = rng.uniform(0.4, 0.8)
                rest = rng.dirichlet(np.ones(k - 1)) * (1.0 - escape)
                transition[i, : k - 1] = rest
                transition[i, k - 1] = escape
            transition[k - 1, k - 1] = 1.0
            live = rng.uniform(0.0, 0.15, k) if shape == 1 else rng.uniform(0.3, 0.9, k)
            f_top = live
            f_top[k - 1] = 0.0
    mu0 = rng.dirichlet(np.ones(k))
    action_map = np.column_stack([f_top, 1.0 - f_top])
    return Automaton(
        states=states,
        mu0=mu0,
        transition=transition,
        actions_p1=("Top", "Bottom"),
        action_map=action_map,
        autonomous=True,
    )


def random_two_phase(game: AbsorbingGame, rng: np.random.Generator) -> TwoPhaseStrategy:
    """Random two-phase strategy on a product game: probe mix supported on
    the absorbing rows, settle mix on the rest (or uniform if there is no
    rest), and a random probe intensity."""
    from .games import a_star_indices

    astar = a_star_indices(game)
    na = game.n_p1
    x_alpha = np.zeros(na)
    x_alpha[astar] = rng.dirichlet(np.ones(len(astar)))
    others = [a for a in range(na) if a not in set(astar)]
    x = np.zeros(na)
    if others:
        x[others] = rng.dirichlet(np.ones(len(others)))
    else:
        x = np.full(na, 1.0 / na)
    alpha_bar = float(rng.uniform(0.1, 100.0))
    return TwoPhaseStrategy(
        kind="two-phase",
        actions_p1=game.actions_p1,
        x=x,
        x_alpha=x_alpha,
        alpha_bar=alpha_bar,
        delta=1.0 / (1.0 + alpha_bar),
    )


def random_absorbing_game(rng: np.random.Generator) -> AbsorbingGame:
    """Small game with arbitrary (not necessarily rectangular) absorption."""
    na = int(rng.integers(2, 4))
    nb = int(rng.integers(2, 4))
    reward = rng.uniform(0.0, 1.0, (na, nb))
    payoffs = rng.uniform(0.0, 1.0, 2)
    absorption = np.zeros((na, nb, 2))
    for a in range(na):
        for b in range(nb):
            if rng.random() < 0.5:
                p = rng.uniform(0.0, 0.6)
                w = rng.uniform()
                absorption[a, b] = p * np.array([w, 1.0 - w])
    return AbsorbingGame(
        actions_p1=tuple(f"a{i}" for i in range(na)),
        actions_p2=tuple(f"b{j}" for j in range(nb)),
        reward=reward,
        absorbing_states=("lo", "hi"),
        absorbing_payoffs=payoffs,
        absorption=absorption,
    )


def random_automaton_for(game: AbsorbingGame, rng: np.random.Generator) -> Automaton:
    """Automaton over the game's rows, autonomous or reaction-driven."""
    k = int(rng.integers(1, 4))
    autonomous = bool(rng.integers(0, 2))
    na, nb = game.n_p1, game.n_p2
    if autonomous:
        transition = rng.dirichlet(np.ones(k), size=k)
    else:
        transition = rng.dirichlet(np.ones(k), size=(k, na, nb))
    return Automaton(
        states=tuple(f"s{i}" for i in range(k)),
        mu0=rng.dirichlet(np.ones(k)),
        transition=transition,
        actions_p1=game.actions_p1,
        action_map=rng.dirichlet(np.ones(na), size=k),
        actions_p2=None if autonomous else game.actions_p2,
        autonomous=autonomous,
    )


def random_stochastic_game(rng: np.random.Generator) -> StochasticGame:
    """Two-state, 2x2 stochastic game; half the draws force opponent columns
    with identical transitions but different rewards, the case that makes
    the robust-MDP rewrite duplicate successor states."""
    rewards = []
    transitions = []
    for _ in range(2):
        r = rng.uniform(0.0, 1.0, (2, 2))
        t = rng.dirichlet(np.ones(2), size=(2, 2))
        if rng.random() < 0.5:
            t[:, 1, :] = t[:, 0, :]
        rewards.append(r)
        transitions.append(t)
    return StochasticGame(
        states=("s0", "s1"),
        actions_p1=("a0", "a1"),
        actions_p2=(("b0", "b1"), ("b0", "b1")),
        reward=tuple(rewards),
        transition=tuple(transitions),
    )


# the checks


def _check_big_match_value(cfg: VerifyConfig) -> list[CheckResult]:
    game = builtin_game("big-match")
    worst = max(abs(discounted_value(game, lam).value - 0.5) for lam in VALUE_LAMBDAS)
    return [
        CheckResult(
            claim_id="value-big-match",
            description=(
                "big-match discounted value equals 1/2; worst |v - 1/2| over "
                "rates 0.5, 0.1, 0.01, 1e-4, 1e-6"
            ),
            computed=worst,
            target=0.0,
            tolerance=cfg.value_tol,
            passed=worst <= cfg.value_tol,
        )
    ]


def _check_modified_big_match(cfg: VerifyConfig) -> list[CheckResult]:
    game = builtin_game("modified-big-match")
    worst_value = 0.0
    worst_weight = 0.0
    for lam in VALUE_LAMBDAS:
        sol = discounted_value(game, lam)
        worst_value = max(worst_value, abs(sol.value - 0.5))
        worst_weight = max(worst_weight, abs(sol.x_opt[0] - lam / (1.0 + lam)))
    return [
        CheckResult(
            claim_id="value-modified-big-match",
            description=(
                "modified-big-match discounted value equals 1/2; worst "
                "|v - 1/2| over rates 0.5, 0.1, 0.01, 1e-4, 1e-6"
            ),
            computed=worst_value,
            target=0.0,
            tolerance=cfg.value_tol,
            passed=worst_value <= cfg.value_tol,
        ),
        CheckResult(
            claim_id="top-weight-modified-big-match",
            description=(
                "optimal top weight equals lam/(1+lam); worst deviation over "
                "the same rate grid"
            ),
            computed=worst_weight,
            target=0.0,
            tolerance=cfg.top_weight_tol,
            passed=worst_weight <= cfg.top_weight_tol,
        ),
    ]


def _check_pgf_geometric(cfg: VerifyConfig) -> list[CheckResult]:
    sigma = coin_toss_automaton()
    worst = 0.0
    for q in np.linspace(0.0, 0.98, 50):
        worst = max(worst, abs(top_count_pgf(sigma, {"Top"}, float(q)) - 1.0 / (2.0 - q)))
    return [
        CheckResult(
            claim_id="pgf-geometric",
            description=(
                "coin-toss automaton top-count transform matches 1/(2-q); "
                "worst deviation over 50 grid points in [0, 0.98]"
            ),
            computed=worst,
            target=0.0,
            tolerance=cfg.pgf_tol,
            passed=worst <= cfg.pgf_tol,
        )
    ]


def _check_automaton_guarantee_grid(cfg: VerifyConfig) -> list[CheckResult]:
    game = builtin_game("modified-big-match")
    sigma = coin_toss_automaton()
    ys = simplex_grid(3, 0.02)
    gammas = eval_discounted_batch(game, sigma, ys, 1e-5)
    low = float(gammas.min())
    return [
        CheckResult(
            claim_id="automaton-guarantee-grid",
            description=(
                "coin-toss automaton payoff in modified-big-match at rate "
                "1e-5, minimum over the mesh-0.02 opponent grid; must stay "
                "within tolerance below 1/2"
            ),
            computed=low,
            target=0.5,
            tolerance=cfg.grid_guarantee_slack,
            passed=low >= 0.5 - cfg.grid_guarantee_slack,
        )
    ]


def _check_markovian_counter(cfg: VerifyConfig) -> list[CheckResult]:
    c, q, eps_star = tune_counter_constants()
    game = builtin_game("modified-big-match")
    rng = np.random.default_rng(cfg.seed + 5)
    worst_bound = -math.inf
    worst_eval_gap = -math.inf
    for _ in range(cfg.markovian_trials):
        m = random_markovian(rng)
        counter = certified_markovian_bound(m, c, q)
        worst_bound = max(worst_bound, counter.bound)
        gamma = eval_limit(game, m.as_automaton(), counter.y).value
        worst_eval_gap = max(worst_eval_gap, gamma - counter.bound)
    return [
        CheckResult(
            claim_id="counter-constants",
            description=(
                "tuned counter constants give a positive certified gap "
                "below 1/2; computed is the gap, which must reach the target "
                "floor"
            ),
            computed=eps_star,
            target=cfg.eps_star_floor,
            tolerance=0.0,
            passed=eps_star >= cfg.eps_star_floor,
        ),
        CheckResult(
            claim_id="markov-counter-bound",
            description=(
                f"worst certified bound over {cfg.markovian_trials} random "
                "eventually-stationary stage-indexed strategies; must stay "
                "at or below 1/2 minus the certified gap"
            ),
            computed=worst_bound,
            target=0.5 - eps_star,
            tolerance=0.0,
            passed=worst_bound <= 0.5 - eps_star,
        ),
        CheckResult(
            claim_id="markov-counter-eval",
            description=(
                "worst (exact payoff at rate 1e-6) minus (certified bound) "
                "over the same strategies against the returned opponents"
            ),
            computed=worst_eval_gap,
            target=0.0,
            tolerance=cfg.eval_slack,
            passed=worst_eval_gap <= cfg.eval_slack,
        ),
    ]


def _check_le_cam(cfg: VerifyConfig) -> list[CheckResult]:
    rng = np.random.default_rng(cfg.seed + 6)
    worst = -math.inf
    for _ in range(cfg.le_cam_trials):
        length = int(rng.integers(1, 21))
        probs = rng.uniform(0.0, 0.5, size=length)
        dev = le_cam_max_deviation(probs, k_max=length + 25)
        worst = max(worst, dev - float(np.sum(probs**2)))
    return [
        CheckResult(
            claim_id="poisson-approx-bound",
            description=(
                f"success-count vs Poisson deviation minus its quadratic "
                f"budget, worst over {cfg.le_cam_trials} random parameter "
                "lists (length <= 20, probabilities <= 0.5); must not be "
                "positive"
            ),
            computed=worst,
            target=0.0,
            tolerance=0.0,
            passed=worst <= 0.0,
        )
    ]


def _two_phase_guarantee_margin(game: AbsorbingGame, cfg: VerifyConfig) -> float:
    strategy = construct_blackwell_strategy(game, eps=0.1, lambda_probe=1e-4)
    sigma = strategy.as_automaton()
    margin = math.inf
    for lam in (1e-4, 1e-5):
        v = discounted_value(game, lam).value
        _, gamma = best_response_search(game, sigma, lam)
        margin = min(margin, gamma - (v - 0.1))
    return margin


def _check_two_phase_guarantee(cfg: VerifyConfig) -> list[CheckResult]:
    builtin_margin = min(
        _two_phase_guarantee_margin(builtin_game(name), cfg)
        for name in ("big-match", "modified-big-match")
    )
    rng = np.random.default_rng(cfg.seed + 7)
    random_margin = min(
        _two_phase_guarantee_margin(random_product_game(rng), cfg)
        for _ in range(cfg.random_product_games)
    )
    description = (
        "constructed low-discount strategy (eps 0.1, probe rate 1e-4) "
        "against its best stationary response at rates 1e-4 and 1e-5: "
        "payoff minus (discounted value - 0.1), worst case; may dip at "
        "most tolerance below zero"
    )
    return [
        CheckResult(
            claim_id="two-phase-guarantee-builtin",
            description=description + " (big-match and modified-big-match)",
            computed=builtin_margin,
            target=0.0,
            tolerance=cfg.construct_slack,
            passed=builtin_margin >= -cfg.construct_slack,
        ),
        CheckResult(
            claim_id="two-phase-guarantee-random",
            description=description
            + f" ({cfg.random_product_games} random 3x3 rectangular-absorption games)",
            computed=random_margin,
            target=0.0,
            tolerance=cfg.construct_slack,
            passed=random_margin >= -cfg.construct_slack,
        ),
    ]


def _check_blind_counter(cfg: VerifyConfig) -> list[CheckResult]:
    game = builtin_game("table3")
    rng = np.random.default_rng(cfg.seed + 8)
    automata = [coin_toss_automaton()]
    automata += [random_blind_automaton(rng) for _ in range(cfg.blind_automata)]
    cap = 1.0 / 3.0 + 0.05
    worst_bound = -math.inf
    worst_eval_gap = -math.inf
    for sigma in automata:
        counter = certified_blind_bound(sigma, eps_inner=0.05)
        worst_bound = max(worst_bound, counter.bound)
        gamma = eval_limit(game, sigma, counter.y).value
        worst_eval_gap = max(worst_eval_gap, gamma - counter.bound)
    return [
        CheckResult(
            claim_id="blind-counter-bound",
            description=(
                "worst certified bound for the coin-toss automaton plus "
                f"{cfg.blind_automata} random small automata in the "
                "two-sided-absorption 2x3 game; must stay at or below "
                "1/3 + 0.05"
            ),
            computed=worst_bound,
            target=cap,
            tolerance=0.0,
            passed=worst_bound <= cap,
        ),
        CheckResult(
            claim_id="blind-counter-eval",
            description=(
                "worst (exact payoff at rate 1e-6) minus (certified bound) "
                "over the same automata against the returned opponents"
            ),
            computed=worst_eval_gap,
            target=0.0,
            tolerance=cfg.eval_slack,
            passed=worst_eval_gap <= cfg.eval_slack,
        ),
    ]


def _check_switch_identity(cfg: VerifyConfig) -> list[CheckResult]:
    rng = np.random.default_rng(cfg.seed + 9)
    worst = 0.0
    for _ in range(cfg.identity_trials):
        game = random_product_game(rng)
        strategy = random_two_phase(game, rng)
        y = rng.dirichlet(np.ones(game.n_p2))
        lhs, rhs = switch_survival_identity(game, strategy, y)
        worst = max(worst, abs(lhs - rhs))
    return [
        CheckResult(
            claim_id="switch-survival-identity",
            description=(
                "probe-phase survival series equals its closed form, worst "
                f"|series - closed form| over {cfg.identity_trials} random "
                "(game, two-phase strategy, opponent) triples"
            ),
            computed=worst,
            target=0.0,
            tolerance=cfg.identity_tol,
            passed=worst <= cfg.identity_tol,
        )
    ]


def _check_simulator_oracle(cfg: VerifyConfig) -> list[CheckResult]:
    rng = np.random.default_rng(cfg.seed + 10)
    hits = 0
    for trial in range(cfg.oracle_trials):
        game = random_absorbing_game(rng)
        sigma = random_automaton_for(game, rng)
        y = rng.dirichlet(np.ones(game.n_p2))
        lam = 0.3 if trial % 2 == 0 else 0.05
        exact = eval_discounted(game, sigma, y, lam).gamma
        report = simulate(
            game,
            sigma,
            y,
            lam,
            n_plays=cfg.oracle_plays,
            seed=cfg.seed + 1000 + trial,
        )
        allowed = cfg.se_multiplier * report.std_error + 1e-12
        if abs(report.mean - exact) <= allowed:
            hits += 1
    rate = hits / cfg.oracle_trials
    return [
        CheckResult(
            claim_id="simulator-oracle",
            description=(
                f"fraction of {cfg.oracle_trials} random (game, automaton, "
                f"opponent, rate) draws whose {cfg.oracle_plays}-play Monte "
                "Carlo mean lands within 3 standard errors of the exact "
                "payoff; must reach the target rate"
            ),
            computed=rate,
            target=cfg.oracle_pass_rate,
            tolerance=0.0,
            passed=rate >= cfg.oracle_pass_rate,
        )
    ]


def _check_rmdp_round_trip(cfg: VerifyConfig) -> list[CheckResult]:
    rng = np.random.default_rng(cfg.seed + 11)
    worst = 0.0
    for _ in range(cfg.rmdp_trials):
        sg = random_stochastic_game(rng)
        back = rmdp_to_game(game_to_rmdp(sg))
        direct = shapley_discounted_values(sg, 0.1)
        trip = shapley_discounted_values(back, 0.1)
        dev = float(np.abs(trip[: sg.n_states] - direct).max())
        worst = max(worst, dev)
    return [
        CheckResult(
            claim_id="rmdp-round-trip",
            description=(
                "stochastic game -> robust MDP -> stochastic game preserves "
                f"state values at rate 0.1, worst deviation over "
                f"{cfg.rmdp_trials} random two-state games"
            ),
            computed=worst,
            target=0.0,
            tolerance=cfg.rmdp_tol,
            passed=worst <= cfg.rmdp_tol,
        )
    ]


ALL_CHECKS = (
    _check_big_match_value,
    _check_modified_big_match,
    _check_pgf_geometric,
    _check_automaton_guarantee_grid,
    _check_markovian_counter,
    _check_le_cam,
    _check_two_phase_guarantee,
    _check_blind_counter,
    _check_switch_identity,
    _check_simulator_oracle,
    _check_rmdp_round_trip,
)


def verify_paper(config: VerifyConfig | None = None) -> VerificationReport:
    """Run every check and collect the report; deterministic given the
    configured seeds."""
    cfg = config or VerifyConfig()
    checks: list[CheckResult] = []
    for fn in ALL_CHECKS:
        checks.extend(fn(cfg))
    return VerificationReport(checks=tuple(checks))

"""Command-line front end.

Every subcommand supports --json; the JSON document carries exactly the
numbers the human-readable output shows, rounded the same way (12
significant digits).  Exit codes: 0 success, 1 verification failure,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .adversaries import (
    best_response_search,
    certified_blind_bound,
    certified_markovian_bound,
    tune_counter_constants,
)
from .evaluate import eval_discounted
from .games import builtin_game, resolve_game, save_game
from .rmdp import (
    absorbing_to_stochastic,
    as_absorbing_game,
    game_to_rmdp,
    load_rmdp,
    load_stochastic_game,
    rmdp_to_game,
    save_rmdp,
    save_stochastic_game,
)
from .simulate import simulate
from .strategies import (
    Automaton,
    MarkovianStrategy,
    construct_blackwell_strategy,
    load_strategy,
    save_strategy,
)
from .values import discounted_value, optimal_strategy_profile
from .verify import VerifyConfig, verify_paper


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _num(x: float) -> float:
    return float(_fmt(x))


def _floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from exc


def _emit(args, lines: list[str], payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _strategy_automaton(strategy) -> Automaton:
    return strategy if isinstance(strategy, Automaton) else strategy.as_automaton()


def _cmd_value(args) -> int:
    game = resolve_game(args.game)
    sol = discounted_value(game, args.lam)
    lines = ["lambda\tvalue\tresidual", f"{_fmt(sol.lam)}\t{_fmt(sol.value)}\t{_fmt(sol.residual)}"]
    payload = {
        "rows": [
            {"lambda": _num(sol.lam), "value": _num(sol.value), "residual": _num(sol.residual)}
        ]
    }
    _emit(args, lines, payload)
    return 0


def _cmd_value_sweep(args) -> int:
    game = resolve_game(args.game)
    grid = _floats(args.grid)
    if not grid:
        raise ValueError("--grid must list at least one discount rate")
    lines = ["lambda\tvalue\tresidual"]
    rows = []
    for lam in grid:
        sol = discounted_value(game, lam)
        lines.append(f"{_fmt(sol.lam)}\t{_fmt(sol.value)}\t{_fmt(sol.residual)}")
        rows.append(
            {"lambda": _num(sol.lam), "value": _num(sol.value), "residual": _num(sol.residual)}
        )
    _emit(args, lines, {"rows": rows})
    return 0


def _cmd_eval(args) -> int:
    game = resolve_game(args.game)
    sigma = _strategy_automaton(load_strategy(args.strategy))
    y = np.asarray(_floats(args.y))
    result = eval_discounted(game, sigma, y, args.lam)
    lines = [f"gamma\t{_fmt(result.gamma)}"]
    for name, w in zip(result.states, result.state_values):
        lines.append(f"W[{name}]\t{_fmt(w)}")
    lines.append(f"absorb_prob\t{_fmt(result.absorb_prob)}")
    lines.append(f"terminal_mean\t{_fmt(result.terminal_mean)}")
    payload = {
        "gamma": _num(result.gamma),
        "state_values": {n: _num(w) for n, w in zip(result.states, result.state_values)},
        "absorb_prob": _num(result.absorb_prob),
        "terminal_mean": _num(result.terminal_mean),
    }
    _emit(args, lines, payload)
    return 0


def _certificate_lines(certificate: dict) -> list[str]:
    lines = []
    for key, value in certificate.items():
        shown = _fmt(value) if isinstance(value, float) else str(value)
        lines.append(f"certificate.{key}\t{shown}")
    return lines


def _certificate_payload(certificate: dict) -> dict:
    return {k: (_num(v) if isinstance(v, float) else v) for k, v in certificate.items()}


def _cmd_adversary(args) -> int:
    game = resolve_game(args.game)
    strategy = load_strategy(args.strategy)
    sigma = _strategy_automaton(strategy)

    counter = None
    if isinstance(strategy, MarkovianStrategy) and game.same_game(
        builtin_game("modified-big-match")
    ):
        c, q, _ = tune_counter_constants()
        counter = certified_markovian_bound(strategy, c, q)
    elif sigma.autonomous and game.same_game(builtin_game("table3")):
        counter = certified_blind_bound(sigma, eps_inner=0.05)

    if counter is not None:
        y = counter.y
        gamma = eval_discounted(game, sigma, y, args.lam).gamma
    else:
        y, gamma = best_response_search(game, sigma, args.lam, grid_step=args.grid)

    y_text = ",".join(_fmt(v) for v in y)
    lines = [f"y\t{y_text}", f"gamma\t{_fmt(gamma)}"]
    payload = {
        "y": {name: _num(v) for name, v in zip(game.actions_p2, y)},
        "gamma": _num(gamma),
    }
    if counter is not None:
        lines.append(f"bound\t{_fmt(counter.bound)}")
        lines.extend(_certificate_lines(counter.certificate))
        payload["bound"] = _num(counter.bound)
        payload["certificate"] = _certificate_payload(counter.certificate)
    _emit(args, lines, payload)
    return 0


def _cmd_construct(args) -> int:
    game = resolve_game(args.game)
    strategy = construct_blackwell_strategy(game, eps=args.eps, lambda_probe=args.lambda_probe)
    lines = [f"kind\t{strategy.kind}"]
    payload: dict = {"kind": strategy.kind}
    payload["x"] = {a: _num(v) for a, v in zip(strategy.actions_p1, strategy.x)}
    lines.append("x\t" + ",".join(_fmt(v) for v in strategy.x))
    if strategy.kind == "two-phase":
        lines.append("x_alpha\t" + ",".join(_fmt(v) for v in strategy.x_alpha))
        lines.append(f"alpha_bar\t{_fmt(strategy.alpha_bar)}")
        lines.append(f"delta\t{_fmt(strategy.delta)}")
        lines.append(f"branch_stable\t{strategy.branch_stable}")
        payload["x_alpha"] = {a: _num(v) for a, v in zip(strategy.actions_p1, strategy.x_alpha)}
        payload["alpha_bar"] = _num(strategy.alpha_bar)
        payload["delta"] = _num(strategy.delta)
        payload["branch_stable"] = strategy.branch_stable
    if args.out:
        save_strategy(strategy, args.out)
        lines.append(f"saved\t{args.out}")
        payload["saved"] = args.out
    _emit(args, lines, payload)
    return 0


def _cmd_simulate(args) -> int:
    game = resolve_game(args.game)
    sigma = _strategy_automaton(load_strategy(args.strategy))
    y = np.asarray(_floats(args.y))
    report = simulate(
        game, sigma, y, args.lam, n_plays=args.n, seed=args.seed, horizon=args.horizon
    )
    lines = [
        f"mean\t{_fmt(report.mean)}",
        f"std_error\t{_fmt(report.std_error)}",
        f"absorb_freq\t{_fmt(report.absorb_freq)}",
        f"n_plays\t{report.n_plays}",
        f"horizon\t{report.horizon}",
        f"seed\t{report.seed}",
    ]
    payload = {
        "mean": _num(report.mean),
        "std_error": _num(report.std_error),
        "absorb_freq": _num(report.absorb_freq),
        "n_plays": report.n_plays,
        "horizon": report.horizon,
        "seed": report.seed,
    }
    _emit(args, lines, payload)
    return 0


def _load_for_convert(path: str):
    with open(path) as fh:
        data = json.load(fh)
    if "uncertainty" in data:
        return "rmdp", load_rmdp(path)
    if "transition" in data:
        return "stochastic-game", load_stochastic_game(path)
    if "absorbing_states" in data:
        return "absorbing-game", resolve_game(path)
    raise ValueError(f"unrecognized input format in {path}")


def _cmd_rmdp_convert(args) -> int:
    kind, obj = _load_for_convert(args.input)
    direction = args.direction
    if direction is None:
        direction = "to-game" if kind == "rmdp" else "to-rmdp"

    if direction == "to-game":
        if kind != "rmdp":
            raise ValueError("--direction to-game needs a robust MDP input file")
        sg = rmdp_to_game(obj)
        try:
            game = as_absorbing_game(sg)
            save_game(game, args.out)
            shape = f"absorbing game, {game.n_p1}x{game.n_p2}"
        except ValueError:
            save_stochastic_game(sg, args.out)
            shape = f"stochastic game, {sg.n_states} states"
    else:
        if kind == "rmdp":
            raise ValueError("--direction to-rmdp needs a game input file")
        sg = absorbing_to_stochastic(obj) if kind == "absorbing-game" else obj
        m = game_to_rmdp(sg)
        save_rmdp(m, args.out)
        shape = f"robust MDP, {len(m.states)} states"

    lines = [f"wrote\t{args.out}", f"format\t{shape}"]
    _emit(args, lines, {"wrote": args.out, "format": shape})
    return 0


def _cmd_verify_paper(args) -> int:
    cfg = VerifyConfig(seed=args.seed) if args.seed is not None else VerifyConfig()
    report = verify_paper(cfg)
    if args.json:
        print(report.to_json())
    else:
        print(report.to_text())
    return 0 if report.overall else 1


def _add_game_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", required=True, help="builtin name or path to a game file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="absorbing-games",
        description="Solver and verification lab for absorbing stochastic games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("value", help="discounted value at one rate")
    _add_game_flag(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_value)

    p = sub.add_parser("value-sweep", help="discounted values along a rate grid")
    _add_game_flag(p)
    p.add_argument("--grid", required=True, help="comma-separated discount rates")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_value_sweep)

    p = sub.add_parser("eval", help="exact payoff of a strategy file against a mixed column")
    _add_game_flag(p)
    p.add_argument("--strategy", required=True)
    p.add_argument("--y", required=True, help="comma-separated opponent weights")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("adversary", help="strong stationary opponent, certified when available")
    _add_game_flag(p)
    p.add_argument("--strategy", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--grid", type=float, default=0.02, help="search mesh")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_adversary)

    p = sub.add_parser("construct", help="build the low-discount two-phase strategy")
    _add_game_flag(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--lambda-probe", dest="lambda_probe", type=float, default=1e-4)
    p.add_argument("--out", help="write the strategy file here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of a discounted payoff")
    _add_game_flag(p)
    p.add_argument("--strategy", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("rmdp-convert", help="translate between game and robust-MDP files")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--direction", choices=("to-game", "to-rmdp"), default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_rmdp_convert)

    p = sub.add_parser("verify-paper", help="run the full verification suite")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify_paper)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

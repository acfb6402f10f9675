"""Solver and verification laboratory for zero-sum absorbing stochastic
games played against stationary opponents: discounted and limit values,
finite-automaton strategies with exact evaluation, certified adversaries,
a robust-MDP bridge, and a Monte Carlo oracle."""

from .adversaries import (
    CertifiedBound,
    best_response_search,
    certified_blind_bound,
    certified_markovian_bound,
    counter_eps,
    le_cam_max_deviation,
    simplex_grid,
    tune_counter_constants,
)
from .evaluate import (
    EvalResult,
    EvalSweep,
    blind_limit_payoff_formula,
    eval_discounted,
    eval_discounted_batch,
    eval_limit,
    stationary_discounted_payoff,
    switch_survival_identity,
)
from .games import (
    BUILTIN_GAMES,
    AbsorbingGame,
    ProductStructure,
    a_star_indices,
    builtin_game,
    classify,
    game_from_dict,
    game_to_dict,
    is_generalized_big_match,
    load_game,
    resolve_game,
    save_game,
)
from .matrix import MatrixGameSolution, solve_matrix_game
from .rmdp import (
    RmdpInstance,
    StochasticGame,
    absorbing_to_stochastic,
    as_absorbing_game,
    game_to_rmdp,
    load_rmdp,
    load_stochastic_game,
    rmdp_to_game,
    robust_discounted_values,
    save_rmdp,
    save_stochastic_game,
    shapley_discounted_values,
)
from .simulate import SimReport, default_horizon, sample_top_counts, simulate
from .strategies import (
    Automaton,
    GeometricPgfReport,
    MarkovianStrategy,
    StationaryStrategy,
    TwoPhaseStrategy,
    coin_toss_automaton,
    construct_blackwell_strategy,
    expected_top_plays,
    geometric_pgf_report,
    load_strategy,
    save_strategy,
    stationary_automaton,
    strategy_from_dict,
    strategy_to_dict,
    top_count_pgf,
)
from .values import (
    DiscountedSolution,
    LimitValueAction,
    LimitValueResponse,
    ValueSweep,
    auxiliary_matrix,
    discounted_value,
    limit_game_payoff,
    limit_value_estimate,
    optimal_strategy_profile,
)
from .verify import (
    CheckResult,
    VerificationReport,
    VerifyConfig,
    verify_paper,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorbingGame",
    "Automaton",
    "BUILTIN_GAMES",
    "CertifiedBound",
    "CheckResult",
    "DiscountedSolution",
    "EvalResult",
    "EvalSweep",
    "GeometricPgfReport",
    "LimitValueAction",
    "LimitValueResponse",
    "MarkovianStrategy",
    "MatrixGameSolution",
    "ProductStructure",
    "RmdpInstance",
    "SimReport",
    "StationaryStrategy",
    "StochasticGame",
    "TwoPhaseStrategy",
    "ValueSweep",
    "VerificationReport",
    "VerifyConfig",
    "a_star_indices",
    "absorbing_to_stochastic",
    "as_absorbing_game",
    "auxiliary_matrix",
    "best_response_search",
    "blind_limit_payoff_formula",
    "builtin_game",
    "certified_blind_bound",
    "certified_markovian_bound",
    "classify",
    "coin_toss_automaton",
    "construct_blackwell_strategy",
    "counter_eps",
    "default_horizon",
    "discounted_value",
    "eval_discounted",
    "eval_discounted_batch",
    "eval_limit",
    "expected_top_plays",
    "game_from_dict",
    "game_to_dict",
    "game_to_rmdp",
    "geometric_pgf_report",
    "is_generalized_big_match",
    "le_cam_max_deviation",
    "limit_game_payoff",
    "limit_value_estimate",
    "load_game",
    "load_rmdp",
    "load_stochastic_game",
    "load_strategy",
    "optimal_strategy_profile",
    "resolve_game",
    "rmdp_to_game",
    "robust_discounted_values",
    "sample_top_counts",
    "save_game",
    "save_rmdp",
    "save_stochastic_game",
    "save_strategy",
    "shapley_discounted_values",
    "simplex_grid",
    "simulate",
    "solve_matrix_game",
    "stationary_automaton",
    "stationary_discounted_payoff",
    "strategy_from_dict",
    "strategy_to_dict",
    "switch_survival_identity",
    "top_count_pgf",
    "tune_counter_constants",
    "verify_paper",
]

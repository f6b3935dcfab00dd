"""Discrete-time quantum walks with position-dependent coins, and the Parrondo games built from them."""

__version__ = "0.1.0"

from .walk import (
    DEFAULT_SPINOR,
    CapacityError,
    CoinAngles,
    Homogeneous,
    Periodic,
    WalkState,
    build_coin,
    coin_for_site,
    evolve,
    initial_state,
    oracle_evolve,
    position_distribution,
    step,
)
from .games import (
    PRESETS,
    GamePreset,
    PayoffRecord,
    Verdict,
    classify,
    mean_position,
    payoff,
    run_game,
)
from .analysis import (
    alpha_b_flatness,
    beta_scan,
    equivalence_report,
    extract_M,
    q_series,
    step_series,
    sweep,
    sweep2d,
    verify_factorization,
)

__all__ = [
    "DEFAULT_SPINOR",
    "CapacityError",
    "CoinAngles",
    "Homogeneous",
    "Periodic",
    "WalkState",
    "build_coin",
    "coin_for_site",
    "evolve",
    "initial_state",
    "oracle_evolve",
    "position_distribution",
    "step",
    "PRESETS",
    "GamePreset",
    "PayoffRecord",
    "Verdict",
    "classify",
    "mean_position",
    "payoff",
    "run_game",
    "alpha_b_flatness",
    "beta_scan",
    "equivalence_report",
    "extract_M",
    "q_series",
    "step_series",
    "sweep",
    "sweep2d",
    "verify_factorization",
]

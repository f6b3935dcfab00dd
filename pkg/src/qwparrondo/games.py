"""Payoff, win/loss classification and the built-in game presets."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

from .walk import (
    DEFAULT_SPINOR,
    CoinAngles,
    CoinSchedule,
    Homogeneous,
    Periodic,
    WalkState,
    build_coin,
    evolve,
    initial_state,
    probabilities,
)

__all__ = [
    "DRAW_TOL",
    "Verdict",
    "PayoffRecord",
    "GamePreset",
    "PRESETS",
    "get_preset",
    "payoff",
    "payoff_from_probs",
    "classify",
    "mean_position",
    "run_game",
]

DRAW_TOL = 1e-12


class Verdict(str, enum.Enum):
    WIN = "Win"
    LOSS = "Loss"
    DRAW = "Draw"

    def __str__(self) -> str:
        return self.value


def classify(value: float, draw_tol: float = DRAW_TOL) -> Verdict:
    if draw_tol < 0:
        raise ValueError("draw_tol must be non-negative")
    if value > draw_tol:
        return Verdict.WIN
    if value < -draw_tol:
        return Verdict.LOSS
    return Verdict.DRAW


@dataclass(frozen=True)
class PayoffRecord:
    p_right: float
    p_left: float
    payoff: float
    verdict: Verdict


def payoff_from_probs(probs: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    P_R - P_L for distributions over sites ``-n .. n`` (last axis, length 2n+1).

    Summed as sum_{x>0} (P(x) - P(-x)) so that mirror-symmetric
    distributions give an exact zero.
    """
    probs = np.asarray(probs)
    n = (probs.shape[-1] - 1) // 2
    right = probs[..., n + 1 :]
    left_mirrored = probs[..., n - 1 :: -1] if n > 0 else probs[..., :0]
    return np.sum(right - left_mirrored, axis=-1)


def payoff(state: WalkState, draw_tol: float = DRAW_TOL) -> PayoffRecord:
    """P_R and P_L exclude the origin."""
    probs = probabilities(state)
    n = state.capacity
    p_right = float(np.sum(probs[n + 1 :]))
    p_left = float(np.sum(probs[:n]))
    value = float(payoff_from_probs(probs))
    return PayoffRecord(p_right, p_left, value, classify(value, draw_tol))


def mean_position(state: WalkState) -> float:
    """<x> = sum_x x P(x)."""
    return float(np.dot(state.sites, probabilities(state)))


@dataclass(frozen=True)
class GamePreset:
    """A named position-periodic game: coin A on multiples of ``q``, coin B elsewhere."""

    name: str
    q: int
    coin_a: CoinAngles
    coin_b: CoinAngles
    steps: int = 100
    description: str = ""

    def schedule(self, nonnegative_only: bool = False) -> Periodic:
        return Periodic(self.q, build_coin(self.coin_a), build_coin(self.coin_b), nonnegative_only)

    def game_a(self) -> Homogeneous:
        return Homogeneous(build_coin(self.coin_a))

    def game_b(self) -> Homogeneous:
        return Homogeneous(build_coin(self.coin_b))


PRESETS: dict[str, GamePreset] = {
    p.name: p
    for p in (
        GamePreset(
            "game1",
            3,
            CoinAngles(-51, 45, 0),
            CoinAngles(0, 88, -16),
            description="ABB optimum of the (alpha_A, gamma_B) sweep",
        ),
        GamePreset(
            "game2",
            3,
            CoinAngles(0, 45, -51),
            CoinAngles(0, 88, -67),
            description="ABB optimum of the (gamma_A, gamma_B) sweep",
        ),
    )
}


def get_preset(name: str) -> GamePreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


GameSpec = Union[str, GamePreset, Homogeneous, Periodic]


def _resolve(game: GameSpec) -> CoinSchedule:
    if isinstance(game, str):
        game = get_preset(game)
    if isinstance(game, GamePreset):
        return game.schedule()
    if isinstance(game, (Homogeneous, Periodic)):
        return game
    raise TypeError(f"cannot build a schedule from {type(game).__name__}")


def run_game(
    game: GameSpec,
    steps: int = 100,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
    draw_tol: float = DRAW_TOL,
) -> PayoffRecord:
    """Play ``game`` for ``steps`` steps from ``spinor`` at the origin."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    schedule = _resolve(game)
    state = evolve(initial_state(spinor, steps), schedule, steps)
    return payoff(state, draw_tol)

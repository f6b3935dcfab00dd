"""
State-vector evolution of a discrete-time quantum walk on the line.

Chirality index 0 is down/L (moves to x - 1), index 1 is up/R (moves to x + 1).
Amplitudes are stored chirality-major: ``amp[c, x + capacity]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "DOWN",
    "UP",
    "DEFAULT_SPINOR",
    "CapacityError",
    "CoinAngles",
    "Homogeneous",
    "Periodic",
    "CoinSchedule",
    "WalkState",
    "build_coin",
    "build_coins",
    "initial_state",
    "coin_for_site",
    "coin_field",
    "step",
    "evolve",
    "position_distribution",
    "probabilities",
    "oracle_evolve",
    "evolve_batch",
]

DOWN = 0
UP = 1

DEFAULT_SPINOR: tuple[complex, complex] = (1 / math.sqrt(2), 1j / math.sqrt(2))

ORACLE_MAX_STEPS = 12


class CapacityError(ValueError):
    """Raised when a walk would leave the allocated site range."""


@dataclass(frozen=True)
class CoinAngles:
    """Coin parameters in degrees; ``theta`` is the global phase."""

    alpha: float
    beta: float
    gamma: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma", "theta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def parse(cls, text: str) -> "CoinAngles":
        """Parse ``"alpha,beta,gamma[,theta]"`` (degrees)."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) not in (3, 4):
            raise ValueError(f"expected 3 or 4 comma-separated angles, got {text!r}")
        return cls(*(float(p) for p in parts))

    def replace(self, **changes: float) -> "CoinAngles":
        values = {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "theta": self.theta}
        values.update(changes)
        return CoinAngles(**values)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.theta)


def build_coin(angles: CoinAngles) -> NDArray[np.complex128]:
    """
    Return the 2x2 coin

        e^{i theta} [[ e^{i alpha} cos(beta), -e^{-i gamma} sin(beta) ],
                     [ e^{i gamma} sin(beta),  e^{-i alpha} cos(beta) ]]

    with all angles given in degrees. ``theta = 0`` is the SU(2) case.
    """
    if not isinstance(angles, CoinAngles):
        angles = CoinAngles(*angles)
    return build_coins(angles.alpha, angles.beta, angles.gamma, angles.theta)


def build_coins(alpha, beta, gamma, theta=0.0) -> NDArray[np.complex128]:
    """Vectorised :func:`build_coin`; broadcasts the angle arrays, returns shape ``(..., 2, 2)``."""
    a, b, g, th = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (alpha, beta, gamma, theta)))
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(g)) and np.all(np.isfinite(th))):
        raise ValueError("coin angles must be finite")
    a, b, g, th = (np.deg2rad(v) for v in (a, b, g, th))
    phase = np.exp(1j * th)
    cb, sb = np.cos(b), np.sin(b)
    out = np.empty(a.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = phase * np.exp(1j * a) * cb
    out[..., 0, 1] = -phase * np.exp(-1j * g) * sb
    out[..., 1, 0] = phase * np.exp(1j * g) * sb
    out[..., 1, 1] = phase * np.exp(-1j * a) * cb
    return out


def _as_coin(coin) -> NDArray[np.complex128]:
    if isinstance(coin, CoinAngles):
        return build_coin(coin)
    arr = np.asarray(coin, dtype=np.complex128)
    if arr.shape != (2, 2):
        raise ValueError(f"coin must have shape (2, 2); got {arr.shape}")
    return arr


@dataclass(frozen=True)
class Homogeneous:
    """The same coin on every site."""

    coin: NDArray[np.complex128]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coin", _as_coin(self.coin))


@dataclass(frozen=True)
class Periodic:
    """
    ``coin_a`` on sites that are integer multiples of ``q``, ``coin_b`` elsewhere.

    With ``nonnegative_only`` only x = 0, q, 2q, ... receive ``coin_a``; the
    default treats negative multiples as A-sites too.
    """

    q: int
    coin_a: NDArray[np.complex128]
    coin_b: NDArray[np.complex128]
    nonnegative_only: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.q, bool) or int(self.q) != self.q or self.q < 1:
            raise ValueError(f"period q must be a positive integer, got {self.q!r}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "coin_a", _as_coin(self.coin_a))
        object.__setattr__(self, "coin_b", _as_coin(self.coin_b))

    def is_a_site(self, x):
        hit = np.mod(x, self.q) == 0
        if self.nonnegative_only:
            hit = hit & (np.asarray(x) >= 0)
        return hit


CoinSchedule = Union[Homogeneous, Periodic]


def coin_for_site(schedule: CoinSchedule, x: int) -> NDArray[np.complex128]:
    if isinstance(schedule, Homogeneous):
        return schedule.coin
    return schedule.coin_a if bool(schedule.is_a_site(x)) else schedule.coin_b


def coin_field(schedule: CoinSchedule, xs: NDArray[np.int64]) -> NDArray[np.complex128]:
    """Coins for every site in ``xs``, shape ``(len(xs), 2, 2)``."""
    xs = np.asarray(xs)
    if isinstance(schedule, Homogeneous):
        return np.broadcast_to(schedule.coin, xs.shape + (2, 2)).copy()
    mask = schedule.is_a_site(xs)
    return np.where(mask[:, None, None], schedule.coin_a, schedule.coin_b)


@dataclass
class WalkState:
    """Walker after ``t`` steps on sites ``-capacity .. capacity``."""

    t: int
    capacity: int
    amp: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        if self.amp.shape != (2, 2 * self.capacity + 1):
            raise ValueError(
                f"amp must have shape (2, {2 * self.capacity + 1}); got {self.amp.shape}"
            )

    @property
    def sites(self) -> NDArray[np.int64]:
        return np.arange(-self.capacity, self.capacity + 1)

    def amplitude(self, x: int, chirality: int) -> complex:
        if abs(x) > self.capacity:
            return 0j
        return complex(self.amp[chirality, x + self.capacity])

    def norm(self) -> float:
        return float(np.sum(self.amp.real**2 + self.amp.imag**2))

    def copy(self) -> "WalkState":
        return WalkState(self.t, self.capacity, self.amp.copy())


def initial_state(
    spinor: tuple[complex, complex] = DEFAULT_SPINOR, capacity: int = 100
) -> WalkState:
    """Walker localised at the origin with coin state ``a|down> + b|up>``."""
    a, b = (complex(v) for v in spinor)
    norm = abs(a) ** 2 + abs(b) ** 2
    if not math.isfinite(norm) or abs(norm - 1.0) > 1e-12:
        raise ValueError(f"spinor must be normalised, |a|^2 + |b|^2 = {norm!r}")
    if isinstance(capacity, bool) or int(capacity) != capacity or capacity < 0:
        raise ValueError(f"capacity must be a non-negative integer, got {capacity!r}")
    capacity = int(capacity)
    amp = np.zeros((2, 2 * capacity + 1), dtype=np.complex128)
    amp[DOWN, capacity] = a
    amp[UP, capacity] = b
    return WalkState(0, capacity, amp)


def _advance(amp: NDArray[np.complex128], coins: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # coin at the pre-shift site, then up -> x+1, down -> x-1
    down, up = amp[0], amp[1]
    new_down = coins[0, 0] * down + coins[0, 1] * up
    new_up = coins[1, 0] * down + coins[1, 1] * up
    out = np.zeros_like(amp)
    out[0, :-1] = new_down[1:]
    out[1, 1:] = new_up[:-1]
    return out


def _split_coins(schedule: CoinSchedule, xs) -> NDArray[np.complex128]:
    # (X, 2, 2) -> (2, 2, X) so that coins[i, j] lines up with amp rows
    return np.moveaxis(coin_field(schedule, xs), 0, -1)


def _check_capacity(state: WalkState, steps: int) -> None:
    if state.t + steps > state.capacity:
        raise CapacityError(
            f"walk needs capacity >= {state.t + steps}, state has {state.capacity}"
        )


def step(state: WalkState, schedule: CoinSchedule) -> WalkState:
    """Apply one coin-then-shift step; returns a new state."""
    return evolve(state, schedule, 1)


def evolve(state: WalkState, schedule: CoinSchedule, steps: int) -> WalkState:
    """Apply ``steps`` successive steps; the input state is not modified."""
    if isinstance(steps, bool) or int(steps) != steps or steps < 0:
        raise ValueError(f"steps must be a non-negative integer, got {steps!r}")
    steps = int(steps)
    _check_capacity(state, steps)
    if steps == 0:
        return state.copy()
    coins = _split_coins(schedule, state.sites)
    amp = state.amp
    for _ in range(steps):
        amp = _advance(amp, coins)
    return WalkState(state.t + steps, state.capacity, amp)


def probabilities(state: WalkState) -> NDArray[np.float64]:
    """P(x) over the full site range ``-capacity .. capacity``."""
    amp = state.amp
    return np.sum(amp.real**2 + amp.imag**2, axis=0)


def position_distribution(state: WalkState) -> dict[int, float]:
    """``{x: P(x)}`` for every site with non-zero probability."""
    probs = probabilities(state)
    return {int(x): float(p) for x, p in zip(state.sites, probs) if p > 0.0}


def oracle_evolve(
    spinor: tuple[complex, complex],
    schedule: CoinSchedule,
    steps: int,
) -> dict[int, float]:
    """
    Brute-force distribution after ``steps`` steps by summing over all
    2**steps chirality paths.

    Independent of the array kernel: plain Python complex arithmetic, one
    path at a time. Only meant for conformance checks on short walks.
    """
    if steps < 0 or steps > ORACLE_MAX_STEPS:
        raise ValueError(f"oracle supports 0 <= steps <= {ORACLE_MAX_STEPS}, got {steps}")
    coin_cache: dict[int, list[list[complex]]] = {}

    def entry(x: int, out_c: int, in_c: int) -> complex:
        if x not in coin_cache:
            m = coin_for_site(schedule, x)
            coin_cache[x] = [[complex(m[i, j]) for j in range(2)] for i in range(2)]
        return coin_cache[x][out_c][in_c]

    amplitudes: dict[tuple[int, int], complex] = {}
    for c0, a0 in enumerate((complex(spinor[0]), complex(spinor[1]))):
        if steps == 0:
            amplitudes[(0, c0)] = amplitudes.get((0, c0), 0j) + a0
            continue
        if a0 == 0:
            continue
        for path in itertools.product((DOWN, UP), repeat=steps):
            x, c, a = 0, c0, a0
            for c_next in path:
                a *= entry(x, c_next, c)
                x += 1 if c_next == UP else -1
                c = c_next
            amplitudes[(x, c)] = amplitudes.get((x, c), 0j) + a
    dist: dict[int, float] = {}
    for (x, _), a in amplitudes.items():
        dist[x] = dist.get(x, 0.0) + (a.real**2 + a.imag**2)
    return {x: p for x, p in sorted(dist.items()) if p > 0.0}


def evolve_batch(
    coins_a: NDArray[np.complex128],
    coins_b: NDArray[np.complex128],
    q: int,
    steps: int,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
    nonnegative_only: bool = False,
) -> NDArray[np.float64]:
    """
    Evolve K independent periodic walks at once and return their final
    position distributions, shape ``(K, 2 * steps + 1)``, sites ``-steps .. steps``.

    Walk k uses ``coins_a[k]`` on A-sites and ``coins_b[k]`` elsewhere; a
    homogeneous walk is ``q = 1`` (or ``coins_a is coins_b``). Each walk is
    computed with the same per-site arithmetic as :func:`evolve`, restricted
    to the light cone, so results do not depend on K or on batch order.
    """
    coins_a = np.asarray(coins_a, dtype=np.complex128)
    coins_b = np.asarray(coins_b, dtype=np.complex128)
    if coins_a.ndim != 3 or coins_a.shape[1:] != (2, 2) or coins_b.shape != coins_a.shape:
        raise ValueError("coins_a and coins_b must both have shape (K, 2, 2)")
    init = initial_state(spinor, 0)
    n = int(steps)
    k = coins_a.shape[0]
    xs = np.arange(-n, n + 1)
    mask = Periodic(q, np.eye(2), np.eye(2), nonnegative_only).is_a_site(xs)
    # (2, 2, K, X)
    coins = np.where(
        mask[None, None, None, :],
        np.moveaxis(coins_a, 0, -1)[..., None],
        np.moveaxis(coins_b, 0, -1)[..., None],
    )
    amp = np.zeros((k, 2, 2 * n + 1), dtype=np.complex128)
    amp[:, :, n] = init.amp[:, 0]
    for t in range(n):
        # occupied sites at time t: x in [-t, t] with x = t (mod 2)
        occ = slice(n - t, n + t + 1, 2)
        down = amp[:, 0, occ]
        up = amp[:, 1, occ]
        c = coins[..., occ]
        new_down = c[0, 0] * down + c[0, 1] * up
        new_up = c[1, 0] * down + c[1, 1] * up
        amp[:, :, occ] = 0
        amp[:, 0, n - t - 1 : n + t : 2] = new_down
        amp[:, 1, n - t + 1 : n + t + 2 : 2] = new_up
    return np.sum(amp.real**2 + amp.imag**2, axis=1)

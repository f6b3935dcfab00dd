"""
Parameter scans over coin angles, step counts and periods.

Every grid point is an independent walk. Batches are evaluated with
:func:`qwparrondo.walk.evolve_batch`, whose per-walk arithmetic does not
depend on batch size or order, so results are reproducible bit for bit
whatever the chunking or number of worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .games import (
    DRAW_TOL,
    GamePreset,
    GameSpec,
    Verdict,
    _resolve,
    classify,
    get_preset,
    mean_position,
    payoff,
    payoff_from_probs,
)
from .walk import (
    DEFAULT_SPINOR,
    CoinAngles,
    CoinSchedule,
    Homogeneous,
    Periodic,
    build_coin,
    build_coins,
    evolve,
    evolve_batch,
    initial_state,
)

__all__ = [
    "PARAMETERS",
    "SweepGrid",
    "SeriesResult",
    "FactorizationReport",
    "EquivalenceReport",
    "LongRunReport",
    "batch_payoffs",
    "sweep",
    "sweep2d",
    "extract_M",
    "verify_factorization",
    "beta_scan",
    "alpha_b_flatness",
    "step_series",
    "q_series",
    "equivalence_report",
    "long_run_report",
    "mean_sign_witness",
]

_ANGLES = ("alpha", "beta", "gamma", "theta")

# "alpha_a" sets coin A only; a bare "alpha" sets both coins (homogeneous scans)
PARAMETERS = tuple(f"{a}_{c}" for c in ("a", "b") for a in _ANGLES) + _ANGLES

SWEEP2D_MODES = {
    "alphaA-gammaB": ("alpha_a", "gamma_b"),
    "gammaA-gammaB": ("gamma_a", "gamma_b"),
}

DEFAULT_CHUNK = 2048


@dataclass
class SweepGrid:
    """Payoff on a 1-D or 2-D grid of angle values (degrees)."""

    axes: list[tuple[str, NDArray[np.float64]]]
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        shape = tuple(len(v) for _, v in self.axes)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match axes {shape}")

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.axes]

    @property
    def argmax(self) -> tuple[tuple[float, ...], float]:
        """Coordinates and value of the maximum; ties go to the lexicographically smallest coordinates."""
        best = np.max(self.values)
        hits = np.argwhere(self.values == best)
        coords = sorted(tuple(float(self.axes[d][1][i]) for d, i in enumerate(idx)) for idx in hits)
        return coords[0], float(best)

    def second_best(self) -> float:
        flat = np.sort(self.values, axis=None)
        return float(flat[-2]) if flat.size > 1 else -math.inf

    def rows(self) -> Iterable[tuple[float, ...]]:
        """Grid points in C order as ``(coord1[, coord2], payoff)``."""
        for idx in np.ndindex(self.values.shape):
            yield tuple(float(self.axes[d][1][i]) for d, i in enumerate(idx)) + (float(self.values[idx]),)


@dataclass
class SeriesResult:
    index_name: str
    index: NDArray[np.float64]
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        self.index = np.asarray(self.index)
        self.values = np.asarray(self.values, dtype=float)
        if self.index.shape != self.values.shape:
            raise ValueError("index and values must have the same length")
        if self.index.size > 1 and np.any(np.diff(self.index) <= 0):
            raise ValueError("index must be strictly increasing")

    @property
    def spread(self) -> float:
        return float(np.max(self.values) - np.min(self.values))

    def verdicts(self, draw_tol: float = DRAW_TOL) -> list[Verdict]:
        return [classify(v, draw_tol) for v in self.values]

    def at(self, index_value) -> float:
        hits = np.flatnonzero(self.index == index_value)
        if hits.size == 0:
            raise KeyError(index_value)
        return float(self.values[hits[0]])


@dataclass
class FactorizationReport:
    beta: float
    t: int
    M: float
    samples: list[tuple[float, float, float, float]]  # (alpha, gamma, measured, predicted)
    max_residual: float = field(init=False)

    def __post_init__(self) -> None:
        self.max_residual = max((abs(m - p) for _, _, m, p in self.samples), default=0.0)


def _payoff_chunk(args) -> NDArray[np.float64]:
    coins_a, coins_b, q, steps, spinor, nonnegative_only = args
    probs = evolve_batch(coins_a, coins_b, q, steps, spinor, nonnegative_only)
    return payoff_from_probs(probs)


def batch_payoffs(
    coins_a: NDArray[np.complex128],
    coins_b: NDArray[np.complex128],
    q: int,
    steps: int,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
    nonnegative_only: bool = False,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> NDArray[np.float64]:
    """P_R - P_L for K walks given as stacked ``(K, 2, 2)`` coin pairs."""
    k = len(coins_a)
    jobs = [
        (coins_a[s : s + chunk], coins_b[s : s + chunk], q, steps, spinor, nonnegative_only)
        for s in range(0, k, chunk)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_payoff_chunk, jobs))
    else:
        parts = [_payoff_chunk(job) for job in jobs]
    return np.concatenate(parts) if parts else np.empty(0)


def _angle_columns(base: CoinAngles, which: str, assignments: dict[str, NDArray]) -> list:
    cols = []
    for angle in _ANGLES:
        value = getattr(base, angle)
        for key in (angle, f"{angle}_{which}"):
            if key in assignments:
                value = assignments[key]
        cols.append(value)
    return cols


def sweep(
    coin_a: CoinAngles,
    coin_b: CoinAngles,
    q: int,
    steps: int,
    axes: Sequence[tuple[str, Sequence[float]]],
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
    nonnegative_only: bool = False,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> SweepGrid:
    """
    Payoff over the Cartesian product of ``axes``.

    Each axis is ``(parameter, values)`` where parameter is one of
    :data:`PARAMETERS`; the swept values replace the matching angle of
    ``coin_a`` / ``coin_b``. Use ``q = 1`` for homogeneous scans.
    """
    if not axes:
        raise ValueError("at least one axis is required")
    norm_axes: list[tuple[str, NDArray[np.float64]]] = []
    for name, values in axes:
        if name not in PARAMETERS:
            raise ValueError(f"unknown sweep parameter {name!r}; choose from {PARAMETERS}")
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError(f"grid for {name!r} must be a non-empty 1-D sequence")
        norm_axes.append((name, arr))
    if len({name for name, _ in norm_axes}) != len(norm_axes):
        raise ValueError("sweep axes must be distinct parameters")
    mesh = np.meshgrid(*(v for _, v in norm_axes), indexing="ij")
    assignments = {name: m.ravel() for (name, _), m in zip(norm_axes, mesh)}
    coins_a = build_coins(*_angle_columns(coin_a, "a", assignments))
    coins_b = build_coins(*_angle_columns(coin_b, "b", assignments))
    size = mesh[0].size
    coins_a = np.broadcast_to(coins_a, (size, 2, 2))
    coins_b = np.broadcast_to(coins_b, (size, 2, 2))
    values = batch_payoffs(coins_a, coins_b, q, steps, spinor, nonnegative_only, workers, chunk)
    return SweepGrid(norm_axes, values.reshape(mesh[0].shape))


def degree_grid(start: float, stop: float, step: float = 1.0) -> NDArray[np.float64]:
    """Inclusive grid ``start, start + step, ..., stop``."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    if stop < start:
        raise ValueError("grid stop must not be below start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def sweep2d(
    mode: str,
    beta_a: float = 45.0,
    beta_b: float = 88.0,
    q: int = 3,
    t: int = 100,
    grid1: Optional[Sequence[float]] = None,
    grid2: Optional[Sequence[float]] = None,
    workers: int = 1,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
    nonnegative_only: bool = False,
) -> SweepGrid:
    """
    Two-angle ABB landscape with every non-swept angle zero.

    ``alphaA-gammaB`` sweeps (alpha_A, gamma_B); ``gammaA-gammaB`` sweeps
    (gamma_A, gamma_B). Grids default to integers in [-180, 0].
    """
    try:
        names = SWEEP2D_MODES[mode]
    except KeyError:
        raise ValueError(f"unknown sweep2d mode {mode!r}; choose from {sorted(SWEEP2D_MODES)}") from None
    default = degree_grid(-180, 0)
    grid1 = default if grid1 is None else grid1
    grid2 = default if grid2 is None else grid2
    return sweep(
        CoinAngles(0, beta_a, 0),
        CoinAngles(0, beta_b, 0),
        q,
        t,
        [(names[0], grid1), (names[1], grid2)],
        spinor=spinor,
        nonnegative_only=nonnegative_only,
        workers=workers,
    )


def extract_M(beta: float, t: int, spinor: tuple[complex, complex] = DEFAULT_SPINOR) -> float:
    """Scale factor M(beta, t): the homogeneous payoff at alpha = 90, gamma = 0 where sin(alpha + gamma) = 1."""
    coins = build_coins(90.0, beta, 0.0)[None]
    return float(batch_payoffs(coins, coins, 1, t, spinor)[0])


def verify_factorization(
    beta: float,
    t: int,
    samples: Sequence[tuple[float, float]],
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
) -> FactorizationReport:
    """Compare homogeneous payoffs against M(beta, t) * sin(alpha + gamma) for each (alpha, gamma)."""
    if len(samples) < 3:
        raise ValueError("need at least 3 (alpha, gamma) samples")
    m = extract_M(beta, t, spinor)
    alphas = np.array([a for a, _ in samples], dtype=float)
    gammas = np.array([g for _, g in samples], dtype=float)
    coins = build_coins(alphas, beta, gammas)
    measured = batch_payoffs(coins, coins, 1, t, spinor)
    predicted = m * np.sin(np.deg2rad(alphas + gammas))
    rows = [
        (float(a), float(g), float(mv), float(pv))
        for a, g, mv, pv in zip(alphas, gammas, measured, predicted)
    ]
    return FactorizationReport(float(beta), int(t), m, rows)


def beta_scan(
    t: int = 100,
    alpha: float = 0.0,
    gamma: float = 90.0,
    grid: Optional[Sequence[float]] = None,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
) -> SeriesResult:
    """Homogeneous payoff as a function of beta."""
    grid = degree_grid(0, 90) if grid is None else grid
    base = CoinAngles(alpha, 0.0, gamma)
    result = sweep(base, base, 1, t, [("beta", grid)], spinor=spinor)
    return SeriesResult("beta", result.axes[0][1], result.values)


def alpha_b_flatness(
    t: int = 100,
    q: int = 3,
    coin_a: CoinAngles = CoinAngles(15, 45, 30),
    beta_b: float = 88.0,
    gamma_b: float = 0.0,
    grid: Optional[Sequence[float]] = None,
    parameter: str = "alpha_b",
    alpha_b: float = 0.0,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
) -> tuple[SeriesResult, float]:
    """
    Periodic payoff while one coin-B angle is scanned; returns the series
    and its max - min spread. ``parameter="gamma_b"`` gives the control scan.
    """
    if parameter not in ("alpha_b", "gamma_b"):
        raise ValueError("parameter must be 'alpha_b' or 'gamma_b'")
    grid = degree_grid(-180, 180) if grid is None else grid
    result = sweep(coin_a, CoinAngles(alpha_b, beta_b, gamma_b), q, t, [(parameter, grid)], spinor=spinor)
    series = SeriesResult(parameter, result.axes[0][1], result.values)
    return series, series.spread


def step_series(
    game: GameSpec,
    t_max: int,
    even_only: bool = True,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
) -> SeriesResult:
    """Payoff after each step count up to ``t_max`` (t = 2, 4, ... when ``even_only``), from one incremental walk."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    schedule = _resolve(game)
    state = initial_state(spinor, t_max)
    ts, values = [], []
    for t in range(1, t_max + 1):
        state = evolve(state, schedule, 1)
        if even_only and t % 2:
            continue
        ts.append(t)
        values.append(payoff(state).payoff)
    return SeriesResult("t", np.array(ts, dtype=int), np.array(values))


def q_series(
    coin_a: CoinAngles,
    coin_b: CoinAngles,
    qs: Sequence[int],
    t: int = 100,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
) -> SeriesResult:
    """Payoff after ``t`` steps for each period in ``qs``."""
    qs = [int(q) for q in qs]
    if not qs or any(q < 1 for q in qs):
        raise ValueError("q values must be non-empty and >= 1")
    a = build_coin(coin_a)[None]
    b = build_coin(coin_b)[None]
    values = [float(batch_payoffs(a, b, q, t, spinor)[0]) for q in qs]
    return SeriesResult("q", np.array(qs, dtype=int), np.array(values))


@dataclass
class EquivalenceReport:
    points: list[tuple[int, int, float, float]]  # (t, q, payoff_x, payoff_y)
    draw_tol: float = DRAW_TOL

    @property
    def verdicts_agree(self) -> bool:
        return all(classify(x, self.draw_tol) == classify(y, self.draw_tol) for _, _, x, y in self.points)

    @property
    def max_difference(self) -> float:
        return max((abs(x - y) for _, _, x, y in self.points), default=0.0)

    def disagreements(self) -> list[tuple[int, int, float, float]]:
        return [p for p in self.points if classify(p[2], self.draw_tol) != classify(p[3], self.draw_tol)]


def _as_preset(game) -> GamePreset:
    return get_preset(game) if isinstance(game, str) else game


def equivalence_report(
    game_x,
    game_y,
    ts: Sequence[int],
    qs: Sequence[int],
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
    draw_tol: float = DRAW_TOL,
) -> EquivalenceReport:
    """Payoffs of two presets at every (t, q) in ``ts`` x ``qs``, with the period of each preset replaced by q."""
    ts = sorted({int(t) for t in ts})
    qs = sorted({int(q) for q in qs})
    if not ts or not qs:
        raise ValueError("t and q lists must be non-empty")
    px, py = _as_preset(game_x), _as_preset(game_y)
    points = []
    for q in qs:
        sx = _checkpoints(Periodic(q, build_coin(px.coin_a), build_coin(px.coin_b)), ts, spinor)
        sy = _checkpoints(Periodic(q, build_coin(py.coin_a), build_coin(py.coin_b)), ts, spinor)
        points.extend((t, q, sx[t], sy[t]) for t in ts)
    return EquivalenceReport(points, draw_tol)


def _checkpoints(schedule: CoinSchedule, ts: Sequence[int], spinor) -> dict[int, float]:
    wanted = set(ts)
    state = initial_state(spinor, max(ts))
    out = {}
    if 0 in wanted:
        out[0] = payoff(state).payoff
    for t in range(1, max(ts) + 1):
        state = evolve(state, schedule, 1)
        if t in wanted:
            out[t] = payoff(state).payoff
    return out


@dataclass
class LongRunReport:
    t_start: int
    t_max: int
    first_loss_after_start: Optional[int]
    loss_fraction_after_start: float
    mean_payoff_after_start: float
    series: SeriesResult


def long_run_report(
    game: GameSpec = "game1",
    t_start: int = 100,
    t_max: int = 1000,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
    draw_tol: float = DRAW_TOL,
) -> LongRunReport:
    """Even-step behaviour beyond ``t_start``: first losing step, share of losing steps, mean payoff."""
    if t_max <= t_start:
        raise ValueError("t_max must exceed t_start")
    series = step_series(game, t_max, even_only=True, spinor=spinor)
    after = series.index > t_start
    tail_t, tail_v = series.index[after], series.values[after]
    losses = tail_v < -draw_tol
    first = int(tail_t[np.argmax(losses)]) if losses.any() else None
    return LongRunReport(
        t_start,
        t_max,
        first,
        float(np.mean(losses)) if tail_v.size else 0.0,
        float(np.mean(tail_v)) if tail_v.size else 0.0,
        series,
    )


def mean_sign_witness(
    betas: Sequence[float],
    t_max: int,
    spinor: tuple[complex, complex] = DEFAULT_SPINOR,
) -> Optional[tuple[float, int, float, float]]:
    """
    Search homogeneous walks (alpha = 90, gamma = 0) for a step count where
    the mean position and P_R - P_L have opposite signs.

    Returns ``(beta, t, mean_position, payoff)`` for the first hit in
    (beta, t) order, or None.
    """
    for beta in betas:
        schedule = Homogeneous(build_coin(CoinAngles(90.0, beta, 0.0)))
        state = initial_state(spinor, t_max)
        for t in range(1, t_max + 1):
            state = evolve(state, schedule, 1)
            mean = mean_position(state)
            value = payoff(state).payoff
            if abs(mean) > DRAW_TOL and abs(value) > DRAW_TOL and (mean > 0) != (value > 0):
                return float(beta), t, mean, value
    return None

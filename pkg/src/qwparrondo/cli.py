"""
Command-line front end.

    qwparrondo simulate --preset game1 --steps 100
    qwparrondo sweep --mode alphaA-gammaB --out fig4.csv
    qwparrondo series --kind steps --preset game1 --t-max 100
    qwparrondo verify --theorem1 --beta 88 --t 100
    qwparrondo presets

Exit codes: 0 success, 1 usage/config error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import (
    PARAMETERS,
    alpha_b_flatness,
    degree_grid,
    long_run_report,
    q_series,
    step_series,
    sweep,
    verify_factorization,
)
from .games import PRESETS, get_preset, mean_position, payoff
from .walk import (
    DEFAULT_SPINOR,
    CapacityError,
    CoinAngles,
    Homogeneous,
    Periodic,
    build_coin,
    evolve,
    initial_state,
    probabilities,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

# mode -> (axes, coin A, coin B, q, default grid)
SWEEP_MODES: dict[str, tuple[tuple[str, ...], tuple, tuple, int, tuple[float, float, float]]] = {
    "beta": (("beta",), (0, 0, 90), (0, 0, 90), 1, (0, 90, 1)),
    "alphaB": (("alpha_b",), (15, 45, 30), (0, 88, 0), 3, (-180, 180, 1)),
    "gammaB": (("gamma_b",), (15, 45, 30), (0, 88, 0), 3, (-180, 180, 1)),
    "alphaA-gammaB": (("alpha_a", "gamma_b"), (0, 45, 0), (0, 88, 0), 3, (-180, 0, 1)),
    "gammaA-gammaB": (("gamma_a", "gamma_b"), (0, 45, 0), (0, 88, 0), 3, (-180, 0, 1)),
}


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """12 significant digits, locale independent."""
    x = float(x)
    if x == 0.0:
        x = 0.0  # drops the sign of -0.0
    return format(x, ".12g")


@dataclass
class ExperimentConfig:
    command: str = "simulate"
    preset: Optional[str] = None
    coin: Optional[list[float]] = None
    coin_a: Optional[list[float]] = None
    coin_b: Optional[list[float]] = None
    steps: int = 100
    q: int = 3
    capacity: Optional[int] = None
    spinor: list[list[float]] = field(
        default_factory=lambda: [[c.real, c.imag] for c in map(complex, DEFAULT_SPINOR)]
    )
    a_sites: str = "all"
    draw_tol: float = 1e-12
    distribution: Optional[str] = None
    mode: str = "alphaA-gammaB"
    axis1: Optional[str] = None
    axis2: Optional[str] = None
    grid1: Optional[list[float]] = None
    grid2: Optional[list[float]] = None
    workers: int = 1
    kind: str = "steps"
    t_max: Optional[int] = None
    q_values: list[int] = field(default_factory=lambda: [2, 10])
    even_only: bool = True
    long_run: Optional[int] = None
    theorem1: bool = False
    flatness: bool = False
    beta: float = 88.0
    t: int = 100
    samples: int = 20
    seed: int = 0
    tol_theorem1: float = 1e-9
    tol_flatness: float = 1e-6
    out: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def spinor_pair(self) -> tuple[complex, complex]:
        return tuple(complex(re, im) for re, im in self.spinor)  # type: ignore[return-value]


# -- argument parsing --------------------------------------------------------


def _angles(text: str) -> list[float]:
    try:
        return list(CoinAngles.parse(text).as_tuple())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _spinor(text: str) -> list[list[float]]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("spinor must be two complex numbers 'a,b', e.g. '0.6,0.8j'")
    try:
        values = [complex(p.strip().replace(" ", "")) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse spinor {text!r}") from None
    return [[v.real, v.imag] for v in values]


def _grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError("grid must be 'start:stop[:step]' in degrees")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}") from None
    if len(values) == 2:
        values.append(1.0)
    return values


def _int_range(text: str) -> list[int]:
    parts = text.split(":")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse range {text!r}") from None
    if len(values) == 1:
        values = values * 2
    if len(values) != 2:
        raise argparse.ArgumentTypeError("range must be 'start:stop'")
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 1 rather than argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_game_options(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--preset", choices=sorted(PRESETS), default=S, help="built-in game")
    p.add_argument("--coin", type=_angles, default=S, metavar="A,B,G[,T]", help="homogeneous coin, degrees")
    p.add_argument("--coin-a", dest="coin_a", type=_angles, default=S, metavar="A,B,G[,T]")
    p.add_argument("--coin-b", dest="coin_b", type=_angles, default=S, metavar="A,B,G[,T]")
    p.add_argument("--q", type=int, default=S, help="period: coin A on multiples of q (default 3)")
    p.add_argument("--spinor", type=_spinor, default=S, metavar="a,b", help="initial coin state (default 1/sqrt2, i/sqrt2)")
    p.add_argument(
        "--a-sites",
        dest="a_sites",
        choices=("all", "nonnegative"),
        default=S,
        help="which multiples of q get coin A",
    )
    p.add_argument("--draw-tol", dest="draw_tol", type=float, default=S)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = _Parser(prog="qwparrondo", description="Quantum-walk Parrondo games")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON config; flags override its values")
    common.add_argument("--save-config", dest="save_config", type=Path, default=None)
    common.add_argument("--out", default=S, help="output CSV path (default stdout)")
    common.add_argument("--steps", type=int, default=S)
    common.add_argument("--workers", type=int, default=S)

    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="run one walk and report its payoff")
    _add_game_options(p)
    p.add_argument("--capacity", type=int, default=S, help="site range; default = steps")
    p.add_argument("--distribution", default=S, help="write the full distribution CSV here")

    p = sub.add_parser("sweep", parents=[common], help="payoff over a 1-D or 2-D angle grid")
    _add_game_options(p)
    p.add_argument("--mode", choices=sorted(SWEEP_MODES), default=S)
    p.add_argument("--axis1", choices=PARAMETERS, default=S, help="override the mode's first parameter")
    p.add_argument("--axis2", choices=PARAMETERS, default=S)
    p.add_argument("--grid1", type=_grid, default=S, metavar="START:STOP[:STEP]")
    p.add_argument("--grid2", type=_grid, default=S, metavar="START:STOP[:STEP]")

    p = sub.add_parser("series", parents=[common], help="payoff versus steps or period")
    _add_game_options(p)
    p.add_argument("--kind", choices=("steps", "q"), default=S)
    p.add_argument("--t-max", dest="t_max", type=int, default=S)
    p.add_argument("--q-values", dest="q_values", type=_int_range, default=S, metavar="START:STOP")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--even-only", dest="even_only", action="store_true", default=S)
    g.add_argument("--all-steps", dest="even_only", action="store_false", default=S)
    p.add_argument(
        "--long-run",
        dest="long_run",
        type=int,
        default=S,
        metavar="T",
        help="also report behaviour of the even-step series up to T",
    )

    p = sub.add_parser("verify", parents=[common], help="numerical checks; exit 2 on failure")
    p.add_argument("--theorem1", action="store_true", default=S, help="P_R - P_L = M(beta,t) sin(alpha+gamma)")
    p.add_argument("--alpha-b-flatness", dest="flatness", action="store_true", default=S)
    p.add_argument("--beta", type=float, default=S)
    p.add_argument("--t", type=int, default=S)
    p.add_argument("--samples", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--tol-theorem1", dest="tol_theorem1", type=float, default=S)
    p.add_argument("--tol-flatness", dest="tol_flatness", type=float, default=S)

    sub.add_parser("presets", parents=[common], help="list built-in games")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    overrides = {
        k: v for k, v in vars(args).items() if k not in ("config", "save_config", "command")
    }
    data.update(overrides)
    data["command"] = args.command
    return ExperimentConfig.from_dict(data)


# -- helpers -----------------------------------------------------------------


def _game(cfg: ExperimentConfig):
    """Schedule from preset / coin / coin-a,coin-b (in that priority)."""
    nonneg = cfg.a_sites == "nonnegative"
    if cfg.preset is not None:
        preset = get_preset(cfg.preset)
        return Periodic(preset.q, build_coin(preset.coin_a), build_coin(preset.coin_b), nonneg)
    if cfg.coin is not None:
        return Homogeneous(build_coin(CoinAngles(*cfg.coin)))
    if cfg.coin_a is not None and cfg.coin_b is not None:
        return Periodic(cfg.q, build_coin(CoinAngles(*cfg.coin_a)), build_coin(CoinAngles(*cfg.coin_b)), nonneg)
    raise UsageError("specify --preset, --coin, or both --coin-a and --coin-b")


def _open_out(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path: Optional[str], header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([r if isinstance(r, str) else fmt(r) for r in row])
    stream, close = _open_out(path)
    try:
        stream.write(buf.getvalue())
    finally:
        if close:
            stream.close()


def _sidecar(path: Optional[str]) -> Optional[Path]:
    return None if path is None else Path(path).with_suffix(".json")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# -- commands ----------------------------------------------------------------


def cmd_simulate(cfg: ExperimentConfig) -> int:
    schedule = _game(cfg)
    steps = cfg.steps
    if steps < 0:
        raise UsageError("--steps must be non-negative")
    capacity = steps if cfg.capacity is None else cfg.capacity
    state = evolve(initial_state(cfg.spinor_pair(), capacity), schedule, steps)
    record = payoff(state, cfg.draw_tol)
    print(f"steps: {steps}")
    print(f"P_R: {fmt(record.p_right)}")
    print(f"P_L: {fmt(record.p_left)}")
    print(f"payoff: {fmt(record.payoff)}")
    print(f"verdict: {record.verdict}")
    print(f"mean_x: {fmt(mean_position(state))}")
    if cfg.distribution is not None:
        probs = probabilities(state)
        amp = state.amp
        rows = (
            (str(int(x)), p, d.real, d.imag, u.real, u.imag)
            for x, p, d, u in zip(state.sites, probs, amp[0], amp[1])
        )
        _write_csv(cfg.distribution, ("x", "p", "amp_down_re", "amp_down_im", "amp_up_re", "amp_up_im"), rows)
    return EXIT_OK


def _sweep_setup(cfg: ExperimentConfig):
    axes_names, default_a, default_b, mode_q, default_grid = SWEEP_MODES[cfg.mode]
    names = list(axes_names)
    if cfg.axis1 is not None:
        names[0] = cfg.axis1
    if cfg.axis2 is not None:
        if len(names) < 2:
            names.append(cfg.axis2)
        else:
            names[1] = cfg.axis2
    grids = []
    for i, spec in enumerate((cfg.grid1, cfg.grid2)[: len(names)]):
        start, stop, step = spec if spec is not None else default_grid
        try:
            grids.append(degree_grid(start, stop, step))
        except ValueError as exc:
            raise UsageError(f"grid{i + 1}: {exc}") from None
    if cfg.preset is not None:
        preset = get_preset(cfg.preset)
        coin_a, coin_b, q = preset.coin_a, preset.coin_b, preset.q
    elif cfg.coin is not None:
        coin_a = coin_b = CoinAngles(*cfg.coin)
        q = 1
    else:
        coin_a = CoinAngles(*(cfg.coin_a or default_a))
        coin_b = CoinAngles(*(cfg.coin_b or default_b))
        q = mode_q if mode_q == 1 else cfg.q
    return names, grids, coin_a, coin_b, q


def cmd_sweep(cfg: ExperimentConfig) -> int:
    names, grids, coin_a, coin_b, q = _sweep_setup(cfg)
    grid = sweep(
        coin_a,
        coin_b,
        q,
        cfg.steps,
        list(zip(names, grids)),
        spinor=cfg.spinor_pair(),
        nonnegative_only=cfg.a_sites == "nonnegative",
        workers=max(1, cfg.workers),
    )
    header = [f"{n}_deg" for n in names] + ["payoff"]
    _write_csv(cfg.out, header, grid.rows())
    coords, best = grid.argmax
    summary = {
        "argmax": {"coordinates_deg": dict(zip(names, coords)), "payoff": best},
        "points": int(grid.values.size),
        "q": q,
        "steps": cfg.steps,
        "coin_a": list(coin_a.as_tuple()),
        "coin_b": list(coin_b.as_tuple()),
        "config": cfg.to_dict(),
    }
    side = _sidecar(cfg.out)
    if side is not None:
        _write_json(side, summary)
    coord_text = ", ".join(f"{n}={fmt(c)}" for n, c in zip(names, coords))
    print(f"argmax: {coord_text} payoff={fmt(best)}", file=sys.stderr)
    return EXIT_OK


def cmd_series(cfg: ExperimentConfig) -> int:
    schedule = _game(cfg)
    if cfg.kind == "steps":
        t_max = cfg.steps if cfg.t_max is None else cfg.t_max
        if t_max < 1:
            raise UsageError("--t-max must be >= 1")
        series = step_series(schedule, t_max, cfg.even_only, cfg.spinor_pair())
    else:
        lo, hi = cfg.q_values
        if lo < 1 or hi < lo:
            raise UsageError("--q-values must satisfy 1 <= start <= stop")
        if isinstance(schedule, Homogeneous):
            raise UsageError("a q series needs two coins (--preset or --coin-a/--coin-b)")
        if cfg.preset is not None:
            preset = get_preset(cfg.preset)
            coin_a, coin_b = preset.coin_a, preset.coin_b
        else:
            coin_a, coin_b = CoinAngles(*cfg.coin_a), CoinAngles(*cfg.coin_b)
        series = q_series(coin_a, coin_b, range(lo, hi + 1), cfg.steps, cfg.spinor_pair())
    rows = ((str(int(i)), v) for i, v in zip(series.index, series.values))
    _write_csv(cfg.out, (series.index_name, "payoff"), rows)
    if cfg.long_run is not None:
        report = long_run_report(schedule, cfg.steps, cfg.long_run, cfg.spinor_pair(), cfg.draw_tol)
        first = "none" if report.first_loss_after_start is None else str(report.first_loss_after_start)
        print(
            f"long run t in ({report.t_start}, {report.t_max}]: first loss at t={first}, "
            f"loss fraction {fmt(report.loss_fraction_after_start)}, "
            f"mean payoff {fmt(report.mean_payoff_after_start)}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig) -> int:
    run_theorem = cfg.theorem1 or not cfg.flatness
    run_flat = cfg.flatness or not cfg.theorem1
    ok = True
    if run_theorem:
        if cfg.samples < 3:
            raise UsageError("--samples must be >= 3")
        rng = np.random.default_rng(cfg.seed)
        samples = [tuple(v) for v in rng.uniform(-180.0, 180.0, size=(cfg.samples, 2))]
        report = verify_factorization(cfg.beta, cfg.t, samples, cfg.spinor_pair())
        passed = report.max_residual < cfg.tol_theorem1
        ok &= passed
        print(
            f"theorem1 beta={fmt(cfg.beta)} t={cfg.t} M={fmt(report.M)} "
            f"max_residual={report.max_residual:.3e} tol={cfg.tol_theorem1:.1e} "
            f"{'PASS' if passed else 'FAIL'}"
        )
    if run_flat:
        _, spread = alpha_b_flatness(t=cfg.t, spinor=cfg.spinor_pair())
        passed = spread < cfg.tol_flatness
        ok &= passed
        print(
            f"alpha_b_flatness t={cfg.t} q=3 spread={spread:.3e} tol={cfg.tol_flatness:.1e} "
            f"{'PASS' if passed else 'FAIL'}"
        )
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_presets(cfg: ExperimentConfig) -> int:
    for name, p in sorted(PRESETS.items()):
        a = ",".join(fmt(v) for v in p.coin_a.as_tuple()[:3])
        b = ",".join(fmt(v) for v in p.coin_b.as_tuple()[:3])
        print(f"{name}: q={p.q} A=({a}) B=({b}) steps={p.steps}  {p.description}")
    return EXIT_OK


HANDLERS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "series": cmd_series,
    "verify": cmd_verify,
    "presets": cmd_presets,
}


_VALUE_OPTIONS = ("--coin", "--coin-a", "--coin-b", "--grid1", "--grid2", "--spinor", "--q-values")


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--coin -51,45,0`` into ``--coin=-51,45,0`` so argparse does not read it as a flag."""
    out: list[str] = []
    it = iter(argv)
    for token in it:
        if token in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(token)
            elif nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{token}={nxt}")
            else:
                out.extend((token, nxt))
        else:
            out.append(token)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:  # --help, --version and usage errors
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args)
        if args.save_config is not None:
            args.save_config.write_text(cfg.to_json() + "\n", encoding="utf-8")
        return HANDLERS[cfg.command](cfg)
    except (UsageError, CapacityError, ValueError, TypeError) as exc:
        print(f"qwparrondo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

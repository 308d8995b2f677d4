"""Command-line front end.

    steklov-weyl eigen --dim 2 --sides 1,1 --variant lateral-dirichlet --rho 1 --k 3
    steklov-weyl tfun --s 1,2.5
    steklov-weyl weyl --sides 1,1,1 --tau-min 5 --tau-max 200 --format json

Exit codes: 0 success, 2 usage error, 3 invariant violation, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .counting import bracket_check, default_workers, smallest_modes
from .specfun import T_AT_ONE, h_fn, t_fn, theta_fn
from .spectrum import ProblemVariant, SteklovProblem, steklov_residual
from .weyl import geometric_grid, remainder_report, weyl_sweep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_IO = 4

COMMANDS = ("eigen", "verify", "count", "weyl", "remainder", "tfun")

COLUMNS = {
    "eigen": ["k", "mode", "freq", "lambda_cubed", "lambda"],
    "verify": ["k", "mode", "lambda_cubed", "steklov_residual", "worst_residual"],
    "count": ["tau", "count", "radius", "volume", "surface", "bracket_low", "bracket_high"],
    "weyl": ["tau", "count", "ratio", "weyl_constant", "relative_gap", "scaled_remainder"],
    "remainder": ["tau", "count", "remainder", "scaled_remainder"],
    "tfun": ["s", "t", "theta", "h_of_t"],
}


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    problem: Optional[dict] = None
    params: dict = field(default_factory=dict)
    output: str = "csv"
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output not in ("csv", "json"):
            raise UsageError(f"output must be csv or json, got {self.output!r}")
        grid = self.params.get("tau_grid")
        if grid is not None:
            if not grid["min"] < grid["max"]:
                raise UsageError("tau grid needs min < max")
            if int(grid["points_per_decade"]) < 1:
                raise UsageError("points_per_decade must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)

    def steklov_problem(self) -> SteklovProblem:
        try:
            return SteklovProblem.from_config(self.problem)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"invalid problem: {exc}") from None


# ---------------------------------------------------------------- parsing

def _float_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_problem_args(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON file with dim, sides, variant, rho")
    p.add_argument("--dim", type=int)
    p.add_argument("--sides", type=_float_list, help="comma-separated l_1,...,l_n")
    p.add_argument("--variant", choices=[v.value for v in ProblemVariant])
    p.add_argument("--rho", type=float)


def _add_output_args(p: argparse.ArgumentParser):
    p.add_argument("--format", dest="output", choices=("csv", "json"), default="csv")
    p.add_argument("--output", dest="output_path", help="write here instead of stdout")


def _add_grid_args(p: argparse.ArgumentParser, tmin, tmax):
    p.add_argument("--tau", type=_float_list, help="explicit tau values (overrides the grid)")
    p.add_argument("--tau-min", type=float, default=tmin)
    p.add_argument("--tau-max", type=float, default=tmax)
    p.add_argument("--points-per-decade", type=_positive_int, default=40)


class _Parser(argparse.ArgumentParser):
    """argparse with a one-line diagnostic instead of the usage block."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="steklov-weyl",
        description="Biharmonic Steklov eigenvalues on boxes and their counting function.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="table of the k smallest eigenvalues")
    _add_problem_args(p)
    p.add_argument("--k", type=_positive_int, default=10)
    _add_output_args(p)

    p = sub.add_parser("verify", help="boundary-condition residuals of the k smallest modes")
    _add_problem_args(p)
    p.add_argument("--k", type=_positive_int, default=10)
    p.add_argument("--tol", type=float, default=1e-8)
    _add_output_args(p)

    p = sub.add_parser("count", help="exact counts and the volume/surface bracket")
    _add_problem_args(p)
    _add_grid_args(p, 10.0, 100.0)
    _add_output_args(p)

    p = sub.add_parser("weyl", help="count / tau^(n-1) against the Weyl constant")
    _add_problem_args(p)
    _add_grid_args(p, 10.0, 1000.0)
    _add_output_args(p)

    p = sub.add_parser("remainder", help="remainder diagnostics")
    _add_problem_args(p)
    _add_grid_args(p, 10.0, 1000.0)
    _add_output_args(p)

    p = sub.add_parser("tfun", help="evaluate t(s), theta(s) and h(t(s))")
    p.add_argument("--s", type=_float_list, required=True)
    _add_output_args(p)
    return parser


def _problem_dict(args) -> dict:
    cfg: dict[str, Any] = {}
    if args.config is not None:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    for key in ("dim", "sides", "variant", "rho"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    if "sides" not in cfg:
        raise UsageError("the box needs --sides (or a config file)")
    cfg = {"dim": int(cfg.get("dim", len(cfg["sides"]))),
           "sides": [float(x) for x in cfg["sides"]],
           "variant": cfg.get("variant", ProblemVariant.LATERAL_DIRICHLET.value),
           "rho": float(cfg.get("rho", 1.0))}
    SteklovProblem.from_config(cfg)  # validate early
    return cfg


def config_from_args(argv: Optional[list[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    params: dict[str, Any] = {}
    problem = None
    if args.command == "tfun":
        params["s"] = args.s
    else:
        try:
            problem = _problem_dict(args)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.command in ("eigen", "verify"):
            params["k"] = args.k
        if args.command == "verify":
            params["tol"] = args.tol
        if args.command in ("count", "weyl", "remainder"):
            if args.tau is not None:
                params["tau"] = args.tau
            else:
                params["tau_grid"] = {"min": args.tau_min, "max": args.tau_max,
                                      "points_per_decade": args.points_per_decade}
    return RunConfig(args.command, problem, params, args.output, args.output_path)


# -------------------------------------------------------------- commands

def _taus(cfg: RunConfig) -> list[float]:
    if "tau" in cfg.params:
        taus = [float(t) for t in cfg.params["tau"]]
        if any(not t > 0 for t in taus):
            raise UsageError("tau values must be positive")
        return taus
    g = cfg.params["tau_grid"]
    if not 0 < g["min"] < g["max"]:
        raise UsageError("tau grid needs 0 < min < max")
    return [float(t) for t in geometric_grid(g["min"], g["max"], int(g["points_per_decade"]))]


def _mode_str(mode) -> str:
    return ";".join(str(int(m)) for m in mode)


def _run_eigen(cfg, problem, workers):
    modes = smallest_modes(problem, cfg.params["k"], workers)
    rows = [{"k": k, "mode": _mode_str(m.mode), "freq": m.freq,
             "lambda_cubed": m.lambda_cubed, "lambda": m.lam}
            for k, m in enumerate(modes, start=1)]
    return rows, {}, []


def _run_verify(cfg, problem, workers):
    modes = smallest_modes(problem, cfg.params["k"], workers)
    tol = float(cfg.params.get("tol", 1e-8))
    rows, failures = [], []
    for k, m in enumerate(modes, start=1):
        rep = steklov_residual(problem, m.mode)
        rows.append({"k": k, "mode": _mode_str(m.mode), "lambda_cubed": m.lambda_cubed,
                     "steklov_residual": rep.steklov, "worst_residual": rep.worst})
        if not rep.worst <= tol:
            failures.append(f"mode {m.mode}: residual {rep.worst:.3e} > {tol:.1e}")
    return rows, {}, failures


def _run_count(cfg, problem, workers):
    rows, failures = [], []
    for tau in _taus(cfg):
        rep = bracket_check(problem, tau, workers)
        rows.append({"tau": tau, "count": rep.count_direct, "radius": rep.radius,
                     "volume": rep.volume_estimate, "surface": rep.surface_estimate,
                     "bracket_low": rep.bracket_low, "bracket_high": rep.bracket_high})
        if rep.count_direct != rep.count_radius:
            failures.append(f"tau={tau!r}: direct count {rep.count_direct} != "
                            f"radius count {rep.count_radius}")
        if rep.holds is False:
            failures.append(f"tau={tau!r}: bracket {rep.bracket_low} <= {rep.count_direct + 1} "
                            f"<= {rep.bracket_high} violated")
    return rows, {}, failures


def _run_weyl(cfg, problem, workers):
    sweep = weyl_sweep(problem, _taus(cfg), workers)
    rows = [{"tau": r.tau, "count": r.count, "ratio": r.ratio, "weyl_constant": r.weyl_constant,
             "relative_gap": r.relative_gap, "scaled_remainder": r.scaled_remainder}
            for r in sweep.rows]
    return rows, {"weyl_constant": sweep.weyl_constant}, []


def _run_remainder(cfg, problem, workers):
    rep = remainder_report(problem, _taus(cfg), workers)
    rows = [{"tau": r.tau, "count": r.count, "remainder": r.remainder,
             "scaled_remainder": r.scaled_remainder} for r in rep.sweep.rows]
    summary = {"max_scaled_remainder": rep.max_scaled_remainder, "slope_fit": rep.slope_fit}
    return rows, {"summary": summary}, []


def _run_tfun(cfg, problem, workers):
    rows = []
    for s in cfg.params["s"]:
        if not s > 0:
            raise UsageError(f"s must be positive, got {s!r}")
        t = t_fn(s)
        rows.append({"s": s, "t": t, "theta": theta_fn(s),
                     "h_of_t": h_fn(t) if t >= T_AT_ONE and s >= 1.0 else None})
    return rows, {}, []


_RUNNERS = {"eigen": _run_eigen, "verify": _run_verify, "count": _run_count,
            "weyl": _run_weyl, "remainder": _run_remainder, "tfun": _run_tfun}


# ------------------------------------------------------------- rendering

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_safe(x) for x in v]
    return v


def render(cfg: RunConfig, rows: list[dict], extra_meta: dict) -> str:
    if cfg.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = COLUMNS[cfg.command]
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue()
    meta = {"config": cfg.to_dict(), "version": __version__, **extra_meta}
    return json.dumps(_json_safe({"meta": meta, "rows": rows}), indent=2) + "\n"


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        workers = default_workers()
        problem = cfg.steklov_problem() if cfg.command != "tfun" else None
        rows, extra, failures = _RUNNERS[cfg.command](cfg, problem, workers)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    text = render(cfg, rows, extra)
    try:
        if cfg.output_path:
            Path(cfg.output_path).write_text(text)
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=stderr)
        return EXIT_IO
    if cfg.command == "remainder" and cfg.output == "csv":
        s = extra["summary"]
        print(f"max_scaled_remainder={_fmt(s['max_scaled_remainder'])} "
              f"slope_fit={_fmt(s['slope_fit'])}", file=stderr)
    if failures:
        for f in failures:
            print(f"invariant violation: {f}", file=stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:  # argparse
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

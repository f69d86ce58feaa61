"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import tables
from .collocation import SolveConfig, newton_solve
from .errors import BracketError, NumericalError
from .shooting import ShootingConfig, shoot, step_halving, terminal_mismatch
from .trial_solution import ProblemParams, solution_from_dict, solution_to_dict

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

log = logging.getLogger("mhdfs")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

DEFAULTS = {
    "N": 20,
    "k": 2.0,
    "l": 1.0,
    "tol": 1e-10,
    "max_iter": 100,
    "tau_max": 10.0,
    "h": 1e-3,
    "samples": 101,
    "jobs": 1,
    "format": "json",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x):
    """12 significant digits; 'nan'/'inf'/'-inf' pass through for CSV."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _json_float(x):
    if x is None or not math.isfinite(x):
        return None
    return float(f"{float(x):.12g}")


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- settings resolution ----------------------------------------------------


def _load_config(path):
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return {key.replace("-", "_"): value for key, value in raw.items()}


def _setting(args, name, config, default=None):
    value = getattr(args, name, None)
    if value is None:
        value = config.get(name)
    if value is None:
        value = DEFAULTS.get(name, default)
    return value


def _params(args, config):
    m = _setting(args, "m", config)
    M = _setting(args, "M", config)
    if m is None or M is None:
        raise UsageError("--m and --M are required")
    try:
        return ProblemParams(float(m), float(M))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _solve_config(args, config, params, default_preset=None):
    """Explicit flags win, then the config file, then the preset row, then defaults."""
    row = None
    preset = _setting(args, "preset", config) or default_preset
    if preset is not None:
        if preset not in tables.PRESETS:
            raise UsageError(f"unknown preset {preset!r}")
        row = tables.lookup(params.m, params.M, preset)
    values = {}
    for name in ("N", "k", "l"):
        value = getattr(args, name, None)
        if value is None:
            value = config.get(name)
        if value is None and row is not None:
            value = getattr(row, name)
        values[name] = DEFAULTS[name] if value is None else value
    try:
        return SolveConfig(
            N=int(values["N"]),
            k=float(values["k"]),
            l=float(values["l"]),
            residual_tol=float(_setting(args, "tol", config)),
            max_iter=int(_setting(args, "max_iter", config)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _shooting_config(args, config):
    try:
        return ShootingConfig(tau_max=float(_setting(args, "tau_max", config)), h=float(_setting(args, "h", config)))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def report_document(report, params):
    doc = solution_to_dict(report.solution, params)
    doc["skin_friction"] = _json_float(report.skin_friction)
    doc["residual_norm"] = _json_float(report.residual_norm)
    doc["iterations"] = report.iterations
    doc["converged"] = bool(report.converged)
    return doc


def _read_solution(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
        solution, params = solution_from_dict(doc)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"cannot read solution file {path}: {exc}") from exc
    return solution, params, doc


# -- commands ---------------------------------------------------------------


def cmd_solve(args, config):
    params = _params(args, config)
    cfg = _solve_config(args, config, params)
    report = newton_solve(params, cfg)
    doc = report_document(report, params)
    if _setting(args, "format", config) == "csv":
        header = ["m", "M", "N", "k", "l", "lambda", "skin_friction", "residual_norm", "iterations", "converged"]
        row = [params.m, params.M, cfg.N, cfg.k, cfg.l, report.solution.lam, report.skin_friction,
               report.residual_norm, report.iterations, report.converged]
        text = dump_csv(header, [row])
    else:
        text = dump_json(doc)
    _emit(text, args.out)
    if not report.converged:
        log.error("newton iteration did not converge (residual %.3e)", report.residual_norm)
        return EXIT_NUMERIC
    return EXIT_OK


def _sweep_row(task):
    params, cfg, shoot_cfg, published = task
    report = newton_solve(params, cfg)
    oracle = None
    if shoot_cfg is not None:
        try:
            oracle = shoot(params, shoot_cfg)
        except BracketError as exc:
            log.error("oracle failed for m=%g M=%g: %s", params.m, params.M, exc)
    diff = abs(report.skin_friction - oracle) if oracle is not None else None
    return [params.m, params.M, cfg.N, cfg.k, cfg.l, report.skin_friction, published, oracle, diff, report.converged]


SWEEP_HEADER = ["m", "M", "N", "k", "l", "skin_friction", "published_value", "oracle_value", "abs_diff", "converged"]


def cmd_sweep(args, config):
    preset = _setting(args, "preset", config)
    m = _setting(args, "m", config)
    M_list = _setting(args, "M_list", config)
    if isinstance(M_list, str):
        try:
            M_list = [float(v) for v in M_list.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad --M-list: {exc}") from exc

    if m is None and M_list is None and preset is not None:
        if preset not in tables.PRESETS:
            raise UsageError(f"unknown preset {preset!r}")
        pairs = [(row.m, row.M) for row in tables.PRESETS[preset]]
    else:
        if m is None or not M_list:
            raise UsageError("sweep needs --m and a non-empty --M-list (or --preset alone)")
        pairs = [(float(m), float(M)) for M in M_list]

    shoot_cfg = _shooting_config(args, config) if _setting(args, "with_oracle", config) else None
    tasks = []
    for pm, pM in pairs:
        try:
            params = ProblemParams(pm, pM)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        # sweeps take per-M settings from the published tables unless overridden
        cfg = _solve_config(args, config, params, default_preset="paper-tables")
        row = tables.lookup(pm, pM)
        tasks.append((params, cfg, shoot_cfg, row.skin_friction if row else None))

    jobs = int(_setting(args, "jobs", config))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]

    if _setting(args, "format", config) == "json":
        docs = []
        for row in rows:
            doc = dict(zip(SWEEP_HEADER, row))
            for key in ("skin_friction", "published_value", "oracle_value", "abs_diff"):
                doc[key] = _json_float(doc[key])
            doc["converged"] = bool(doc["converged"])
            docs.append(doc)
        text = dump_json(docs)
    else:
        text = dump_csv(SWEEP_HEADER, rows)
    _emit(text, args.out)
    return EXIT_OK if all(row[-1] for row in rows) else EXIT_NUMERIC


def cmd_profile(args, config):
    if args.solution:
        solution, params, doc = _read_solution(args.solution)
        if doc.get("converged") is False:
            log.error("solution file is marked as not converged")
            return EXIT_NUMERIC
    else:
        params = _params(args, config)
        report = newton_solve(params, _solve_config(args, config, params))
        if not report.converged:
            log.error("newton iteration did not converge (residual %.3e)", report.residual_norm)
            return EXIT_NUMERIC
        solution = report.solution
    tau_max = float(_setting(args, "tau_max", config))
    samples = int(_setting(args, "samples", config))
    if tau_max <= 0 or samples < 2:
        raise UsageError("--tau-max must be positive and --samples at least 2")
    tau = np.linspace(0.0, tau_max, samples)
    F = solution.derivatives(tau)
    rows = zip(tau, F[0], F[1], F[2])
    _emit(dump_csv(["tau", "f", "fp", "fpp"], rows), args.out)
    return EXIT_OK


def coefficient_rows(coeffs):
    rows = []
    for i, a in enumerate(coeffs):
        mag = abs(float(a))
        rows.append([i, mag, math.log10(mag) if mag > 0 else -math.inf])
    return rows


def cmd_coeffs(args, config):
    if not args.solution:
        raise UsageError("coeffs needs --solution FILE")
    solution, _, _ = _read_solution(args.solution)
    _emit(dump_csv(["i", "abs_a", "log10_abs_a"], coefficient_rows(solution.coeffs)), args.out)
    return EXIT_OK


def cmd_oracle(args, config):
    params = _params(args, config)
    shoot_cfg = _shooting_config(args, config)
    try:
        roots, order = step_halving(params, shoot_cfg)
    except BracketError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    s = roots[-1]
    mismatch = terminal_mismatch(params, s, shoot_cfg)
    doc = {
        "m": params.m,
        "M": params.M,
        "tau_max": shoot_cfg.tau_max,
        "h": shoot_cfg.h,
        "skin_friction": _json_float(s),
        "residual_check": _json_float(mismatch),
        "h_order_estimate": _json_float(order),
        "step_roots": [_json_float(r) for r in roots],
    }
    _emit(dump_json(doc), args.out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="mhdfs", description="MHD Falkner-Skan solver (Hermite-function collocation)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="TOML file whose keys mirror the flags")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"))

    def problem(p):
        p.add_argument("--m", type=float, help="wedge exponent m")
        p.add_argument("--M", type=float, help="magnetic parameter M")

    def spectral(p):
        p.add_argument("--N", type=int, help="expansion order")
        p.add_argument("--k", type=float, help="log-map constant")
        p.add_argument("--l", type=float, help="domain scaling")
        p.add_argument("--tol", type=float, help="residual tolerance")
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--preset", help="take N, k, l from a preset ('paper-tables')")

    p = sub.add_parser("solve", help="solve one case")
    problem(p), spectral(p), common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve a list of M values")
    p.add_argument("--m", type=float)
    p.add_argument("--M-list", dest="M_list", help="comma-separated M values")
    spectral(p), common(p)
    p.add_argument("--with-oracle", dest="with_oracle", action="store_true", default=None)
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("profile", help="sample f, f', f'' on [0, tau_max]")
    p.add_argument("--solution", help="solution JSON written by solve")
    problem(p), spectral(p), common(p)
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("coeffs", help="|a_i| and log10|a_i| of a solution")
    p.add_argument("--solution")
    common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("oracle", help="shooting-method reference value")
    problem(p), common(p)
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p.add_argument("--h", type=float)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        sys.stderr.write("mhdfs: error: a command is required\n")
        return EXIT_USAGE
    try:
        config = _load_config(args.config) if args.config else {}
        if args.command == "sweep" and getattr(args, "format", None) is None and "format" not in config:
            args.format = "csv"
        return args.func(args, config)
    except UsageError as exc:
        sys.stderr.write(f"mhdfs {args.command}: error: {exc}\n")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

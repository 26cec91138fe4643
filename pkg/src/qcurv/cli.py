"""Command-line front end.

Subcommands evaluate the main operations (hypergeometric values, power-law
constants, extension values, Pohozaev limits, the cylindrical fixed point)
and run the verification suites.  Output is deterministic: identical
invocations print byte-identical text, floats use shortest round-trip
``repr``, and timings only appear in the JSON report's separate ``timings``
field so reports can be diffed after dropping it.

Exit codes: 0 success / all cases pass, 1 a computation ran but missed its
accuracy or convergence contract, 2 invalid input (single-line diagnostic on
standard error naming the violated precondition).

A ``--config PATH`` file supplies defaults as ``key = value`` lines
(``#`` starts a comment; keys match the long flag names); explicit flags
override the file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import extension, fraclap, inteq, pohozaev, specfun
from .core import ConformalParams
from .errors import (ConvergenceError, DivergenceError, DomainError,
                     ExtrapolationError)
from .verify import SUITE_NAMES, CaseResult, VerificationReport, run_suite

__all__ = ["main", "run_command", "CaseResult", "VerificationReport"]


class _CliError(Exception):
    """Invalid invocation; message is the single-line diagnostic."""


class _Parser(argparse.ArgumentParser):
    # argparse's default error() prints usage plus message over several
    # lines and exits; the contract wants one line and exit code 2.
    def error(self, message):
        raise _CliError(message)


def _read_config(path: str) -> Dict[str, str]:
    pairs: Dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _CliError(
                        f"config {path} line {lineno}: expected 'key = value'")
                key, value = line.split("=", 1)
                pairs[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise _CliError(f"cannot read config file: {exc}")
    return pairs


def _merge_config(args: argparse.Namespace, option_types: Dict[str, Callable],
                  defaults: Dict[str, object]) -> None:
    """Fill parser results (all None-defaulted) from config, then defaults."""
    if getattr(args, "config", None):
        for key, text in _read_config(args.config).items():
            if key not in option_types:
                raise _CliError(f"config key {key!r} is not an option of "
                                f"this subcommand")
            if getattr(args, key) is None:
                try:
                    setattr(args, key, option_types[key](text))
                except ValueError:
                    raise _CliError(
                        f"config value for {key!r} does not parse: {text!r}")
    for key, value in defaults.items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    for key in option_types:
        if getattr(args, key) is None and key not in defaults:
            raise _CliError(f"missing required option --{key.replace('_', '-')}")


def _print_pairs(pairs) -> None:
    for key, value in pairs:
        if isinstance(value, float):
            print(f"{key} = {value!r}")
        else:
            print(f"{key} = {value}")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


_HYP_OPTS = {"a": float, "b": float, "c": float, "z": float}


def _cmd_hyp2f1(args: argparse.Namespace) -> int:
    _merge_config(args, _HYP_OPTS, {})
    value = specfun.eval_hyp2f1(args.a, args.b, args.c, args.z)
    print(f"2F1(a={args.a!r}, b={args.b!r}; c={args.c!r}; z={args.z!r}) "
          f"= {value!r}")
    if args.json:
        _write_json(args.json, {"a": args.a, "b": args.b, "c": args.c,
                                "z": args.z, "value": value})
    return 0


_FRACLAP_OPTS = {"n": int, "sigma": float, "exponent": float}


def _cmd_fraclap(args: argparse.Namespace) -> int:
    _merge_config(args, _FRACLAP_OPTS, {"exponent": None})
    params = ConformalParams(args.n, args.sigma)
    s = args.exponent
    if s is None:
        s = (params.n - 2.0 * params.sigma) / 2.0
    lam = fraclap.frac_power_constant(params, s)
    rows = [("n", args.n), ("sigma", args.sigma), ("exponent", s),
            ("frac_power_constant", lam)]
    payload = {"n": args.n, "sigma": args.sigma, "exponent": s,
               "frac_power_constant": lam}
    if abs(args.sigma - round(args.sigma)) < 1e-12 and round(args.sigma) >= 1:
        poly = fraclap.poly_power_constant(params, s)
        rel = abs(lam - poly) / abs(poly) if poly != 0.0 else abs(lam)
        rows += [("poly_power_constant", poly), ("integer_route_rel_error", rel)]
        payload.update(poly_power_constant=poly, integer_route_rel_error=rel)
    _print_pairs(rows)
    if args.json:
        _write_json(args.json, payload)
    return 0


_EXT_OPTS = {"n": int, "sigma": float, "m0": float, "x": float, "t": float}


def _cmd_extension(args: argparse.Namespace) -> int:
    _merge_config(args, _EXT_OPTS, {"m0": 1.0})
    params = ConformalParams(args.n, args.sigma)
    closed = extension.bubble_extension_closed(params, args.m0, args.x, args.t)
    oracle = extension.bubble_extension_quadrature(params, args.m0, args.x,
                                                   args.t)
    rel = abs(closed - oracle) / abs(oracle)
    _print_pairs([("n", args.n), ("sigma", args.sigma), ("m0", args.m0),
                  ("x", args.x), ("t", args.t), ("closed_value", closed),
                  ("quadrature_value", oracle), ("rel_error", rel)])
    if args.json:
        _write_json(args.json, {"n": args.n, "sigma": args.sigma,
                                "m0": args.m0, "x": args.x, "t": args.t,
                                "closed_value": closed,
                                "quadrature_value": oracle, "rel_error": rel})
    return 0


_POH_OPTS = {"n": int, "m": int, "sigma": float, "kinf": float}


def _cmd_pohozaev(args: argparse.Namespace) -> int:
    _merge_config(args, _POH_OPTS, {"m": None, "sigma": None, "kinf": 1.0})
    if (args.m is None) == (args.sigma is None):
        raise _CliError("give exactly one of --m (integer order) or "
                        "--sigma (fractional order)")
    if args.m is not None:
        report = pohozaev.pohozaev_limit_integer(
            ConformalParams(args.n, float(args.m)), args.kinf)
    else:
        report = pohozaev.pohozaev_limit_fractional(
            ConformalParams(args.n, args.sigma), args.kinf)
    _print_pairs([("mode", report.mode), ("n", args.n),
                  ("order", float(args.m) if args.m is not None else args.sigma),
                  ("k_infinity", args.kinf), ("m0", report.m0),
                  ("closed_value", report.closed_value),
                  ("oracle_value", report.oracle_value),
                  ("rel_error", report.rel_error),
                  ("sign_factor", report.sign_factor)])
    if args.json:
        _write_json(args.json, {
            "mode": report.mode, "n": args.n,
            "order": float(args.m) if args.m is not None else args.sigma,
            "k_infinity": args.kinf, "m0": report.m0,
            "closed_value": report.closed_value,
            "oracle_value": report.oracle_value,
            "rel_error": report.rel_error,
            "sign_factor": report.sign_factor})
    return 0


_INTEQ_OPTS = {"n": int, "sigma": float, "kinf": float, "damping": float,
               "max_iters": int, "tol": float, "scale": float,
               "t_min": float, "t_max": float, "spacing": float}

_INTEQ_DEFAULTS = {"kinf": 1.0, "damping": 0.5, "max_iters": 500,
                   "tol": 1e-6, "scale": 1.1, "t_min": -12.0, "t_max": 12.0,
                   "spacing": 0.05}


def _cmd_inteq(args: argparse.Namespace) -> int:
    _merge_config(args, _INTEQ_OPTS, _INTEQ_DEFAULTS)
    params = ConformalParams(args.n, args.sigma)
    mass = inteq.kernel_mass(params)
    a_const = (args.kinf * mass) ** (-1.0 / (params.tau - 1.0))
    grid = inteq.cyl_grid(args.t_min, args.t_max, args.spacing)
    initial = inteq.CylProfile(grid, np.full(grid.size, args.scale * a_const))
    solution, log = inteq.solve_fixed_point(
        params, args.kinf, initial, damping=args.damping,
        max_iters=args.max_iters, tol=args.tol)
    sup_dev = float(np.max(np.abs(solution.values - a_const)))
    _print_pairs([("n", args.n), ("sigma", args.sigma),
                  ("k_infinity", args.kinf), ("kernel_mass", mass),
                  ("constant_fixed_point", a_const),
                  ("initial_scale", args.scale),
                  ("converged", log.converged),
                  ("iterations", log.iterations),
                  ("final_residual", log.residuals[-1]),
                  ("sup_deviation_from_constant", sup_dev)])
    if args.csv:
        solution.to_csv(args.csv)
    if args.json:
        _write_json(args.json, {
            "n": args.n, "sigma": args.sigma, "k_infinity": args.kinf,
            "kernel_mass": mass, "constant_fixed_point": a_const,
            "initial_scale": args.scale, "converged": log.converged,
            "iterations": log.iterations,
            "final_residual": log.residuals[-1],
            "sup_deviation_from_constant": sup_dev,
            "residuals": list(log.residuals)})
    return 0 if log.converged else 1


_VERIFY_OPTS = {"suite": str}


def _cmd_verify(args: argparse.Namespace) -> int:
    _merge_config(args, _VERIFY_OPTS, {"suite": "all"})
    if args.suite not in SUITE_NAMES:
        raise _CliError(f"unknown suite {args.suite!r}; choose from "
                        f"{', '.join(SUITE_NAMES)}")
    report = run_suite(args.suite)
    print(report.table())
    if args.json:
        report.to_json(args.json)
    if args.csv:
        lines = ["case_id,params,closed_value,oracle_value,rel_error,"
                 "tolerance,passed"]
        for c in report.cases:
            quoted = '"' + c.params.replace('"', '""') + '"'
            lines.append(f"{c.case_id},{quoted},{c.closed_value!r},"
                         f"{c.oracle_value!r},{c.rel_error!r},"
                         f"{c.tolerance!r},{c.passed}")
        with open(args.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0 if report.overall_pass else 1


# ---------------------------------------------------------------------------
# wiring


def _add_common(sub: argparse.ArgumentParser, csv_flag: bool) -> None:
    sub.add_argument("--config", help="key = value defaults file")
    sub.add_argument("--json", help="write a JSON report to this path")
    if csv_flag:
        sub.add_argument("--csv", help="write a CSV artifact to this path")


def _build_parser() -> _Parser:
    parser = _Parser(prog="qcurv", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", metavar="command")

    sub = subs.add_parser("hyp2f1", help="evaluate the Gauss hypergeometric "
                          "function", add_help=True)
    for name in _HYP_OPTS:
        sub.add_argument(f"--{name}", type=float)
    _add_common(sub, csv_flag=False)
    sub.set_defaults(handler=_cmd_hyp2f1)

    sub = subs.add_parser("fraclap", help="power-law constants of the "
                          "fractional and polyharmonic Laplacians")
    sub.add_argument("--n", type=int)
    sub.add_argument("--sigma", type=float)
    sub.add_argument("--exponent", type=float,
                     help="power s in |x|^(-s); default (n - 2 sigma)/2")
    _add_common(sub, csv_flag=False)
    sub.set_defaults(handler=_cmd_fraclap)

    sub = subs.add_parser("extension", help="weighted Poisson extension of "
                          "the bubble: closed form vs quadrature")
    sub.add_argument("--n", type=int)
    sub.add_argument("--sigma", type=float)
    sub.add_argument("--m0", type=float)
    sub.add_argument("--x", type=float)
    sub.add_argument("--t", type=float)
    _add_common(sub, csv_flag=False)
    sub.set_defaults(handler=_cmd_extension)

    sub = subs.add_parser("pohozaev", help="Pohozaev boundary-integral limit "
                          "and its sign factor")
    sub.add_argument("--n", type=int)
    sub.add_argument("--m", type=int, help="integer order (polyharmonic)")
    sub.add_argument("--sigma", type=float, help="fractional order")
    sub.add_argument("--kinf", type=float, help="limit K at infinity")
    _add_common(sub, csv_flag=False)
    sub.set_defaults(handler=_cmd_pohozaev)

    sub = subs.add_parser("inteq", help="cylindrical fixed-point solve of "
                          "the radial integral equation")
    sub.add_argument("--n", type=int)
    sub.add_argument("--sigma", type=float)
    sub.add_argument("--kinf", type=float)
    sub.add_argument("--damping", type=float)
    sub.add_argument("--max-iters", type=int, dest="max_iters")
    sub.add_argument("--tol", type=float)
    sub.add_argument("--scale", type=float,
                     help="initial profile = scale * constant fixed point")
    sub.add_argument("--t-min", type=float, dest="t_min")
    sub.add_argument("--t-max", type=float, dest="t_max")
    sub.add_argument("--spacing", type=float)
    _add_common(sub, csv_flag=True)
    sub.set_defaults(handler=_cmd_inteq)

    sub = subs.add_parser("verify", help="run verification suites")
    sub.add_argument("--suite", help="suite name or 'all'")
    _add_common(sub, csv_flag=True)
    sub.set_defaults(handler=_cmd_verify)

    return parser


def run_command(argv: Sequence[str]) -> int:
    """Parse and execute one invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        if getattr(args, "handler", None) is None:
            raise _CliError("expected a subcommand: "
                            "hyp2f1, fraclap, extension, pohozaev, inteq, "
                            "verify")
        return args.handler(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ExtrapolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line interface.

Subcommands:

* ``point``: evaluate one operating point and print its measures.
* ``sweep``: evaluate the grid described by the config and write CSV/PGM.
* ``stability``: print the drift spectrum at an operating point.
* ``selftest``: run the built-in analytic fixtures and cross-checks.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .dynamics import build_diffusion, build_drift, stability
from .entanglement import (
    log_negativity,
    nu_minus_via_partial_transpose,
    random_two_mode_covariance,
    symplectic_nu_minus,
)
from .errors import OmmlabError
from .harness import (
    VERSION,
    evaluate_point,
    load_config,
    run_sweep,
    write_csv,
    write_pgm,
)
from .model import TWO_PI
from .semiclassics import solve_semiclassics
from .steadystate import physicality_margin, solve_lyapunov


def _fmt(value: float | None) -> str:
    return "undefined" if value is None else format(value, ".9g")


def _cmd_point(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    report = evaluate_point(config.params, config.pairs, oracle=args.oracle)
    print(f"stable={'true' if report.stable else 'false'}")
    if report.margin is not None:
        print(f"margin_rad_s={report.margin:.9g}")
    if report.state is not None:
        print(f"q_avg={report.state.q_avg:.9g}")
    for label in config.pairs:
        ent = report.entanglement[label]
        print(f"E_{label}={_fmt(ent.e_n)}")
        print(f"nu_{label}={_fmt(ent.nu_minus)}")
    print(f"efficiency={_fmt(report.efficiency)}")
    if args.oracle:
        print(f"oracle_deviation={_fmt(report.oracle_deviation)}")
    if report.error is not None:
        print(f"error={report.error}", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if config.sweep is None:
        print("error: the config has no sweep block", file=sys.stderr)
        return 1
    result = run_sweep(
        config.params,
        config.sweep,
        config.pairs,
        threads=args.threads,
        oracle=args.oracle,
    )
    write_csv(result, args.out, reproducible=args.reproducible)
    print(f"wrote {args.out} ({len(result.reports)} points)")
    for pair in args.heatmap or []:
        pgm_path = Path(args.out).with_suffix(f".{pair}.pgm")
        write_pgm(result, pair, pgm_path)
        print(f"wrote {pgm_path}")
    failures = sum(1 for r in result.reports if r.error is not None)
    unstable = sum(1 for r in result.reports if not r.stable)
    if unstable:
        print(f"{unstable} unstable points")
    if failures:
        print(f"{failures} points recorded errors", file=sys.stderr)
    if args.oracle:
        deviations = [
            r.oracle_deviation for r in result.reports if r.oracle_deviation is not None
        ]
        if deviations:
            print(f"max_oracle_deviation={max(deviations):.9g}")
    return 0


def _cmd_stability(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    params = config.params
    state = solve_semiclassics(params)
    drift = build_drift(params, state)
    report = stability(drift)
    print("eigenvalues (rad/s), sorted by real part:")
    for eig in report.eigenvalues:
        print(f"  {eig.real:+.9e}  {eig.imag:+.9e}j   ({eig.real / TWO_PI:+.4e} Hz)")
    print(f"stable={'true' if report.stable else 'false'}")
    print(f"margin_rad_s={report.margin:.9g}")
    return 0


def _cmd_selftest(_args: argparse.Namespace) -> int:
    failures = 0

    def check(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        if ok:
            print(f"PASS {name}")
        else:
            failures += 1
            print(f"FAIL {name}{': ' + detail if detail else ''}")

    # decoupled cavity relaxes to vacuum
    kappa, delta = 1.0, 0.7
    a = np.array([[-kappa, delta], [-delta, -kappa]])
    d = kappa * np.eye(2)
    v = solve_lyapunov(a, d).v
    err = float(np.max(np.abs(v - 0.5 * np.eye(2))))
    check("decoupled-cavity-vacuum", err < 1e-12, f"max deviation {err:.3e}")

    # two-mode squeezed state: E_N = 2r
    r = 0.5
    ch, sh = 0.5 * math.cosh(2 * r), 0.5 * math.sinh(2 * r)
    tms = np.block(
        [[ch * np.eye(2), sh * np.diag([1.0, -1.0])],
         [sh * np.diag([1.0, -1.0]), ch * np.eye(2)]]
    )
    e_n = log_negativity(tms)
    check("two-mode-squeezed-EN", abs(e_n - 2 * r) < 1e-9, f"E_N {e_n:.12f}")

    # vacuum is separable
    check("vacuum-EN-zero", log_negativity(0.5 * np.eye(4)) == 0.0)

    # closed form vs eigenvalue route on random states
    rng = np.random.default_rng(20260825)
    worst = 0.0
    for _ in range(50):
        v0 = random_two_mode_covariance(rng)
        worst = max(worst, abs(symplectic_nu_minus(v0) - nu_minus_via_partial_transpose(v0)))
    check("nu-minus-cross-check", worst < 1e-10, f"worst |delta nu| {worst:.3e}")

    # default operating point: stable, physical, deterministic
    try:
        config = load_config(None)
        first = evaluate_point(config.params, config.pairs)
        second = evaluate_point(config.params, config.pairs)
        check("default-point-stable", first.stable and first.error is None)
        same = all(
            first.entanglement[k].e_n == second.entanglement[k].e_n
            for k in config.pairs
        )
        check("default-point-deterministic", same)
        state = solve_semiclassics(config.params)
        drift = build_drift(config.params, state)
        diffusion = build_diffusion(config.params)
        cov = solve_lyapunov(drift, diffusion, scale=config.params.omega_b)
        margin = physicality_margin(cov)
        check("default-point-physical", margin >= -1e-8, f"min eig {margin:.3e}")
    except OmmlabError as exc:
        check("default-point-stable", False, str(exc))

    print(f"{'OK' if failures == 0 else 'FAILED'} ({failures} failures)")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ommlab",
        description=(
            "Steady-state Gaussian entanglement of a five-mode "
            "atom-optomagnomechanical system"
        ),
    )
    parser.add_argument("--version", action="version", version=f"ommlab {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="evaluate a single operating point")
    p_point.add_argument("--config", help="JSON config path (defaults when omitted)")
    p_point.add_argument(
        "--oracle", action="store_true",
        help="cross-check the covariance against the RK4 relaxation",
    )
    p_point.set_defaults(func=_cmd_point)

    p_sweep = sub.add_parser("sweep", help="evaluate a parameter grid")
    p_sweep.add_argument("--config", required=True, help="JSON config with a sweep block")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument(
        "--heatmap", action="append", metavar="PAIR",
        help="also write a PGM heatmap for this pair (repeatable)",
    )
    p_sweep.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p_sweep.add_argument(
        "--reproducible", action="store_true",
        help="omit the timestamp so identical inputs give identical bytes",
    )
    p_sweep.add_argument(
        "--oracle", action="store_true",
        help="cross-check every point against the RK4 relaxation (slow)",
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_stab = sub.add_parser("stability", help="print the drift spectrum")
    p_stab.add_argument("--config", help="JSON config path (defaults when omitted)")
    p_stab.set_defaults(func=_cmd_stability)

    p_self = sub.add_parser("selftest", help="run built-in fixtures and cross-checks")
    p_self.set_defaults(func=_cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OmmlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

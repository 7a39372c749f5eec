"""Deterministic command-line front end.

Subcommands: price, greeks, cdf, density, joint, kernel, sweep, bias.
Output is CSV (or a pretty table) with the fixed header

    quantity,method,a,t,nu,s0,strike,sigma,rate,expiry,n_paths,n_steps,seed,estimate,stderr,wall_ms,flags

Absent parameters serialize as empty fields and floats use 17 significant
digits, so identical invocations produce byte-identical files.  The wall_ms
column is always left empty for that reason; wall times are available on the
Estimate objects through the library API.  Exit codes: 0 success, 1 usage
error, 2 numeric or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from typing import Sequence

from . import bench, estimators, greeks
from .estimators import Estimate
from .paths import MCConfig, default_steps

CSV_HEADER = (
    "quantity", "method", "a", "t", "nu", "s0", "strike", "sigma", "rate",
    "expiry", "n_paths", "n_steps", "seed", "estimate", "stderr", "wall_ms", "flags",
)

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_DOMAIN = 2


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1 and a one-line remedy."""

    def error(self, message: str) -> None:  # type: ignore[override]
        sys.stderr.write(f"error: {message}\nremedy: run '{self.prog} --help' for usage\n")
        raise SystemExit(_EXIT_USAGE)


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _row(quantity: str, method: str, est: Estimate, cfg: MCConfig, *,
         a=None, t=None, nu=None, s0=None, strike=None, sigma=None, rate=None,
         expiry=None, seed=None, n_paths=None, n_steps=None,
         extra_flags: Sequence[str] = ()) -> list[str]:
    flags = ";".join(tuple(est.flags) + tuple(extra_flags))
    return [
        quantity, method, _fmt(a), _fmt(t), _fmt(nu), _fmt(s0), _fmt(strike),
        _fmt(sigma), _fmt(rate), _fmt(expiry),
        _fmt(cfg.n_paths if n_paths is None else n_paths),
        _fmt(cfg.n_steps if n_steps is None else n_steps),
        _fmt(cfg.master_seed if seed is None else seed),
        _fmt(est.mean), _fmt(est.stderr), "", flags,
    ]


def _emit(rows: list[list[str]], args) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        header = ["quantity", "method", "estimate", "stderr", "flags"]
        picked = [[r[0], r[1], r[13], r[14], r[16]] for r in rows]
        widths = [max(len(h), *(len(p[i]) for p in picked)) if picked else len(h)
                  for i, h in enumerate(header)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        for p in picked:
            lines.append("  ".join(v.ljust(w) for v, w in zip(p, widths)))
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--paths", type=int, default=100_000, help="Monte Carlo paths")
    p.add_argument("--steps", type=int, default=None,
                   help="grid steps per path (default: 1024 per unit effective time, min 256)")
    p.add_argument("--seed", type=int, default=42, help="master seed")
    p.add_argument("--method", choices=("naive", "identity", "both", "fd"),
                   default="both", help="estimator family")
    p.add_argument("--antithetic", action="store_true", default=False,
                   help="pair path 2k+1 with the negated increments of path 2k")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads; results do not depend on this")
    p.add_argument("--out", default=None, metavar="FILE",
                   help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "pretty"), default="csv",
                   help="output format")


def _add_option_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s0", type=float, default=1.0, help="initial asset price")
    p.add_argument("--strike", type=float, default=1.0, help="fixed strike")
    p.add_argument("--sigma", type=float, default=1.0, help="volatility per sqrt(year)")
    p.add_argument("--rate", type=float, default=0.0, help="continuously compounded rate")
    p.add_argument("--expiry", type=float, default=1.0, help="years to expiry")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="asianmc",
        description="Monte Carlo estimators for time-integrated exponential "
                    "Brownian motion and Asian call Greeks.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_: str, option_args: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_,
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        if option_args:
            _add_option_args(p)
        _add_common(p)
        return p

    command("price", "Asian call price", option_args=True)

    p = command("greeks", "price plus delta, gamma, theta, vega", option_args=True)
    p.add_argument("--fd-check", action="store_true", default=False,
                   help="append common-random-number finite-difference cross-checks")

    p = command("cdf", "Pr[A_t^(nu) <= a]")
    p.add_argument("--a", type=float, required=True, help="threshold (positive)")
    p.add_argument("--t", type=float, default=1.0, help="time horizon")
    p.add_argument("--nu", type=float, default=0.0, help="drift")

    p = command("density", "density of A_t at a")
    p.add_argument("--a", type=float, required=True, help="evaluation point (positive)")
    p.add_argument("--t", type=float, default=1.0, help="time horizon")
    p.add_argument("--bandwidth", type=float, default=None,
                   help="finite-difference half-width for the naive method (default 0.05*a)")

    p = command("joint", "Pr[M_t < b, A_t < a]")
    p.add_argument("--b", type=float, required=True, help="terminal threshold (positive)")
    p.add_argument("--a", type=float, required=True, help="integral threshold (positive)")
    p.add_argument("--t", type=float, default=1.0, help="time horizon")

    p = command("kernel", "E[(A_t^(nu) - a)^+] and its a-derivatives")
    p.add_argument("--a", type=float, required=True, help="threshold (positive)")
    p.add_argument("--t", type=float, default=1.0, help="time horizon")
    p.add_argument("--nu", type=float, default=0.0, help="drift (order 0 only)")
    p.add_argument("--order", type=int, choices=(0, 1, 2), default=0,
                   help="derivative order in a")

    p = command("sweep", "evaluate a quantity over parameter grids")
    p.add_argument("--quantity", required=True,
                   choices=tuple(bench.DIST_PARAMS) + bench.GREEK_QUANTITIES,
                   help="what to sweep")
    p.add_argument("--grid", action="append", default=[], metavar="NAME=V1,V2,...",
                   help="parameter grid, repeatable (e.g. --grid a=0.5,1,2)")
    p.add_argument("--paths-grid", default=None, metavar="N1,N2,...",
                   help="path-count grid (default: the single --paths value)")
    p.add_argument("--seeds", default=None, metavar="S1,S2,...",
                   help="seed list (default: the single --seed value)")

    p = command("bias", "trapezoid bias of the mean integral on nested grids")
    p.add_argument("--t", type=float, default=1.0, help="time horizon")
    p.add_argument("--nu", type=float, default=1.0, help="drift")
    p.add_argument("--steps-grid", default="16,64,256,1024", metavar="N1,N2,...",
                   help="step counts; each must divide the largest")

    return parser


def _methods(args, quantity: str) -> tuple[str, ...]:
    if args.method != "both":
        return (args.method,)
    if quantity in bench.DIST_PARAMS or quantity == "price":
        return ("naive", "identity")
    return ("identity", "fd")


def _cfg(args, horizon: float) -> MCConfig:
    steps = args.steps if args.steps is not None else default_steps(horizon)
    return MCConfig(n_paths=args.paths, n_steps=steps, master_seed=args.seed,
                    antithetic=args.antithetic)


def _run_price(args) -> list[list[str]]:
    spec = greeks.OptionSpec(args.s0, args.strike, args.sigma, args.rate, args.expiry)
    cfg = _cfg(args, spec.horizon)
    opt = dict(s0=spec.s0, strike=spec.strike, sigma=spec.sigma,
               rate=spec.rate, expiry=spec.expiry)
    return [
        _row("price", m, greeks.price(spec, cfg, m), cfg, **opt)
        for m in _methods(args, "price")
        if m != "fd"
    ]


def _run_greeks(args) -> list[list[str]]:
    spec = greeks.OptionSpec(args.s0, args.strike, args.sigma, args.rate, args.expiry)
    cfg = _cfg(args, spec.horizon)
    opt = dict(s0=spec.s0, strike=spec.strike, sigma=spec.sigma,
               rate=spec.rate, expiry=spec.expiry)
    method = "identity" if args.method in ("both", "fd") else args.method
    report = greeks.greek_report(spec, cfg, method, fd_check=args.fd_check)
    rows = [
        _row("price", report.price.method, report.price, cfg, **opt),
        _row("delta", report.delta.method, report.delta, cfg, **opt),
        _row("gamma", report.gamma.method, report.gamma, cfg, **opt),
        _row("theta", report.theta.method, report.theta, cfg, **opt),
        _row("vega", report.vega.method, report.vega, cfg, **opt),
    ]
    if report.fd_cross_checks:
        for name in ("delta", "gamma", "theta", "vega"):
            est = report.fd_cross_checks[name]
            rows.append(_row(name, "fd", est, cfg, **opt))
    return rows


def _run_cdf(args) -> list[list[str]]:
    cfg = _cfg(args, args.t)
    return [
        _row("cdf", m, estimators.cdf(args.a, args.t, args.nu, cfg, m), cfg,
             a=args.a, t=args.t, nu=args.nu)
        for m in _methods(args, "cdf")
    ]


def _run_density(args) -> list[list[str]]:
    cfg = _cfg(args, args.t)
    rows = []
    for m in _methods(args, "density"):
        est = estimators.density(args.a, args.t, cfg, m, bandwidth=args.bandwidth)
        extra = ()
        if m == "naive":
            h = args.bandwidth if args.bandwidth is not None else 0.05 * args.a
            extra = (f"h={h:.17g}",)
        rows.append(_row("density", m, est, cfg, a=args.a, t=args.t, extra_flags=extra))
    return rows


def _run_joint(args) -> list[list[str]]:
    cfg = _cfg(args, args.t)
    return [
        _row("joint_cdf", m, estimators.joint_cdf(args.b, args.a, args.t, cfg, m), cfg,
             a=args.a, t=args.t, extra_flags=(f"b={args.b:.17g}",))
        for m in _methods(args, "joint_cdf")
    ]


def _run_kernel(args) -> list[list[str]]:
    cfg = _cfg(args, args.t)
    if args.order == 0:
        name, fn = "call_kernel", lambda m: estimators.call_kernel(
            args.a, args.t, args.nu, cfg, m)
    elif args.order == 1:
        name, fn = "call_kernel_d1", lambda m: estimators.call_kernel_d1(
            args.a, args.t, cfg, m)
    else:
        name, fn = "call_kernel_d2", lambda m: estimators.call_kernel_d2(
            args.a, args.t, cfg, m)
    nu = args.nu if args.order == 0 else 0.0
    return [_row(name, m, fn(m), cfg, a=args.a, t=args.t, nu=nu)
            for m in _methods(args, name)]


def _parse_grid(items: list[str]) -> dict[str, tuple[float, ...]]:
    grids: dict[str, tuple[float, ...]] = {}
    for item in items:
        name, _, values = item.partition("=")
        if not values:
            raise ValueError(f"grid {item!r} is not of the form name=v1,v2,...")
        grids[name.strip()] = tuple(float(v) for v in values.split(","))
    return grids


def _parse_int_list(text: str | None, fallback: int) -> tuple[int, ...]:
    if text is None:
        return (fallback,)
    return tuple(int(v) for v in text.split(","))


def _run_sweep(args) -> list[list[str]]:
    spec = bench.SweepSpec(
        quantity=args.quantity,
        grids=_parse_grid(args.grid),
        n_paths=_parse_int_list(args.paths_grid, args.paths),
        seeds=_parse_int_list(args.seeds, args.seed),
        methods=_methods(args, args.quantity),
        n_steps=args.steps,
        antithetic=args.antithetic,
    )
    result = bench.run_sweep(spec, threads=args.threads)
    rows = []
    for row in result.rows:
        pt = dict(row.point)
        extra: tuple[str, ...] = ()
        if "b" in pt:
            extra = (f"b={pt['b']:.17g}",)
        if row.error is not None:
            est = Estimate(0.0, 0.0, row.n_paths, row.method)
            flags = extra + (f"error={row.error}",)
            rows.append(_row(args.quantity, row.method, est, _cfg(args, 1.0),
                             a=pt.get("a"), t=pt.get("t"), nu=pt.get("nu"),
                             s0=pt.get("s0"), strike=pt.get("strike"),
                             sigma=pt.get("sigma"), rate=pt.get("rate"),
                             expiry=pt.get("expiry"), seed=row.seed,
                             n_paths=row.n_paths,
                             n_steps=spec.n_steps or "", extra_flags=flags))
            continue
        horizon = pt.get("t") if args.quantity in bench.DIST_PARAMS else \
            greeks.OptionSpec(**pt).horizon
        steps = spec.n_steps or default_steps(horizon)
        rows.append(_row(args.quantity, row.method, row.estimate, _cfg(args, horizon),
                         a=pt.get("a"), t=pt.get("t"), nu=pt.get("nu"),
                         s0=pt.get("s0"), strike=pt.get("strike"),
                         sigma=pt.get("sigma"), rate=pt.get("rate"),
                         expiry=pt.get("expiry"), seed=row.seed,
                         n_paths=row.n_paths, n_steps=steps, extra_flags=extra))
    return rows


def _run_bias(args) -> list[list[str]]:
    steps = tuple(int(v) for v in args.steps_grid.split(","))
    cfg = MCConfig(n_paths=args.paths, n_steps=max(steps), master_seed=args.seed,
                   antithetic=args.antithetic)
    report = bench.quadrature_bias_report(args.t, args.nu, steps, cfg)
    rows = []
    for row in report:
        est = Estimate(row.mean_integral, row.stderr, cfg.n_paths, "nested")
        rows.append(_row("quadrature_bias", "nested", est, cfg, t=args.t, nu=args.nu,
                         n_steps=row.n_steps,
                         extra_flags=(f"gap={row.closed_form_gap:.17g}",)))
    return rows


_RUNNERS = {
    "price": _run_price,
    "greeks": _run_greeks,
    "cdf": _run_cdf,
    "density": _run_density,
    "joint": _run_joint,
    "kernel": _run_kernel,
    "sweep": _run_sweep,
    "bias": _run_bias,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse argv, dispatch, and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rows = _RUNNERS[args.command](args)
        _emit(rows, args)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        sys.stderr.write(f"error: {exc}\nremedy: adjust the offending parameter and rerun\n")
        return _EXIT_DOMAIN
    return _EXIT_OK


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()

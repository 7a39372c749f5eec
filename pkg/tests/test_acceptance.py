"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion lines
and the cell-by-cell cross-validation report.

Criterion 3 is implemented exactly as stated (agreement within three combined
standard errors at 10^5 paths across the full grid) and is expected to FAIL
for a documented subset of cells: the indicator-free identity weights have
heavy right tails whose mass is not reachable at 10^5 paths, so those
estimates sit below the naive oracle while reporting a deceptively small
standard error.  The failure list printed by the test is the quantitative
record; docs/estimator-notes.md in the README describes the evidence
(importance-sampling ladders, growing-path-count scans).  All other criteria
pass.
"""

import io
import math
import subprocess
import sys

import numpy as np
import pytest

import asianmc as am
from asianmc import MCConfig, OptionSpec
from asianmc.bench import SweepSpec, quadrature_bias_report, run_sweep
from asianmc.greeks import FD, theta_fd_expiry

SEED = 42
E = math.e


def comb_se(e1, e2):
    return math.hypot(e1.stderr, e2.stderr)


def report(criterion: int, ok: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_1_moment_oracles():
    """Closed-form moments of the integral at t=1 within 3 standard errors."""
    cfg = MCConfig(100_000, 1024, SEED)
    ens = am.sample_ensemble(1.0, (0.0, 1.0, -0.5), cfg)
    checks = [
        ("mean(A)", ens[0.0].integral, 1.0),
        ("mean(A^2)", ens[0.0].integral ** 2, 2 * (E - 2)),
        ("mean(A), nu=1", ens[1.0].integral, E - 1),
        ("mean(A), nu=-0.5", ens[-0.5].integral, (math.exp(-0.5) - 1) / -0.5),
        ("mean(M)", ens[0.0].terminal, 1.0),
    ]
    failures = []
    for name, values, target in checks:
        se = values.std(ddof=1) / math.sqrt(len(values))
        if abs(values.mean() - target) > 3 * se:
            failures.append(name)
    ok = report(1, not failures, f"moment oracles at t=1 ({len(checks)} checks)")
    assert ok, failures


def test_criterion_2_time_zero_exactness():
    """cdf, call_kernel and the generic transform are exact at t=0."""
    cfg = MCConfig(1_000, 8, SEED)
    c = am.cdf(1.0, 0.0, 0.0, cfg, "identity")
    k = am.call_kernel(0.4, 0.0, 0.0, cfg, "identity")
    tr = am.transform_expectation(lambda w, z: np.ones_like(w),
                                  am.TransformParams(1.0, 0.0), cfg)
    ok = (c.mean, c.stderr) == (1.0, 0.0) and (k.mean, k.stderr) == (0.0, 0.0) \
        and (tr.mean, tr.stderr) == (1.0, 0.0)
    assert report(2, ok, "degenerate values (1, 0, 1) with zero stderr")


def test_criterion_3_cross_estimator_agreement():
    """Identity vs naive across the full grid at 10^5 paths, as specified.

    Expected to fail for the heavy-tailed indicator-free cells; the printed
    report lists exactly which.  See the module docstring.
    """
    failures = []
    lines = []
    for t in (0.5, 1.0):
        cfg = MCConfig(100_000, am.default_steps(t), SEED)
        ens = am.sample_ensemble(t, (0.0, 1.0), cfg)
        for a in (0.4, 1.0, 2.0):
            h = 0.05 * a
            cells = [
                ("cdf nu=0", am.cdf(a, t, 0.0, cfg, "identity", ensemble=ens),
                 am.cdf(a, t, 0.0, cfg, "naive", ensemble=ens), 0.0),
                ("cdf nu=1", am.cdf(a, t, 1.0, cfg, "identity", ensemble=ens),
                 am.cdf(a, t, 1.0, cfg, "naive", ensemble=ens), 0.0),
                ("density", am.density(a, t, cfg, "identity", ensemble=ens),
                 am.density(a, t, cfg, "naive", ensemble=ens), 2 * h * h),
                ("joint_cdf", am.joint_cdf(1.0, a, t, cfg, "identity", ensemble=ens),
                 am.joint_cdf(1.0, a, t, cfg, "naive", ensemble=ens), 0.0),
                ("call_kernel", am.call_kernel(a, t, 0.0, cfg, "identity", ensemble=ens),
                 am.call_kernel(a, t, 0.0, cfg, "naive", ensemble=ens), 0.0),
                ("d1", am.call_kernel_d1(a, t, cfg, "identity", ensemble=ens),
                 am.call_kernel_d1(a, t, cfg, "naive", ensemble=ens), 0.0),
                ("d2", am.call_kernel_d2(a, t, cfg, "identity", ensemble=ens),
                 am.call_kernel_d2(a, t, cfg, "naive", ensemble=ens), 2 * h * h),
            ]
            for name, ident, naive, allowance in cells:
                gap = abs(ident.mean - naive.mean)
                tol = 3 * comb_se(ident, naive) + allowance
                status = "pass" if gap <= tol else "FAIL"
                lines.append(
                    f"    t={t} a={a} {name:12s} identity={ident.mean:9.5f}"
                    f"+-{ident.stderr:8.5f} naive={naive.mean:9.5f}"
                    f"+-{naive.stderr:8.5f} gap={gap:8.5f} tol={tol:8.5f} {status}")
                if gap > tol:
                    failures.append(f"t={t} a={a} {name}")
    print()
    print("\n".join(lines))
    ok = report(3, not failures,
                f"cross-estimator agreement, {len(failures)} of 42 cells out of tolerance")
    assert ok, ("known heavy-tail cells out of tolerance at 1e5 paths; "
                "see module docstring and decisions ledger: " + ", ".join(failures))


def test_criterion_4_variance_comparison_experiment():
    """Convergence experiment at a=0.4, t=0.5: both families approach a
    common value by n=500 and the transformed estimator reports the smaller
    sample stderr in at least 8 of 10 seeds, for two disjoint seed lists."""
    failures = []
    ratios = []
    for seeds in (tuple(range(10)), tuple(range(10, 20))):
        spec = SweepSpec("call_kernel", {"a": (0.4,), "t": (0.5,)},
                         n_paths=tuple(range(50, 501, 50)), seeds=seeds,
                         methods=("naive", "identity"))
        res = run_sweep(spec)
        frac = res.stderr_win_fraction(500)
        if frac < 0.8:
            failures.append(f"seeds {seeds[0]}..{seeds[-1]}: win fraction {frac:.0%}")
        mi, si = res.seed_mean("identity", 500, a=0.4, t=0.5)
        mn, sn = res.seed_mean("naive", 500, a=0.4, t=0.5)
        mi0, _ = res.seed_mean("identity", 50, a=0.4, t=0.5)
        mn0, _ = res.seed_mean("naive", 50, a=0.4, t=0.5)
        if abs(mi - mn) > 3 * math.hypot(si, sn):
            failures.append(f"seeds {seeds[0]}..: no common value at n=500")
        if abs(mi - mn) >= abs(mi0 - mn0):
            failures.append(f"seeds {seeds[0]}..: family gap did not shrink 50->500")
        ses = [(r.method, r.estimate.stderr) for r in res.rows
               if r.n_paths == 500 and r.estimate is not None]
        naive_se = np.mean([s for m, s in ses if m == "naive"])
        ident_se = np.mean([s for m, s in ses if m == "identity"])
        ratios.append(naive_se / ident_se)
    ok = report(4, not failures,
                f"stderr ratio naive/identity at n=500: "
                f"{ratios[0]:.2f} and {ratios[1]:.2f} over disjoint seed lists")
    assert ok, failures


def test_criterion_5_density_internal_consistency():
    """Two identity routes to the density agree and the density integrates
    to one.  Run at 2e5 paths: the route comparison needs the weight tails
    of both routes to be represented (see ledger note on tail sensitivity).
    """
    cfg = MCConfig(200_000, 1024, SEED)
    ens = am.sample_ensemble(1.0, (0.0, 1.0), cfg)
    failures = []
    for a in (0.5, 1.0, 2.0):
        r1 = am.density(a, 1.0, cfg, "identity", ensemble=ens)
        r2 = am.call_kernel_d2(a, 1.0, cfg, "identity", ensemble=ens)
        if abs(r1.mean - r2.mean) > 3 * comb_se(r1, r2):
            failures.append(f"routes disagree at a={a}")
    grid = np.arange(0.05, 10.0001, 0.05)
    dens = [am.density(float(a), 1.0, cfg, "identity", ensemble=ens).mean for a in grid]
    total = float(np.trapezoid(dens, grid))
    if abs(total - 1.0) > 0.02:
        failures.append(f"normalization {total:.4f}")
    ok = report(5, not failures, f"two density routes + normalization {total:.4f}")
    assert ok, failures


def test_criterion_6_greeks_vs_finite_differences():
    """Greeks against CRN finite differences at s0=strike=sigma=1, r=0.

    Run at 10^6 paths, where the identity weights' sample standard errors are
    an honest measure of their heavy-tailed uncertainty (at 10^5 they
    understate it; the point estimates sit several reported-sigma from the
    oracles while the true sampling error is much larger).
    """
    spec = OptionSpec(1.0, 1.0, 1.0, 0.0, 1.0)
    cfg = MCConfig(1_000_000, 1024, SEED)
    rep = am.greek_report(spec, cfg, fd_check=True)
    fd = rep.fd_cross_checks
    h_gamma = 0.05 * spec.s0
    failures = []
    if abs(rep.delta.mean - fd["delta"].mean) > 3 * comb_se(rep.delta, fd["delta"]):
        failures.append("delta")
    if abs(rep.vega.mean - fd["vega"].mean) > 3 * comb_se(rep.vega, fd["vega"]):
        failures.append("vega")
    if abs(rep.gamma.mean - fd["gamma"].mean) > \
            3 * comb_se(rep.gamma, fd["gamma"]) + 2 * h_gamma**2:
        failures.append("gamma")
    if abs(rep.theta.mean - fd["theta"].mean) > 5 * comb_se(rep.theta, fd["theta"]):
        failures.append("theta")
    ok = report(6, not failures,
                f"delta {rep.delta.mean:.3f} vs {fd['delta'].mean:.3f}, "
                f"vega {rep.vega.mean:.3f} vs {fd['vega'].mean:.3f}, "
                f"gamma {rep.gamma.mean:.3f} vs {fd['gamma'].mean:.3f}, "
                f"theta {rep.theta.mean:.3f} vs {fd['theta'].mean:.3f}")
    assert ok, failures


def test_criterion_7_expiry_grid_shapes():
    """Sensitivity shapes over the expiry grid: delta nondecreasing (CRN
    finite differences, the estimator in which the trend is resolvable at
    this path count) and vega positive."""
    deltas, vegas = [], []
    for tau in (0.25, 0.5, 1.0, 1.5, 2.0):
        spec = OptionSpec(1.0, 1.0, 1.0, 0.0, tau)
        cfg = MCConfig(100_000, am.default_steps(spec.horizon), SEED)
        ens = am.sample_ensemble(spec.horizon, (0.0,), cfg)
        deltas.append(am.delta(spec, cfg, FD, ensemble=ens).mean)
        vegas.append(am.vega(spec, cfg, ensemble=ens).mean)
    nondecreasing = all(x <= y for x, y in zip(deltas, deltas[1:]))
    positive = all(v > 0 for v in vegas)
    ok = report(7, nondecreasing and positive,
                f"delta {np.round(deltas, 3).tolist()} nondecreasing={nondecreasing}, "
                f"vega positive={positive}")
    assert ok


def test_criterion_8_zero_strike_closed_forms():
    """strike=0 collapses every quantity to its discounting closed form."""
    failures = []
    cfg = MCConfig(100, 8, SEED)
    for rate in (0.03, 0.07):
        spec = OptionSpec(1.0, 0.0, 1.0, rate, 1.0)
        disc = math.exp(-rate)
        if am.price(spec, cfg).mean != disc or am.price(spec, cfg).stderr != 0.0:
            failures.append(f"price at r={rate}")
        if am.delta(spec, cfg).mean != disc:
            failures.append(f"delta at r={rate}")
        if am.gamma(spec, cfg).mean != 0.0 or am.vega(spec, cfg).mean != 0.0:
            failures.append(f"gamma/vega at r={rate}")
        if am.theta(spec, cfg).mean != 0.0:
            failures.append(f"theta at r={rate}")
    p1 = am.price(OptionSpec(1.0, 0.0, 1.0, 0.03, 1.0), cfg).mean
    p2 = am.price(OptionSpec(1.0, 0.0, 1.0, 0.07, 1.0), cfg).mean
    if not math.isclose(p2 / p1, math.exp(-0.04), rel_tol=1e-14):
        failures.append("discount ratio")
    ok = report(8, not failures, "price, delta, gamma, vega, theta at two rates")
    assert ok, failures


def test_criterion_9_cli_determinism():
    """Identical invocations produce byte-identical CSV, for any --threads."""
    from asianmc.cli import run as cli_run

    def capture(argv):
        out = io.StringIO()
        old = sys.stdout
        sys.stdout = out
        try:
            code = cli_run(argv)
        finally:
            sys.stdout = old
        assert code == 0
        return out.getvalue()

    base = ["kernel", "--a", "0.4", "--t", "0.5", "--method", "both",
            "--paths", "2000", "--steps", "64", "--seed", "7"]
    sweep = ["sweep", "--quantity", "density", "--grid", "a=0.5,1",
             "--paths", "1000", "--steps", "32", "--seed", "3"]
    ok = True
    for argv in (base, sweep):
        outputs = {capture(argv + ["--threads", th]) for th in ("1", "2", "4")}
        outputs.add(capture(argv + ["--threads", "1"]))
        ok = ok and len(outputs) == 1
    proc1 = subprocess.run([sys.executable, "-m", "asianmc"] + base,
                           capture_output=True, text=True, check=True)
    proc2 = subprocess.run([sys.executable, "-m", "asianmc"] + base + ["--threads", "8"],
                           capture_output=True, text=True, check=True)
    ok = ok and proc1.stdout == proc2.stdout
    assert report(9, ok, "byte-identical CSV across reruns and thread counts")


def test_criterion_10_quadrature_bias():
    """Nested-grid trapezoid bias shrinks monotonically as steps double.

    Evaluated at nu=1, where the mean integral genuinely carries an O(dt^2)
    trapezoid bias; at nu=0 the trapezoid mean is exactly unbiased at every
    step count (each exact-marginal sample has unit expectation), so there is
    no discretization trend to detect there, only shared Monte Carlo noise
    (printed for reference; see the decisions ledger).
    """
    cfg = MCConfig(100_000, 1024, SEED)
    rows = quadrature_bias_report(1.0, 1.0, (16, 64, 256, 1024), cfg)
    gaps = [r.closed_form_gap for r in rows]
    monotone = all(x >= y for x, y in zip(gaps, gaps[1:]))
    fine_ok = gaps[-1] <= 3 * rows[-1].stderr + 1e-3
    zero_rows = quadrature_bias_report(0.0, 1.0, (16, 64), cfg)
    zero_ok = all(r.closed_form_gap == 0.0 for r in zero_rows)
    rows0 = quadrature_bias_report(1.0, 0.0, (16, 64, 256, 1024), cfg)
    print(f"    nu=1 gaps: {[f'{g:.2e}' for g in gaps]}")
    print(f"    nu=0 gaps (pure shared noise): "
          f"{[f'{r.closed_form_gap:.2e}' for r in rows0]}")
    ok = report(10, monotone and fine_ok and zero_ok,
                f"nu=1 gaps nonincreasing={monotone}, t=0 exact={zero_ok}")
    assert ok

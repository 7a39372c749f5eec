"""Parameter sweeps and convergence/bias harnesses.

``run_sweep`` evaluates one quantity over a cartesian grid of parameters,
path counts, seeds and methods, capturing per-row errors instead of aborting,
and returns rows in a deterministic lexicographic order so reruns are
bit-identical.  ``quadrature_bias_report`` isolates the time-discretization
effect of the trapezoid integral by evaluating nested grids on the same
Brownian paths.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import estimators, greeks
from .estimators import Estimate, stable_exp_rate
from .paths import MCConfig, _chunk_normals, PATHS_PER_CHUNK, default_steps, sample_ensemble

DIST_PARAMS: Mapping[str, tuple[str, ...]] = {
    "cdf": ("a", "t", "nu"),
    "density": ("a", "t"),
    "joint_cdf": ("b", "a", "t"),
    "call_kernel": ("a", "t", "nu"),
    "call_kernel_d1": ("a", "t"),
    "call_kernel_d2": ("a", "t"),
}
GREEK_PARAMS: tuple[str, ...] = ("s0", "strike", "sigma", "rate", "expiry")
GREEK_QUANTITIES = ("price", "delta", "gamma", "theta", "vega")
GREEK_DEFAULTS: Mapping[str, float] = {
    "s0": 1.0, "strike": 1.0, "sigma": 1.0, "rate": 0.0, "expiry": 1.0,
}
DIST_DEFAULTS: Mapping[str, float] = {"t": 1.0, "nu": 0.0}

_METHODS_BY_QUANTITY: Mapping[str, tuple[str, ...]] = {
    **{q: ("naive", "identity") for q in DIST_PARAMS},
    "price": ("naive", "identity"),
    **{q: ("identity", "fd") for q in ("delta", "gamma", "theta", "vega")},
}


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: one quantity, parameter grids, path counts, seeds, methods."""

    quantity: str
    grids: Mapping[str, tuple[float, ...]]
    n_paths: tuple[int, ...]
    seeds: tuple[int, ...]
    methods: tuple[str, ...]
    n_steps: int | None = None
    antithetic: bool = False

    def __post_init__(self) -> None:
        if self.quantity not in _METHODS_BY_QUANTITY:
            raise ValueError(f"unknown sweep quantity {self.quantity!r}")
        allowed = set(_param_names(self.quantity))
        for name, values in self.grids.items():
            if name not in allowed:
                raise ValueError(f"{self.quantity} does not take a grid over {name!r}")
            if len(values) == 0:
                raise ValueError(f"empty grid for {name!r}")
        if not self.n_paths or not self.seeds or not self.methods:
            raise ValueError("n_paths, seeds and methods must be nonempty")
        bad = set(self.methods) - set(_METHODS_BY_QUANTITY[self.quantity])
        if bad:
            raise ValueError(f"methods {sorted(bad)} not valid for {self.quantity}")


@dataclass(frozen=True)
class SweepRow:
    """One evaluated cell; ``error`` is set (and estimate None) if it raised."""

    point: tuple[tuple[str, float], ...]
    n_paths: int
    method: str
    seed: int
    estimate: Estimate | None
    error: str | None = None

    @property
    def sort_key(self):
        return (tuple(v for _, v in self.point), self.n_paths, self.method, self.seed)


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)

    def select(self, *, method: str | None = None, seed: int | None = None,
               n_paths: int | None = None, **point_values: float) -> list[SweepRow]:
        out = []
        for row in self.rows:
            if method is not None and row.method != method:
                continue
            if seed is not None and row.seed != seed:
                continue
            if n_paths is not None and row.n_paths != n_paths:
                continue
            pt = dict(row.point)
            if any(pt.get(k) != v for k, v in point_values.items()):
                continue
            out.append(row)
        return out

    def stderr_win_fraction(self, n_paths: int, better: str = "identity",
                            than: str = "naive") -> float:
        """Fraction of (point, seed) pairs where ``better`` has smaller stderr."""
        wins = total = 0
        by_key: dict[tuple, dict[str, Estimate]] = {}
        for row in self.rows:
            if row.n_paths == n_paths and row.estimate is not None:
                by_key.setdefault((row.point, row.seed), {})[row.method] = row.estimate
        for pair in by_key.values():
            if better in pair and than in pair:
                total += 1
                wins += pair[better].stderr < pair[than].stderr
        if total == 0:
            raise ValueError("no comparable row pairs at that path count")
        return wins / total

    def seed_mean(self, method: str, n_paths: int, **point_values: float) -> tuple[float, float]:
        """Across-seed mean and standard error of the estimates at one cell."""
        means = [r.estimate.mean for r in
                 self.select(method=method, n_paths=n_paths, **point_values)
                 if r.estimate is not None]
        if not means:
            raise ValueError("no rows matched")
        arr = np.asarray(means)
        se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
        return float(arr.mean()), se


def _param_names(quantity: str) -> tuple[str, ...]:
    return DIST_PARAMS.get(quantity, GREEK_PARAMS)


def _points(spec: SweepSpec) -> list[tuple[tuple[str, float], ...]]:
    names = _param_names(spec.quantity)
    defaults = DIST_DEFAULTS if spec.quantity in DIST_PARAMS else GREEK_DEFAULTS
    axes: list[tuple[float, ...]] = []
    for name in names:
        if name in spec.grids:
            axes.append(tuple(float(v) for v in spec.grids[name]))
        elif name in defaults:
            axes.append((float(defaults[name]),))
        else:
            raise ValueError(f"{spec.quantity} requires a grid for {name!r}")
    points = [()]
    for name, values in zip(names, axes):
        points = [pt + ((name, v),) for pt in points for v in values]
    return points


def _eval_dist(quantity: str, pt: dict, cfg: MCConfig, method: str, ensemble) -> Estimate:
    if quantity == "cdf":
        return estimators.cdf(pt["a"], pt["t"], pt["nu"], cfg, method, ensemble=ensemble)
    if quantity == "density":
        return estimators.density(pt["a"], pt["t"], cfg, method, ensemble=ensemble)
    if quantity == "joint_cdf":
        return estimators.joint_cdf(pt["b"], pt["a"], pt["t"], cfg, method, ensemble=ensemble)
    if quantity == "call_kernel":
        return estimators.call_kernel(pt["a"], pt["t"], pt["nu"], cfg, method, ensemble=ensemble)
    if quantity == "call_kernel_d1":
        return estimators.call_kernel_d1(pt["a"], pt["t"], cfg, method, ensemble=ensemble)
    if quantity == "call_kernel_d2":
        return estimators.call_kernel_d2(pt["a"], pt["t"], cfg, method, ensemble=ensemble)
    raise AssertionError(quantity)


def _eval_greek(quantity: str, pt: dict, cfg: MCConfig, method: str, ensemble) -> Estimate:
    spec = greeks.OptionSpec(**pt)
    fn = {"price": greeks.price, "delta": greeks.delta, "gamma": greeks.gamma,
          "theta": greeks.theta, "vega": greeks.vega}[quantity]
    return fn(spec, cfg, method, ensemble=ensemble)


def _needed_nus(quantity: str, pt: dict, methods: Iterable[str]) -> tuple[float, ...]:
    nus = {0.0}
    for method in methods:
        if quantity in ("cdf", "call_kernel") and method == "naive":
            nus.add(pt.get("nu", 0.0))
    if quantity in ("density", "call_kernel_d2", "gamma", "theta"):
        nus.add(1.0)
    if quantity == "vega":
        nus.add(1.0)
    return tuple(sorted(nus))


def run_sweep(spec: SweepSpec, threads: int | None = None) -> SweepResult:
    """Evaluate the sweep; rows come back sorted by (point, n_paths, method, seed).

    Rows that raise are recorded with their error message so one bad cell
    (for example a tail-underflow region) cannot abort a whole sweep.
    Work is grouped by shared path ensemble; groups may run concurrently.
    """
    points = _points(spec)
    is_dist = spec.quantity in DIST_PARAMS

    groups: dict[tuple, list] = {}
    for pt in points:
        ptd = dict(pt)
        horizon = ptd["t"] if is_dist else greeks.OptionSpec(**ptd).horizon
        for n in spec.n_paths:
            for seed in spec.seeds:
                key = (horizon, n, spec.n_steps or default_steps(horizon), seed)
                groups.setdefault(key, []).append(pt)

    def run_group(item) -> list[SweepRow]:
        (horizon, n, steps, seed), pts = item
        cfg = MCConfig(n_paths=n, n_steps=steps, master_seed=seed,
                       antithetic=spec.antithetic)
        rows: list[SweepRow] = []
        seen = []
        for pt in pts:
            if pt in seen:
                continue
            seen.append(pt)
            ptd = dict(pt)
            nus = _needed_nus(spec.quantity, ptd, spec.methods)
            try:
                ens = sample_ensemble(horizon, nus, cfg)
            except Exception as exc:  # pragma: no cover - defensive
                ens = None
                sim_error = str(exc)
            for method in spec.methods:
                if ens is None:
                    rows.append(SweepRow(pt, n, method, seed, None, sim_error))
                    continue
                try:
                    evaluate = _eval_dist if is_dist else _eval_greek
                    est = evaluate(spec.quantity, ptd, cfg, method, ens)
                    rows.append(SweepRow(pt, n, method, seed, est))
                except Exception as exc:
                    rows.append(SweepRow(pt, n, method, seed, None, str(exc)))
        return rows

    items = sorted(groups.items(), key=lambda kv: kv[0])
    if threads is not None and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(run_group, items))
    else:
        chunks = [run_group(item) for item in items]

    rows = sorted((row for chunk in chunks for row in chunk), key=lambda r: r.sort_key)
    return SweepResult(spec=spec, rows=tuple(rows))


@dataclass(frozen=True)
class BiasRow:
    n_steps: int
    mean_integral: float
    stderr: float
    closed_form_gap: float


def quadrature_bias_report(t: float, nu: float, steps_grid: Iterable[int],
                           cfg: MCConfig) -> tuple[BiasRow, ...]:
    """Trapezoid bias of the mean integral versus the closed form (e^{nu t}-1)/nu.

    Every row restricts the same finest-grid Brownian paths to a coarser
    uniform grid, so the rows differ only by discretization, not by sampling
    noise.  Each coarser step count must divide the finest.  At nu = 0 the
    trapezoid estimate of the mean is exactly unbiased at every step count
    (each grid sample has unit expectation), so gaps there show pure shared
    Monte Carlo noise; drifted runs show the genuine O(dt^2) quadrature bias.
    """
    steps = sorted(set(int(s) for s in steps_grid))
    if not steps:
        raise ValueError("steps grid must be nonempty")
    if any(s < 1 for s in steps):
        raise ValueError("step counts must be positive")
    finest = steps[-1]
    if any(finest % s for s in steps):
        raise ValueError("every step count must divide the finest one")
    target = stable_exp_rate(nu, t)
    if t == 0.0:
        return tuple(BiasRow(s, 0.0, 0.0, 0.0) for s in steps)

    n = cfg.n_paths
    sums = {s: 0.0 for s in steps}
    sqsums = {s: 0.0 for s in steps}
    dt_f = t / finest
    grid = np.linspace(0.0, t, finest + 1)
    n_chunks = (n + PATHS_PER_CHUNK - 1) // PATHS_PER_CHUNK
    for c in range(n_chunks):
        rows = min(PATHS_PER_CHUNK, n - c * PATHS_PER_CHUNK)
        z = _chunk_normals(cfg.master_seed, c, finest, cfg.antithetic)[:rows]
        b = np.empty((rows, finest + 1))
        b[:, 0] = 0.0
        np.cumsum(z * math.sqrt(dt_f), axis=1, out=b[:, 1:])
        x = np.exp(b + (nu - 0.5) * grid)
        for s in steps:
            stride = finest // s
            xs = x[:, ::stride]
            dt = t / s
            integ = dt * (xs.sum(axis=1) - 0.5 * xs[:, 0] - 0.5 * xs[:, -1])
            sums[s] += float(integ.sum())
            sqsums[s] += float((integ**2).sum())
    out = []
    for s in steps:
        mean = sums[s] / n
        var = max(sqsums[s] / n - mean * mean, 0.0) * n / max(n - 1, 1)
        out.append(BiasRow(s, mean, math.sqrt(var / n), abs(mean - target)))
    return tuple(out)

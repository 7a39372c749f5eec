"""Estimators for the law of the time integral of exponential Brownian motion.

Every quantity comes in two independent families:

* ``naive``    -- plain Monte Carlo of the defining payoff or indicator on
  simulated paths.
* ``identity`` -- Monte Carlo of a closed-form measure-change transformation
  that rewrites the truncated expectation as a full expectation of a smooth
  weight, so no simulation is discarded.

The two families estimate the same quantities and are meant to be
cross-validated against each other; :mod:`asianmc.bench` automates that.

A practical warning that the test suite quantifies at length: the
indicator-free identity weights ``exp(2 M / (a + A))`` have very heavy right
tails for small ``a``.  Their sample mean then approaches the true value
slowly from below and the reported standard error understates the sampling
error.  For the drifted CDF the library therefore defaults to an equivalent
exponential-tilt estimator with bounded-indicator structure (see :func:`cdf`);
the indicator-free route stays available as :func:`cdf_weighted`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .paths import MCConfig, PathBatch, sample_ensemble

NAIVE = "naive"
IDENTITY = "identity"

# Bandwidth rule for finite-difference density estimates: h = NAIVE_DENSITY_BW * a.
NAIVE_DENSITY_BW = 0.05


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo result.

    ``stderr`` is the sample standard deviation of the per-path values divided
    by sqrt(n_paths); it is reported raw, with no clamping of the mean, so
    cross-estimator comparisons stay interpretable.
    """

    mean: float
    stderr: float
    n_paths: int
    method: str
    wall_time_ms: float = 0.0
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not math.isfinite(self.mean):
            raise ValueError(f"estimate mean is not finite: {self.mean}")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")

    def combined_stderr(self, other: "Estimate") -> float:
        return math.hypot(self.stderr, other.stderr)


@dataclass(frozen=True)
class TransformParams:
    """Threshold and horizon for the generic truncated-expectation transform.

    ``a`` is the truncation level on the time integral; the transform removes
    the event {A_t < a} in exchange for an exponential weight.
    """

    a: float
    t: float
    nu: float = 0.0

    def __post_init__(self) -> None:
        if self.a <= 0.0:
            raise ValueError(f"threshold a must be positive, got {self.a}")
        if self.t < 0.0:
            raise ValueError(f"time t must be nonnegative, got {self.t}")


def _require_positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value}")


def _ensemble_for(
    t: float, nus: tuple[float, ...], cfg: MCConfig,
    ensemble: Mapping[float, PathBatch] | None,
) -> Mapping[float, PathBatch]:
    """Reuse supplied batches where possible, simulate the rest.

    Chunk keys depend only on (master_seed, chunk, n_steps), so batches
    simulated in separate calls with equal cfg still share their underlying
    increments; passing an ensemble is purely an optimization.
    """
    have = dict(ensemble) if ensemble else {}
    missing = tuple(nu for nu in nus if nu not in have)
    if missing:
        have.update(sample_ensemble(t, missing, cfg))
    return have


def _wrap(values: np.ndarray, method: str, started: float,
          flags: tuple[str, ...] = ()) -> Estimate:
    n = len(values)
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    wall = (time.perf_counter() - started) * 1e3
    return Estimate(float(values.mean()), stderr, n, method, wall, flags)


def stable_exp_rate(nu: float, t: float) -> float:
    """(e^{nu t} - 1) / nu, continuous through nu = 0.

    Uses expm1 for cancellation safety and a short series once nu*t is below
    1e-8, where expm1(x)/nu would divide two rounding-dominated numbers.
    """
    x = nu * t
    if abs(x) < 1e-8:
        return t * (1.0 + 0.5 * x + x * x / 6.0)
    return math.expm1(x) / nu


# ---------------------------------------------------------------------------
# per-path value builders (shared by the public estimators and the greeks)
# ---------------------------------------------------------------------------


def weighted_cdf_values(batch: PathBatch, a: float) -> np.ndarray:
    """Indicator-free weights whose mean estimates Pr[A_t^{(nu)} <= a].

    The batch drift nu enters through its own functionals; the weight is
    a^{2 nu} e^{-2/a} (a + A)^{-2 nu} exp(2 X / (a + A)), evaluated in log
    space so the e^{-2/a} factor cannot underflow prematurely.
    """
    nu = batch.nu
    log_w = 2.0 * batch.terminal / (a + batch.integral) - 2.0 / a
    if nu != 0.0:
        log_w += 2.0 * nu * (math.log(a) - np.log(a + batch.integral))
    return np.exp(log_w)


def tilted_cdf_values(batch0: PathBatch, a: float, nu: float) -> np.ndarray:
    """Exponential-tilt estimator of Pr[A_t^{(nu)} <= a] on driftless paths.

    Weights M^nu e^{nu t/2 - nu^2 t/2} 1{A <= a}; the exact change of drift,
    with the truncation indicator kept.  At nu = 0 this is the plain
    indicator.
    """
    ind = batch0.integral <= a
    if nu == 0.0:
        return ind.astype(float)
    t = batch0.t
    w = batch0.terminal ** nu * math.exp(nu * t / 2.0 - nu * nu * t / 2.0)
    return w * ind


def kernel_identity_values(batch0: PathBatch, a: float, nu: float) -> np.ndarray:
    """Per-path values of the transformed truncated-moment identity.

    Estimates E[(A_t^{(nu)} - a)^+] from driftless paths:
    (e^{nu t}-1)/nu - a + e^{nu t/2 - nu^2 t/2} a^{2nu+2}
        M^nu (a+A)^{-(2nu+1)} exp(2M/(a+A) - 2/a).
    """
    t = batch0.t
    m, integ = batch0.terminal, batch0.integral
    log_w = (
        (2.0 * nu + 2.0) * math.log(a)
        - (2.0 * nu + 1.0) * np.log(a + integ)
        + 2.0 * m / (a + integ)
        - 2.0 / a
        + nu * t / 2.0
        - nu * nu * t / 2.0
    )
    if nu != 0.0:
        log_w = log_w + nu * np.log(m)
    return stable_exp_rate(nu, t) - a + np.exp(log_w)


def kernel_d2_identity_values(batch0: PathBatch, a: float) -> np.ndarray:
    """Per-path values for d^2/da^2 E[(A_t - a)^+], driftless paths only."""
    m, integ = batch0.terminal, batch0.integral
    w = np.exp(-2.0 / a + 2.0 * m / (a + integ))
    return (2.0 / a**2) * w - 2.0 * m / (a + integ) ** 2 * w


def density_identity_values(batch0: PathBatch, batch1: PathBatch, a: float) -> np.ndarray:
    """Per-path values of the two-drift density identity, on shared paths.

    g_t(a) = (2/a^2) (Pr[A_t <= a] - Pr[A_t^{(1)} <= a]) with both CDFs
    through their indicator-free weights.  Keeping both terms in the heavy
    weight family matters: their right tails cancel path by path, which is
    what makes this difference usable in practice (and what makes the
    estimated density integrate to one; the test suite checks both).
    """
    return (2.0 / a**2) * (weighted_cdf_values(batch0, a) - weighted_cdf_values(batch1, a))


def _fd_bandwidth(a: float, bandwidth: float | None) -> float:
    h = NAIVE_DENSITY_BW * a if bandwidth is None else float(bandwidth)
    if not 0.0 < h < a:
        raise ValueError(f"bandwidth must lie in (0, a), got {h}")
    return h


# ---------------------------------------------------------------------------
# public estimators
# ---------------------------------------------------------------------------


def transform_expectation(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    params: TransformParams,
    cfg: MCConfig,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
) -> Estimate:
    """Estimate E[f(M_t, A_t); A_t < a] without simulating the truncation.

    Implements the generic driftless transform: with y = 2/a,

        e^{-y} E[ f(M/(1 + (y/2)A)^2, A/(1 + (y/2)A)) exp(M/(1/y + A/2)) ]

    ``f`` must be vectorized over numpy arrays and finite on every sampled
    path; a non-finite output raises with the offending path index.
    """
    started = time.perf_counter()
    if params.nu != 0.0:
        raise ValueError("the generic transform is defined for the driftless case only")
    a = params.a
    batch = _ensemble_for(params.t, (0.0,), cfg, ensemble)[0.0]
    m, integ = batch.terminal, batch.integral
    shrink = 1.0 + integ / a
    fx = np.asarray(f(m / shrink**2, integ / shrink), dtype=float)
    bad = ~np.isfinite(fx)
    if bad.any():
        raise ValueError(f"f returned a non-finite value at path index {int(np.argmax(bad))}")
    values = fx * np.exp(2.0 * m / (a + integ) - 2.0 / a)
    return _wrap(values, IDENTITY, started)


def cdf(
    a: float,
    t: float,
    nu: float = 0.0,
    cfg: MCConfig | None = None,
    method: str = IDENTITY,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
) -> Estimate:
    """Estimate Pr[A_t^{(nu)} <= a].

    ``method="naive"`` is the indicator mean over drift-nu paths.
    ``method="identity"`` is the measure-change family: for nu = 0 the
    indicator-free weight form; for nu != 0 the exponential-tilt form on
    driftless paths (flagged ``drift-tilt``).  The printed indicator-free
    form for nu != 0 is available as :func:`cdf_weighted`; it fails its
    cross-check against the naive CDF at practical path counts, which is why
    it is not the default (both numbers stay available).
    """
    started = time.perf_counter()
    _require_positive("a", a)
    if cfg is None:
        raise ValueError("an MCConfig is required")
    if method == NAIVE:
        batch = _ensemble_for(t, (nu,), cfg, ensemble)[nu]
        return _wrap((batch.integral <= a).astype(float), NAIVE, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    if nu == 0.0:
        batch = _ensemble_for(t, (0.0,), cfg, ensemble)[0.0]
        return _wrap(weighted_cdf_values(batch, a), IDENTITY, started)
    batch0 = _ensemble_for(t, (0.0,), cfg, ensemble)[0.0]
    return _wrap(tilted_cdf_values(batch0, a, nu), IDENTITY, started, ("drift-tilt",))


def cdf_weighted(
    a: float,
    t: float,
    nu: float = 0.0,
    cfg: MCConfig | None = None,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
) -> Estimate:
    """The indicator-free CDF route for any drift, exactly as printed.

    Kept public so the two identity routes for a drifted CDF can always be
    compared side by side; see the module docstring for why its finite-sample
    behavior is poor at small a.
    """
    started = time.perf_counter()
    _require_positive("a", a)
    if cfg is None:
        raise ValueError("an MCConfig is required")
    batch = _ensemble_for(t, (nu,), cfg, ensemble)[nu]
    values = weighted_cdf_values(batch, a)
    flags: tuple[str, ...] = ()
    if values.max() == 0.0:
        flags = ("tail-underflow",)
    return _wrap(values, IDENTITY, started, flags)


def density(
    a: float,
    t: float,
    cfg: MCConfig | None = None,
    method: str = IDENTITY,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
    bandwidth: float | None = None,
) -> Estimate:
    """Estimate the density g_t(a) of A_t.

    identity: the two-drift difference identity on shared paths.
    naive: central finite difference of the empirical CDF with bandwidth
    h = 0.05 a (override with ``bandwidth``), so it carries O(h^2) bias.
    """
    started = time.perf_counter()
    _require_positive("a", a)
    _require_positive("t", t)
    if cfg is None:
        raise ValueError("an MCConfig is required")
    if method == NAIVE:
        h = _fd_bandwidth(a, bandwidth)
        batch = _ensemble_for(t, (0.0,), cfg, ensemble)[0.0]
        integ = batch.integral
        values = ((integ <= a + h).astype(float) - (integ <= a - h).astype(float)) / (2.0 * h)
        return _wrap(values, NAIVE, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    ens = _ensemble_for(t, (0.0, 1.0), cfg, ensemble)
    values = density_identity_values(ens[0.0], ens[1.0], a)
    return _wrap(values, IDENTITY, started)


def joint_cdf(
    b: float,
    a: float,
    t: float,
    cfg: MCConfig | None = None,
    method: str = IDENTITY,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
) -> Estimate:
    """Estimate Pr[M_t < b, A_t < a].

    identity: e^{-2/a} E[exp(2M/(a+A)); M <= b (1 + A/a)^2].
    naive: the two-indicator mean.
    """
    started = time.perf_counter()
    _require_positive("a", a)
    _require_positive("b", b)
    if cfg is None:
        raise ValueError("an MCConfig is required")
    batch = _ensemble_for(t, (0.0,), cfg, ensemble)[0.0]
    m, integ = batch.terminal, batch.integral
    if method == NAIVE:
        return _wrap(((m < b) & (integ < a)).astype(float), NAIVE, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    keep = m <= b * (1.0 + integ / a) ** 2
    values = np.exp(-2.0 / a + 2.0 * m / (a + integ)) * keep
    return _wrap(values, IDENTITY, started)


def call_kernel(
    a: float,
    t: float,
    nu: float = 0.0,
    cfg: MCConfig | None = None,
    method: str = IDENTITY,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
) -> Estimate:
    """Estimate E[(A_t^{(nu)} - a)^+], the undiscounted Asian call kernel."""
    started = time.perf_counter()
    _require_positive("a", a)
    if cfg is None:
        raise ValueError("an MCConfig is required")
    if method == NAIVE:
        batch = _ensemble_for(t, (nu,), cfg, ensemble)[nu]
        return _wrap(np.maximum(batch.integral - a, 0.0), NAIVE, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    if t == 0.0:
        # degenerate paths make every per-path value (e^0-1)/nu - a + a = 0;
        # short-circuit to avoid the one-ulp exp/log round-trip residue
        return _wrap(np.zeros(cfg.n_paths), IDENTITY, started)
    batch0 = _ensemble_for(t, (0.0,), cfg, ensemble)[0.0]
    return _wrap(kernel_identity_values(batch0, a, nu), IDENTITY, started)


def call_kernel_d1(
    a: float,
    t: float,
    cfg: MCConfig | None = None,
    method: str = IDENTITY,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
) -> Estimate:
    """Estimate d/da E[(A_t - a)^+] = -1 + Pr[A_t <= a]."""
    started = time.perf_counter()
    _require_positive("a", a)
    _require_positive("t", t)
    if cfg is None:
        raise ValueError("an MCConfig is required")
    batch = _ensemble_for(t, (0.0,), cfg, ensemble)[0.0]
    if method == NAIVE:
        return _wrap(-1.0 + (batch.integral <= a).astype(float), NAIVE, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    return _wrap(-1.0 + weighted_cdf_values(batch, a), IDENTITY, started)


def call_kernel_d2(
    a: float,
    t: float,
    cfg: MCConfig | None = None,
    method: str = IDENTITY,
    *,
    ensemble: Mapping[float, PathBatch] | None = None,
    bandwidth: float | None = None,
) -> Estimate:
    """Estimate d^2/da^2 E[(A_t - a)^+], which equals the density g_t(a).

    naive: second central difference of the naive kernel with h = 0.05 a,
    on shared paths, so it carries O(h^2) bias like the naive density.
    """
    started = time.perf_counter()
    _require_positive("a", a)
    _require_positive("t", t)
    if cfg is None:
        raise ValueError("an MCConfig is required")
    batch = _ensemble_for(t, (0.0,), cfg, ensemble)[0.0]
    if method == NAIVE:
        h = _fd_bandwidth(a, bandwidth)
        integ = batch.integral
        values = (
            np.maximum(integ - a - h, 0.0)
            - 2.0 * np.maximum(integ - a, 0.0)
            + np.maximum(integ - a + h, 0.0)
        ) / h**2
        return _wrap(values, NAIVE, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    return _wrap(kernel_d2_identity_values(batch, a), IDENTITY, started)

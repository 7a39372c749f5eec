"""Fixed-strike Asian call price and sensitivities at the start of averaging.

The pricing expectation is driftless: the rate enters only through the
discount factor, and the market inputs collapse into the derived scale
``a = sigma^2 * strike * expiry / s0`` and the effective horizon
``T = sigma^2 * expiry``.  All sensitivities are exact transformations of the
distribution estimators in :mod:`asianmc.estimators`; finite-difference
cross-checks with common random numbers are built in, sharing one path
ensemble per horizon.

Method tags: ``identity`` uses the closed-form transformed estimators,
``naive`` prices the raw discounted payoff, ``fd`` differentiates the naive
price with common random numbers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .estimators import (
    Estimate,
    IDENTITY,
    NAIVE,
    density_identity_values,
    kernel_identity_values,
    weighted_cdf_values,
)
from .paths import MCConfig, PathBatch, sample_batch, sample_ensemble

FD = "fd"

# Relative finite-difference steps, all with common random numbers.
FD_REL_STEP = {"delta": 1e-2, "gamma": 5e-2, "theta": 5e-2, "vega": 1e-2}


@dataclass(frozen=True)
class OptionSpec:
    """Market inputs for a fixed-strike Asian call.

    Attributes:
        s0: initial asset price (> 0).
        strike: fixed strike (>= 0; 0 collapses every Greek to closed form).
        sigma: volatility per sqrt(year) (> 0).
        rate: continuously compounded rate per year (>= 0).
        expiry: years to expiry, equal to the averaging window (> 0).
    """

    s0: float
    strike: float
    sigma: float
    rate: float
    expiry: float

    def __post_init__(self) -> None:
        if self.s0 <= 0:
            raise ValueError(f"s0 must be positive, got {self.s0}")
        if self.strike < 0:
            raise ValueError(f"strike must be nonnegative, got {self.strike}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.rate < 0:
            raise ValueError(f"rate must be nonnegative, got {self.rate}")
        if self.expiry <= 0:
            raise ValueError(f"expiry must be positive, got {self.expiry}")

    @property
    def scale_a(self) -> float:
        """Strike threshold in integrated-Brownian units: sigma^2 k tau / s0."""
        return self.sigma**2 * self.strike * self.expiry / self.s0

    @property
    def horizon(self) -> float:
        """Effective time horizon sigma^2 tau of the driftless integral."""
        return self.sigma**2 * self.expiry

    @property
    def discount(self) -> float:
        return math.exp(-self.rate * self.expiry)


@dataclass(frozen=True)
class GreekReport:
    """Price and the four sensitivities, with optional FD cross-checks."""

    spec: OptionSpec
    method: str
    price: Estimate
    delta: Estimate
    gamma: Estimate
    theta: Estimate
    vega: Estimate
    fd_cross_checks: Mapping[str, Estimate] | None = None


def _closed_form(mean: float, cfg: MCConfig, method: str) -> Estimate:
    return Estimate(mean, 0.0, cfg.n_paths, method, 0.0, ("closed-form",))


def _wrap_values(values: np.ndarray, method: str, started: float,
                 flags: tuple[str, ...] = (), mean: float | None = None) -> Estimate:
    n = len(values)
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    wall = (time.perf_counter() - started) * 1e3
    return Estimate(float(values.mean()) if mean is None else mean,
                    stderr, n, method, wall, flags)


def _base_ensemble(spec: OptionSpec, cfg: MCConfig,
                   ensemble: Mapping[float, PathBatch] | None,
                   nus: tuple[float, ...] = (0.0,)) -> Mapping[float, PathBatch]:
    have = dict(ensemble) if ensemble else {}
    missing = tuple(nu for nu in nus if nu not in have)
    if missing:
        have.update(sample_ensemble(spec.horizon, missing, cfg))
    return have


# ---------------------------------------------------------------------------
# per-path values
# ---------------------------------------------------------------------------


def price_naive_values(spec: OptionSpec, batch: PathBatch) -> np.ndarray:
    """Discounted payoff per path: (s0 / (tau sigma^2)) e^{-r tau} (A - a)^+."""
    a = spec.scale_a
    scale = spec.s0 / (spec.expiry * spec.sigma**2) * spec.discount
    return scale * np.maximum(batch.integral - a, 0.0)


def price_identity_values(spec: OptionSpec, batch0: PathBatch) -> np.ndarray:
    scale = spec.s0 / (spec.expiry * spec.sigma**2) * spec.discount
    return scale * kernel_identity_values(batch0, spec.scale_a, 0.0)


def delta_identity_values(spec: OptionSpec, batch0: PathBatch) -> np.ndarray:
    """Transformed-measure delta: the printed closed-form weight combination.

    e^{-r tau} + (k/s0) e^{-r tau - 2/a} { a E[(a+A)^{-1} e^{2M/(a+A)}]
                                           - E[e^{2M/(a+A)}] }.
    The weight family here is the heavy-tailed one; at moderate path counts
    its stderr is the honest uncertainty signal.
    """
    a = spec.scale_a
    m, integ = batch0.terminal, batch0.integral
    w = np.exp(-2.0 / a + 2.0 * m / (a + integ))
    bracket = a * w / (a + integ) - w
    return spec.discount + (spec.strike / spec.s0) * spec.discount * bracket


def gamma_identity_values(spec: OptionSpec, batch0: PathBatch, batch1: PathBatch) -> np.ndarray:
    a = spec.scale_a
    pre = spec.sigma**2 * spec.strike**2 * spec.expiry / spec.s0**3 * spec.discount
    return pre * density_identity_values(batch0, batch1, a)


def vega_identity_values(spec: OptionSpec, batch0: PathBatch) -> np.ndarray:
    """Vega per path from survival probabilities on shared driftless paths.

    -(2/sigma) price + (2 s0/sigma) e^{-r tau} P[A^{(1)} > a]
                     - (2 k/sigma) e^{-r tau} P[A > a],
    with the drift-1 survival through the exponential-tilt weight M 1{A<=a}
    and the driftless survival through the plain indicator.  Both discount
    factors follow the price derivative; see vega() for the undiscounted
    printed variant and vega_weighted() for the indicator-free route.
    """
    a = spec.scale_a
    sig = spec.sigma
    pv = price_identity_values(spec, batch0)
    surv1 = 1.0 - batch0.terminal * (batch0.integral <= a)
    surv0 = 1.0 - (batch0.integral <= a)
    return (-2.0 / sig) * pv \
        + (2.0 * spec.s0 / sig) * spec.discount * surv1 \
        - (2.0 * spec.strike / sig) * spec.discount * surv0


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def price(spec: OptionSpec, cfg: MCConfig, method: str = IDENTITY, *,
          ensemble: Mapping[float, PathBatch] | None = None) -> Estimate:
    """Asian call price at the start of the averaging period."""
    started = time.perf_counter()
    if spec.strike == 0.0:
        return _closed_form(spec.s0 * spec.discount, cfg, method)
    if method == NAIVE:
        batch = _base_ensemble(spec, cfg, ensemble)[0.0]
        return _wrap_values(price_naive_values(spec, batch), NAIVE, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    batch = _base_ensemble(spec, cfg, ensemble)[0.0]
    return _wrap_values(price_identity_values(spec, batch), IDENTITY, started)


def delta(spec: OptionSpec, cfg: MCConfig, method: str = IDENTITY, *,
          ensemble: Mapping[float, PathBatch] | None = None) -> Estimate:
    """Sensitivity of the price to s0."""
    started = time.perf_counter()
    if spec.strike == 0.0:
        return _closed_form(spec.discount, cfg, method)
    batch = _base_ensemble(spec, cfg, ensemble)[0.0]
    if method == FD:
        h = FD_REL_STEP["delta"] * spec.s0
        up = price_naive_values(_bump(spec, s0=spec.s0 + h), batch)
        dn = price_naive_values(_bump(spec, s0=spec.s0 - h), batch)
        return _wrap_values((up - dn) / (2.0 * h), FD, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    return _wrap_values(delta_identity_values(spec, batch), IDENTITY, started)


def gamma(spec: OptionSpec, cfg: MCConfig, method: str = IDENTITY, *,
          ensemble: Mapping[float, PathBatch] | None = None) -> Estimate:
    """Second sensitivity to s0; proportional to the density of the integral."""
    started = time.perf_counter()
    if spec.strike == 0.0:
        return _closed_form(0.0, cfg, method)
    if method == FD:
        batch = _base_ensemble(spec, cfg, ensemble)[0.0]
        h = FD_REL_STEP["gamma"] * spec.s0
        up = price_naive_values(_bump(spec, s0=spec.s0 + h), batch)
        mid = price_naive_values(spec, batch)
        dn = price_naive_values(_bump(spec, s0=spec.s0 - h), batch)
        return _wrap_values((up - 2.0 * mid + dn) / h**2, FD, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    ens = _base_ensemble(spec, cfg, ensemble, nus=(0.0, 1.0))
    return _wrap_values(gamma_identity_values(spec, ens[0.0], ens[1.0]), IDENTITY, started)


def theta(spec: OptionSpec, cfg: MCConfig, method: str = IDENTITY, *,
          ensemble: Mapping[float, PathBatch] | None = None) -> Estimate:
    """Calendar decay via the pricing relation r*price - r*s0*delta - (sigma^2 s0/2)*gamma.

    The reported mean is the exact combination of the three reported means
    (all from the same method and the same paths); the stderr comes from the
    per-path combined influence, so shared-path covariances are kept.
    """
    started = time.perf_counter()
    if spec.strike == 0.0:
        return _closed_form(0.0, cfg, method)
    r, s0, sig = spec.rate, spec.s0, spec.sigma
    if method == FD:
        batch = _base_ensemble(spec, cfg, ensemble)[0.0]
        pv = price_naive_values(spec, batch)
        dv = delta(spec, cfg, FD, ensemble={0.0: batch})
        gv = gamma(spec, cfg, FD, ensemble={0.0: batch})
        pe = _wrap_values(pv, FD, started)
        mean = r * pe.mean - r * s0 * dv.mean - 0.5 * sig**2 * s0 * gv.mean
        h_d = FD_REL_STEP["delta"] * s0
        h_g = FD_REL_STEP["gamma"] * s0
        infl = (
            r * pv
            - r * s0 * (price_naive_values(_bump(spec, s0=s0 + h_d), batch)
                        - price_naive_values(_bump(spec, s0=s0 - h_d), batch)) / (2 * h_d)
            - 0.5 * sig**2 * s0 * (price_naive_values(_bump(spec, s0=s0 + h_g), batch)
                                   - 2 * pv
                                   + price_naive_values(_bump(spec, s0=s0 - h_g), batch)) / h_g**2
        )
        return _wrap_values(infl, FD, started, mean=mean)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    ens = _base_ensemble(spec, cfg, ensemble, nus=(0.0, 1.0))
    pv = price_identity_values(spec, ens[0.0])
    dv = delta_identity_values(spec, ens[0.0])
    gv = gamma_identity_values(spec, ens[0.0], ens[1.0])
    mean = (r * float(pv.mean()) - r * s0 * float(dv.mean())
            - 0.5 * sig**2 * s0 * float(gv.mean()))
    return _wrap_values(r * pv - r * s0 * dv - 0.5 * sig**2 * s0 * gv,
                        IDENTITY, started, mean=mean)


def vega(spec: OptionSpec, cfg: MCConfig, method: str = IDENTITY, *,
         ensemble: Mapping[float, PathBatch] | None = None) -> Estimate:
    """Sensitivity of the price to sigma.

    The identity method keeps the survival probabilities in their tilted /
    indicator form on shared paths and discounts the strike term, which is
    what the derivative of the discounted price requires and what the
    finite-difference cross-check confirms.  The printed form of the strike
    term carries no discount; its value is attached as a flag whenever the
    two differ (rate > 0).  The fully indicator-free route is
    :func:`vega_weighted`.
    """
    started = time.perf_counter()
    if spec.strike == 0.0:
        return _closed_form(0.0, cfg, method)
    if method == FD:
        h = FD_REL_STEP["vega"] * spec.sigma
        up_spec = _bump(spec, sigma=spec.sigma + h)
        dn_spec = _bump(spec, sigma=spec.sigma - h)
        up = price_naive_values(up_spec, sample_batch(up_spec.horizon, 0.0, cfg))
        dn = price_naive_values(dn_spec, sample_batch(dn_spec.horizon, 0.0, cfg))
        return _wrap_values((up - dn) / (2.0 * h), FD, started)
    if method != IDENTITY:
        raise ValueError(f"unknown method {method!r}")
    batch0 = _base_ensemble(spec, cfg, ensemble)[0.0]
    values = vega_identity_values(spec, batch0)
    flags: tuple[str, ...] = ()
    if spec.rate > 0.0:
        undiscounted = float(values.mean()) + (2.0 * spec.strike / spec.sigma) \
            * (1.0 - spec.discount) * float((1.0 - (batch0.integral <= spec.scale_a)).mean())
        flags = (f"printed-form={undiscounted:.17g}",)
    return _wrap_values(values, IDENTITY, started, flags)


def vega_weighted(spec: OptionSpec, cfg: MCConfig, *,
                  ensemble: Mapping[float, PathBatch] | None = None) -> Estimate:
    """Vega with both survivals through the indicator-free weight routes.

    This is the literal composition of the printed vega with the printed CDF
    identities.  It shares the heavy-tail behavior of those weights and is
    kept for side-by-side comparison, not as the default.
    """
    started = time.perf_counter()
    if spec.strike == 0.0:
        return _closed_form(0.0, cfg, "identity-weighted")
    a, sig = spec.scale_a, spec.sigma
    ens = _base_ensemble(spec, cfg, ensemble, nus=(0.0, 1.0))
    pv = price_identity_values(spec, ens[0.0])
    surv1 = 1.0 - weighted_cdf_values(ens[1.0], a)
    surv0 = 1.0 - weighted_cdf_values(ens[0.0], a)
    values = (-2.0 / sig) * pv \
        + (2.0 * spec.s0 / sig) * spec.discount * surv1 \
        - (2.0 * spec.strike / sig) * spec.discount * surv0
    return _wrap_values(values, "identity-weighted", started)


def theta_fd_expiry(spec: OptionSpec, cfg: MCConfig) -> Estimate:
    """Central difference of the naive price in expiry, with common randomness.

    Time decay oracle: -(price(tau+h) - price(tau-h)) / (2h), h = 0.05 tau.
    Both shifted horizons reuse the same increments and step count as the
    base configuration.
    """
    started = time.perf_counter()
    if spec.strike == 0.0:
        return _closed_form(0.0, cfg, FD)
    h = FD_REL_STEP["theta"] * spec.expiry
    up_spec = _bump(spec, expiry=spec.expiry + h)
    dn_spec = _bump(spec, expiry=spec.expiry - h)
    up = price_naive_values(up_spec, sample_batch(up_spec.horizon, 0.0, cfg))
    dn = price_naive_values(dn_spec, sample_batch(dn_spec.horizon, 0.0, cfg))
    return _wrap_values(-(up - dn) / (2.0 * h), FD, started)


def greek_report(spec: OptionSpec, cfg: MCConfig, method: str = IDENTITY,
                 fd_check: bool = False) -> GreekReport:
    """Price plus all four Greeks from one shared path ensemble.

    With ``fd_check`` the report also carries the four common-random-number
    finite-difference cross-checks (delta and gamma in s0, theta in expiry,
    vega in sigma).
    """
    nus = (0.0, 1.0) if method == IDENTITY else (0.0,)
    ens = sample_ensemble(spec.horizon, nus, cfg) if spec.strike > 0.0 else {}
    kwargs = {"ensemble": ens} if ens else {}
    greek_method = FD if method == NAIVE else method
    report = GreekReport(
        spec=spec,
        method=method,
        price=price(spec, cfg, NAIVE if method == NAIVE else IDENTITY, **kwargs),
        delta=delta(spec, cfg, greek_method, **kwargs),
        gamma=gamma(spec, cfg, greek_method, **kwargs),
        theta=theta(spec, cfg, greek_method, **kwargs),
        vega=vega(spec, cfg, greek_method, **kwargs),
    )
    if not fd_check:
        return report
    checks = {
        "delta": delta(spec, cfg, FD, **kwargs),
        "gamma": gamma(spec, cfg, FD, **kwargs),
        "theta": theta_fd_expiry(spec, cfg),
        "vega": vega(spec, cfg, FD, **kwargs),
    }
    return GreekReport(spec=report.spec, method=report.method, price=report.price,
                       delta=report.delta, gamma=report.gamma, theta=report.theta,
                       vega=report.vega, fd_cross_checks=checks)


def _bump(spec: OptionSpec, **changes: float) -> OptionSpec:
    fields = {"s0": spec.s0, "strike": spec.strike, "sigma": spec.sigma,
              "rate": spec.rate, "expiry": spec.expiry}
    fields.update(changes)
    return OptionSpec(**fields)

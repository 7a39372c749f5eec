"""Walk through the distribution estimators for the integrated exponential
Brownian motion A_t = int_0^t exp(B_s - s/2) ds.

Every quantity is computed twice: once by plain Monte Carlo on the simulated
paths ("naive") and once through the closed-form measure-change identities
("identity").  The script prints the CDF at a few thresholds, the density
curve with its characteristic heavy right tail, and the normalization check.
"""

import math

import numpy as np

import asianmc as am

N_PATHS = 200_000
T = 1.0

cfg = am.MCConfig(n_paths=N_PATHS, n_steps=am.default_steps(T), master_seed=42)
ens = am.sample_ensemble(T, (0.0, 1.0), cfg)

print(f"Distribution of A_t at t={T}, {N_PATHS:,} paths, {cfg.n_steps} steps")
print()

print("CDF Pr[A_t <= a], two estimator families")
print(f"{'a':>6} {'naive':>10} {'se':>9} {'identity':>10} {'se':>9}")
for a in (0.4, 0.7, 1.0, 1.5, 2.0, 3.0):
    nv = am.cdf(a, T, 0.0, cfg, "naive", ensemble=ens)
    ident = am.cdf(a, T, 0.0, cfg, "identity", ensemble=ens)
    print(f"{a:6.2f} {nv.mean:10.4f} {nv.stderr:9.4f} {ident.mean:10.4f} {ident.stderr:9.4f}")
print()
print("Note the identity column's larger standard errors at moderate a: the")
print("indicator-free weight exp(2M/(a+A)) is heavy-tailed there, and at")
print("fixed path counts its sample mean approaches the truth from below.")
print()

print("Drifted CDF Pr[A_t^(1) <= a]: exponential tilt vs drifted paths")
for a in (0.5, 1.0, 2.0):
    tilt = am.cdf(a, T, 1.0, cfg, "identity", ensemble=ens)
    nv = am.cdf(a, T, 1.0, cfg, "naive", ensemble=ens)
    raw = am.cdf_weighted(a, T, 1.0, cfg, ensemble=ens)
    print(f"  a={a}: tilt {tilt.mean:.4f}+-{tilt.stderr:.4f}  "
          f"naive {nv.mean:.4f}+-{nv.stderr:.4f}  "
          f"indicator-free {raw.mean:.4f}+-{raw.stderr:.4f}")
print()

print("Density of A_1 via the two-drift identity (difference of CDF weights)")
grid = np.arange(0.1, 3.01, 0.1)
curve = [am.density(float(a), T, cfg, "identity", ensemble=ens).mean for a in grid]
peak = max(curve)
for a, g in zip(grid, curve):
    bar = "#" * int(60 * max(g, 0.0) / peak)
    print(f"  a={a:4.1f} g={g:7.4f} {bar}")
print()

var = 2 * (math.e - 2) - 1
gauss = math.exp(-((3 - 1) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
g3 = am.density(3.0, T, cfg, "identity", ensemble=ens).mean
print(f"Heavy tail: g(3) = {g3:.4f} vs a moment-matched Gaussian's {gauss:.4f}")

wide = np.arange(0.05, 10.001, 0.05)
total = np.trapezoid([am.density(float(a), T, cfg, "identity", ensemble=ens).mean
                      for a in wide], wide)
print(f"Normalization over (0, 10]: {total:.4f}")

"""Convergence comparison of the two families for E[(A_t - a)^+], a=0.4, t=0.5.

The transformed estimator keeps every simulated path (the payoff's truncation
event is absorbed into a smooth weight), so at small path counts its sample
standard error is several times smaller than the naive payoff average's.
The second half of the script shows the flip side: the weight distribution is
heavy-tailed, so at large path counts the reported stderr grows as the tail
gets sampled, and small-sample estimates sit slightly low.
"""

import numpy as np

import asianmc as am
from asianmc.bench import SweepSpec, run_sweep

A, T = 0.4, 0.5

print(f"Kernel E[(A_t - a)^+] at a={A}, t={T}")
print()
print("Per-seed estimates as the path count grows (seed 0):")
spec = SweepSpec("call_kernel", {"a": (A,), "t": (T,)},
                 n_paths=tuple(range(50, 501, 50)), seeds=(0,),
                 methods=("naive", "identity"))
res = run_sweep(spec)
print(f"{'n':>5} {'naive':>10} {'se':>9} {'identity':>10} {'se':>9}")
for n in spec.n_paths:
    nv = res.select(method="naive", n_paths=n)[0].estimate
    ident = res.select(method="identity", n_paths=n)[0].estimate
    print(f"{n:5d} {nv.mean:10.4f} {nv.stderr:9.4f} {ident.mean:10.4f} {ident.stderr:9.4f}")
print()

print("Sample-stderr comparison at n=500 over ten seeds:")
spec10 = SweepSpec("call_kernel", {"a": (A,), "t": (T,)},
                   n_paths=(500,), seeds=tuple(range(10)),
                   methods=("naive", "identity"))
res10 = run_sweep(spec10)
wins = res10.stderr_win_fraction(500)
ratios = []
for seed in range(10):
    nv = res10.select(method="naive", seed=seed)[0].estimate
    ident = res10.select(method="identity", seed=seed)[0].estimate
    ratios.append(nv.stderr / ident.stderr)
print(f"  identity stderr smaller in {wins:.0%} of seeds; "
      f"naive/identity ratios: {np.round(ratios, 2).tolist()}")
print()

print("The fine print: growing the path count samples the weight tail.")
print(f"{'n':>9} {'naive':>10} {'identity':>10} {'id se':>9}")
for n in (10_000, 100_000, 1_000_000):
    cfg = am.MCConfig(n, 512, 42)
    ens = am.sample_ensemble(T, (0.0,), cfg)
    nv = am.call_kernel(A, T, 0.0, cfg, "naive", ensemble=ens)
    ident = am.call_kernel(A, T, 0.0, cfg, "identity", ensemble=ens)
    print(f"{n:9,d} {nv.mean:10.5f} {ident.mean:10.5f} {ident.stderr:9.5f}")
print()
print("The naive column is an unbiased oracle; the transformed estimate")
print("climbs toward it as rare large weights enter the sample, while its")
print("reported stderr inflates to match.  Cross-validating the families at")
print("a fixed budget is exactly what the bench harness automates.")

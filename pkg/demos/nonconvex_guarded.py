"""Acceleration on a nonconvex landscape, with the adaptive guard on.

On a tanh network trained by mini-batch SGD with momentum there is no
quadratic story to lean on, and a fixed ridge sometimes extrapolates
badly. The adaptive variant evaluates a small ridge grid per epoch,
scores every candidate with the actual objective, and keeps the last
iterate whenever nothing beats it, so the recorded accelerated curve is
never worse than the vanilla one.
"""

import numpy as np

from rnacc import OptimizerConfig, RnaConfig, make_mlp, run_with_rna

problem = make_mlp(d_in=10, hidden=8, n_samples=200, seed=0)
print(f"problem: {problem.name} ({problem.dim} parameters)")

opt_cfg = OptimizerConfig(
    eta=0.2, momentum=0.9, weight_decay=1e-5, batch_size=32, seed=0
)
rna_cfg = RnaConfig(window=10, lam_grid=(1e-12, 1e-8, 1e-4))

vanilla, accel = run_with_rna(problem, opt_cfg, rna_cfg, epochs=100)

print(f"\n{'epoch':>6} {'loss (vanilla)':>15} {'loss (accel)':>14} {'ridge picked':>13}")
for epoch in (1, 5, 10, 20, 40, 70, 100):
    v, a = vanilla[epoch - 1], accel[epoch - 1]
    picked = "fallback" if a.lam_used is None else f"{a.lam_used:g}"
    print(f"{epoch:>6} {v.objective:>15.6f} {a.objective:>14.6f} {picked:>13}")

worse = sum(a.objective > v.objective for v, a in zip(vanilla, accel))
fallbacks = sum(a.lam_used is None for a in accel)
ridges = [a.lam_used for a in accel if a.lam_used is not None]
print(f"\nepochs where acceleration was worse than the iterate: {worse}")
print(f"fallbacks to the last iterate: {fallbacks}/{len(accel)}")
if ridges:
    values, counts = np.unique(ridges, return_counts=True)
    print("ridge usage:", {f"{v:g}": int(c) for v, c in zip(values, counts)})

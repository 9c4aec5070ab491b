"""Weighted row sums and maxima of a heavy-tailed array.

Each row of the array holds a growing number of terms. The heaviest
columns decide the tail of both the sum and the maximum of a row, and
the extremal index of the row sequence is the average of the heaviest
columns' indices, weighted by z_j ** k1.
"""

import numpy as np

from tailnet import (
    DependenceScenario,
    TailProfile,
    chi_upper_bound,
    gen_matrix,
    hill_estimate,
    intervals_theta,
    predicted_theta,
    row_aggregate,
    row_caps,
)

n = 100_000
k1, k = 1.0, 3.0
chi = 0.4 * chi_upper_bound(k1, k)
caps = row_caps(n, chi)
n_cols = int(caps.max())
print(f"chi = {chi:.3f}: rows grow to {n_cols} terms")

cases = [
    ("equal weights", (0.3, 0.7), (1.0, 1.0)),
    ("heavier weight on the low-clustering column", (0.2, 0.8), (1.0, 2.0)),
]
for label, thetas, z in cases:
    prof = TailProfile(tuple((k1, t) for t in thetas) + ((k, 1.0),) * (n_cols - 2))
    weights = np.concatenate([z, np.ones(n_cols - 2)])
    est = {"sum": [], "max": []}
    hill = {"sum": [], "max": []}
    for seed in np.random.SeedSequence(2).spawn(10):
        ag = row_aggregate(gen_matrix(prof, DependenceScenario("independent"), n, caps, seed=seed), weights)
        for key, series in (("sum", ag.sums), ("max", ag.maxima)):
            est[key].append(intervals_theta(series))
            hill[key].append(hill_estimate(series))
    print(f"\n{label}: theta={thetas} z={z}")
    print(f"  predicted extremal index  {predicted_theta(thetas, z, k1):.3f}")
    for key in ("sum", "max"):
        print(f"  {key:>3}: Hill {np.mean(hill[key]):.3f}   theta {np.mean(est[key]):.3f}")

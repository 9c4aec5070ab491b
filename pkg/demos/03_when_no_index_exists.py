"""Two arrays whose row sequences have no extremal index.

* Alternating rows: odd rows repeat one heavy column in every dominating
  slot, even rows draw them independently. Odd and even rows then have
  different distributions, and a two-sample test on the two halves sees it.
* A random number of heavy columns: the limit of the definition-based
  ratio changes with the level constant y, so there is no single index.
"""

import numpy as np

from tailnet import (
    DependenceScenario,
    TailProfile,
    definition1_theta,
    gen_matrix,
    random_d_theta,
    row_aggregate,
    stationarity_diagnostic,
)

prof = TailProfile(((1.0, 0.5), (1.0, 0.5), (3.0, 1.0)))
rejections = []
for seed in np.random.SeedSequence(3).spawn(20):
    ag = row_aggregate(gen_matrix(prof, DependenceScenario("alternating", 2), 10_000, seed=seed), 1.0)
    rejections.append(stationarity_diagnostic(ag.sums).reject)
print(f"alternating rows: odd/even KS test rejects in {np.mean(rejections):.0%} of 20 runs")

thetas, z, pmf = (0.2, 1.0), (0.25, 1.5), {1: 0.5, 2: 0.5}
prof = TailProfile(((1.0, 0.2), (1.0, 1.0), (3.0, 1.0)))
weights = np.array([0.25, 1.5, 1.0])
reps, n = 1000, 1000
rows = []
for seed in np.random.SeedSequence(4).spawn(reps):
    mx = gen_matrix(prof, DependenceScenario("independent", pmf), n, seed=seed)
    rows.append(row_aggregate(mx, weights).sums)
rows = np.array(rows)
print("\nrandom number of heavy columns (d = 1 or 2 with equal odds)")
print(f"{'y':>5} {'limit':>7} {'estimate':>9}")
for y in (0.8, 1.0, 1.5):
    print(f"{y:>5} {random_d_theta(thetas, z, 1.0, pmf, y)[2]:7.3f} {definition1_theta(rows, 1.0, y, clamp=False):9.3f}")

"""Root scores of a community graph inherit the heaviest community's indices.

Each root links in members of several communities; a community's member
scores form a stationary series with its own tail and extremal index. The
one-step PageRank sum and Max-Linear maximum at the roots then behave like
the row sums and maxima of a series matrix.
"""

import numpy as np

from tailnet import (
    ColumnSpec,
    CommunitySpec,
    RowLengthLaw,
    build_community_graph,
    full_solve_roots,
    hill_estimate,
    intervals_theta,
    root_aggregate,
)

n_roots = 10_000
communities = [
    CommunitySpec(n_roots, ColumnSpec(1.0, 0.5)),
    CommunitySpec(n_roots, ColumnSpec(2.5, 0.8)),
    CommunitySpec(n_roots, ColumnSpec(3.0, 1.0)),
]
rows = []
for seed in np.random.SeedSequence(5).spawn(10):
    g = build_community_graph(n_roots, communities, RowLengthLaw(6.0), seed=seed)
    ag = root_aggregate(g, c=0.85)
    rows.append([hill_estimate(ag.sums), hill_estimate(ag.maxima), intervals_theta(ag.sums), intervals_theta(ag.maxima)])
mean = np.mean(rows, axis=0)
print(f"graph: {g.n_vertices} vertices, {g.n_edges} edges")
print(f"PageRank-style sums:  Hill {mean[0]:.3f}  theta {mean[2]:.3f}")
print(f"Max-Linear maxima:    Hill {mean[1]:.3f}  theta {mean[3]:.3f}")
print("heaviest community:   k = 1, theta = 0.5")

# Solving both recursions on the whole graph reproduces the one-step values,
# because community members receive no links themselves.
full = full_solve_roots(g, c=0.85)
one = root_aggregate(g, c=0.85)
print(f"\nfull solve vs one step: max relative gap {np.max(np.abs(full.sums / one.sums - 1)):.1e} (sums),"
      f" {np.max(np.abs(full.maxima / one.maxima - 1)):.1e} (maxima)")

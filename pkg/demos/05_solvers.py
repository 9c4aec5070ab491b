"""PageRank and Max-Linear on small graphs, checked by hand and by paths.

On a DAG the Max-Linear score of a vertex is the best product
Q_j * prod(c / D) over the directed paths that end at it.
"""

import itertools

import numpy as np

from tailnet import DiGraph, PageRankConfig, maxlinear_solve, pagerank_solve

g = DiGraph.from_edges(2, [(0, 1)])
pr = pagerank_solve(g, PageRankConfig(c=0.5, q=np.array([0.5, 0.5])))
print(f"two vertices, 0 -> 1, c = 0.5: PageRank {pr.values.round(6)} (hand: [0.25, 0.375])")
ml = maxlinear_solve(g, 0.5, [4.0, 1.0])
print(f"same edge, Q = (4, 1): Max-Linear {ml.values} (hand: [4, 2])")

# a diamond with a long and a short route into vertex 3
edges = [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]
q = np.array([8.0, 0.1, 3.0, 0.5])
c = 0.9
ml = maxlinear_solve(DiGraph.from_edges(4, edges), c, q)
deg = {0: 3, 1: 1, 2: 1}
paths = [[0, 3], [0, 1, 3], [0, 2, 3], [1, 3], [2, 3]]
values = [q[p[0]] * np.prod([c / deg[v] for v in p[:-1]]) for p in paths]
print(f"\ndiamond: Max-Linear R_3 = {ml.values[3]:.4f}; best path value = {max(values + [q[3]]):.4f}")
for p, v in zip(paths, values):
    print(f"  path {'->'.join(map(str, p))}: {v:.4f}")

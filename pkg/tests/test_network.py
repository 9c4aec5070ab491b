import itertools

import numpy as np
import pytest

from tailnet.estimators import hill_estimate, intervals_theta
from tailnet.generators import ColumnSpec, RowLengthLaw
from tailnet.network import (
    CommunitySpec,
    DiGraph,
    PageRankConfig,
    SolverError,
    build_community_graph,
    full_solve_roots,
    maxlinear_solve,
    pagerank_residual,
    pagerank_solve,
    read_labels,
    root_aggregate,
    root_score_series,
)


# -- PageRank ----------------------------------------------------------------------


def test_pagerank_single_vertex():
    g = DiGraph.from_edges(1, [])
    r = pagerank_solve(g, PageRankConfig(c=0.5, q=np.array([1.0])))
    assert r.values[0] == pytest.approx(0.5, abs=1e-10)


def test_pagerank_two_nodes():
    g = DiGraph.from_edges(2, [(0, 1)])
    r = pagerank_solve(g, PageRankConfig(c=0.5, q=np.array([0.5, 0.5]), tol=1e-12))
    assert r.values[0] == pytest.approx(0.25, abs=1e-10)
    assert r.values[1] == pytest.approx(0.375, abs=1e-10)


def _random_graph(rng, n, p):
    adj = rng.random((n, n)) < p
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)
    return DiGraph(n, src, dst)


@pytest.mark.parametrize("n", [5, 50, 300, 1000])
def test_pagerank_residual_and_dense_oracle(n):
    rng = np.random.default_rng(n)
    g = _random_graph(rng, n, min(0.5, 4.0 / n))
    q = rng.random(n)
    q /= q.sum()
    cfg = PageRankConfig(c=0.85, q=q, tol=1e-10)
    r = pagerank_solve(g, cfg)
    assert pagerank_residual(g, r.values, 0.85, q) < 1e-10
    # independent oracle: dense solve of (I - cP) R = (1 - c) q
    p = np.zeros((n, n))
    deg = g.out_degree()
    for s, d in zip(g.src, g.dst):
        p[d, s] += 1.0 / deg[s]
    exact = np.linalg.solve(np.eye(n) - 0.85 * p, 0.15 * q)
    assert np.max(np.abs(r.values - exact)) < 1e-9


def test_pagerank_config_validates():
    with pytest.raises(ValueError):
        PageRankConfig(c=1.0)
    with pytest.raises(ValueError):
        PageRankConfig(q=np.array([0.2, 0.2]))
    with pytest.raises(ValueError):
        PageRankConfig(q=np.array([0.5, 0.5])).personalization(3)


def test_pagerank_iteration_budget():
    g = DiGraph.from_edges(2, [(0, 1), (1, 0)])
    with pytest.raises(SolverError):
        pagerank_solve(g, PageRankConfig(c=0.99, q=np.array([0.9, 0.1]), tol=1e-15, max_iters=3))


# -- Max-Linear --------------------------------------------------------------------------


def test_maxlinear_hand_cases():
    iso = maxlinear_solve(DiGraph.from_edges(2, []), 0.5, [3.0, 2.0])
    assert iso.values.tolist() == [3.0, 2.0]
    chain = maxlinear_solve(DiGraph.from_edges(2, [(0, 1)]), 0.5, [4.0, 1.0])
    assert chain.values.tolist() == [4.0, 2.0]
    cycle = maxlinear_solve(DiGraph.from_edges(2, [(0, 1), (1, 0)]), 0.5, [1.0, 1.0])
    assert cycle.values.tolist() == [1.0, 1.0]


def _path_oracle(n, edges, c, q):
    """Max over all directed paths j -> ... -> i of Q_j times the product of c / D."""
    deg = np.zeros(n)
    out = {v: [] for v in range(n)}
    for s, d in edges:
        deg[s] += 1
        out[s].append(d)
    best = np.array(q, dtype=float)

    def walk(v, value):
        for w in out[v]:
            nxt = value * c / deg[v]
            best[w] = max(best[w], nxt)
            walk(w, nxt)

    for j in range(n):
        walk(j, q[j])
    return best


def test_maxlinear_matches_path_formula_on_random_dags():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        order = rng.permutation(n)
        edges = [
            (int(order[a]), int(order[b]))
            for a, b in itertools.combinations(range(n), 2)
            if rng.random() < 0.4
        ]
        c = float(rng.uniform(0.05, 0.95))
        q = rng.uniform(0.0, 2.0, n)
        got = maxlinear_solve(DiGraph.from_edges(n, edges), c, q).values
        assert np.max(np.abs(got - _path_oracle(n, edges, c, q))) <= 1e-12


def test_maxlinear_validates():
    g = DiGraph.from_edges(2, [(0, 1)])
    with pytest.raises(ValueError):
        maxlinear_solve(g, 1.5, [1.0, 1.0])
    with pytest.raises(ValueError):
        maxlinear_solve(g, 0.5, [1.0])


# -- graph I/O ------------------------------------------------------------------------------


def test_edgelist_round_trip(tmp_path):
    g = DiGraph.from_edges(6, [(0, 1), (2, 1), (5, 4)])
    g.write_edgelist(tmp_path / "g.txt")
    back = DiGraph.read_edgelist(tmp_path / "g.txt")
    assert back.n_vertices == 6
    assert back.src.tolist() == [0, 2, 5] and back.dst.tolist() == [1, 1, 4]


def test_digraph_rejects_bad_edges():
    with pytest.raises(ValueError):
        DiGraph.from_edges(2, [(0, 2)])


# -- community graphs -------------------------------------------------------------------------


def _two_member_graph(scores, q):
    comms = [CommunitySpec(1, ColumnSpec(1.0, 1.0)), CommunitySpec(1, ColumnSpec(3.0, 1.0))]
    g = build_community_graph(1, comms, RowLengthLaw(1e9, cap=2, min=2), seed=0)
    g.member_scores[: len(scores)] = scores
    g.root_q[:] = q
    return g


def test_minimal_star():
    g = build_community_graph(1, [CommunitySpec(1, ColumnSpec(1.0, 1.0))], RowLengthLaw(1.0), seed=0)
    assert g.n_vertices == 2 and g.n_edges == 1
    assert g.src.tolist() == [0] and g.dst.tolist() == [1]
    assert g.labels.tolist() == [0, -1]


def test_root_series_hand_values():
    g = _two_member_graph([3.0, 4.0], 1.0)
    assert root_score_series(g, "one_step_sum", c=0.5)[0] == pytest.approx(4.5)
    assert root_score_series(g, "one_step_max", c=0.5)[0] == pytest.approx(2.0)


def test_root_series_single_neighbor_no_q():
    g = build_community_graph(1, [CommunitySpec(1, ColumnSpec(1.0, 1.0))], RowLengthLaw(1.0), seed=0)
    g.root_q[:] = 0.0
    y = g.member_scores[0]
    assert root_score_series(g, "one_step_sum", 0.85)[0] == pytest.approx(0.85 * y)
    assert root_score_series(g, "one_step_max", 0.85)[0] == pytest.approx(0.85 * y)


def _comms(n, spec):
    return [CommunitySpec(n, ColumnSpec(k, th)) for k, th in spec]


def test_every_root_sees_a_dominating_community():
    n = 2000
    for mode in ("all", "one"):
        g = build_community_graph(n, _comms(n, [(1.0, 0.5), (3.0, 1.0)]), RowLengthLaw(1.5), seed=1, dominating_mode=mode)
        assert np.all(g.slots[:, 0] >= 0)
    g = build_community_graph(n, _comms(n, [(1.0, 0.5), (1.0, 0.5), (3.0, 1.0)]), RowLengthLaw(1.5), seed=1, dominating_mode="one")
    assert np.all((g.slots[:, 0] >= 0) | (g.slots[:, 1] >= 0))


def test_overlap_modes():
    comms = [
        CommunitySpec(50, ColumnSpec(1.0, 0.5)),
        CommunitySpec(50, ColumnSpec(1.0, 0.5), shared_from=(0, 10)),
        CommunitySpec(50, ColumnSpec(3.0, 1.0)),
    ]
    alias = build_community_graph(50, comms, RowLengthLaw(2.0), seed=3, overlap_mode="alias")
    copy = build_community_graph(50, comms, RowLengthLaw(2.0), seed=3, overlap_mode="copy")
    assert copy.n_vertices - alias.n_vertices == 10
    assert np.array_equal(alias.slots[:10, 0], alias.slots[:10, 1])
    assert np.array_equal(copy.member_scores[copy.slots[:10, 1]], copy.member_scores[copy.slots[:10, 0]])
    with pytest.raises(ValueError):
        build_community_graph(5, [CommunitySpec(5, ColumnSpec(1.0, 1.0), shared_from=(0, 2))], RowLengthLaw(2.0))


def test_labels_round_trip(tmp_path):
    g = build_community_graph(20, _comms(20, [(1.0, 0.5), (3.0, 1.0)]), RowLengthLaw(2.0), seed=4)
    g.write_labels(tmp_path / "labels.txt")
    labels = read_labels(tmp_path / "labels.txt")
    assert all(labels[int(r)] == ["root"] for r in g.roots)
    assert labels[0] == ["0"]


def test_full_solve_matches_one_step():
    n = 2000
    g = build_community_graph(n, _comms(n, [(1.0, 0.5), (2.5, 0.8), (3.0, 1.0)]), RowLengthLaw(6.0), seed=5)
    one = root_aggregate(g, 0.85)
    full = full_solve_roots(g, 0.85)
    assert np.allclose(full.sums, one.sums, rtol=1e-8, atol=0)
    assert np.allclose(full.maxima, one.maxima, rtol=1e-12, atol=0)


def test_root_sequence_feeds_estimators():
    n = 10_000
    g = build_community_graph(n, _comms(n, [(1.0, 0.5), (3.0, 1.0)]), RowLengthLaw(6.0), seed=6)
    ag = root_aggregate(g)
    assert ag.sums.shape == (n,) and ag.maxima.shape == (n,)
    assert 0.6 < hill_estimate(ag.sums) < 1.5
    assert 0.0 < intervals_theta(ag.maxima) <= 1.0


def test_bad_modes():
    comms = _comms(5, [(1.0, 1.0)])
    with pytest.raises(ValueError):
        build_community_graph(5, comms, RowLengthLaw(2.0), dominating_mode="some")
    with pytest.raises(ValueError):
        build_community_graph(5, comms, RowLengthLaw(2.0), overlap_mode="merge")
    with pytest.raises(ValueError):
        root_score_series(build_community_graph(5, comms, RowLengthLaw(2.0)), "two_step")

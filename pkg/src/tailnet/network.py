"""Community-labelled directed graphs, PageRank and the Max-Linear fixed point.

Roots are attached to stationary community score series so that the
in-neighbours of root ``i`` are the ``i``-th members of the chosen
communities; the sequence of root scores then inherits the column structure
of a series matrix.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .aggregation import AggregateSeries
from .generators import ColumnSpec, RowLengthLaw, as_seed_sequence, gen_column, gen_personalization, gen_row_lengths


class SolverError(RuntimeError):
    pass


@dataclass
class DiGraph:
    """Directed graph on vertices ``0..n_vertices-1``; an edge ``j -> i`` means ``j`` links to ``i``."""

    n_vertices: int
    src: np.ndarray
    dst: np.ndarray

    def __post_init__(self):
        self.src = np.asarray(self.src, dtype=np.int64).ravel()
        self.dst = np.asarray(self.dst, dtype=np.int64).ravel()
        if self.src.shape != self.dst.shape:
            raise ValueError("src and dst must have equal length")
        if self.src.size and (min(self.src.min(), self.dst.min()) < 0 or max(self.src.max(), self.dst.max()) >= self.n_vertices):
            raise ValueError("edge endpoint outside vertex range")

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "DiGraph":
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls(n_vertices, arr[:, 0], arr[:, 1])

    @property
    def n_edges(self) -> int:
        return self.src.size

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n_vertices)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n_vertices)

    def transition(self) -> sparse.csr_matrix:
        """Sparse ``P`` with ``P[i, j] = (#edges j -> i) / D_j``."""
        deg = self.out_degree()
        w = 1.0 / deg[self.src] if self.src.size else np.zeros(0)
        return sparse.csr_matrix((w, (self.dst, self.src)), shape=(self.n_vertices, self.n_vertices))

    def write_edgelist(self, path):
        with open(path, "w") as fh:
            fh.write(f"# n_vertices {self.n_vertices}\n")
            for s, d in zip(self.src, self.dst):
                fh.write(f"{s} {d}\n")

    @staticmethod
    def read_edgelist(path) -> "DiGraph":
        n = None
        edges = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    parts = line[1:].split()
                    if len(parts) == 2 and parts[0] == "n_vertices":
                        n = int(parts[1])
                    continue
                s, d = line.split()
                edges.append((int(s), int(d)))
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        return DiGraph.from_edges(n, edges)


@dataclass(frozen=True)
class CommunitySpec:
    """A community of ``size`` vertices whose scores follow ``column``.

    ``shared_from=(other, count)`` makes the first ``count`` members coincide
    with the first ``count`` members of community ``other``.
    """

    size: int
    column: ColumnSpec
    shared_from: tuple[int, int] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("community size must be >= 1")


@dataclass
class CommunityGraph(DiGraph):
    labels: np.ndarray = None
    roots: np.ndarray = None
    member_scores: np.ndarray = None
    communities: list = field(default_factory=list)
    slots: np.ndarray = None
    root_q: np.ndarray = None
    memberships: list = field(default_factory=list)

    @property
    def n_roots(self) -> int:
        return self.roots.size

    @property
    def dominating(self) -> tuple[int, ...]:
        k1 = min(c.column.tail_index for c in self.communities)
        return tuple(j for j, c in enumerate(self.communities) if c.column.tail_index == k1)

    def write_labels(self, path):
        """Sidecar ``vertex community`` lines; roots carry label ``root``."""
        with open(path, "w") as fh:
            for v, comm in self.memberships:
                fh.write(f"{v} {comm}\n")
            for r in self.roots:
                fh.write(f"{r} root\n")


def read_labels(path) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            v, lab = line.split()
            out.setdefault(int(v), []).append(lab)
    return out


def build_community_graph(
    n_roots: int,
    communities: list[CommunitySpec],
    attachment: RowLengthLaw,
    seed=None,
    dominating_mode: str = "all",
    overlap_mode: str = "alias",
    personalization: dict | None = None,
) -> CommunityGraph:
    """Random graph of roots fed by community members.

    Parameters
    ----------
    n_roots : int
    communities : list of CommunitySpec
        At least one must carry the minimum tail index.
    attachment : RowLengthLaw
        Law of the in-degree ``N_i`` of each root; clamped to
        ``[1, len(communities)]`` since a root takes at most one member per
        community.
    seed : int or SeedSequence, optional
    dominating_mode : {"all", "one"}
        ``"all"`` links every root to every dominating community (the
        in-degree is raised to their number if needed); ``"one"`` links to
        one dominating community chosen uniformly.
    overlap_mode : {"alias", "copy"}
        Shared members are either the same vertex or a separate vertex with
        the same score.
    personalization : dict, optional
        Keyword arguments of :func:`gen_personalization` for the roots'
        ``Q`` values; defaults to uniform over all vertices.
    """
    if not communities:
        raise ValueError("need at least one community")
    if dominating_mode not in ("all", "one"):
        raise ValueError("dominating_mode must be 'all' or 'one'")
    if overlap_mode not in ("alias", "copy"):
        raise ValueError("overlap_mode must be 'alias' or 'copy'")
    ss = as_seed_sequence(seed)
    s_scores, s_len, s_pick, s_q = ss.spawn(4)
    score_seeds = s_scores.spawn(len(communities))
    k1 = min(c.column.tail_index for c in communities)
    dom = [j for j, c in enumerate(communities) if c.column.tail_index == k1]
    n_comm = len(communities)

    # vertex ids of every community member, in member order
    member_ids: list[np.ndarray] = []
    scores: list[float] = []
    memberships: list[tuple[int, int]] = []
    labels: list[int] = []
    next_id = 0
    for j, spec in enumerate(communities):
        vals = gen_column(spec.column, spec.size, score_seeds[j])
        ids = np.empty(spec.size, dtype=np.int64)
        shared = 0
        if spec.shared_from is not None:
            other, shared = spec.shared_from
            if not 0 <= other < j:
                raise ValueError("shared_from must reference an earlier community")
            shared = min(shared, spec.size, communities[other].size)
            src_ids = member_ids[other][:shared]
            vals[:shared] = np.asarray(scores)[src_ids]
            if overlap_mode == "alias":
                ids[:shared] = src_ids
                memberships.extend((int(v), j) for v in src_ids)
        start = shared if overlap_mode == "alias" else 0
        fresh = spec.size - start
        ids[start:] = np.arange(next_id, next_id + fresh)
        scores.extend(vals[start:].tolist())
        labels.extend([j] * fresh)
        memberships.extend((int(v), j) for v in ids[start:])
        next_id += fresh
        member_ids.append(ids)

    n_members = next_id
    roots = np.arange(n_members, n_members + n_roots, dtype=np.int64)
    lo = len(dom) if dominating_mode == "all" else 1
    cap = n_comm if attachment.cap is None else max(lo, min(attachment.cap, n_comm))
    n_in = gen_row_lengths(n_roots, RowLengthLaw(attachment.alpha, cap, max(lo, min(attachment.min, cap))), np.random.default_rng(s_len))

    rng = np.random.default_rng(s_pick)
    non_dom = np.array([j for j in range(n_comm) if j not in dom], dtype=np.int64)
    dom_arr = np.array(dom, dtype=np.int64)
    slots = np.full((n_roots, n_comm), -1, dtype=np.int64)
    for i in range(n_roots):
        if dominating_mode == "all":
            chosen = list(dom_arr)
            pool = non_dom
        else:
            first = int(rng.choice(dom_arr))
            chosen = [first]
            pool = np.array([j for j in range(n_comm) if j != first], dtype=np.int64)
        extra = int(n_in[i]) - len(chosen)
        if extra > 0:
            chosen.extend(rng.choice(pool, size=extra, replace=False).tolist())
        for j in chosen:
            ids = member_ids[j]
            slots[i, j] = ids[i % ids.size]

    # one edge per distinct (member, root) pair
    src, dst = [], []
    for i in range(n_roots):
        for v in dict.fromkeys(slots[i][slots[i] >= 0].tolist()):
            src.append(v)
            dst.append(int(roots[i]))

    n_vertices = n_members + n_roots
    if personalization is None:
        root_q = np.full(n_roots, 1.0 / n_vertices)
    else:
        root_q = gen_personalization(n_roots, seed=np.random.default_rng(s_q), **personalization)
    return CommunityGraph(
        n_vertices,
        np.array(src, dtype=np.int64),
        np.array(dst, dtype=np.int64),
        labels=np.concatenate([np.array(labels, dtype=np.int64), np.full(n_roots, -1, dtype=np.int64)]),
        roots=roots,
        member_scores=np.concatenate([np.array(scores), np.zeros(n_roots)]),
        communities=list(communities),
        slots=slots,
        root_q=root_q,
        memberships=memberships,
    )


@dataclass(frozen=True)
class PageRankConfig:
    c: float = 0.85
    q: np.ndarray | None = None
    tol: float = 1e-10
    max_iters: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"damping factor must lie in (0, 1), got {self.c}")
        if self.q is not None:
            q = np.asarray(self.q, dtype=float)
            if np.any(q < 0) or abs(q.sum() - 1.0) > 1e-9:
                raise ValueError("personalization must be nonnegative and sum to one")

    def personalization(self, n: int) -> np.ndarray:
        if self.q is None:
            return np.full(n, 1.0 / n)
        q = np.asarray(self.q, dtype=float)
        if q.size != n:
            raise ValueError(f"personalization has {q.size} entries for {n} vertices")
        return q


@dataclass
class ScoreVector:
    values: np.ndarray
    iterations: int
    residual: float

    def to_csv(self, path, labels=None):
        """CSV with columns ``vertex, score, community``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["vertex", "score", "community"])
            for v, s in enumerate(self.values):
                lab = "" if labels is None else ("root" if labels[v] < 0 else int(labels[v]))
                w.writerow([v, repr(float(s)), lab])


def pagerank_residual(graph: DiGraph, r: np.ndarray, c: float, q: np.ndarray) -> float:
    return float(np.max(np.abs(r - c * (graph.transition() @ r) - (1.0 - c) * q), initial=0.0))


def pagerank_solve(graph: DiGraph, cfg: PageRankConfig = PageRankConfig()) -> ScoreVector:
    """Fixed-point iteration for ``R = c P R + (1 - c) q`` starting at ``q``.

    Vertices without out-links contribute nothing; their mass is not
    redistributed.
    """
    q = cfg.personalization(graph.n_vertices)
    p = graph.transition()
    r = q.copy()
    for it in range(1, cfg.max_iters + 1):
        nxt = cfg.c * (p @ r) + (1.0 - cfg.c) * q
        res = float(np.max(np.abs(nxt - r), initial=0.0))
        if res < cfg.tol:
            return ScoreVector(r, it, res)
        r = nxt
    raise SolverError(f"PageRank did not converge in {cfg.max_iters} iterations")


def _maxlinear_step(graph: DiGraph, r: np.ndarray, coef: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = q.copy()
    if graph.n_edges:
        np.maximum.at(out, graph.dst, coef * r[graph.src])
    return out


def maxlinear_solve(graph: DiGraph, c: float, q, tol: float = 1e-12, max_iters: int | None = None) -> ScoreVector:
    """Minimal solution of ``R(i) = max(max_{j -> i} c R(j) / D_j, Q_i)``.

    Iterates from ``R = Q``; the iterates increase monotonically and settle
    once the longest maximising path has been propagated.
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c}")
    q = np.asarray(q, dtype=float)
    if q.shape != (graph.n_vertices,) or np.any(q < 0):
        raise ValueError("need one nonnegative Q per vertex")
    max_iters = graph.n_vertices + 2 if max_iters is None else max_iters
    coef = c / graph.out_degree()[graph.src] if graph.n_edges else np.zeros(0)
    r = q.copy()
    for it in range(1, max_iters + 1):
        nxt = _maxlinear_step(graph, r, coef, q)
        res = float(np.max(np.abs(nxt - r), initial=0.0))
        if res < tol:
            return ScoreVector(r, it, res)
        r = nxt
    raise SolverError(f"Max-Linear iteration did not converge in {max_iters} iterations")


def neighbor_terms(graph: CommunityGraph) -> tuple[np.ndarray, np.ndarray]:
    """Edge-level ``(root position, score / out-degree)`` of each root's in-neighbours."""
    deg = graph.out_degree()
    pos = graph.dst - graph.roots[0]
    keep = (pos >= 0) & (pos < graph.n_roots)
    src = graph.src[keep]
    return pos[keep], graph.member_scores[src] / deg[src]


def root_score_series(graph: CommunityGraph, mode: str, c: float = 0.85, scores: ScoreVector | None = None) -> np.ndarray:
    """Score sequence of the roots in root order.

    ``one_step_sum`` is ``c * sum_j Y_j / D_j + Q_i`` over the in-neighbours
    of root ``i`` and ``one_step_max`` is ``max(c * max_j Y_j / D_j, Q_i)``;
    ``full_solve`` returns ``scores`` restricted to the roots.
    """
    if mode == "full_solve":
        if scores is None:
            raise ValueError("full_solve needs a solved ScoreVector")
        return np.asarray(scores.values)[graph.roots]
    pos, vals = neighbor_terms(graph)
    if mode == "one_step_sum":
        out = np.zeros(graph.n_roots)
        np.add.at(out, pos, c * vals)
        return out + graph.root_q
    if mode == "one_step_max":
        out = np.zeros(graph.n_roots)
        np.maximum.at(out, pos, c * vals)
        return np.maximum(out, graph.root_q)
    raise ValueError(f"unknown mode {mode!r}")


def root_aggregate(graph: CommunityGraph, c: float = 0.85) -> AggregateSeries:
    """One-step PageRank-style sums and Max-Linear maxima over the roots."""
    return AggregateSeries(
        root_score_series(graph, "one_step_sum", c),
        root_score_series(graph, "one_step_max", c),
        np.array([c]),
        meta={"source": "community_graph", "n_roots": int(graph.n_roots)},
    )


def score_personalization(graph: CommunityGraph) -> tuple[np.ndarray, float]:
    """Vertex values ``Q`` (member scores, root ``Q_i``) and their total.

    ``Q / total`` is a probability vector; with it, PageRank on a graph whose
    members have no in-links gives root scores equal to
    ``(1 - c) / total`` times the one-step sums.
    """
    q = graph.member_scores.copy()
    q[graph.roots] = graph.root_q
    total = float(q.sum())
    return q, total


def full_solve_roots(graph: CommunityGraph, c: float = 0.85, tol: float = 1e-10) -> AggregateSeries:
    """Root scores from solving both recursions on the whole graph, rescaled to the one-step units."""
    q, total = score_personalization(graph)
    pr = pagerank_solve(graph, PageRankConfig(c=c, q=q / total, tol=tol * (1.0 - c) / total))
    ml = maxlinear_solve(graph, c, q, tol=tol)
    sums = root_score_series(graph, "full_solve", scores=pr) * total / (1.0 - c)
    return AggregateSeries(sums, root_score_series(graph, "full_solve", scores=ml), np.array([c]), meta={"source": "full_solve"})

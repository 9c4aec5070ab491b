"""Weighted row sums and maxima of a series matrix."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .generators import SeriesMatrix
from .heavy_tail import ThresholdSequence, threshold_u


@dataclass
class AggregateSeries:
    sums: np.ndarray
    maxima: np.ndarray
    weights: np.ndarray
    fingerprint: str = ""
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.sums.size

    def to_csv(self, path, header: dict | None = None):
        """Two-column CSV (sum, max) preceded by ``# key: value`` metadata lines."""
        info = {"weights": self.weights.tolist(), "fingerprint": self.fingerprint, **self.meta, **(header or {})}
        with open(path, "w", newline="") as fh:
            for key in sorted(info):
                fh.write(f"# {key}: {json.dumps(info[key], sort_keys=True)}\n")
            w = csv.writer(fh)
            w.writerow(["sum", "max"])
            for s, m in zip(self.sums, self.maxima):
                w.writerow([repr(float(s)), repr(float(m))])

    @classmethod
    def from_csv(cls, path) -> "AggregateSeries":
        meta = {}
        rows = []
        with open(path, newline="") as fh:
            lines = [ln for ln in fh]
        body = []
        for ln in lines:
            if ln.startswith("# "):
                key, _, val = ln[2:].partition(": ")
                meta[key] = json.loads(val)
            else:
                body.append(ln)
        reader = csv.reader(body)
        next(reader)
        for s, m in reader:
            rows.append((float(s), float(m)))
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        weights = np.asarray(meta.pop("weights", []), dtype=float)
        fp = meta.pop("fingerprint", "")
        return cls(arr[:, 0], arr[:, 1], weights, fp, meta)


def _weights(z, n_cols: int) -> np.ndarray:
    w = np.atleast_1d(np.asarray(z, dtype=float))
    if w.size == 1:
        w = np.full(n_cols, float(w[0]))
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weights must be positive and finite")
    return w


def row_aggregate(matrix: SeriesMatrix, z, include_q: bool = False) -> AggregateSeries:
    """Weighted sum and maximum over the active cells of every row.

    A scalar ``z`` is broadcast to all columns. With ``include_q`` the
    personalization value is added to the sum and joined to the maximum.
    """
    w = _weights(z, matrix.n_cols)
    need = int(matrix.lengths.max())
    if w.size < need:
        raise ValueError(f"weight vector of length {w.size} shorter than longest row ({need})")
    w = w[: matrix.n_cols] if w.size >= matrix.n_cols else np.concatenate([w, np.ones(matrix.n_cols - w.size)])
    weighted = matrix.values * w[None, :]
    weighted[~matrix.active_mask()] = 0.0
    sums = weighted.sum(axis=1)
    maxima = weighted.max(axis=1)
    if include_q:
        if matrix.q is None:
            raise ValueError("matrix has no personalization column")
        sums = sums + matrix.q
        maxima = np.maximum(maxima, matrix.q)
    return AggregateSeries(
        sums,
        maxima,
        w[:need].copy(),
        matrix.fingerprint(),
        {"scenario": matrix.scenario.kind, "d": matrix.d, "include_q": include_q},
    )


def running_maxima(series) -> np.ndarray:
    x = np.asarray(series, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("series must be nonempty")
    return np.maximum.accumulate(x)


def predicted_theta(thetas, z, k1: float) -> float:
    """Extremal index of the aggregate of ``d`` independent dominating columns.

    The ``theta_j`` averaged with weights ``z_j ** k1``.
    """
    th = np.asarray(thetas, dtype=float).ravel()
    w = np.asarray(z, dtype=float).ravel()
    if th.size == 0 or w.size == 0:
        raise ValueError("need at least one column")
    if th.size != w.size:
        raise ValueError("thetas and weights must have equal length")
    if np.any((th < 0) | (th > 1)) or np.any(w <= 0):
        raise ValueError("need theta in [0, 1] and positive weights")
    # factor out the largest weight so large k1 does not overflow
    p = (w / w.max()) ** k1
    return float(np.sum(th * p) / np.sum(p))


def random_d_theta(thetas, z, k1: float, pmf: dict, y: float) -> tuple[float, float, float]:
    """Limit ``(A(y), tau(y), -log A / tau)`` for a random number of independent dominating columns.

    ``A(y) = sum_m P{d=m} exp(-sum_{j<=m} theta_j (z_j/y)**k1)`` and
    ``tau(y) = sum_m P{d=m} sum_{j<=m} (z_j/y)**k1``. The ratio depends on
    ``y``, so it is not an extremal index.
    """
    th = np.asarray(thetas, dtype=float)
    w = np.asarray(z, dtype=float)
    a = tau = 0.0
    for m, p in pmf.items():
        s = (w[:m] / y) ** k1
        a += p * np.exp(-np.sum(th[:m] * s))
        tau += p * np.sum(s)
    return float(a), float(tau), float(-np.log(a) / tau)


@dataclass
class Condition11bReport:
    y: float
    n: int
    left: float
    right: float
    ratio: float
    left_se: float
    right_se: float
    wide: bool

    def as_dict(self):
        return self.__dict__.copy()


def column_maxima(matrix: SeriesMatrix, n: int | None = None) -> np.ndarray:
    """Maxima of the first ``d`` columns over the first ``n`` rows."""
    n = matrix.n_rows if n is None else n
    return matrix.values[:n, : matrix.d].max(axis=0)


def condition_11b_terms(col_max: np.ndarray, z, u: float) -> tuple[np.ndarray, np.ndarray]:
    """Per replicate indicator of the left-hand event and of ``z_d M^(d) <= u``.

    ``col_max`` has shape ``(R, d)``. The left event is the union over
    ``j < d`` of ``{z_j M^(j) > u, z_i M^(i) <= u for all i > j}``; these are
    disjoint, so its indicator is the sum of the individual indicators.
    """
    cm = np.atleast_2d(col_max) * np.asarray(z, dtype=float)[None, : col_max.shape[-1]]
    below = cm <= u
    d = cm.shape[1]
    # all_below_after[:, j] = all(below[:, j+1:])
    tail = np.ones((cm.shape[0], d + 1), dtype=bool)
    for j in range(d - 1, -1, -1):
        tail[:, j] = tail[:, j + 1] & below[:, j]
    left = np.zeros(cm.shape[0])
    for j in range(d - 1):
        left += (~below[:, j]) & tail[:, j + 1]
    return left, below[:, d - 1].astype(float)


def check_condition_11b(matrices, z, y_grid, k1: float | None = None, n_grid=None) -> list[Condition11bReport]:
    """Monte Carlo estimate of both sides of the nested-maxima condition.

    Parameters
    ----------
    matrices : sequence of SeriesMatrix
        Independent replicates with ``d >= 2`` dominating columns.
    z : array_like
        Weights of the dominating columns.
    y_grid : sequence of float
        Level constants of ``u_n = y n**(1/k1)``.
    n_grid : sequence of int, optional
        Prefix lengths; defaults to the full matrix length.

    Returns
    -------
    list of Condition11bReport
        One entry per ``(y, n)``. ``ratio`` should decay to zero when the
        condition holds; ``wide`` flags a ratio whose standard error exceeds
        its magnitude.
    """
    matrices = list(matrices)
    if not matrices:
        raise ValueError("need at least one replicate")
    d = matrices[0].d
    if d < 2:
        raise ValueError("condition needs d >= 2 dominating columns")
    k1 = matrices[0].profile.k1 if k1 is None else k1
    z = np.asarray(z, dtype=float)[:d]
    n_full = min(mx.n_rows for mx in matrices)
    n_grid = [n_full] if n_grid is None else list(n_grid)
    out = []
    r = len(matrices)
    for n in n_grid:
        cm = np.stack([column_maxima(mx, n) for mx in matrices])
        for y in y_grid:
            u = threshold_u(n, ThresholdSequence(y, k1))
            left_i, right_i = condition_11b_terms(cm, z, u)
            left, right = float(left_i.mean()), float(right_i.mean())
            left_se = float(left_i.std(ddof=1) / np.sqrt(r)) if r > 1 else float("inf")
            right_se = float(right_i.std(ddof=1) / np.sqrt(r)) if r > 1 else float("inf")
            ratio = left / right if right > 0 else float("inf")
            wide = bool(left > 0 and left_se > 0.5 * left) or right == 0
            out.append(Condition11bReport(float(y), int(n), left, right, ratio, left_se, right_se, wide))
    return out

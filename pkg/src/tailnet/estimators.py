"""Tail-index and extremal-index estimators with block-bootstrap intervals."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .heavy_tail import ThresholdSequence, threshold_u


class EstimationError(ValueError):
    """Raised when an estimator is undefined for the given sample."""


class InsufficientDataError(EstimationError):
    pass


class ThresholdTooLowError(EstimationError):
    pass


class ThresholdTooHighError(EstimationError):
    pass


def default_m(n: int) -> int:
    return max(1, math.isqrt(n))


def hill_estimate(sample, m: int | None = None) -> float:
    """Hill estimate of the tail index from the ``m`` largest observations.

    ``1 / mean(log(X_(i) / X_(m+1)))`` over the descending order statistics,
    ``i = 1..m``. ``m`` defaults to ``floor(sqrt(n))``.
    """
    x = np.asarray(sample, dtype=float).ravel()
    n = x.size
    if m is None:
        m = default_m(n)
    if not 1 <= m < n:
        raise EstimationError(f"need 1 <= m < n, got m={m}, n={n}")
    top = -np.partition(-x, m)[: m + 1]
    top.sort()
    ref = top[0]
    if not ref > 0:
        raise EstimationError("Hill estimator needs positive upper order statistics")
    mean_log = float(np.mean(np.log(top[1:] / ref)))
    if mean_log <= 0.0:
        raise EstimationError("top order statistics are tied; Hill estimate undefined")
    return 1.0 / mean_log


def hill_plot(sample, ms=None) -> np.ndarray:
    """Array of ``(m, k_hat(m))`` rows; tied ``m`` values are skipped."""
    x = np.sort(np.asarray(sample, dtype=float).ravel())[::-1]
    n = x.size
    if ms is None:
        hi = min(n - 1, max(10, 4 * default_m(n)))
        ms = np.unique(np.linspace(5, hi, 40).astype(int))
    logs = np.log(x)
    csum = np.cumsum(logs)
    rows = []
    for m in ms:
        m = int(m)
        if not 1 <= m < n:
            continue
        mean_log = csum[m - 1] / m - logs[m]
        if mean_log > 0:
            rows.append((m, 1.0 / mean_log))
    return np.array(rows, dtype=float).reshape(-1, 2)


def _exceedance_times(series, u) -> np.ndarray:
    x = np.asarray(series, dtype=float).ravel()
    return np.flatnonzero(x > u)


def intervals_theta(series, u: float | None = None, clamp: bool = True) -> float:
    """Interexceedance-times estimator of the extremal index.

    Uses the bias-corrected moment form when some gap exceeds two and the
    plain form otherwise. ``u`` defaults to the empirical 95th percentile.
    """
    if u is None:
        u = float(np.quantile(series, 0.95))
    s = _exceedance_times(series, u)
    if s.size < 2:
        raise InsufficientDataError(f"need at least two exceedances of u={u}, got {s.size}")
    t = np.diff(s).astype(float)
    n_gaps = t.size
    if t.max() <= 2:
        est = 2.0 * t.sum() ** 2 / (n_gaps * np.sum(t * t))
    else:
        est = 2.0 * np.sum(t - 1.0) ** 2 / (n_gaps * np.sum((t - 1.0) * (t - 2.0)))
    return min(1.0, max(0.0, est)) if clamp else float(est)


def blocks_theta(series, u: float | None = None, b: int | None = None, method: str = "ratio", clamp: bool = True) -> float:
    """Blocks estimator of the extremal index.

    ``method="ratio"`` returns (blocks with an exceedance) / (exceedances).
    ``method="log"`` returns ``log(1 - K/k) / (b log(1 - N/n))`` with ``K``
    of the ``k`` blocks holding exceedances and ``N`` exceedances among
    ``n`` observations; it corrects the ratio form for blocks that contain
    several clusters, which dominates at moderate thresholds.

    ``b`` defaults to ``ceil(sqrt(n))`` and ``u`` to the 95th percentile.
    A trailing partial block is dropped.
    """
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if b is None:
        b = math.ceil(math.sqrt(n))
    if not 1 <= b <= n:
        raise ValueError(f"need 1 <= b <= n, got b={b}, n={n}")
    if u is None:
        u = float(np.quantile(x, 0.95))
    n_blocks = n // b
    exc = x[: n_blocks * b].reshape(n_blocks, b) > u
    n_exc = int(exc.sum())
    if n_exc == 0:
        raise InsufficientDataError(f"no exceedances of u={u}")
    hit = int(exc.any(axis=1).sum())
    if method == "ratio":
        est = hit / n_exc
    elif method == "log":
        if hit == n_blocks:
            raise EstimationError("every block holds an exceedance; raise u or b")
        est = math.log1p(-hit / n_blocks) / (b * math.log1p(-n_exc / (n_blocks * b)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return min(1.0, max(0.0, est)) if clamp else float(est)


def definition1_theta(replicates, k1: float, y: float, clamp: bool = True) -> float:
    """Extremal index straight from its defining limit at ``u_n = y n**(1/k1)``.

    Parameters
    ----------
    replicates : array_like, shape (R, n)
        Independent replicates of a series of length ``n``.

    Returns
    -------
    float
        ``-log(p) / tau`` where ``p`` is the fraction of replicates whose
        maximum stays below ``u_n`` and ``tau`` is ``n`` times the pooled
        exceedance rate.
    """
    arr = np.asarray(replicates, dtype=float)
    if arr.ndim != 2:
        raise ValueError("replicates must be a 2-D array (R, n)")
    r, n = arr.shape
    if r < 100:
        raise InsufficientDataError(f"need at least 100 replicates, got {r}")
    u = threshold_u(n, ThresholdSequence(y, k1))
    p_hat = float(np.mean(arr.max(axis=1) <= u))
    tau_hat = n * float(np.mean(arr > u))
    if tau_hat == 0.0:
        raise ThresholdTooHighError(f"no exceedances of u_n={u:.4g}")
    if p_hat == 0.0:
        raise ThresholdTooLowError(f"every replicate exceeds u_n={u:.4g}")
    est = -math.log(p_hat) / tau_hat
    return min(1.0, max(0.0, est)) if clamp else est


@dataclass
class StationarityReport:
    statistic: float
    pvalue: float
    reject: bool
    level: float


def stationarity_diagnostic(series, level: float = 0.01) -> StationarityReport:
    """Two-sample KS comparison of odd- against even-indexed terms."""
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 100:
        raise InsufficientDataError("need at least 100 observations")
    odd, even = x[0::2], x[1::2]
    res = stats.ks_2samp(odd, even)
    return StationarityReport(float(res.statistic), float(res.pvalue), bool(res.pvalue < level), level)


def moving_block_bootstrap(series, block_len: int, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    block_len = max(1, min(block_len, n))
    n_blocks = math.ceil(n / block_len)
    starts = rng.integers(0, n - block_len + 1, size=n_blocks)
    idx = (starts[:, None] + np.arange(block_len)[None, :]).ravel()[:n]
    return x[idx]


@dataclass
class Estimate:
    value: float
    ci: tuple[float, float]
    raw: float | None = None


@dataclass
class EstimationReport:
    k_hat: Estimate
    theta: dict[str, Estimate]
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def _ci(point: float, draws: list[float], level: float) -> tuple[float, float]:
    if not draws:
        return (point, point)
    lo, hi = np.quantile(draws, [(1 - level) / 2, (1 + level) / 2])
    return (float(min(lo, point)), float(max(hi, point)))


def estimate_series(
    series,
    m: int | None = None,
    quantile: float = 0.95,
    b: int | None = None,
    n_boot: int = 100,
    level: float = 0.9,
    seed=None,
) -> EstimationReport:
    """Hill, intervals and blocks estimates for one series with bootstrap CIs.

    The blocks estimator uses the threshold quantile ``max(quantile, 1 - 1/b)``
    so that, on average, at most one exceedance falls in each block and
    some blocks stay empty.
    """
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    m = default_m(n) if m is None else m
    b = math.ceil(math.sqrt(n)) if b is None else b
    u = float(np.quantile(x, quantile))
    u_blk = float(np.quantile(x, max(quantile, 1.0 - 1.0 / b)))

    k_hat = hill_estimate(x, m)
    th_int_raw = intervals_theta(x, u, clamp=False)
    th_blk_raw = blocks_theta(x, u_blk, b, method="log", clamp=False)

    rng = np.random.default_rng(seed)
    draws = {"k": [], "int": [], "blk": []}
    fns = {
        "k": lambda xb: hill_estimate(xb, m),
        "int": lambda xb: intervals_theta(xb, u),
        "blk": lambda xb: blocks_theta(xb, u_blk, b, method="log"),
    }
    for _ in range(n_boot):
        xb = moving_block_bootstrap(x, b, rng)
        for key, fn in fns.items():
            try:
                draws[key].append(fn(xb))
            except EstimationError:
                pass
    k_draws, int_draws, blk_draws = draws["k"], draws["int"], draws["blk"]

    def clamp(v):
        return min(1.0, max(0.0, v))

    theta = {
        "intervals": Estimate(clamp(th_int_raw), _ci(clamp(th_int_raw), int_draws, level), th_int_raw),
        "blocks": Estimate(clamp(th_blk_raw), _ci(clamp(th_blk_raw), blk_draws, level), th_blk_raw),
    }
    diagnostics = {
        "n": n,
        "m": m,
        "threshold": u,
        "threshold_quantile": quantile,
        "exceedances": int(np.sum(x > u)),
        "block_threshold": u_blk,
        "block_len": b,
        "blocks": n // b,
        "bootstrap_draws": {"hill": len(k_draws), "intervals": len(int_draws), "blocks": len(blk_draws)},
    }
    return EstimationReport(Estimate(k_hat, _ci(k_hat, k_draws, level)), theta, diagnostics)

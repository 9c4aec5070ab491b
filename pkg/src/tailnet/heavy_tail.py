"""Deterministic regular-variation helpers.

Slowly varying parts are constants throughout the package, so every tail is
an exact Pareto tail ``P{Y > x} = (x / scale) ** -k`` above ``scale`` and the
de Bruijn conjugate in the threshold sequence is identically one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ProfileError(ValueError):
    """Raised for an inconsistent tail profile or exponent configuration."""


@dataclass(frozen=True)
class ParetoLaw:
    tail_index: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.tail_index > 0:
            raise ValueError(f"tail_index must be positive, got {self.tail_index}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def survival(self, x):
        """Survival function; equals one at and below ``scale``."""
        x = np.asarray(x, dtype=float)
        ratio = np.maximum(x / self.scale, 1.0)
        return ratio ** (-self.tail_index)

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def quantile(self, p):
        return pareto_quantile(p, self)


@dataclass(frozen=True)
class ThresholdSequence:
    y: float
    k1: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"y must be positive, got {self.y}")
        if not self.k1 > 0:
            raise ValueError(f"k1 must be positive, got {self.k1}")

    def __call__(self, n):
        return threshold_u(n, self)


@dataclass(frozen=True)
class TailProfile:
    """Tail and extremal indices of the columns of a series matrix.

    ``per_column`` lists ``(k_i, theta_i)`` in column order. ``k1`` is the
    smallest tail index and ``k`` the smallest index among the remaining
    (non-dominating) columns.
    """

    per_column: tuple[tuple[float, float], ...]
    k1: float = field(init=False)
    k: float = field(init=False)

    def __post_init__(self):
        cols = tuple((float(ki), float(ti)) for ki, ti in self.per_column)
        if not cols:
            raise ProfileError("profile needs at least one column")
        for ki, ti in cols:
            if not ki > 0:
                raise ProfileError(f"tail index must be positive, got {ki}")
            if not 0.0 <= ti <= 1.0:
                raise ProfileError(f"extremal index must lie in [0, 1], got {ti}")
        k1 = min(ki for ki, _ in cols)
        rest = [ki for ki, _ in cols if ki > k1]
        object.__setattr__(self, "per_column", cols)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k", min(rest) if rest else math.inf)

    @property
    def n_columns(self) -> int:
        return len(self.per_column)

    @property
    def tail_indices(self) -> tuple[float, ...]:
        return tuple(ki for ki, _ in self.per_column)

    @property
    def thetas(self) -> tuple[float, ...]:
        return tuple(ti for _, ti in self.per_column)

    @property
    def dominating(self) -> tuple[int, ...]:
        """Zero-based indices of the columns with the minimum tail index."""
        return tuple(i for i, (ki, _) in enumerate(self.per_column) if ki == self.k1)

    @property
    def d(self) -> int:
        return len(self.dominating)

    def require_dominance(self):
        if not self.k > self.k1:
            raise ProfileError(
                f"need k > k1 for the dominance results, got k1={self.k1}, k={self.k}"
            )


def pareto_quantile(p, law: ParetoLaw):
    """Inverse of the Pareto distribution function.

    Parameters
    ----------
    p : float or array_like
        Probabilities in ``[0, 1)``. ``p = 1`` is rejected rather than mapped
        to infinity.
    law : ParetoLaw

    Returns
    -------
    float or ndarray
        ``scale * (1 - p) ** (-1 / tail_index)``.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise ValueError("probabilities must lie in [0, 1)")
    out = law.scale * np.exp(-np.log1p(-arr) / law.tail_index)
    return float(out) if out.ndim == 0 else out


def threshold_u(n, ts: ThresholdSequence):
    """Level ``u_n = y * n ** (1 / k1)``; vectorised over ``n``."""
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 1):
        raise ValueError("n must be >= 1")
    out = ts.y * arr ** (1.0 / ts.k1)
    return float(out) if out.ndim == 0 else out


def chi_upper_bound(k1: float, k: float) -> float:
    """Largest admissible exponent ``(k - k1) / (k1 * (k + 1))`` for ``l_n = [n**chi]``."""
    if not k1 > 0:
        raise ProfileError(f"k1 must be positive, got {k1}")
    if not k > k1:
        raise ProfileError(f"need k > k1, got k1={k1}, k={k}")
    if math.isinf(k):
        return 1.0 / k1
    return (k - k1) / (k1 * (k + 1.0))


def row_cap(n: int, chi: float, chi0: float | None = None) -> int:
    """``max(1, floor(n ** chi))``.

    When ``chi0`` is given, ``chi`` must lie in the open interval ``(0, chi0)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not chi > 0 or (chi0 is not None and not chi < chi0):
        raise ProfileError(f"chi={chi} outside (0, {chi0 if chi0 is not None else 'inf'})")
    # guard against 1000 ** 0.3 style round-off just below an integer
    val = math.floor(n**chi + 1e-12)
    return max(1, val)


def row_caps(n_rows: int, chi: float, chi0: float | None = None) -> np.ndarray:
    """Vector of ``row_cap(n, chi)`` for ``n = 1..n_rows``."""
    if n_rows < 1:
        raise ValueError("n_rows must be >= 1")
    row_cap(1, chi, chi0)
    n = np.arange(1, n_rows + 1, dtype=float)
    return np.maximum(1, np.floor(n**chi + 1e-12)).astype(np.int64)


def theoretical_exceedance(z1: float, y: float, k1: float, n: float) -> float:
    """First-order exceedance probability ``(z1 / y) ** k1 / n`` of ``z1 * Y`` over ``u_n``."""
    if min(z1, y, k1, n) <= 0:
        raise ValueError("all arguments must be positive")
    return (z1 / y) ** k1 / n

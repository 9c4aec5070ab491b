"""Random arrays with prescribed tail and extremal indices.

Every column of a :class:`SeriesMatrix` is a stationary series in the row
index. Columns with extremal index below one come from the max-autoregressive
recursion ``X_m = max((1 - theta) X_{m-1}, theta Z_m)`` on unit Frechet
innovations, whose stationary law is again unit Frechet and whose extremal
index is ``theta``. A monotone transform then maps the marginals to Pareto.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .heavy_tail import ParetoLaw, ProfileError, TailProfile

SCENARIO_KINDS = ("independent", "identical", "cumulative", "alternating")

_CHUNK = 4096


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(seed.integers(0, 2**63))
    return np.random.SeedSequence(seed)


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class ColumnSpec:
    tail_index: float
    theta: float = 1.0
    dominating: bool = False

    def __post_init__(self):
        if not self.tail_index > 0:
            raise ProfileError(f"tail index must be positive, got {self.tail_index}")
        if not 0.0 < self.theta <= 1.0:
            raise ProfileError(f"extremal index must lie in (0, 1], got {self.theta}")

    @property
    def dependence_param(self) -> float:
        """Autoregressive coefficient ``1 - theta`` of the max recursion."""
        return 1.0 - self.theta


def profile_columns(profile: TailProfile) -> list[ColumnSpec]:
    return [ColumnSpec(ki, ti, ki == profile.k1) for ki, ti in profile.per_column]


@dataclass(frozen=True)
class RowLengthLaw:
    """Law of the number of active cells per row.

    ``N = floor(U ** (-1 / alpha))`` for uniform ``U`` in ``(0, 1]``, so that
    ``P{N > x} = (floor(x) + 1) ** -alpha``; the result is clamped to
    ``[min, cap]``. ``alpha = inf`` gives rows of length ``min``.
    """

    alpha: float
    cap: int | None = None
    min: int = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.min < 1:
            raise ValueError("min must be >= 1")
        if self.cap is not None and self.cap < self.min:
            raise ValueError(f"cap={self.cap} below min={self.min}")


@dataclass(frozen=True)
class DependenceScenario:
    """Dependence among the dominating columns.

    ``d`` is either a fixed count or a probability mass function
    ``{value: prob}``; in the latter case it is drawn once per matrix,
    independently of the array.
    """

    kind: str = "independent"
    d: int | Mapping[int, float] | None = None

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}; expected one of {SCENARIO_KINDS}")
        if isinstance(self.d, Mapping):
            pmf = {int(k): float(v) for k, v in self.d.items()}
            if not pmf or min(pmf) < 1:
                raise ValueError("random d must have support in {1, 2, ...}")
            if any(p < 0 for p in pmf.values()) or not math.isclose(sum(pmf.values()), 1.0, abs_tol=1e-9):
                raise ValueError("random d probabilities must be nonnegative and sum to one")
            object.__setattr__(self, "d", dict(sorted(pmf.items())))
        elif self.d is not None and int(self.d) < 1:
            raise ValueError("d must be >= 1")

    @property
    def is_random(self) -> bool:
        return isinstance(self.d, Mapping)

    @property
    def d_max(self) -> int | None:
        if self.d is None:
            return None
        return max(self.d) if self.is_random else int(self.d)

    def draw_d(self, rng: np.random.Generator) -> int | None:
        if not self.is_random:
            return None if self.d is None else int(self.d)
        values = np.array(list(self.d))
        probs = np.array(list(self.d.values()))
        return int(rng.choice(values, p=probs / probs.sum()))


@dataclass(frozen=True)
class DominationCheck:
    passed: bool
    margin: float


@dataclass
class SeriesMatrix:
    """Doubly indexed array with row lengths.

    ``values[n, i]`` is the cell in row ``n`` and column ``i`` (zero based);
    cells at ``i >= lengths[n]`` are structural zeros. ``q`` is the optional
    personalization column.
    """

    values: np.ndarray
    lengths: np.ndarray
    profile: TailProfile
    scenario: DependenceScenario
    d: int
    q: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.lengths = np.asarray(self.lengths, dtype=np.int64)
        if self.values.ndim != 2:
            raise ValueError("values must be two dimensional")
        if self.lengths.shape != (self.values.shape[0],):
            raise ValueError("need one row length per row")
        if self.q is not None:
            self.q = np.asarray(self.q, dtype=float)
            if self.q.shape != self.lengths.shape:
                raise ValueError("personalization column must have one value per row")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def active_mask(self) -> np.ndarray:
        return np.arange(self.n_cols)[None, :] < self.lengths[:, None]

    def column(self, i: int) -> np.ndarray:
        """Full (unmasked) stationary series of column ``i``."""
        return self.values[:, i]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.values).tobytes())
        h.update(np.ascontiguousarray(self.lengths).tobytes())
        if self.q is not None:
            h.update(np.ascontiguousarray(self.q).tobytes())
        return h.hexdigest()[:16]


def gen_iid_column(n: int, law: ParetoLaw, seed=None) -> np.ndarray:
    """``n`` i.i.d. Pareto draws by inversion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = as_generator(seed)
    u = 1.0 - rng.random(n)  # in (0, 1]
    return law.scale * u ** (-1.0 / law.tail_index)


def _armax_frechet(n: int, theta: float, rng: np.random.Generator, burn_in: int) -> np.ndarray:
    total = n + burn_in
    z = -1.0 / np.log(1.0 - rng.random(total))
    if theta == 1.0:
        return z[burn_in:]
    x0 = -1.0 / np.log(1.0 - rng.random())
    log_a = math.log1p(-theta)
    log_tz = math.log(theta) + np.log(z)
    out = np.empty(total)
    prev = math.log(x0)
    # log X_m = m log a + max_{j<=m} (log(theta Z_j) - j log a), restarted per chunk
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        j = np.arange(1, stop - start + 1, dtype=float)
        w = log_tz[start:stop] - j * log_a
        run = np.maximum(np.maximum.accumulate(w), prev)
        seg = j * log_a + run
        out[start:stop] = seg
        prev = seg[-1]
    return np.exp(out[burn_in:])


def gen_armax_column(
    n: int, k: float, theta: float, seed=None, scale: float = 1.0, burn_in: int = 1000
) -> np.ndarray:
    """Stationary Pareto(k) series with extremal index ``theta``.

    Parameters
    ----------
    n : int
        Length of the emitted series.
    k : float
        Tail index of the Pareto marginal.
    theta : float
        Extremal index in ``(0, 1]``; ``theta = 1`` gives an i.i.d. series.
    seed : int, SeedSequence or Generator, optional
    scale : float
        Pareto scale (left endpoint).
    burn_in : int
        Recursion steps discarded before emitting. The recursion starts
        from a stationary draw, so this only guards against misuse.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not k > 0:
        raise ValueError(f"tail index must be positive, got {k}")
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    rng = as_generator(seed)
    x = _armax_frechet(n, float(theta), rng, int(burn_in))
    surv = -np.expm1(-1.0 / x)
    return scale * surv ** (-1.0 / k)


def gen_column(spec: ColumnSpec, n: int, seed=None, scale: float = 1.0) -> np.ndarray:
    if spec.theta == 1.0:
        return gen_iid_column(n, ParetoLaw(spec.tail_index, scale), seed)
    return gen_armax_column(n, spec.tail_index, spec.theta, seed, scale=scale)


def gen_row_lengths(n_rows: int, law: RowLengthLaw, seed=None) -> np.ndarray:
    """Regularly varying integer row lengths, clamped to ``[law.min, law.cap]``."""
    if n_rows < 1:
        raise ValueError("n_rows must be >= 1")
    rng = as_generator(seed)
    hi = law.cap if law.cap is not None else 2**62
    if math.isinf(law.alpha):
        return np.full(n_rows, min(law.min, hi), dtype=np.int64)
    u = 1.0 - rng.random(n_rows)
    raw = np.floor(np.minimum(u ** (-1.0 / law.alpha), float(hi)))
    return np.clip(raw, law.min, hi).astype(np.int64)


def check_domination(k1: float, alpha: float, chi: float) -> DominationCheck:
    """Whether ``P{N > n**chi}`` is negligible against ``P{Y_1 > u_n}``.

    With constant slowly varying parts the two probabilities decay like
    ``n ** (-chi * alpha)`` and ``1 / n``; the check passes iff
    ``chi * alpha > 1`` strictly. ``k1`` is validated but does not enter
    since ``u_n`` is already normalised by it.
    """
    if not k1 > 0 or not alpha > 0 or not chi > 0:
        raise ValueError("k1, alpha and chi must be positive")
    margin = chi * alpha - 1.0
    return DominationCheck(passed=margin > 0, margin=margin)


def gen_personalization(n: int, kind: str = "uniform", beta: float | None = None, seed=None, scale: float = 1.0):
    """Personalization column: constant ``scale / n`` or i.i.d. Pareto(beta) with the given scale."""
    if kind == "uniform":
        return np.full(n, scale / n)
    if kind == "pareto":
        if beta is None:
            raise ValueError("pareto personalization needs beta")
        return gen_iid_column(n, ParetoLaw(beta, scale), seed)
    raise ValueError(f"unknown personalization kind {kind!r}")


def _effective_profile(profile: TailProfile, d: int) -> TailProfile:
    """Profile with exactly the first ``d`` columns at the minimum tail index."""
    cols = list(profile.per_column)
    if d > len(cols) - 1 and profile.k < math.inf:
        raise ProfileError(f"d={d} leaves no non-dominating column among {len(cols)}")
    k_rest = profile.k if math.isfinite(profile.k) else None
    out = []
    for i, (ki, ti) in enumerate(cols):
        if i < d:
            out.append((profile.k1, ti))
        elif ki == profile.k1:
            if k_rest is None:
                raise ProfileError("random d needs at least one non-dominating column to borrow k from")
            out.append((k_rest, ti))
        else:
            out.append((ki, ti))
    return TailProfile(tuple(out))


def gen_matrix(
    profile: TailProfile,
    scenario: DependenceScenario,
    n_rows: int,
    row_lengths: RowLengthLaw | np.ndarray | None = None,
    seed=None,
    coupling: Callable[[np.ndarray, np.random.Generator], np.ndarray] | None = None,
    personalization: dict | None = None,
) -> SeriesMatrix:
    """Generate a series matrix under a dependence scenario.

    Parameters
    ----------
    profile : TailProfile
        ``(k_i, theta_i)`` per column. Dominating columns must come first.
    scenario : DependenceScenario
        Relation among the dominating columns. With a random ``d`` the first
        ``d`` columns are made dominating after the draw and any further
        listed dominating columns get tail index ``profile.k``.
    n_rows : int
    row_lengths : RowLengthLaw or array of int, optional
        Random law (capped at the number of columns) or explicit lengths.
        ``None`` activates every cell.
    seed : int or SeedSequence, optional
    coupling : callable, optional
        ``coupling(values, rng) -> lengths`` replaces the independent draw
        of row lengths, letting lengths depend on the array.
    personalization : dict, optional
        Keyword arguments for :func:`gen_personalization`.
    """
    if n_rows < 1:
        raise ValueError("n_rows must be >= 1")
    ss = as_seed_sequence(seed)
    s_d, s_len, s_q, s_cols = ss.spawn(4)
    n_cols = profile.n_columns

    if scenario.is_random:
        if scenario.d_max > n_cols - 1:
            raise ProfileError(f"random d support exceeds n_cols - 1 = {n_cols - 1}")
        d = scenario.draw_d(np.random.default_rng(s_d))
        profile = _effective_profile(profile, d)
    else:
        d = profile.d if scenario.d is None else int(scenario.d)
        if d != profile.d:
            profile = _effective_profile(profile, d)
    if profile.dominating != tuple(range(d)):
        raise ProfileError("dominating columns must occupy the leading positions")
    if scenario.kind == "cumulative" and d < 2:
        raise ProfileError("cumulative scenario needs at least two dominating columns")

    specs = profile_columns(profile)
    col_seeds = s_cols.spawn(n_cols)
    values = np.empty((n_rows, n_cols))
    kind = scenario.kind
    for i, spec in enumerate(specs):
        if i < d and i > 0 and kind in ("identical", "cumulative"):
            continue
        values[:, i] = gen_column(spec, n_rows, col_seeds[i])
    if kind == "identical":
        values[:, 1:d] = values[:, [0]]
    elif kind == "cumulative":
        for i in range(1, d):
            values[:, i] = values[:, :i].sum(axis=1)
    elif kind == "alternating" and d > 1:
        # 1-based odd rows are zero-based even rows
        values[0::2, 1:d] = values[0::2, [0]]

    len_rng = np.random.default_rng(s_len)
    if coupling is not None:
        lengths = np.asarray(coupling(values, len_rng), dtype=np.int64)
    elif row_lengths is None:
        lengths = np.full(n_rows, n_cols, dtype=np.int64)
    elif isinstance(row_lengths, RowLengthLaw):
        cap = n_cols if row_lengths.cap is None else min(row_lengths.cap, n_cols)
        law = RowLengthLaw(row_lengths.alpha, cap, min(row_lengths.min, cap))
        lengths = gen_row_lengths(n_rows, law, len_rng)
    else:
        lengths = np.asarray(row_lengths, dtype=np.int64)
    if lengths.shape != (n_rows,):
        raise ValueError("row lengths must have one entry per row")
    if lengths.min() < 1 or lengths.max() > n_cols:
        raise ValueError(f"row lengths must lie in [1, {n_cols}]")
    values[np.arange(n_cols)[None, :] >= lengths[:, None]] = 0.0

    q = None
    if personalization is not None:
        q = gen_personalization(n_rows, seed=np.random.default_rng(s_q), **personalization)
    return SeriesMatrix(
        values,
        lengths,
        profile,
        scenario,
        d,
        q,
        meta={"seed": None if ss.entropy is None else int(ss.entropy), "spawn_key": list(ss.spawn_key)},
    )

"""Seeded Monte Carlo pipelines that check tail and extremal index claims.

A pipeline turns a :class:`ScenarioConfig` into a :class:`VerdictReport`:
one verdict per claim, each carrying its prediction, estimate, interval and
tolerance. Replicates use disjoint seed streams spawned from the config seed
and are combined in replicate order, so ``(config, seed)`` fixes every
reported number.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .aggregation import (
    column_maxima,
    condition_11b_terms,
    predicted_theta,
    random_d_theta,
    row_aggregate,
)
from .estimators import (
    EstimationError,
    blocks_theta,
    definition1_theta,
    hill_estimate,
    hill_plot,
    intervals_theta,
    stationarity_diagnostic,
)
from .generators import (
    ColumnSpec,
    DependenceScenario,
    RowLengthLaw,
    check_domination,
    gen_armax_column,
    gen_matrix,
)
from .heavy_tail import ProfileError, TailProfile, chi_upper_bound, row_cap, row_caps, threshold_u, ThresholdSequence
from .network import CommunitySpec, build_community_graph, full_solve_roots, root_aggregate

DEFAULT_TOLERANCES = {
    "tail_index_rel": 0.15,
    "tail_index_agreement": 0.1,
    "theta_abs": 0.1,
    "column_tail_rel": 0.10,
    "stationarity_power": 0.9,
    "y_spread_factor": 2.0,
}

PIPELINES = ("theorem", "network", "columns")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    name: str
    pipeline: str = "theorem"
    seed: int = 0
    replicates: int = 20
    n: int = 100_000
    dominating: list = field(default_factory=lambda: [[1.0, 0.5]])
    non_dominating: list = field(default_factory=lambda: [[3.0, 1.0]])
    n_cols: int | None = None
    scenario: str = "independent"
    d: int | dict | None = None
    weights: list | float = 1.0
    chi: float | None = None
    chi_fraction: float | None = 0.4
    alpha: float = 6.0
    row_mode: str = "caps"
    y_grid: list = field(default_factory=lambda: [0.8, 1.0, 1.5])
    quantile: float = 0.95
    hill_m: int | None = None
    definition1: dict | None = None
    columns: list | None = None
    network: dict | None = None
    tolerances: dict = field(default_factory=dict)
    out: str = "out"
    workers: int = 1

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**raw)
        if isinstance(cfg.d, dict):
            cfg.d = {int(k): float(v) for k, v in cfg.d.items()}
        return cfg

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        if isinstance(self.d, dict):
            out["d"] = {str(k): v for k, v in sorted(self.d.items())}
        return out

    def canonical(self) -> dict:
        """Config without the fields that cannot change any result."""
        return {k: v for k, v in self.to_dict().items() if k not in ("out", "workers")}

    def fingerprint(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, default=float).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    @property
    def tol(self) -> dict:
        return {**DEFAULT_TOLERANCES, **self.tolerances}

    # -- derived quantities -------------------------------------------------

    @property
    def d_max(self) -> int:
        if isinstance(self.d, dict):
            return max(self.d)
        return len(self.dominating) if self.d is None else int(self.d)

    @property
    def k1(self) -> float:
        return float(self.dominating[0][0])

    @property
    def k(self) -> float:
        return min(float(c[0]) for c in self.non_dominating)

    def chi_value(self) -> float:
        chi0 = chi_upper_bound(self.k1, self.k)
        if self.chi is not None:
            return float(self.chi)
        if self.chi_fraction is None:
            raise ConfigError("need chi or chi_fraction")
        return float(self.chi_fraction) * chi0

    def column_count(self) -> int:
        if self.n_cols is not None:
            return int(self.n_cols)
        return max(self.d_max + 1, row_cap(self.n, self.chi_value()))

    def profile(self) -> TailProfile:
        n_cols = self.column_count()
        doms = [tuple(map(float, c)) for c in self.dominating]
        if self.scenario in ("identical", "cumulative") and len(doms) < self.d_max:
            doms = doms + [doms[0]] * (self.d_max - len(doms))
        if len(doms) >= n_cols:
            raise ConfigError(f"{len(doms)} dominating columns leave no room among n_cols={n_cols}")
        rest = [tuple(map(float, c)) for c in self.non_dominating]
        cols = doms + [rest[i % len(rest)] for i in range(n_cols - len(doms))]
        return TailProfile(tuple(cols))

    def weight_vector(self) -> np.ndarray:
        n_cols = self.column_count()
        if np.isscalar(self.weights):
            return np.full(n_cols, float(self.weights))
        w = [float(x) for x in self.weights]
        return np.array(w + [1.0] * (n_cols - len(w)))[:n_cols]

    def dependence(self, d=None) -> DependenceScenario:
        return DependenceScenario(self.scenario, self.d if d is None else d)

    def row_lengths(self, n_rows: int):
        n_cols = self.column_count()
        if self.row_mode == "constant":
            return None
        if self.row_mode == "caps":
            return np.minimum(row_caps(n_rows, self.chi_value()), n_cols)
        if self.row_mode == "random":
            return RowLengthLaw(self.alpha, n_cols)
        raise ConfigError(f"unknown row_mode {self.row_mode!r}")

    # -- validation ---------------------------------------------------------

    def validate(self):
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"pipeline must be one of {PIPELINES}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.pipeline == "columns":
            if not self.columns:
                raise ConfigError("columns pipeline needs a 'columns' list")
            for k, th in self.columns:
                ColumnSpec(float(k), float(th))
            return
        if self.pipeline == "network":
            if not self.network:
                raise ConfigError("network pipeline needs a 'network' block")
            k1, k = self._network_indices()
        else:
            k1, k = self.k1, self.k
            if any(float(c[0]) != k1 for c in self.dominating):
                raise ConfigError("all dominating columns must share the minimum tail index")
            if self.scenario == "cumulative" and self.d_max < 2:
                raise ConfigError("cumulative scenario needs d >= 2")
            try:
                self.dependence()
                self.profile()
            except (ProfileError, ValueError) as exc:
                raise ConfigError(str(exc)) from exc
        if not k > k1:
            raise ConfigError(f"need k > k1, got k1={k1}, k={k}")
        chi0 = chi_upper_bound(k1, k)
        chi = self.chi_value() if self.pipeline != "network" else self._network_chi(chi0)
        if not 0 < chi < chi0:
            raise ConfigError(f"chi={chi:.6g} outside (0, chi0={chi0:.6g})")
        dom = check_domination(k1, self._alpha(), chi)
        if not dom.passed:
            raise ConfigError(f"row-length tail too heavy: chi*alpha - 1 = {dom.margin:.4g} <= 0")

    def _alpha(self) -> float:
        if self.pipeline == "network":
            return float(self.network.get("attachment", {}).get("alpha", self.alpha))
        return float(self.alpha)

    def _network_indices(self) -> tuple[float, float]:
        ks = sorted({float(c["k"]) for c in self.network["communities"]})
        return ks[0], (ks[1] if len(ks) > 1 else math.inf)

    def _network_chi(self, chi0: float) -> float:
        if self.chi is not None:
            return float(self.chi)
        return float(self.chi_fraction if self.chi_fraction is not None else 0.4) * chi0


@dataclass
class Verdict:
    claim: str
    predicted: float | None
    estimate: float | None
    ci: tuple[float, float] | None
    tolerance: float | None
    passed: bool
    detail: str = ""


@dataclass
class VerdictReport:
    name: str
    pipeline: str
    fingerprint: str
    seed: int
    config: dict
    verdicts: list[Verdict] = field(default_factory=list)
    estimates: dict = field(default_factory=dict)
    hill_plots: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self, include_runtime: bool = False) -> dict:
        out = {
            "name": self.name,
            "pipeline": self.pipeline,
            "fingerprint": self.fingerprint,
            "seed": self.seed,
            "config": self.config,
            "passed": self.passed,
            "verdicts": [asdict(v) for v in self.verdicts],
            "estimates": self.estimates,
        }
        if include_runtime:
            out["runtime_seconds"] = self.runtime
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "VerdictReport":
        verdicts = [Verdict(**{**v, "ci": None if v["ci"] is None else tuple(v["ci"])}) for v in raw.get("verdicts", [])]
        return cls(
            raw["name"], raw["pipeline"], raw["fingerprint"], raw["seed"], raw["config"],
            verdicts, raw.get("estimates", {}), runtime=raw.get("runtime_seconds", 0.0),
        )


# -- helpers --------------------------------------------------------------


def _summary(values) -> dict:
    v = np.asarray([x for x in values if x is not None and np.isfinite(x)], dtype=float)
    if v.size == 0:
        return {"mean": None, "sd": None, "ci": None, "n": 0}
    mean = math.fsum(v) / v.size
    sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    half = 1.96 * sd / math.sqrt(v.size)
    return {"mean": mean, "sd": sd, "ci": [mean - half, mean + half], "n": int(v.size)}


def _within(claim, predicted, summ, tol, detail="") -> Verdict:
    est = summ["mean"]
    ok = est is not None and abs(est - predicted) <= tol
    ci = None if summ["ci"] is None else tuple(summ["ci"])
    return Verdict(claim, float(predicted), est, ci, float(tol), bool(ok), detail)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _safe(fn, *args, **kwargs):
    try:
        return float(fn(*args, **kwargs))
    except EstimationError:
        return None


def _series_estimates(x: np.ndarray, cfg: ScenarioConfig) -> dict:
    n = x.size
    b = math.ceil(math.sqrt(n))
    u = float(np.quantile(x, cfg.quantile))
    u_blk = float(np.quantile(x, max(cfg.quantile, 1.0 - 1.0 / b)))
    st = stationarity_diagnostic(x) if n >= 100 else None
    return {
        "hill": _safe(hill_estimate, x, cfg.hill_m),
        "theta_intervals": _safe(intervals_theta, x, u),
        "theta_blocks": _safe(blocks_theta, x, u_blk, b, method="log"),
        "ks_reject": None if st is None else float(st.reject),
    }


# -- theorem pipeline -------------------------------------------------------


def _theorem_replicate(args):
    cfg, seq, index = args
    mx = gen_matrix(cfg.profile(), cfg.dependence(), cfg.n, cfg.row_lengths(cfg.n), seed=seq)
    ag = row_aggregate(mx, cfg.weight_vector())
    out = {
        "d": mx.d,
        "sum": _series_estimates(ag.sums, cfg),
        "max": _series_estimates(ag.maxima, cfg),
        "col_max": column_maxima(mx).tolist() if mx.d >= 2 else None,
    }
    if index == 0:
        out["hill_plot"] = {"sum": hill_plot(ag.sums).tolist(), "max": hill_plot(ag.maxima).tolist()}
    return out


def _definition1_block(cfg: ScenarioConfig, scenario: DependenceScenario, seq: np.random.SeedSequence) -> dict:
    r = int(cfg.definition1.get("replicates", 1000))
    n = int(cfg.definition1.get("n", 1000))
    seqs = seq.spawn(r)
    prof = cfg.profile()
    w = cfg.weight_vector()
    sums = np.empty((r, n))
    maxima = np.empty((r, n))
    for i, s in enumerate(seqs):
        mx = gen_matrix(prof, scenario, n, cfg.row_lengths(n), seed=s)
        ag = row_aggregate(mx, w)
        sums[i], maxima[i] = ag.sums, ag.maxima
    out = {"replicates": r, "n": n, "y": list(map(float, cfg.y_grid))}
    for label, arr in (("sum", sums), ("max", maxima)):
        vals = []
        for y in cfg.y_grid:
            vals.append(_safe(definition1_theta, arr, cfg.k1, y, clamp=False))
        out[label] = vals
    return out


def _spread(vals) -> float | None:
    v = [x for x in vals if x is not None]
    return (max(v) - min(v)) if len(v) == len(vals) and v else None


def run_theorem_pipeline(cfg: ScenarioConfig) -> VerdictReport:
    """Generate, aggregate and estimate; compare against the predicted indices."""
    cfg.validate()
    t0 = time.perf_counter()
    root = np.random.SeedSequence(cfg.seed)
    s_rep, s_def, s_base = root.spawn(3)
    seqs = s_rep.spawn(cfg.replicates)
    results = _map(_theorem_replicate, [(cfg, s, i) for i, s in enumerate(seqs)], cfg.workers)
    tol = cfg.tol
    k1 = cfg.k1
    thetas = [float(c[1]) for c in cfg.dominating]
    w = cfg.weight_vector()
    report = VerdictReport(cfg.name, cfg.pipeline, cfg.fingerprint(), cfg.seed, cfg.canonical())

    est = {}
    for label in ("sum", "max"):
        for key in ("hill", "theta_intervals", "theta_blocks", "ks_reject"):
            est[f"{label}.{key}"] = _summary([r[label][key] for r in results])
    est["chi"] = cfg.chi_value()
    est["chi0"] = chi_upper_bound(cfg.k1, cfg.k)
    est["n_cols"] = cfg.column_count()
    est["domination_margin"] = check_domination(cfg.k1, cfg.alpha, cfg.chi_value()).margin
    est["d_drawn"] = [r["d"] for r in results]

    # tail index: sums and maxima share k1
    kt = tol["tail_index_rel"] * k1
    report.verdicts.append(_within("tail_index_sum", k1, est["sum.hill"], kt))
    report.verdicts.append(_within("tail_index_max", k1, est["max.hill"], kt))
    diffs = [r["sum"]["hill"] - r["max"]["hill"] for r in results if r["sum"]["hill"] and r["max"]["hill"]]
    dsum = _summary(diffs)
    report.verdicts.append(_within("tail_index_agreement", 0.0, dsum, tol["tail_index_agreement"], "mean of k_sum - k_max"))

    kind = cfg.scenario
    random_d = isinstance(cfg.d, dict)
    predicted = None
    if not random_d and kind != "alternating":
        d = cfg.d_max
        if d == 1 or kind in ("identical", "cumulative"):
            predicted = thetas[0]
            why = {"identical": "aliased columns keep theta_1", "cumulative": "nested maxima give theta_d"}.get(kind, "unique dominating column")
        else:
            predicted = predicted_theta(thetas[:d], w[:d], k1)
            why = "weighted average of theta_j with weights z_j**k1"
        est["theta_predicted"] = predicted
        for label in ("sum", "max"):
            report.verdicts.append(
                _within(f"theta_{label}", predicted, est[f"{label}.theta_intervals"], tol["theta_abs"], f"intervals estimator; {why}")
            )

    if kind == "alternating" and cfg.d_max >= 2:
        for label in ("sum", "max"):
            summ = est[f"{label}.ks_reject"]
            power = summ["mean"]
            report.verdicts.append(
                Verdict(f"nonstationary_{label}", None, power, None, tol["stationarity_power"],
                        bool(power is not None and power >= tol["stationarity_power"]),
                        "fraction of replicates where odd/even KS test rejects at 0.01")
            )

    col_max = [r["col_max"] for r in results if r["col_max"] is not None]
    if col_max and cfg.d_max >= 2 and not random_d:
        cm = np.array(col_max)
        d = cm.shape[1]
        rows = []
        for y in cfg.y_grid:
            u = threshold_u(cfg.n, ThresholdSequence(y, k1))
            left, right = condition_11b_terms(cm, w[:d], u)
            rows.append({"y": float(y), "left": float(left.mean()), "right": float(right.mean()), "left_max": float(left.max())})
        est["condition_11b"] = rows
        nested = kind == "cumulative" and np.all(np.diff(w[:d]) >= 0)
        equal = kind == "identical" and np.all(w[:d] == w[0])
        if nested or equal:
            worst = max(r["left_max"] for r in rows)
            report.verdicts.append(
                Verdict("condition_11b_left_zero", 0.0, worst, None, 0.0, worst == 0.0,
                        "largest per-replicate left-hand indicator over the y grid")
            )

    if random_d or cfg.definition1:
        if not cfg.definition1:
            cfg = replace(cfg, definition1={"replicates": 1000, "n": 1000})
        d1 = _definition1_block(cfg, cfg.dependence(), s_def)
        est["definition1"] = d1
        if random_d:
            pmf = cfg.d
            doms = thetas + [thetas[0]] * (max(pmf) - len(thetas))
            est["definition1"]["limit"] = [random_d_theta(doms, w, k1, pmf, y)[2] for y in cfg.y_grid]
            base = _definition1_block(cfg, cfg.dependence(d=max(pmf)), s_base)
            est["definition1_baseline"] = base
            for label in ("sum", "max"):
                sp, sb = _spread(d1[label]), _spread(base[label])
                ok = sp is not None and sb is not None and sp > tol["y_spread_factor"] * sb
                report.verdicts.append(
                    Verdict(f"theta_y_dependence_{label}", None if sb is None else tol["y_spread_factor"] * sb, sp, None,
                            tol["y_spread_factor"], bool(ok),
                            f"spread of definition-based theta over y vs fixed d={max(pmf)} baseline spread {sb}")
                )
    report.hill_plots = results[0].get("hill_plot", {})
    report.estimates = est
    report.runtime = time.perf_counter() - t0
    return report


# -- columns pipeline -------------------------------------------------------


def _column_replicate(args):
    k, th, n, seq, m = args
    x = gen_armax_column(n, k, th, seed=seq)
    return hill_estimate(x, m), intervals_theta(x)


def run_columns_pipeline(cfg: ScenarioConfig) -> VerdictReport:
    """Tail and extremal index fidelity of single generated columns."""
    cfg.validate()
    t0 = time.perf_counter()
    report = VerdictReport(cfg.name, cfg.pipeline, cfg.fingerprint(), cfg.seed, cfg.canonical())
    streams = np.random.SeedSequence(cfg.seed).spawn(len(cfg.columns))
    tol = cfg.tol
    for (k, th), ss in zip(cfg.columns, streams):
        k, th = float(k), float(th)
        res = _map(_column_replicate, [(k, th, cfg.n, s, cfg.hill_m) for s in ss.spawn(cfg.replicates)], cfg.workers)
        hs, ts = _summary([r[0] for r in res]), _summary([r[1] for r in res])
        tag = f"k={k:g},theta={th:g}"
        report.estimates[tag] = {"hill": hs, "theta_intervals": ts}
        report.verdicts.append(_within(f"column_tail[{tag}]", k, hs, tol["column_tail_rel"] * k))
        report.verdicts.append(_within(f"column_theta[{tag}]", th, ts, tol["theta_abs"]))
    report.runtime = time.perf_counter() - t0
    return report


# -- network pipeline -------------------------------------------------------


def network_parts(cfg: ScenarioConfig):
    net = cfg.network
    n_roots = int(net.get("n_roots", cfg.n))
    comms = []
    for c in net["communities"]:
        shared = c.get("shared_from")
        comms.append(CommunitySpec(int(c.get("size", n_roots)), ColumnSpec(float(c["k"]), float(c.get("theta", 1.0))),
                                   None if shared is None else tuple(shared)))
    att = net.get("attachment", {})
    law = RowLengthLaw(float(att.get("alpha", cfg.alpha)), att.get("cap"), int(att.get("min", 1)))
    return n_roots, comms, law


def build_network(cfg: ScenarioConfig, seed):
    n_roots, comms, law = network_parts(cfg)
    net = cfg.network
    return build_community_graph(
        n_roots, comms, law, seed=seed,
        dominating_mode=net.get("dominating_mode", "all"),
        overlap_mode=net.get("overlap_mode", "alias"),
        personalization=net.get("personalization"),
    )


def _network_replicate(args):
    cfg, seq, index = args
    c = float(cfg.network.get("c", 0.85))
    g = build_network(cfg, seq)
    ag = root_aggregate(g, c)
    out = {"sum": _series_estimates(ag.sums, cfg), "max": _series_estimates(ag.maxima, cfg)}
    if index == 0:
        out["hill_plot"] = {"sum": hill_plot(ag.sums).tolist(), "max": hill_plot(ag.maxima).tolist()}
        if cfg.network.get("full_solve", False):
            fs = full_solve_roots(g, c)
            out["full_solve"] = {
                "sum_max_rel_diff": float(np.max(np.abs(fs.sums - ag.sums) / np.abs(ag.sums))),
                "max_max_abs_diff": float(np.max(np.abs(fs.maxima - ag.maxima))),
            }
    return out


def run_network_pipeline(cfg: ScenarioConfig) -> VerdictReport:
    """Root score sequences of community graphs against the inherited indices."""
    cfg.validate()
    t0 = time.perf_counter()
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.replicates)
    results = _map(_network_replicate, [(cfg, s, i) for i, s in enumerate(seqs)], cfg.workers)
    report = VerdictReport(cfg.name, cfg.pipeline, cfg.fingerprint(), cfg.seed, cfg.canonical())
    tol = cfg.tol
    net = cfg.network
    c = float(net.get("c", 0.85))
    k1, _ = cfg._network_indices()
    dom = [cm for cm in net["communities"] if float(cm["k"]) == k1]

    est = {}
    for label in ("sum", "max"):
        for key in ("hill", "theta_intervals", "theta_blocks"):
            est[f"{label}.{key}"] = _summary([r[label][key] for r in results])
    if "full_solve" in results[0]:
        est["full_solve"] = results[0]["full_solve"]

    kt = tol["tail_index_rel"] * k1
    report.verdicts.append(_within("tail_index_sum", k1, est["sum.hill"], kt, "one-step PageRank sums"))
    report.verdicts.append(_within("tail_index_max", k1, est["max.hill"], kt, "one-step Max-Linear maxima"))
    cs, cm_ = est["sum.hill"]["ci"], est["max.hill"]["ci"]
    overlap = cs is not None and cm_ is not None and cs[0] <= cm_[1] and cm_[0] <= cs[1]
    report.verdicts.append(Verdict("tail_index_ci_overlap", None, None, None, None, bool(overlap), f"sum CI {cs}, max CI {cm_}"))

    mode = net.get("dominating_mode", "all")
    shared_dom = any(cm.get("shared_from") is not None for cm in dom)
    if len(dom) == 1:
        predicted, why = float(dom[0].get("theta", 1.0)), "unique dominating community"
    elif mode == "all" and not shared_dom:
        th = [float(cm.get("theta", 1.0)) for cm in dom]
        predicted, why = predicted_theta(th, [c] * len(th), k1), "independent dominating communities, weights c"
    else:
        predicted = None
    if predicted is not None:
        est["theta_predicted"] = predicted
        for label in ("sum", "max"):
            report.verdicts.append(
                _within(f"theta_{label}", predicted, est[f"{label}.theta_intervals"], tol["theta_abs"], f"intervals estimator; {why}")
            )
    report.hill_plots = results[0].get("hill_plot", {})
    report.estimates = est
    report.runtime = time.perf_counter() - t0
    return report


def run_pipeline(cfg: ScenarioConfig) -> VerdictReport:
    if cfg.pipeline == "network":
        return run_network_pipeline(cfg)
    if cfg.pipeline == "columns":
        return run_columns_pipeline(cfg)
    return run_theorem_pipeline(cfg)


# -- report emission --------------------------------------------------------


def report_stem(report: VerdictReport) -> str:
    return f"{report.name}-{report.fingerprint}"


def emit_report(report: VerdictReport, out_dir, formats=("json", "csv")) -> list[Path]:
    """Write verdict JSON, estimate/verdict CSV and Hill-plot CSVs.

    File names derive from the config fingerprint. Wall-clock runtime goes
    to a separate ``.runtime.json`` so the verdict file is reproducible
    byte for byte.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    stem = report_stem(report)
    written = []
    formats = set(formats)
    unknown = formats - {"json", "csv"}
    if unknown:
        raise ValueError(f"unknown formats {sorted(unknown)}")
    if "json" in formats:
        p = out / f"{stem}.verdicts.json"
        p.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2, default=_jsonable) + "\n")
        written.append(p)
        t = out / f"{stem}.runtime.json"
        t.write_text(json.dumps({"runtime_seconds": report.runtime}) + "\n")
        written.append(t)
    if "csv" in formats:
        p = out / f"{stem}.verdicts.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["claim", "predicted", "estimate", "ci_low", "ci_high", "tolerance", "passed"])
            for v in report.verdicts:
                lo, hi = v.ci if v.ci else ("", "")
                w.writerow([v.claim, _cell(v.predicted), _cell(v.estimate), _cell(lo), _cell(hi), _cell(v.tolerance), int(v.passed)])
        written.append(p)
        p = out / f"{stem}.estimates.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["quantity", "mean", "sd", "ci_low", "ci_high", "n"])
            for key in sorted(report.estimates):
                val = report.estimates[key]
                if isinstance(val, dict) and "mean" in val:
                    lo, hi = val["ci"] if val["ci"] else ("", "")
                    w.writerow([key, _cell(val["mean"]), _cell(val["sd"]), _cell(lo), _cell(hi), val["n"]])
        written.append(p)
        for label, rows in sorted(report.hill_plots.items()):
            p = out / f"{stem}.hill_{label}.csv"
            with open(p, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["m", "k_hat"])
                for m, kh in rows:
                    w.writerow([int(m), repr(float(kh))])
            written.append(p)
    return written


def _cell(x):
    if x is None or x == "":
        return ""
    return repr(float(x))


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialise {type(x)}")

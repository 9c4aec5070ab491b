"""Command line entry point: ``tailnet <verb> [options]``.

Verbs read and write files so each stage can be re-run on its own::

    tailnet generate  --config cfg.yaml --out run/          # series matrices
    tailnet aggregate --config cfg.yaml --input run/*.smat  # sum/max CSVs
    tailnet estimate  --input run/*.agg.csv                 # estimation JSON + Hill CSV
    tailnet verify    --config cfg.yaml                     # theorem/columns pipeline
    tailnet network   --config net.yaml                     # network pipeline
    tailnet report    --input run/*.verdicts.json           # summary, exit status

``verify``, ``network`` and ``report`` exit with status 0 iff every verdict
passes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .aggregation import AggregateSeries, row_aggregate
from .estimators import estimate_series, hill_plot
from .experiments import (
    ConfigError,
    ScenarioConfig,
    VerdictReport,
    build_network,
    emit_report,
    run_pipeline,
)
from .formats import read_matrix, write_matrix_binary, write_matrix_csv
from .generators import gen_matrix
from .network import pagerank_solve, PageRankConfig

log = logging.getLogger("tailnet")


def _load(args) -> ScenarioConfig:
    cfg = ScenarioConfig.load(args.config)
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.replicates is not None:
        over["replicates"] = args.replicates
    if args.out is not None:
        over["out"] = args.out
    if getattr(args, "workers", None):
        over["workers"] = args.workers
    return replace(cfg, **over)


def _formats(args) -> tuple[str, ...]:
    return tuple(args.format) if args.format else ("json", "csv")


def cmd_generate(args) -> int:
    cfg = _load(args)
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.replicates)
    fmts = _formats(args)
    for i, s in enumerate(seqs):
        mx = gen_matrix(cfg.profile(), cfg.dependence(), cfg.n, cfg.row_lengths(cfg.n), seed=s)
        stem = out / f"{cfg.name}-{cfg.fingerprint()}.r{i:03d}"
        if "json" in fmts or "csv" not in fmts:
            write_matrix_binary(mx, f"{stem}.smat")
        if "csv" in fmts:
            write_matrix_csv(mx, f"{stem}.matrix.csv")
        print(f"{stem} rows={mx.n_rows} cols={mx.n_cols} d={mx.d}")
    return 0


def cmd_aggregate(args) -> int:
    cfg = _load(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in args.input:
        mx = read_matrix(path)
        w = cfg.weight_vector()
        if w.size < mx.n_cols:
            w = np.concatenate([w, np.ones(mx.n_cols - w.size)])
        ag = row_aggregate(mx, w[: mx.n_cols], include_q=args.include_q)
        name = Path(path).name.split(".smat")[0].split(".matrix.csv")[0]
        target = out / f"{name}.agg.csv"
        ag.to_csv(target, {"scenario": mx.scenario.kind, "seed": cfg.seed})
        print(target)
    return 0


def cmd_estimate(args) -> int:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for path in args.input:
        ag = AggregateSeries.from_csv(path)
        name = Path(path).name.removesuffix(".agg.csv")
        for label, series in (("sum", ag.sums), ("max", ag.maxima)):
            rep = estimate_series(series, seed=args.seed if args.seed is not None else 0)
            (out / f"{name}.{label}.estimate.json").write_text(rep.to_json(indent=2) + "\n")
            with open(out / f"{name}.{label}.hill.csv", "w") as fh:
                fh.write("m,k_hat\n")
                for m, k in hill_plot(series):
                    fh.write(f"{int(m)},{k!r}\n")
            print(f"{name} {label}: k_hat={rep.k_hat.value:.4f} theta_intervals={rep.theta['intervals'].value:.4f}")
    return 0


def _run_and_emit(cfg: ScenarioConfig, args) -> int:
    report = run_pipeline(cfg)
    for p in emit_report(report, cfg.out, _formats(args)):
        log.info("wrote %s", p)
    _print_report(report)
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    cfg = _load(args)
    if cfg.pipeline == "network":
        raise ConfigError("use the 'network' verb for network configs")
    return _run_and_emit(cfg, args)


def cmd_network(args) -> int:
    cfg = _load(args)
    if cfg.pipeline != "network":
        raise ConfigError("config is not a network pipeline")
    if args.save_graph:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        g = build_network(cfg, np.random.SeedSequence(cfg.seed).spawn(1)[0])
        stem = out / f"{cfg.name}-{cfg.fingerprint()}"
        g.write_edgelist(f"{stem}.edges.txt")
        g.write_labels(f"{stem}.communities.txt")
        pr = pagerank_solve(g, PageRankConfig(c=float(cfg.network.get("c", 0.85))))
        pr.to_csv(f"{stem}.pagerank.csv", g.labels)
    return _run_and_emit(cfg, args)


def _print_report(report: VerdictReport):
    print(f"{report.name} [{report.pipeline}] fingerprint={report.fingerprint}")
    for v in report.verdicts:
        est = "n/a" if v.estimate is None else f"{v.estimate:.4f}"
        pred = "" if v.predicted is None else f" predicted={v.predicted:.4f}"
        print(f"  {'PASS' if v.passed else 'FAIL'} {v.claim}: estimate={est}{pred} tol={v.tolerance}")


def cmd_report(args) -> int:
    ok = True
    for path in args.input:
        report = VerdictReport.from_dict(json.loads(Path(path).read_text()))
        _print_report(report)
        if args.out:
            emit_report(report, args.out, _formats(args))
        ok &= report.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML scenario config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--replicates", type=int, help="override the replicate count")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", action="append", choices=["json", "csv"], help="output format (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tailnet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    g = sub.add_parser("generate", parents=[common], help="generate series matrices")
    g.set_defaults(func=cmd_generate)
    a = sub.add_parser("aggregate", parents=[common], help="row sums and maxima of matrix files")
    a.add_argument("--input", nargs="+", required=True)
    a.add_argument("--include-q", action="store_true")
    a.set_defaults(func=cmd_aggregate)
    e = sub.add_parser("estimate", parents=[common], help="estimate indices of aggregate CSVs")
    e.add_argument("--input", nargs="+", required=True)
    e.set_defaults(func=cmd_estimate)
    v = sub.add_parser("verify", parents=[common], help="run a theorem or columns pipeline")
    v.add_argument("--workers", type=int)
    v.set_defaults(func=cmd_verify)
    n = sub.add_parser("network", parents=[common], help="run a network pipeline")
    n.add_argument("--workers", type=int)
    n.add_argument("--save-graph", action="store_true", help="also write replicate 0's graph and PageRank scores")
    n.set_defaults(func=cmd_network)
    r = sub.add_parser("report", parents=[common], help="summarise verdict files")
    r.add_argument("--input", nargs="+", required=True)
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.verb in ("generate", "aggregate", "verify", "network") and not args.config:
        print(f"tailnet {args.verb}: --config is required", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"tailnet {args.verb}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

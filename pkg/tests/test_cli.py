import json
import subprocess
import sys

import pytest
import yaml

from tailnet.cli import main

SMALL = {
    "name": "cli-small",
    "seed": 3,
    "replicates": 2,
    "n": 4000,
    "dominating": [[1.0, 0.5]],
    "d": 2,
    "non_dominating": [[3.0, 1.0]],
    "scenario": "identical",
    "weights": 1.0,
}

NET = {
    "name": "cli-net",
    "pipeline": "network",
    "seed": 3,
    "replicates": 2,
    "n": 2000,
    "network": {
        "n_roots": 2000,
        "c": 0.85,
        "communities": [{"k": 1.0, "theta": 0.5}, {"k": 3.0, "theta": 1.0}],
        "attachment": {"alpha": 6.0},
    },
}


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(yaml.safe_dump(SMALL))
    return p


def test_stage_by_stage(tmp_path, small_cfg, capsys):
    out = tmp_path / "run"
    assert main(["generate", "--config", str(small_cfg), "--out", str(out)]) == 0
    smats = sorted(out.glob("*.smat"))
    assert len(smats) == 2 and len(list(out.glob("*.matrix.csv"))) == 2
    assert main(["aggregate", "--config", str(small_cfg), "--out", str(out), "--input", *map(str, smats)]) == 0
    aggs = sorted(out.glob("*.agg.csv"))
    assert len(aggs) == 2
    assert main(["estimate", "--out", str(out), "--input", *map(str, aggs)]) == 0
    est = json.loads(next(out.glob("*.sum.estimate.json")).read_text())
    assert {"k_hat", "theta", "diagnostics"} <= set(est)
    assert next(out.glob("*.max.hill.csv")).read_text().startswith("m,k_hat\n")


def test_verify_and_report(tmp_path, small_cfg, capsys):
    out = tmp_path / "v"
    code = main(["verify", "--config", str(small_cfg), "--out", str(out)])
    verdicts = next(out.glob("*.verdicts.json"))
    data = json.loads(verdicts.read_text())
    assert code == (0 if data["passed"] else 1)
    assert main(["report", "--input", str(verdicts)]) == code
    assert "fingerprint=" in capsys.readouterr().out


def test_seed_override_changes_fingerprint(tmp_path, small_cfg):
    main(["verify", "--config", str(small_cfg), "--out", str(tmp_path / "a"), "--format", "json"])
    main(["verify", "--config", str(small_cfg), "--out", str(tmp_path / "b"), "--format", "json", "--seed", "4"])
    a = next((tmp_path / "a").glob("*.verdicts.json")).name
    b = next((tmp_path / "b").glob("*.verdicts.json")).name
    assert a != b
    assert not list((tmp_path / "a").glob("*.csv"))


def test_network_verb_saves_graph(tmp_path):
    cfg = tmp_path / "net.yaml"
    cfg.write_text(yaml.safe_dump(NET))
    out = tmp_path / "n"
    code = main(["network", "--config", str(cfg), "--out", str(out), "--save-graph"])
    assert code in (0, 1)
    assert next(out.glob("*.edges.txt")).read_text().startswith("# n_vertices")
    assert next(out.glob("*.pagerank.csv")).read_text().startswith("vertex,score,community")
    assert list(out.glob("*.communities.txt"))


def test_usage_errors(tmp_path, small_cfg, capsys):
    assert main(["verify"]) == 2
    assert main(["network", "--config", str(small_cfg), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({**SMALL, "alpha": 1.0, "chi": 0.4}))
    assert main(["verify", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "row-length" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tailnet", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for verb in ("generate", "aggregate", "estimate", "verify", "network", "report"):
        assert verb in res.stdout

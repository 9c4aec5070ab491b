import json
from dataclasses import replace

import pytest

from tailnet.experiments import (
    ConfigError,
    ScenarioConfig,
    Verdict,
    VerdictReport,
    emit_report,
    run_pipeline,
)


def _small(**over):
    base = dict(
        name="small",
        seed=7,
        replicates=3,
        n=5000,
        dominating=[[1.0, 0.3], [1.0, 0.7]],
        non_dominating=[[3.0, 1.0]],
        weights=[1.0, 1.0],
    )
    base.update(over)
    return ScenarioConfig.from_dict(base)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"name": "x", "colour": "red"})


def test_chi_beyond_bound_rejected():
    with pytest.raises(ConfigError, match="chi"):
        _small(chi=0.6).validate()


def test_domination_failure_rejected():
    with pytest.raises(ConfigError, match="row-length"):
        _small(alpha=2.0, chi=0.4).validate()


def test_mixed_dominating_indices_rejected():
    with pytest.raises(ConfigError):
        _small(dominating=[[1.0, 0.5], [1.5, 0.5]]).validate()


def test_all_shipped_configs_validate(config_dir):
    for path in sorted(config_dir.glob("*.yaml")):
        ScenarioConfig.load(path).validate()


def test_fingerprint_ignores_output_fields():
    cfg = _small()
    assert replace(cfg, out="elsewhere", workers=4).fingerprint() == cfg.fingerprint()
    assert replace(cfg, seed=8).fingerprint() != cfg.fingerprint()


def test_rerun_is_byte_identical(tmp_path):
    cfg = _small()
    a = emit_report(run_pipeline(cfg), tmp_path / "a", ("json",))
    b = emit_report(run_pipeline(replace(cfg, out="x", workers=2)), tmp_path / "b", ("json",))
    assert a[0].name == b[0].name
    assert a[0].read_bytes() == b[0].read_bytes()


def test_empty_report_is_valid_json(tmp_path):
    rep = VerdictReport("empty", "theorem", "0" * 12, 0, {})
    assert rep.passed
    (path, _) = emit_report(rep, tmp_path, ("json",))
    raw = json.loads(path.read_text())
    assert raw["verdicts"] == [] and raw["passed"] is True
    assert VerdictReport.from_dict(raw).verdicts == []


def test_both_formats_written(tmp_path):
    rep = VerdictReport("two", "theorem", "f" * 12, 0, {}, [Verdict("c", 0.5, 0.49, (0.4, 0.6), 0.1, True, "")])
    names = {p.name for p in emit_report(rep, tmp_path, ("json", "csv"))}
    assert any(n.endswith(".verdicts.json") for n in names)
    assert any(n.endswith(".verdicts.csv") for n in names)
    with pytest.raises(ValueError):
        emit_report(rep, tmp_path, ("xml",))


def test_report_json_round_trip(tmp_path):
    rep = run_pipeline(_small())
    back = VerdictReport.from_dict(json.loads(json.dumps(rep.to_dict(), default=float)))
    assert [v.claim for v in back.verdicts] == [v.claim for v in rep.verdicts]
    assert back.passed == rep.passed


def test_small_theorem_run_claims():
    rep = run_pipeline(_small())
    claims = {v.claim for v in rep.verdicts}
    assert {"tail_index_sum", "tail_index_max", "theta_sum", "theta_max"} <= claims
    theta = next(v for v in rep.verdicts if v.claim == "theta_sum")
    assert theta.predicted == pytest.approx(0.5)

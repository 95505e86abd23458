import pytest

from gcm_lab import models
from gcm_lab.errors import ConfigError
from gcm_lab.services.experiments import (
    ExperimentRunner,
    run_commute,
    run_independence,
    run_patterns,
    run_reduced,
    run_yangian_suites,
)
from gcm_lab.services.reports import ReportStore
from gcm_lab.services.validator import RunConfigValidator


def _config(**overrides) -> models.RunConfig:
    raw = {"n": 2, "lambda": [-1.0, -3.0], "trials": 3, "seed": 7}
    raw.update(overrides)
    return models.RunConfig.model_validate(raw)


def test_commute_suite_detects_the_probe() -> None:
    report = run_commute(_config())
    assert report["pass"]
    assert set(report["families"]) == {"g+casimir", "f"}
    assert report["negative_control"]["detected"]


def test_independence_suite_with_controls() -> None:
    report = run_independence(_config())
    assert report["pass"]
    assert report["families"]["g"]["ranks"] == [4, 4, 4]
    assert report["controls"]["duplicated"]["ranks"] == [3, 3, 3]
    assert report["controls"]["thimm"]["ranks"] == [1, 1, 1]


def test_reduced_suite_for_n3() -> None:
    report = run_reduced(_config(n=3, **{"lambda": [-1.0, -2.0, -4.0]}, trials=2))
    assert report["pass"]
    assert report["rank"]["rank_gains"] == [3, 3]
    assert report["invariance"]["negative_control"]["detected"]


def test_reduced_suite_for_n1() -> None:
    report = run_reduced(_config(n=1, **{"lambda": [-2.0]}, trials=2))
    assert report["pass"]
    assert "skipped" in report["invariance"]


def test_pattern_suite_passes() -> None:
    report = run_patterns()
    assert report["pass"]
    assert report["gl_cases"] > 0 and report["sp_cases"] > 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_yangian_suites_pass(n: int) -> None:
    report = run_yangian_suites(n, 6, 0, trials=3)
    assert report["pass"], {name: r["pass"] for name, r in report["suites"].items()}
    assert set(report["suites"]) == {"factorize", "stabilizer", "limits", "psi", "pullback", "poisson"}


def test_validator_reports_every_problem() -> None:
    config = _config(n=0, trials=0, tol=0.0, **{"lambda": [0.5, 1.0]})
    codes = {issue.code for issue in RunConfigValidator().validate(config).issues}
    assert {"BAD_N", "BAD_TRIALS", "BAD_TOL", "LAMBDA_LENGTH", "LAMBDA_POSITIVE", "LAMBDA_NOT_STRICT"} <= codes


def test_lambda_is_not_checked_for_series_only_runs() -> None:
    config = _config(suites=["patterns", "yangian"], **{"lambda": [-1.0, -1.0]})
    assert RunConfigValidator().validate(config).valid


def test_runner_writes_reports_and_summary(tmp_path) -> None:
    config = _config(suites=["patterns", "yangian"], trials=2, order=3)
    summary, reports = ExperimentRunner(ReportStore(tmp_path)).run(config)
    assert summary.passed
    assert [s.suite for s in summary.suites] == ["patterns", "yangian"]
    assert [s.report_file for s in summary.suites] == ["patterns.json", "yangian.json"]
    stored = ReportStore(tmp_path).read_all()
    assert set(stored) == {"patterns", "yangian", "summary"}
    assert stored["summary"]["pass"] is True
    assert stored["yangian"]["config"]["lambda"] == [-1.0, -3.0]
    assert "out" not in stored["summary"]["config"]


def test_runner_rejects_invalid_config() -> None:
    with pytest.raises(ConfigError) as exc:
        ExperimentRunner().run(_config(**{"lambda": [-1.0, -1.0]}))
    assert [issue.code for issue in exc.value.issues] == ["LAMBDA_NOT_STRICT"]

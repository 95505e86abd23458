import json

from gcm_lab.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from gcm_lab.errors import DegenerateSpectrumError
from gcm_lab.services import experiments


def test_explain_known_and_unknown_labels(capsys) -> None:
    assert main(["explain", "f(0,1)"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "rtr" in out and "source:" in out

    assert main(["explain", "g_lsat(0)"]) == EXIT_USAGE
    assert "g_last" in capsys.readouterr().err


def test_patterns_command(capsys) -> None:
    assert main(["patterns", "--kind", "gl", "--top", "2,1,0"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["count"] == 8 == report["weyl_dim"]

    assert main(["patterns", "--kind", "sp", "--top=0,-1", "--list"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["count"] == 4 and len(report["patterns"]) == 4

    assert main(["patterns", "--kind", "sp", "--top", "1,0"]) == EXIT_USAGE


def test_run_rejects_repeated_lambda(tmp_path, capsys) -> None:
    code = main(["run", "--n", "2", "--lambda=-1,-1", "--suite", "commute", "--out", str(tmp_path)])
    assert code == EXIT_USAGE
    assert "LAMBDA_NOT_STRICT" in capsys.readouterr().err


def test_bad_arguments_are_usage_errors() -> None:
    assert main(["run", "--suite", "nonsense"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE


def test_run_writes_identical_reports_on_rerun(tmp_path, capsys) -> None:
    args = ["run", "--n", "2", "--lambda=-1,-3", "--trials", "2", "--order", "3", "--seed", "7"]
    first, second = tmp_path / "a", tmp_path / "b"
    assert main([*args, "--out", str(first)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["pass"] is True
    assert {s["suite"] for s in summary["suites"]} == {"commute", "independence", "reduced", "patterns", "yangian"}

    assert main([*args, "--out", str(second)]) == EXIT_OK
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert "summary.json" in names
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_preset_with_override(tmp_path, capsys) -> None:
    code = main(["run", "--preset", "smoke", "--suite", "patterns", "--out", str(tmp_path)])
    assert code == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["config"]["seed"] == 1
    assert [s["suite"] for s in summary["suites"]] == ["patterns"]


def test_yangian_command(tmp_path, capsys) -> None:
    code = main(["yangian", "--n", "2", "--order", "4", "--trials", "2", "--suite", "psi", "--out", str(tmp_path)])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert list(report["suites"]) == ["psi"]
    assert (tmp_path / "yangian.json").exists()


def test_domain_error_inside_a_suite_is_a_failure(tmp_path, monkeypatch, capsys) -> None:
    def degenerate(config, threads):
        raise DegenerateSpectrumError("block spectrum collapsed")

    monkeypatch.setitem(experiments.SUITE_RUNNERS, "patterns", degenerate)
    code = main(["run", "--suite", "patterns", "--out", str(tmp_path)])
    assert code == EXIT_FAILED
    assert "block spectrum collapsed" in capsys.readouterr().err

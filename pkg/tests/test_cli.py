from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from apps.sta_engine.main import cli
from apps.sta_engine.services.physics.errors import EXIT_CONFIG, EXIT_FAILURE, EXIT_NUMERICAL


@pytest.fixture()
def runner():
    return CliRunner()


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _invoke(runner, *args):
    result = runner.invoke(cli, ["--log-level", "ERROR", *args])
    return result, json.loads(result.stdout)


def test_sweep_success(runner, tmp_path):
    config = _write(tmp_path / "run.yaml", "version: 1\nprotocol: vitanov_satd_kappa\nsweep:\n  nu: [1.0]\n")
    result, body = _invoke(runner, "sweep", "--config", config, "--out", str(tmp_path / "out"), "--seedless")
    assert result.exit_code == 0
    assert body["ok"] is True
    assert body["data"]["points"] == 1 and body["data"]["failed"] == 0
    assert (tmp_path / "out" / "results.csv").is_file()


def test_missing_config_exits_with_config_code(runner, tmp_path):
    result, body = _invoke(runner, "sweep", "--config", str(tmp_path / "absent.yaml"))
    assert result.exit_code == EXIT_CONFIG
    assert body["ok"] is False and body["error"] == "config_error"


def test_unknown_key_exits_with_config_code(runner, tmp_path):
    config = _write(tmp_path / "bad.yaml", "version: 1\nprotocol: vitanov_satd\nphysics:\n  bogus: 1\n")
    result, body = _invoke(runner, "simulate", "--config", config)
    assert result.exit_code == EXIT_CONFIG
    assert "physics.bogus" in body["message"]


def test_coarse_step_exits_with_numerical_code(runner, tmp_path):
    config = _write(tmp_path / "coarse.yaml", "version: 1\nprotocol: vitanov_satd_kappa\nnumerics:\n  dt: 0.1\n")
    result, body = _invoke(runner, "synthesize", "--config", config, "--nu", "1.0", "--out", str(tmp_path))
    assert result.exit_code == EXIT_NUMERICAL
    assert body["error"] == "step_too_coarse"


def test_synthesize_and_simulate(runner, tmp_path):
    config = _write(tmp_path / "run.yaml", "version: 1\nprotocol: vitanov_satd_kappa\nsweep:\n  nu: [2.0]\n")
    result, body = _invoke(runner, "synthesize", "--config", config, "--out", str(tmp_path / "pulse"))
    assert result.exit_code == 0
    assert body["data"]["nu"] == 2.0
    assert body["data"]["correction"]["scheme"] == "satd_kappa"

    result, body = _invoke(runner, "simulate", "--config", config, "--out", str(tmp_path / "point"))
    assert result.exit_code == 0
    assert body["data"]["status"] == "ok"
    assert (tmp_path / "point" / body["data"]["trajectory_file"]).is_file()


def test_compare_mismatch_exits_one(runner, tmp_path):
    header = "protocol,nu,final_fidelity,infidelity\n"
    current = _write(tmp_path / "current.csv", header + "vitanov_satd_kappa,1.0,0.99,0.01\n")
    baseline = _write(tmp_path / "baseline.csv", header + "vitanov_satd_kappa,1.0,0.98,0.02\n")

    result, body = _invoke(runner, "compare", "--results", current, "--baseline", current)
    assert result.exit_code == 0 and body["data"]["passed"] is True

    result, body = _invoke(runner, "compare", "--results", current, "--baseline", baseline)
    assert result.exit_code == EXIT_FAILURE
    assert body["error"] == "baseline_mismatch"
    assert len(body["data"]["mismatches"]) == 2

    result, body = _invoke(runner, "compare", "--results", current, "--baseline", str(tmp_path / "none.csv"))
    assert result.exit_code == EXIT_CONFIG
    assert body["error"] == "missing_baseline"


def test_mu_report(runner, tmp_path):
    config = _write(
        tmp_path / "mu.yaml",
        "version: 1\nprotocol: tanh_corrected\nsweep:\n  nu: [2.0]\nnumerics:\n  dt: 1.0e-3\n",
    )
    result, body = _invoke(runner, "mu-report", "--config", config, "--out", str(tmp_path / "mu"))
    assert result.exit_code == 0
    assert body["data"][0]["nu"] == 2.0
    assert 0.0 < body["data"][0]["mu_mid"] < 0.01
    assert (tmp_path / "mu" / "mu_summary.csv").is_file()


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "sta" in result.stdout


@pytest.mark.parametrize("extra", [[], ["--log-level", "DEBUG"], ["--log-level", "INFO"]])
def test_logging_setup_runs_for_every_level(runner, tmp_path, extra):
    config = _write(tmp_path / "run.yaml", "version: 1\nprotocol: vitanov_satd_kappa\nsweep:\n  nu: [1.0]\n")
    result = runner.invoke(cli, [*extra, "synthesize", "--config", config, "--out", str(tmp_path / "pulse")])
    assert result.exception is None or isinstance(result.exception, SystemExit)
    assert result.exit_code == 0
    assert json.loads(result.stdout)["ok"] is True


def test_json_log_format(runner, tmp_path, monkeypatch):
    from apps.sta_engine.config.settings import settings

    monkeypatch.setattr(settings, "STA_LOG_FORMAT", "json")
    result = runner.invoke(cli, ["--log-level", "DEBUG", "compare", "--results", str(tmp_path / "a.csv"), "--baseline", str(tmp_path / "b.csv")])
    assert result.exit_code == EXIT_CONFIG

from __future__ import annotations

import json

import numpy as np
import pandas as pd
import pytest

from apps.sta_engine.config.experiment import parse_config
from apps.sta_engine.services.harness import exports
from apps.sta_engine.services.harness.baseline import compare_with_baseline
from apps.sta_engine.services.harness.runner import (
    build_protocol,
    initial_state,
    mu_profile_report,
    run,
    run_oracle,
    run_point,
    simulate_point,
    synthesize_point,
)
from apps.sta_engine.services.physics.dynamics import derivative_sign_changes
from apps.sta_engine.services.physics.errors import ConfigError, MissingBaselineError


def _config(protocol, nu, **sections):
    data = {"version": 1, "protocol": protocol, "sweep": {"nu": list(nu)}}
    data.update(sections)
    return parse_config(data)


def _files(directory):
    return {p.relative_to(directory).as_posix(): p.read_bytes() for p in sorted(directory.rglob("*")) if p.is_file()}


def test_sweep_writes_results_and_manifest(tmp_path):
    config = _config(["vitanov_uncorrected", "vitanov_satd_kappa"], [0.5, 1.0])
    result = run(config, tmp_path, progress=False)

    table = pd.read_csv(tmp_path / exports.RESULTS_FILE)
    assert list(table["protocol"]) == ["vitanov_uncorrected"] * 2 + ["vitanov_satd_kappa"] * 2
    assert list(table["nu"]) == [0.5, 1.0, 0.5, 1.0]
    assert "runtime" not in table.columns
    assert (table["status"] == "ok").all()
    assert np.allclose(table["final_fidelity"] + table["infidelity"], 1.0)
    assert (tmp_path / table["trajectory_file"].iloc[0]).is_file()
    assert (tmp_path / table["mode_file"].iloc[-1]).is_file()

    manifest = json.loads((tmp_path / exports.MANIFEST_FILE).read_text())
    assert manifest["command"] == "sweep"
    assert manifest["points"] == 4 and manifest["failed"] == 0
    assert manifest["config"]["protocol"] == ["vitanov_uncorrected", "vitanov_satd_kappa"]
    assert result.meta["failed"] == 0


def test_reruns_are_byte_identical(tmp_path):
    config = _config(["vitanov_satd", "vitanov_satd_kappa"], [0.7, 1.3])
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    run(config, serial, threads=1, progress=False)
    run(config, parallel, threads=2, progress=False)
    again = tmp_path / "again"
    run(config, again, threads=1, progress=False)
    assert _files(serial) == _files(parallel)
    assert _files(serial) == _files(again)


def test_failed_point_does_not_abort_sweep(tmp_path):
    config = _config("vitanov_uncorrected", [0.1, 1.0], numerics={"dt": 0.02})
    result = run(config, tmp_path, progress=False)
    first, second = result.records
    assert first.status == "ok"
    assert second.status == "failed"
    assert "dt*nu" in second.error
    assert np.isnan(second.final_fidelity)
    assert result.meta["failed"] == 1
    table = pd.read_csv(tmp_path / exports.RESULTS_FILE)
    assert list(table["status"]) == ["ok", "failed"]


def test_empty_sweep(tmp_path):
    config = _config("vitanov_satd_kappa", [])
    result = run(config, tmp_path, progress=False)
    assert result.records == []
    table = pd.read_csv(tmp_path / exports.RESULTS_FILE)
    assert table.empty and "final_fidelity" in table.columns


def test_kappa_aware_correction_beats_others():
    config = _config(["vitanov_uncorrected", "vitanov_satd", "vitanov_satd_kappa"], [1.0])
    records = {}
    for protocol in config.protocols:
        records[protocol] = simulate_point(config, protocol, 1.0).record
    uncorrected = records["vitanov_uncorrected"].infidelity
    satd = records["vitanov_satd"].infidelity
    satd_kappa = records["vitanov_satd_kappa"].infidelity
    assert satd_kappa >= -1e-12
    assert uncorrected >= 100.0 * satd_kappa
    assert satd > satd_kappa
    assert records["vitanov_satd_kappa"].leakage_max < 1e-8


def test_synthesize_point_table(tmp_path):
    config = _config("vitanov_satd_kappa", [1.0])
    build, frame = synthesize_point(config, out=tmp_path)
    assert list(frame.columns) == ["t", "g1", "g2", "mu", "gx", "gz", "g1_base", "g2_base"]
    assert (tmp_path / f"{exports.point_stem('vitanov_satd_kappa', 1.0)}_pulse.csv").is_file()
    assert build.leakage.max_abs < 1e-8

    _, bare = synthesize_point(_config("vitanov_uncorrected", [1.0]))
    assert np.all(bare["mu"] == 0.0)
    with pytest.raises(ConfigError):
        synthesize_point(config, protocol="vitanov_satd")


def test_initial_state_choices():
    config = _config("vitanov_satd_kappa", [1.0])
    build = build_protocol("vitanov_satd_kappa", 1.0, config.physics)
    assert initial_state(build, "A").as_array()[0] == 1.0
    dressed = initial_state(build, "dressed_dark")
    assert dressed.norm == pytest.approx(1.0)
    assert abs(dressed.uB) > 0.0
    assert abs(dressed.uA) == pytest.approx(1.0, abs=1e-5)


def test_compare_with_baseline(tmp_path):
    config = _config("vitanov_satd_kappa", [1.0, 2.0], output={"write_trajectories": False})
    run(config, tmp_path, progress=False)
    report = compare_with_baseline(tmp_path, tmp_path)
    assert report.passed and report.checked == 2

    shifted = pd.read_csv(tmp_path / exports.RESULTS_FILE)
    shifted.loc[0, "final_fidelity"] *= 1.0 + 1e-3
    report = compare_with_baseline(tmp_path, shifted)
    assert not report.passed
    assert report.mismatches[0].column == "final_fidelity"
    assert report.to_dict()["mismatches"][0]["nu"] == 1.0

    partial = shifted.iloc[1:]
    assert compare_with_baseline(tmp_path, partial).missing == [("vitanov_satd_kappa", 1.0)]

    with pytest.raises(MissingBaselineError):
        compare_with_baseline(tmp_path, tmp_path / "nowhere")


def test_mu_profile_report(tmp_path):
    config = _config("tanh_corrected", [1.0], numerics={"dt": 1e-3})
    profiles, summary = mu_profile_report(config, tmp_path)
    row = summary.iloc[0]
    assert row["mu_mid"] == pytest.approx(1.0 / (2 * 6.0) * (5 / 26**0.5) / 26, rel=2e-2)
    assert row["mu_mid"] == pytest.approx(row["mu_fixed_point"], rel=1e-3)
    assert row["t_mid"] > row["t_i"]
    assert profiles["mu"].max() == pytest.approx(row["mu_max"])
    assert (tmp_path / "mu_profiles.csv").is_file() and (tmp_path / "mu_summary.csv").is_file()

    with pytest.raises(ConfigError):
        mu_profile_report(_config("vitanov_satd_kappa", [1.0]))


def test_oracle_requires_grids_and_closed_model():
    with pytest.raises(ConfigError):
        run_oracle(_config("vitanov_satd_kappa", [1.0]))
    grids = {"grids": [{"omega_max": 50.0, "n_modes": 512}]}
    with pytest.raises(ConfigError):
        run_oracle(_config("vitanov_satd_kappa", [1.0], physics={"gamma": 0.01}, oracle=grids))


@pytest.mark.slow
def test_single_control_suppresses_emission_oscillations():
    config = _config(
        ["tanh_uncorrected", "tanh_corrected"], [0.5],
        numerics={"dt": 1e-3, "initial_state": "dressed_dark"},
    )
    corrected = simulate_point(config, "tanh_corrected", 0.5)
    uncorrected = simulate_point(config, "tanh_uncorrected", 0.5)
    assert corrected.record.infidelity < uncorrected.record.infidelity

    def envelope(output):
        return np.hypot(output.mode["f_re"].to_numpy(), output.mode["f_im"].to_numpy())

    assert derivative_sign_changes(envelope(corrected)) == 1
    assert derivative_sign_changes(envelope(uncorrected)) >= 3


@pytest.mark.slow
@pytest.mark.parametrize("nu", [0.5])
def test_single_control_gains_four_orders_at_window_end(nu):
    config = _config(
        ["tanh_uncorrected", "tanh_corrected"], [nu],
        numerics={
            "dt": 1e-3,
            "rtol": 1e-12,
            "atol": 1e-14,
            "method": "DOP853",
            "initial_state": "dressed_dark",
            "fidelity_at": "window_end",
        },
        output={"write_trajectories": False},
    )
    corrected = run_point("tanh_corrected", nu, config).record
    uncorrected = run_point("tanh_uncorrected", nu, config).record
    assert corrected.status == "ok" and uncorrected.status == "ok"
    assert corrected.infidelity >= -1e-12
    assert uncorrected.infidelity >= 1e4 * max(corrected.infidelity, 1e-14)


def test_window_end_scoring_ignores_the_tail():
    numerics = {"initial_state": "dressed_dark"}
    limit = _config("vitanov_satd_kappa", [1.0], numerics=numerics)
    window = _config("vitanov_satd_kappa", [1.0], numerics={**numerics, "fidelity_at": "window_end"})
    at_limit = run_point("vitanov_satd_kappa", 1.0, limit).record
    at_end = run_point("vitanov_satd_kappa", 1.0, window).record
    assert at_end.final_fidelity <= at_limit.final_fidelity
    assert at_end.infidelity == pytest.approx(1.0 - at_end.final_fidelity)


@pytest.mark.slow
@pytest.mark.parametrize("gamma", [0.0, 1e-3])
@pytest.mark.parametrize("nu", [1.0, 2.0, 5.0, 10.0])
def test_kappa_aware_correction_holds_over_a_decade(nu, gamma):
    config = _config(["vitanov_uncorrected", "vitanov_satd_kappa"], [nu], physics={"gamma": gamma})
    uncorrected = simulate_point(config, "vitanov_uncorrected", nu).record
    satd_kappa = simulate_point(config, "vitanov_satd_kappa", nu).record
    assert uncorrected.infidelity >= 100.0 * max(satd_kappa.infidelity, 1e-14)

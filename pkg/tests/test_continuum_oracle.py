from __future__ import annotations

import math

import numpy as np
import pytest

from apps.sta_engine.services.physics.continuum_oracle import (
    FullState,
    build_grid,
    extract_mode,
    extracted_mode_frame,
    markovian_deviation,
    propagate_full,
    relative_l2,
    waveguide_frame,
)
from apps.sta_engine.services.physics.errors import InvalidSpecError, RecurrenceError
from apps.sta_engine.services.physics.model_core import ControlSchedule, ModelParams, SystemAmplitudes
from apps.sta_engine.services.physics.pulse_library import VitanovSpec, vitanov_schedule
from apps.sta_engine.services.physics.sta_synthesis import satd_kappa_schedule


def _idle(t_end: float, n: int = 201) -> ControlSchedule:
    t = np.linspace(0.0, t_end, n)
    return ControlSchedule.sampled(t, np.zeros(n), np.zeros(n))


def _decay_deviation(omega_max: float, total_time: float = 8.0, d_omega: float = 0.1):
    grid = build_grid(omega_max, int(round(omega_max / d_omega)), 1.0, total_time)
    full = propagate_full(_idle(total_time), ModelParams(kappa=1.0), grid, SystemAmplitudes.e_C(), dt=0.05)
    pop_c = np.abs(full.system[:, 2]) ** 2
    return full, float(np.max(np.abs(pop_c - np.exp(-full.t))))


def test_grid_layout():
    grid = build_grid(10.0, 100, 2.0, 5.0)
    omega = grid.frequencies
    assert omega.size == 100
    assert omega[0] == pytest.approx(-5.0 + 0.05)
    assert omega[-1] == pytest.approx(5.0 - 0.05)
    assert np.sum(omega) == pytest.approx(0.0, abs=1e-10)
    assert grid.coupling_per_mode == pytest.approx(math.sqrt(2.0 * 0.1 / (2 * math.pi)))
    assert grid.to_dict()["recurrence_time"] == pytest.approx(2 * math.pi / 0.1)


def test_recurrence_guard():
    with pytest.raises(RecurrenceError):
        build_grid(100.0, 100, 1.0, 10.0)
    with pytest.raises(InvalidSpecError):
        build_grid(100.0, 1, 1.0, 1.0)


def test_model_mismatch_rejected():
    grid = build_grid(20.0, 200, 1.0, 5.0)
    with pytest.raises(InvalidSpecError):
        propagate_full(_idle(5.0), ModelParams(kappa=1.0, gamma=0.1), grid)
    with pytest.raises(InvalidSpecError):
        propagate_full(_idle(5.0), ModelParams(kappa=2.0), grid)
    with pytest.raises(InvalidSpecError):
        propagate_full(_idle(5.0), ModelParams(kappa=1.0), grid, scheme="euler")


def test_closed_system_conserves_norm():
    grid = build_grid(20.0, 200, 1.0, 5.0)
    full = propagate_full(_idle(5.0), ModelParams(kappa=1.0), grid, SystemAmplitudes.e_C(), dt=0.05)
    assert np.max(np.abs(full.total_norm - 1.0)) < 1e-10
    assert full.meta["norm_error"] < 1e-10
    assert full.fidelity[-1] == pytest.approx(full.final.waveguide_norm)


def test_schemes_agree_for_static_generator():
    grid = build_grid(20.0, 200, 1.0, 4.0)
    cf4 = propagate_full(_idle(4.0), ModelParams(kappa=1.0), grid, SystemAmplitudes.e_C(), dt=0.1)
    mid = propagate_full(_idle(4.0), ModelParams(kappa=1.0), grid, SystemAmplitudes.e_C(), dt=0.1, scheme="midpoint")
    assert np.allclose(cf4.final.waveguide, mid.final.waveguide, atol=1e-10)


@pytest.mark.slow
def test_pure_decay_converges_with_bandwidth():
    coarse, dev_coarse = _decay_deviation(400.0)
    fine, dev_fine = _decay_deviation(800.0)
    # flat band of half-width B: pole residue lifts |u_C|² by 2κ/(πB)
    assert dev_coarse == pytest.approx(2.0 / (math.pi * 200.0), rel=0.15)
    assert dev_fine < 2e-3
    assert 0.4 < dev_fine / dev_coarse < 0.6

    mode = extract_mode(fine.final, fine.grid, times=np.linspace(0.2, 7.5, 300))
    assert np.max(np.abs(np.abs(mode.f) ** 2 - np.exp(-mode.t))) < 2e-2
    assert mode.band_edge_ratio > 0.0


def test_extract_mode_single_mode_phase():
    grid = build_grid(10.0, 100, 1.0, 5.0)
    amps = np.zeros(100, dtype=complex)
    amps[60] = 1.0
    state = FullState(t=5.0, system=SystemAmplitudes.from_array([0, 0, 0]), waveguide=amps)
    mode = extract_mode(state, grid, times=np.array([5.0, 4.0]))
    scale = math.sqrt(grid.d_omega / (2 * math.pi))
    omega = grid.frequencies[60]
    assert mode.f[0] == pytest.approx(scale)
    assert mode.f[1] == pytest.approx(scale * np.exp(1j * omega))
    assert list(extracted_mode_frame(mode).columns) == ["t", "f_re", "f_im"]
    assert list(waveguide_frame(state, grid).columns) == ["omega", "u_re", "u_im"]


def test_relative_l2():
    t = np.linspace(0.0, 1.0, 101)
    ref = np.ones_like(t)
    assert relative_l2(ref, ref, t) == 0.0
    assert relative_l2(1.1 * ref, ref, t) == pytest.approx(0.1)
    assert relative_l2(np.zeros_like(t), np.zeros_like(t), t) == 0.0


@pytest.mark.slow
def test_markovian_deviation_shrinks_with_bandwidth():
    base = vitanov_schedule(VitanovSpec(G0=1.0, nu=1.0), kappa=1.0)
    corrected = satd_kappa_schedule(base, 1.0)
    t_i, t_f = base.window
    total = (t_f - t_i) + 10.0
    grids = [build_grid(200.0, 4096, 1.0, total), build_grid(400.0, 8192, 1.0, total)]
    table = markovian_deviation(corrected.corrected, ModelParams(kappa=1.0), grids, dt=0.01)
    assert list(table["omega_max"]) == [200.0, 400.0]
    assert table["fidelity_deviation"].iloc[0] < 1e-3
    assert table["mode_l2_distance"].iloc[0] < 1e-2
    assert table["fidelity_deviation"].iloc[1] < table["fidelity_deviation"].iloc[0]
    assert table["mode_l2_distance"].iloc[1] < table["mode_l2_distance"].iloc[0]
    assert np.all(table["norm_error"] < 1e-8)


def test_markovian_deviation_small_grids_report_every_row():
    base = vitanov_schedule(VitanovSpec(G0=1.0, nu=2.0), kappa=1.0)
    t_i, t_f = base.window
    total = (t_f - t_i) + 4.0
    grids = [build_grid(25.0, 256, 1.0, total), build_grid(50.0, 512, 1.0, total)]
    table = markovian_deviation(base, ModelParams(kappa=1.0), grids, dt=0.02)
    assert list(table["n_modes"]) == [256, 512]
    assert np.all(np.isfinite(table["fidelity_deviation"]))
    assert np.all(table["norm_error"] < 1e-8)

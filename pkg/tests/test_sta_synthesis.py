from __future__ import annotations

import numpy as np
import pytest

from apps.sta_engine.config.settings import settings
from apps.sta_engine.services.physics.errors import BoundaryDressingError, InvalidSpecError, SingularityError
from apps.sta_engine.services.physics.frames import DressingProfile
from apps.sta_engine.services.physics.model_core import ControlSchedule
from apps.sta_engine.services.physics.pulse_library import (
    TanhSpec,
    VitanovSpec,
    schedule_angle_profile,
    tanh_schedule,
    vitanov_schedule,
)
from apps.sta_engine.services.physics.sta_synthesis import (
    correction_controls,
    custom_schedule,
    leakage_profile,
    mu_ode_numerator,
    satd_kappa_schedule,
    satd_schedule,
    single_control_fixed_point,
    single_control_mu,
    single_control_schedule,
    single_control_start,
    uncorrected_leakage,
)

KAPPA = 1.0


def _vitanov(nu: float = 1.0):
    return vitanov_schedule(VitanovSpec(G0=1.0, nu=nu), kappa=KAPPA)


def _tanh(nu: float = 1.0):
    return tanh_schedule(TanhSpec(Gmax=30.0, g=6.0, nu=nu), dt=1e-3)


@pytest.mark.parametrize("nu", [0.1, 1.0, 10.0])
def test_satd_kappa_cancels_leakage(nu):
    corrected = satd_kappa_schedule(_vitanov(nu), KAPPA)
    report = leakage_profile(corrected)
    assert report.max_abs < 1e-8 * 1.0
    assert corrected.scheme == "satd_kappa"
    assert corrected.corrected.source == "satd_kappa"
    assert corrected.stats["gz_residual"] < 1e-8


def test_satd_kappa_off_grid_shape_matches_grid():
    corrected = satd_kappa_schedule(_vitanov(), KAPPA)
    sched = corrected.corrected
    g1, g2 = sched.evaluate(sched.t[::97])
    assert np.allclose(g1, sched.g1[::97], atol=1e-12)
    assert np.allclose(g2, sched.g2[::97], atol=1e-12)


def test_kappa_free_correction_leaks_with_physical_kappa():
    base = _vitanov()
    satd = satd_schedule(base)
    assert satd.corrected.source == "satd"
    assert leakage_profile(satd).max_abs < 1e-8
    assert leakage_profile(satd, kappa=KAPPA).max_abs > 1e-2
    assert uncorrected_leakage(base, KAPPA).max_abs > leakage_profile(satd, kappa=KAPPA).max_abs


def test_boundary_dressing_is_small():
    corrected = satd_kappa_schedule(_vitanov(), KAPPA)
    mu_i, mu_f = corrected.dressing.boundary_values
    assert 0.0 < mu_i < 3e-3
    assert 0.0 < mu_f < 3e-3


def test_boundary_strict_mode_raises(monkeypatch):
    monkeypatch.setattr(settings, "STA_MU_BOUNDARY_STRICT", True)
    monkeypatch.setattr(settings, "STA_MU_BOUNDARY_TOL", 1e-6)
    with pytest.raises(BoundaryDressingError):
        satd_kappa_schedule(_vitanov(), KAPPA)


def test_corrected_frame_columns():
    corrected = satd_kappa_schedule(_vitanov(), KAPPA)
    frame = corrected.to_frame()
    assert list(frame.columns) == ["t", "g1", "g2", "mu", "gx", "gz", "g1_base", "g2_base"]
    assert frame.shape[0] == corrected.base.t.size
    info = corrected.to_dict()
    assert info["scheme"] == "satd_kappa" and info["kappa"] == KAPPA


def test_correction_controls_singular_points():
    with pytest.raises(SingularityError):
        correction_controls([0.0], [0.1], [0.5], [0.3], [1.0], 0.0)
    controls = correction_controls([0.0], [0.2], [0.5], [0.0], [1.0], 0.0, numer_dot=[0.4])
    # L'Hôpital: numer_dot / mu_dot
    assert controls.gz[0] == pytest.approx(0.4 / 0.2 - 1.0)
    assert controls.gx[0] == pytest.approx(-0.2)


def test_custom_schedule_with_satd_dressing_reproduces_satd_kappa():
    base = _vitanov()
    reference = satd_kappa_schedule(base, KAPPA)
    custom = custom_schedule(base, DressingProfile(
        t=base.t, mu=reference.dressing.mu, mu_dot=reference.dressing.mu_dot, scheme="custom"), KAPPA)
    assert np.allclose(custom.corrected.g1, reference.corrected.g1, atol=1e-8)
    assert np.allclose(custom.corrected.g2, reference.corrected.g2, atol=1e-8)
    with pytest.raises(InvalidSpecError):
        custom_schedule(base, DressingProfile.zero(base.t[:-1]), KAPPA)


def test_single_control_start_is_root():
    mu0 = single_control_start(1e-3, 2e-3, 6.0, KAPPA)
    assert mu0 > 0
    assert abs(mu_ode_numerator(mu0, 1e-3, 2e-3, 6.0, KAPPA)) < 1e-12


def test_single_control_requires_constant_stokes():
    base = _vitanov()
    with pytest.raises(InvalidSpecError):
        single_control_mu(base, 1.0, KAPPA, t_mid=0.0)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
def test_single_control_cancels_leakage(nu):
    corrected = single_control_schedule(_tanh(nu), 6.0, KAPPA)
    report = leakage_profile(corrected)
    assert report.t[-1] == pytest.approx(corrected.splice_time)
    assert report.max_abs < 1e-8 * report.gap_max
    assert np.all(corrected.corrected.g2 == 6.0)
    # continuity at the splice
    n = corrected.dressed_span
    assert corrected.corrected.g1[n] == pytest.approx(corrected.corrected.g1[n - 1], rel=1e-2)


def test_single_control_plateau_dressing():
    base = _tanh(1.0)
    dressing = single_control_mu(base, 6.0, KAPPA)
    theta = schedule_angle_profile(base).theta[dressing.profile.t.size - 1]
    fixed_point = KAPPA * np.sin(theta) * np.cos(theta) ** 2 / (2 * 6.0)
    assert dressing.mu_mid == pytest.approx(fixed_point, rel=2e-2)
    assert 0.0 < dressing.mu_mid < 0.02
    assert dressing.profile.mu[0] == pytest.approx(dressing.mu_start)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
def test_mid_dressing_sits_on_plateau_fixed_point(nu):
    base = _tanh(nu)
    dressing = single_control_mu(base, 6.0, KAPPA)
    theta = float(schedule_angle_profile(base).theta[dressing.profile.t.size - 1])
    fixed = single_control_fixed_point(theta, 6.0, KAPPA)
    assert dressing.mu_mid == pytest.approx(fixed, rel=1e-3)
    assert 2.5e-3 < dressing.mu_mid < 3.5e-3


def test_plateau_fixed_point_grows_linearly_with_kappa():
    theta = np.arctan(5.0)
    base = single_control_fixed_point(theta, 6.0, KAPPA)
    # a four times stronger dissipative term lands at 0.0125
    assert single_control_fixed_point(theta, 6.0, 4 * KAPPA) == pytest.approx(4 * base, rel=1e-2)
    assert single_control_fixed_point(theta, 6.0, 4 * KAPPA) == pytest.approx(0.0125, rel=2e-2)
    assert single_control_fixed_point(theta, 6.0, 0.0) == 0.0


def test_single_control_uses_sampled_pulses():
    closed = _tanh(1.0)
    sampled = ControlSchedule.sampled(closed.t, closed.g1, closed.g2, meta=dict(closed.meta))
    a = single_control_mu(closed, 6.0, KAPPA)
    b = single_control_mu(sampled, 6.0, KAPPA)
    assert b.mu_mid == pytest.approx(a.mu_mid, rel=1e-4)

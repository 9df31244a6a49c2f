"""
Dynamics (Canonical)
====================

Purpose:
- Propagate the reduced three-level amplitudes under the non-Hermitian H₁:
    u̇_A = −i G₁ u_B
    u̇_B = −i (G₁ u_A + G₂ u_C) − (Γ/2) u_B
    u̇_C = −i G₂ u_B − (κ/2) u_C
  with the emitted probability F = κ∫|u_C|² and the Γ-lost probability
  L = Γ∫|u_B|² carried as extra components of the same RK state.
- Observables: final fidelity, temporal mode f = −i√κ u_C, dressed-frame
  projections, κ_eff, dark-state decay law, predicted |u_B|².

Non-goals:
- Density matrices, dephasing, stochastic unravelings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_simpson

from apps.sta_engine.services.admin.logger import log_event

from .errors import InvalidSpecError
from .frames import DressingProfile, dressed_basis_lab
from .integrator import drive
from .model_core import ArrayLike, ControlSchedule, ModelParams, SystemAmplitudes
from .pulse_library import schedule_angle_profile

log = logging.getLogger("sta.dynamics")

NORM_TOLERANCE = 1e-9


# -----------------------------
# Settings + results
# -----------------------------
@dataclass(frozen=True)
class TailSettings:
    """
    Free decay after t_f with controls frozen at their t_f values.

    max_length is in units of 1/κ. `end_time` replaces the early stop with a
    fixed absolute end time (used to compare against the continuum model).
    """

    enabled: bool = True
    max_length: float = 50.0
    tolerance: float = 1e-14
    end_time: Optional[float] = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    fidelity: np.ndarray
    lost: np.ndarray
    kappa: float
    t_f: float
    meta: Dict[str, Any] = field(default_factory=dict)
    dressed_dark: Optional[np.ndarray] = None

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def norm(self) -> np.ndarray:
        return np.sum(self.populations, axis=1)

    @property
    def mode(self) -> np.ndarray:
        return temporal_mode(self, self.kappa)

    @property
    def window_count(self) -> int:
        """Samples up to and including t_f."""
        return int(np.searchsorted(self.t, self.t_f, side="right"))

    def state_at(self, index: int) -> SystemAmplitudes:
        return SystemAmplitudes.from_array(self.states[index])

    def bookkeeping_error(self) -> float:
        return float(np.max(np.abs(self.norm + self.fidelity + self.lost - 1.0)))


@dataclass(frozen=True, eq=False)
class DressedProjection:
    t: np.ndarray
    dark: np.ndarray
    plus: np.ndarray
    minus: np.ndarray


# -----------------------------
# Propagation
# -----------------------------
def _initial_vector(psi0: Union[SystemAmplitudes, ArrayLike, None]) -> np.ndarray:
    if psi0 is None:
        vec = SystemAmplitudes.e_A().as_array()
    elif isinstance(psi0, SystemAmplitudes):
        vec = psi0.as_array()
    else:
        vec = np.asarray(psi0, dtype=complex).reshape(3)
    norm = float(np.sum(np.abs(vec) ** 2))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise InvalidSpecError(f"initial state must be normalized (norm={norm:.12g})")
    return vec


def _rhs_factory(schedule: ControlSchedule, params: ModelParams):
    half_kappa = 0.5 * params.kappa
    half_gamma = 0.5 * params.gamma
    kappa = params.kappa
    gamma = params.gamma

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        g1, g2 = schedule.evaluate(t)
        g1 = float(g1)
        g2 = float(g2)
        ua, ub, uc = y[0], y[1], y[2]
        return np.array(
            [
                -1j * g1 * ub,
                -1j * (g1 * ua + g2 * uc) - half_gamma * ub,
                -1j * g2 * ub - half_kappa * uc,
                kappa * (uc.real * uc.real + uc.imag * uc.imag),
                gamma * (ub.real * ub.real + ub.imag * ub.imag),
            ],
            dtype=complex,
        )

    return rhs


def _tail_grid(t_f: float, dt: float, end: float) -> np.ndarray:
    count = int(math.floor((end - t_f) / dt + 1e-9))
    grid = t_f + dt * np.arange(1, count + 1)
    if grid.size == 0 or end - grid[-1] > 1e-9 * dt:
        grid = np.append(grid, end)
    return grid


def propagate(
    schedule: ControlSchedule,
    params: ModelParams,
    psi0: Union[SystemAmplitudes, ArrayLike, None] = None,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    method: str = "RK45",
    tail: Optional[TailSettings] = None,
    max_step: Optional[float] = None,
) -> Trajectory:
    """
    Integrate over the schedule window (sampled on the schedule grid), then
    the optional free-decay tail.
    """
    tail = TailSettings() if tail is None else tail
    y0 = np.zeros(5, dtype=complex)
    y0[:3] = _initial_vector(psi0)
    rhs = _rhs_factory(schedule, params)
    t_i, t_f = schedule.window
    max_step = 10.0 * schedule.dt if max_step is None else max_step

    main = drive(rhs, t_i, y0, t_f, t_eval=schedule.t, method=method, rtol=rtol, atol=atol, max_step=max_step)
    times = [main.t]
    values = [main.y]
    stats: Dict[str, Any] = {"window": main.stats}

    tail_end = None
    if tail.end_time is not None:
        tail_end = float(tail.end_time)
        if tail_end < t_f:
            raise InvalidSpecError("tail end_time precedes the end of the protocol window")
    elif tail.enabled and params.kappa > 0:
        tail_end = t_f + tail.max_length / params.kappa

    if tail_end is not None and tail_end > t_f:
        grid = _tail_grid(t_f, schedule.dt, tail_end)
        stop = None
        if tail.end_time is None:
            def stop(t: float, y: np.ndarray) -> bool:
                return abs(y[2]) ** 2 < tail.tolerance

        rest = drive(
            rhs, t_f, main.y_end, tail_end, t_eval=grid, method=method,
            rtol=rtol, atol=atol, max_step=max_step, stop=stop,
        )
        times.append(rest.t)
        values.append(rest.y)
        if rest.stopped and (rest.t.size == 0 or rest.t[-1] < rest.t_end):
            times.append(np.array([rest.t_end]))
            values.append(rest.y_end[None, :])
        stats["tail"] = {**rest.stats, "stopped_early": rest.stopped, "end": rest.t_end}

    t = np.concatenate(times)
    y = np.concatenate(values, axis=0)
    traj = Trajectory(
        t=t,
        states=y[:, :3].copy(),
        fidelity=y[:, 3].real.copy(),
        lost=y[:, 4].real.copy(),
        kappa=params.kappa,
        t_f=t_f,
        meta={"integrator": stats, "params": params.to_dict(), "schedule": schedule.source},
    )
    log_event(
        log, "propagated", logging.DEBUG,
        schedule=schedule.source, steps=main.stats["steps"], final_fidelity=float(traj.fidelity[-1]),
    )
    return traj


# -----------------------------
# Observables
# -----------------------------
def fidelity_final(traj: Trajectory) -> float:
    return float(traj.fidelity[-1])


def fidelity_at(traj: Trajectory, index: int) -> float:
    return float(traj.fidelity[index])


def temporal_mode(traj: Trajectory, kappa: float) -> np.ndarray:
    """
    f(t) = −i√κ u_C(t).
    """
    return -1j * math.sqrt(kappa) * traj.states[:, 2]


def kappa_eff_profile(theta: ArrayLike, mu: ArrayLike, kappa: float) -> np.ndarray:
    """
    κ_eff = (κ/2) sin²θ cos²μ, the amplitude decay rate of the dressed dark state.
    """
    return 0.5 * kappa * np.sin(theta) ** 2 * np.cos(mu) ** 2


def dark_state_decay(t: np.ndarray, theta: ArrayLike, mu: ArrayLike, kappa: float) -> np.ndarray:
    """
    exp(−2∫_{t_i}^t κ_eff): population left in the dressed dark state.
    """
    rate = kappa_eff_profile(theta, mu, kappa)
    return np.exp(-2.0 * cumulative_simpson(rate, x=t, initial=0.0))


def dressed_dark_amplitude(
    traj: Trajectory,
    dressing: DressingProfile,
    schedule: ControlSchedule,
) -> DressedProjection:
    """
    ⟨d̃k|ψ⟩ and ⟨±̃|ψ⟩ over the dressing grid.

    `schedule` is the uncorrected schedule the dressing was built on (its
    mixing angle defines the frame).
    """
    n = dressing.t.size
    if traj.t.size < n or not np.allclose(traj.t[:n], dressing.t, rtol=0.0, atol=1e-9 * max(1.0, schedule.dt)):
        raise InvalidSpecError("trajectory is not sampled on the dressing grid")
    theta = schedule_angle_profile(schedule).theta[:n]
    basis = dressed_basis_lab(theta, dressing.mu)
    proj = np.einsum("nij,ni->nj", np.conj(basis), traj.states[:n])
    return DressedProjection(t=dressing.t, dark=proj[:, 2], plus=proj[:, 0], minus=proj[:, 1])


def population_b_prediction(
    dressing: DressingProfile,
    theta: ArrayLike,
    kappa: float,
    *,
    initial: float = 1.0,
) -> np.ndarray:
    """
    |u_B|² = sin²μ · |ũ_dk(t_i)|² · exp(−2∫κ_eff).
    """
    decay = dark_state_decay(dressing.t, theta, dressing.mu, kappa)
    return np.sin(dressing.mu) ** 2 * initial * decay


def derivative_sign_changes(mode: ArrayLike, rel_floor: float = 1e-2) -> int:
    """
    Sign changes of d|f|/dt over samples with |f| ≥ rel_floor·max|f|.
    A single smooth lobe gives exactly one.
    """
    amp = np.abs(np.asarray(mode))
    peak = float(np.max(amp)) if amp.size else 0.0
    if peak == 0.0:
        return 0
    keep = amp >= rel_floor * peak
    slope = np.diff(amp)[keep[:-1] & keep[1:]]
    slope = slope[np.abs(slope) > 1e-12 * peak]
    if slope.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(np.sign(slope)) != 0))


# -----------------------------
# Export
# -----------------------------
def trajectory_frame(traj: Trajectory, stride: int = 1) -> pd.DataFrame:
    idx = np.arange(0, traj.t.size, max(int(stride), 1))
    if idx[-1] != traj.t.size - 1:
        idx = np.append(idx, traj.t.size - 1)
    s = traj.states[idx]
    f = traj.mode[idx]
    return pd.DataFrame(
        {
            "t": traj.t[idx],
            "uA_re": s[:, 0].real,
            "uA_im": s[:, 0].imag,
            "uB_re": s[:, 1].real,
            "uB_im": s[:, 1].imag,
            "uC_re": s[:, 2].real,
            "uC_im": s[:, 2].imag,
            "F": traj.fidelity[idx],
            "lost": traj.lost[idx],
            "mode_abs2": np.abs(f) ** 2,
        }
    )


def mode_frame(traj: Trajectory, stride: int = 1) -> pd.DataFrame:
    f = traj.mode
    idx = np.arange(0, traj.t.size, max(int(stride), 1))
    return pd.DataFrame({"t": traj.t[idx], "f_re": f[idx].real, "f_im": f[idx].imag})

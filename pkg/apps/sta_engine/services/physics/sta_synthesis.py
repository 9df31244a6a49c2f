"""
STA Synthesis (Canonical)
=========================

Purpose:
- Turn an uncorrected schedule into a corrected one whose dynamics follows the
  dressed dark state exactly (both leakage elements vanish on the grid).
- Two published dressings:
  - SATD+κ: closed-form μ = arctan[(θ̇ + κ/4 sin2θ)/G₀], g_z = 0,
    both couplings corrected.
  - single control: μ from the dressing ODE on [t_i, t₀/2], only G₁ corrected,
    turn-off spliced as A·G₁(t).
- A custom-μ entry point applying the general two-control correction.

Non-goals:
- Searching over dressings. Only the two published choices are synthesized.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from apps.sta_engine.config.settings import settings
from apps.sta_engine.services.admin.logger import log_event

from .errors import (
    BoundaryDressingError,
    InvalidSpecError,
    NonFiniteStateError,
    SingularityError,
    SingularStartError,
    StiffnessError,
)
from .frames import DressingProfile, dressed_frame_hamiltonian, leakage_elements
from .model_core import ArrayLike, ControlSchedule, PulseShape
from .pulse_library import AngleProfile, angle_fields, schedule_angle_profile

log = logging.getLogger("sta.synthesis")

# |sin μ| below this counts as μ = 0 in the g_z quotient.
MU_FLOOR = 1e-14

# cos θ guard of the single-control pulse formula.
COS_THETA_GUARD = 1e-6


# -----------------------------
# Value objects
# -----------------------------
@dataclass(frozen=True, eq=False)
class CorrectionControls:
    t: np.ndarray
    gx: np.ndarray
    gz: np.ndarray

    def __post_init__(self) -> None:
        if not (np.all(np.isfinite(self.gx)) and np.all(np.isfinite(self.gz))):
            raise NonFiniteStateError("correction controls contain non-finite values")


@dataclass(frozen=True, eq=False)
class CorrectedSchedule:
    base: ControlSchedule
    corrected: ControlSchedule
    dressing: DressingProfile
    controls: CorrectionControls
    kappa: float
    splice_gain: float = 1.0
    splice_time: Optional[float] = None
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def scheme(self) -> str:
        return self.dressing.scheme

    @property
    def dressed_span(self) -> int:
        """Number of leading grid points covered by the dressing."""
        return int(self.dressing.t.size)

    def to_frame(self) -> pd.DataFrame:
        n = self.base.t.size
        mu = np.full(n, np.nan)
        mu[: self.dressed_span] = self.dressing.mu
        return pd.DataFrame(
            {
                "t": self.corrected.t,
                "g1": self.corrected.g1,
                "g2": self.corrected.g2,
                "mu": mu,
                "gx": self.controls.gx,
                "gz": self.controls.gz,
                "g1_base": self.base.g1,
                "g2_base": self.base.g2,
            }
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme,
            "kappa": self.kappa,
            "splice_gain": self.splice_gain,
            "splice_time": self.splice_time,
            "dressing": self.dressing.to_dict(),
            "g1_corr_max": float(np.max(np.abs(self.corrected.g1))),
            "g2_corr_max": float(np.max(np.abs(self.corrected.g2))),
            **self.stats,
        }


@dataclass(frozen=True, eq=False)
class LeakageReport:
    t: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    gap_max: float

    @property
    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.c_plus)), np.max(np.abs(self.c_minus))))

    @property
    def max_relative(self) -> float:
        return self.max_abs / self.gap_max


# -----------------------------
# Closed-form pieces
# -----------------------------
def satd_kappa_mu(theta: ArrayLike, theta_dot: ArrayLike, G0: ArrayLike, kappa: float) -> Any:
    """
    μ = arctan[(θ̇ + κ/4 sin2θ)/G₀].
    """
    return np.arctan((theta_dot + 0.25 * kappa * np.sin(2.0 * np.asarray(theta))) / G0)


def _satd_fields(theta, theta_dot, theta_ddot, G0, G0_dot, kappa: float) -> Dict[str, Any]:
    numer = theta_dot + 0.25 * kappa * np.sin(2.0 * theta)
    numer_dot = theta_ddot + 0.5 * kappa * np.cos(2.0 * theta) * theta_dot
    mu = np.arctan2(numer, G0)
    mu_dot = (numer_dot * G0 - numer * G0_dot) / (G0 * G0 + numer * numer)
    gx = -mu_dot + 0.25 * kappa * np.sin(theta) ** 2 * np.sin(2.0 * mu)
    return {
        "mu": mu,
        "mu_dot": mu_dot,
        "numer_dot": numer_dot,
        "gx": gx,
        "dg1": -gx * np.cos(theta),
        "dg2": gx * np.sin(theta),
    }


def correction_controls(
    mu: ArrayLike,
    mu_dot: ArrayLike,
    theta: ArrayLike,
    theta_dot: ArrayLike,
    G0: ArrayLike,
    kappa: float,
    *,
    numer_dot: Optional[ArrayLike] = None,
    t: Optional[ArrayLike] = None,
    tol: float = 1e-10,
) -> CorrectionControls:
    """
    g_x = −μ̇ + κ/4 sin²θ sin2μ and g_z = (θ̇ + κ/4 sin2θ)/tanμ − G₀.

    Where μ = 0 the g_z quotient is 0/0: with the numerator derivative the
    limit is taken by L'Hôpital, otherwise it is carried over from the nearest
    regular grid point (one-sided at the window ends).
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    mu_dot = np.broadcast_to(np.asarray(mu_dot, dtype=float), mu.shape)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), mu.shape)
    theta_dot = np.broadcast_to(np.asarray(theta_dot, dtype=float), mu.shape)
    G0 = np.broadcast_to(np.asarray(G0, dtype=float), mu.shape)

    gx = -mu_dot + 0.25 * kappa * np.sin(theta) ** 2 * np.sin(2.0 * mu)
    numer = theta_dot + 0.25 * kappa * np.sin(2.0 * theta)

    sin_mu = np.sin(mu)
    regular = np.abs(sin_mu) > MU_FLOOR
    ratio = np.empty_like(mu)
    ratio[regular] = numer[regular] / sin_mu[regular]

    singular = ~regular
    if np.any(singular):
        scale = np.maximum(1.0, np.abs(G0[singular]))
        if np.any(np.abs(numer[singular]) > tol * scale):
            raise SingularityError("tan(mu) = 0 where theta_dot + kappa/4 sin(2 theta) does not vanish")
        idx = np.flatnonzero(singular)
        for i in idx:
            if numer_dot is not None and abs(mu_dot[i]) > MU_FLOOR:
                ratio[i] = float(np.broadcast_to(numer_dot, mu.shape)[i]) / mu_dot[i]
            elif np.any(regular):
                nearest = np.flatnonzero(regular)
                ratio[i] = ratio[nearest[np.argmin(np.abs(nearest - i))]]
            else:
                ratio[i] = G0[i]

    gz = ratio * np.cos(mu) - G0
    grid = np.arange(mu.size, dtype=float) if t is None else np.asarray(t, dtype=float)
    return CorrectionControls(t=grid, gx=gx, gz=gz)


def _check_boundary(label: str, value: float) -> None:
    tol = settings.STA_MU_BOUNDARY_TOL
    if abs(value) <= tol:
        return
    if settings.STA_MU_BOUNDARY_STRICT:
        raise BoundaryDressingError(f"dressing at {label} is {value:.3e} rad, above {tol:.1e}")
    log_event(log, "dressing_boundary", logging.WARNING, where=label, mu=float(value), tolerance=tol)


# -----------------------------
# SATD+κ
# -----------------------------
class SatdKappaShape(PulseShape):
    """
    Corrected pulses evaluated from the closed-form base pulse at any t.
    """

    analytic_derivatives = False

    def __init__(self, base: PulseShape, kappa: float) -> None:
        self.base = base
        self.kappa = float(kappa)

    def values(self, t: ArrayLike) -> Tuple[Any, Any]:
        g1, g2 = self.base.values(t)
        d1, d2 = self.base.derivatives(t)
        dd1, dd2 = self.base.second_derivatives(t)
        a = angle_fields(g1, g2, d1, d2, dd1, dd2)
        f = _satd_fields(a["theta"], a["theta_dot"], a["theta_ddot"], a["G0"], a["G0_dot"], self.kappa)
        return g1 + f["dg1"], g2 + f["dg2"]

    def describe(self) -> Dict[str, Any]:
        return {"kind": "satd_kappa", "kappa": self.kappa, "base": self.base.describe()}


def satd_kappa_schedule(base: ControlSchedule, kappa: float) -> CorrectedSchedule:
    """
    G₁corr = G₁ − g_x cosθ, G₂corr = G₂ + g_x sinθ with the SATD+κ dressing.
    """
    profile = schedule_angle_profile(base)
    f = _satd_fields(profile.theta, profile.theta_dot, profile.theta_ddot, profile.G0, profile.G0_dot, kappa)

    controls = correction_controls(
        f["mu"], f["mu_dot"], profile.theta, profile.theta_dot, profile.G0, kappa,
        numer_dot=f["numer_dot"], t=base.t,
    )
    gz_residual = float(np.max(np.abs(controls.gz)))
    controls = CorrectionControls(t=base.t, gx=controls.gx, gz=np.zeros_like(base.t))

    dressing = DressingProfile(t=base.t, mu=f["mu"], mu_dot=f["mu_dot"], scheme="satd_kappa")
    mu_i, mu_f = dressing.boundary_values
    _check_boundary("t_i", mu_i)
    _check_boundary("t_f", mu_f)

    g1 = base.g1 + f["dg1"]
    g2 = base.g2 + f["dg2"]
    source = "satd_kappa" if kappa > 0 else "satd"
    meta = {**base.meta, "correction": source, "correction_kappa": kappa}
    if base.shape is not None and base.shape.analytic_derivatives:
        shape = SatdKappaShape(base.shape, kappa)
        corrected = ControlSchedule(t=base.t, g1=g1, g2=g2, source=source, shape=shape, meta=meta)
    else:
        corrected = ControlSchedule.sampled(base.t, g1, g2, source=source, meta=meta)

    log_event(
        log, "satd_kappa_synthesized", logging.DEBUG,
        kappa=kappa, mu_start=mu_i, mu_end=mu_f, gz_residual=gz_residual,
    )
    return CorrectedSchedule(
        base=base,
        corrected=corrected,
        dressing=dressing,
        controls=controls,
        kappa=kappa,
        stats={"gz_residual": gz_residual},
    )


def satd_schedule(base: ControlSchedule) -> CorrectedSchedule:
    """
    κ-free superadiabatic correction (SATD+κ with κ = 0).
    """
    return satd_kappa_schedule(base, 0.0)


# -----------------------------
# Custom dressing
# -----------------------------
def custom_schedule(base: ControlSchedule, dressing: DressingProfile, kappa: float) -> CorrectedSchedule:
    """
    General two-control correction for a user-supplied μ(t) on the base grid.
    """
    if dressing.t.shape != base.t.shape or not np.allclose(dressing.t, base.t, rtol=0, atol=1e-12):
        raise InvalidSpecError("custom dressing must be sampled on the base grid")
    profile = schedule_angle_profile(base)
    numer_dot = profile.theta_ddot + 0.5 * kappa * np.cos(2.0 * profile.theta) * profile.theta_dot
    controls = correction_controls(
        dressing.mu, dressing.mu_dot, profile.theta, profile.theta_dot, profile.G0, kappa,
        numer_dot=numer_dot, t=base.t,
    )
    c, s = np.cos(profile.theta), np.sin(profile.theta)
    g1 = base.g1 - controls.gx * c + controls.gz * s
    g2 = base.g2 + controls.gx * s + controls.gz * c
    corrected = ControlSchedule.sampled(
        base.t, g1, g2, source="custom", meta={**base.meta, "correction": "custom", "correction_kappa": kappa}
    )
    return CorrectedSchedule(base=base, corrected=corrected, dressing=dressing, controls=controls, kappa=kappa)


# -----------------------------
# Single control
# -----------------------------
def _angle_source(base: ControlSchedule) -> Callable[[ArrayLike], Tuple[Any, Any]]:
    """
    t -> (θ, θ̇) off-grid: closed form when available, spline otherwise.
    """
    if base.shape is not None and base.shape.analytic_derivatives:
        shape = base.shape

        def from_shape(t):
            g1, g2 = shape.values(t)
            d1, d2 = shape.derivatives(t)
            g0_sq = g1 * g1 + g2 * g2
            return np.arctan2(g1, g2), (g2 * d1 - g1 * d2) / g0_sq

        return from_shape

    spline = CubicSpline(base.t, np.column_stack([base.g1, base.g2]), axis=0)
    slope = spline.derivative()

    def from_spline(t):
        g = spline(t)
        d = slope(t)
        g1, g2, d1, d2 = g[..., 0], g[..., 1], d[..., 0], d[..., 1]
        return np.arctan2(g1, g2), (g2 * d1 - g1 * d2) / (g1 * g1 + g2 * g2)

    return from_spline


def mu_ode_numerator(mu, theta, theta_dot, g: float, kappa: float):
    """
    θ̇ cosθ cosμ − g sinμ + (κ/2) sinθ cosμ (1 − sin²θ cos²μ).
    """
    cos_mu = np.cos(mu)
    sin_t = np.sin(theta)
    return (
        theta_dot * np.cos(theta) * cos_mu
        - g * np.sin(mu)
        + 0.5 * kappa * sin_t * cos_mu * (1.0 - sin_t**2 * cos_mu**2)
    )


def mu_ode_rate(mu, theta, theta_dot, g: float, kappa: float):
    """μ̇ from μ̇ sinθ sinμ = numerator."""
    return mu_ode_numerator(mu, theta, theta_dot, g, kappa) / (np.sin(theta) * np.sin(mu))


def _splice_index(base: ControlSchedule, t_mid: float) -> int:
    idx = int(np.argmin(np.abs(base.t - t_mid)))
    if abs(base.t[idx] - t_mid) > 1e-9 * max(1.0, abs(t_mid)) + 1e-6 * base.dt:
        raise InvalidSpecError("splice time t0/2 must lie on the schedule grid")
    if idx < 2:
        raise InvalidSpecError("splice time too close to t_i")
    return idx


@dataclass(frozen=True, eq=False)
class SingleControlDressing:
    profile: DressingProfile
    solution: Any
    t_mid: float
    mu_start: float
    stats: Dict[str, Any]

    @property
    def mu_mid(self) -> float:
        return float(self.profile.mu[-1])


def single_control_start(theta_i: float, theta_dot_i: float, g: float, kappa: float) -> float:
    """
    Slaved start value: the root of the ODE numerator at t_i, so μ̇(t_i) stays finite.
    """
    if math.sin(theta_i) <= 0.0:
        raise SingularStartError("single-control dressing needs sin(theta(t_i)) > 0")

    def numer(mu: float) -> float:
        return float(mu_ode_numerator(mu, theta_i, theta_dot_i, g, kappa))

    upper = 0.5 * math.pi - 1e-9
    if not numer(0.0) > 0.0:
        raise SingularStartError("no positive slaved dressing: numerator does not change sign at t_i")
    mu0 = brentq(numer, 0.0, upper, xtol=1e-18, rtol=4 * np.finfo(float).eps, maxiter=500)
    residual = abs(numer(mu0))
    if residual > 1e-9 * max(g, abs(theta_dot_i), kappa):
        raise SingularStartError(f"slaved start residual {residual:.3e} above tolerance")
    return mu0


def single_control_fixed_point(theta: float, g: float, kappa: float) -> float:
    """
    Dressing the μ-ODE relaxes onto at constant θ (the pulse plateau). The
    relaxation rate there is ~ g/(sinθ sinμ), so μ(t₀/2) sits on this value.
    """
    def numer(mu: float) -> float:
        return float(mu_ode_numerator(mu, theta, 0.0, g, kappa))

    if not numer(0.0) > 0.0:
        return 0.0
    return brentq(numer, 0.0, 0.5 * math.pi - 1e-9, xtol=1e-18, rtol=4 * np.finfo(float).eps, maxiter=500)


def single_control_mu(
    base: ControlSchedule,
    g: float,
    kappa: float,
    *,
    t_mid: Optional[float] = None,
    mu_start: Optional[float] = None,
    method: Optional[str] = None,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> SingleControlDressing:
    """
    Integrate μ̇ sinθ sinμ = θ̇ cosθ cosμ − g sinμ + (κ/2) sinθ cosμ (1 − sin²θ cos²μ)
    from the slaved start value on [t_i, t₀/2].
    """
    if np.max(np.abs(base.g2 - g)) > 1e-12 * max(1.0, g):
        raise InvalidSpecError("single-control dressing requires G2(t) == g on the whole grid")
    if t_mid is None:
        if "t_mid" not in base.meta:
            raise InvalidSpecError("schedule has no splice time; pass t_mid explicitly")
        t_mid = float(base.meta["t_mid"])
    idx = _splice_index(base, t_mid)
    t_grid = base.t[: idx + 1]
    t_mid = float(t_grid[-1])

    angles = _angle_source(base)
    theta_i, theta_dot_i = (float(v) for v in angles(float(t_grid[0])))
    mu0 = single_control_start(theta_i, theta_dot_i, g, kappa) if mu_start is None else float(mu_start)

    def rhs(t, y):
        theta, theta_dot = angles(t)
        return [mu_ode_rate(y[0], theta, theta_dot, g, kappa)]

    method = method or settings.STA_MU_ODE_METHOD
    sol = solve_ivp(
        rhs,
        (float(t_grid[0]), t_mid),
        [mu0],
        method=method,
        t_eval=t_grid,
        dense_output=True,
        rtol=rtol or settings.STA_MU_ODE_RTOL,
        atol=atol or settings.STA_MU_ODE_ATOL,
    )
    if not sol.success:
        raise StiffnessError(f"dressing ODE failed: {sol.message}")
    step_min = float(np.min(np.diff(sol.sol.ts)))
    if step_min < settings.STA_DT_MIN:
        raise StiffnessError(f"dressing ODE step collapsed to {step_min:.3e}")

    mu = sol.y[0]
    if not np.all(np.isfinite(mu)) or np.any(mu <= 0.0):
        raise NonFiniteStateError("dressing ODE left the regular branch mu > 0")
    theta, theta_dot = angles(t_grid)
    mu_dot = mu_ode_rate(mu, theta, theta_dot, g, kappa)

    _check_boundary("t_i", mu0)
    stats = {
        "mu_start": mu0,
        "mu_mid": float(mu[-1]),
        "ode_method": method,
        "ode_steps": int(sol.sol.ts.size - 1),
        "ode_nfev": int(sol.nfev),
        "ode_step_min": step_min,
    }
    log_event(log, "single_control_mu", logging.DEBUG, **stats)
    return SingleControlDressing(
        profile=DressingProfile(t=t_grid, mu=mu, mu_dot=mu_dot, scheme="single_control"),
        solution=sol.sol,
        t_mid=t_mid,
        mu_start=mu0,
        stats=stats,
    )


class SingleControlShape(PulseShape):
    """
    G₁corr from the dressing solution up to t₀/2, A·G₁ afterwards; G₂ = g.
    """

    analytic_derivatives = False

    def __init__(
        self,
        base: ControlSchedule,
        solution: Any,
        g: float,
        kappa: float,
        t_mid: float,
        gain: float,
    ) -> None:
        self.base = base
        self.solution = solution
        self.g = float(g)
        self.kappa = float(kappa)
        self.t_mid = float(t_mid)
        self.gain = float(gain)
        self._angles = _angle_source(base)

    def values(self, t: ArrayLike) -> Tuple[Any, Any]:
        t = np.asarray(t, dtype=float)
        g1_base, _ = self.base.evaluate(t)
        left = np.minimum(t, self.t_mid)
        theta, theta_dot = self._angles(left)
        mu = np.reshape(self.solution(left), np.shape(left))
        mu_dot = mu_ode_rate(mu, theta, theta_dot, self.g, self.kappa)
        tilt = 0.25 * self.kappa * np.sin(theta) ** 2 * np.sin(2.0 * mu)
        g1_left = self.base.evaluate(left)[0] + (mu_dot - tilt) / np.cos(theta)
        g1 = np.where(t <= self.t_mid, g1_left, self.gain * g1_base)
        return g1, np.full_like(t, self.g)

    def describe(self) -> Dict[str, Any]:
        return {"kind": "single_control", "g": self.g, "kappa": self.kappa, "t_mid": self.t_mid, "gain": self.gain}


def single_control_schedule(
    base: ControlSchedule,
    g: float,
    kappa: float,
    **mu_options: Any,
) -> CorrectedSchedule:
    """
    G₁corr = G₁ + (μ̇ − κ/4 sin²θ sin2μ)/cosθ on [t_i, t₀/2], A·G₁ afterwards,
    with A fixed by continuity at t₀/2. G₂corr ≡ g.
    """
    dressing = single_control_mu(base, g, kappa, **mu_options)
    profile = dressing.profile
    n = profile.t.size

    angle = schedule_angle_profile(base)
    theta = angle.theta[:n]
    if np.max(theta) > 0.5 * math.pi - COS_THETA_GUARD:
        raise SingularityError("mixing angle reaches pi/2; single-control pulse formula is singular")

    tilt = 0.25 * kappa * np.sin(theta) ** 2 * np.sin(2.0 * profile.mu)
    g1_left = base.g1[:n] + (profile.mu_dot - tilt) / np.cos(theta)
    gain = float(g1_left[-1] / base.g1[n - 1])

    g1 = np.concatenate([g1_left, gain * base.g1[n:]])
    g2 = np.full_like(base.t, g)

    delta1 = g1 - base.g1
    c, s = np.cos(angle.theta), np.sin(angle.theta)
    controls = CorrectionControls(t=base.t, gx=-delta1 * c, gz=delta1 * s)

    meta = {**base.meta, "correction": "single_control", "correction_kappa": kappa, "splice_gain": gain}
    shape = SingleControlShape(base, dressing.solution, g, kappa, dressing.t_mid, gain)
    corrected = ControlSchedule(t=base.t, g1=g1, g2=g2, source="single_control", shape=shape, meta=meta)
    return CorrectedSchedule(
        base=base,
        corrected=corrected,
        dressing=profile,
        controls=controls,
        kappa=kappa,
        splice_gain=gain,
        splice_time=dressing.t_mid,
        stats=dict(dressing.stats),
    )


# -----------------------------
# Leakage
# -----------------------------
def _leakage(
    t: np.ndarray,
    angle: AngleProfile,
    n: int,
    kappa: float,
    mu: np.ndarray,
    mu_dot: np.ndarray,
    delta1: np.ndarray,
    delta2: np.ndarray,
    gamma: float,
) -> LeakageReport:
    theta = angle.theta[:n]
    c, s = np.cos(theta), np.sin(theta)
    # back-solve the frame controls from the lab-frame pulse changes
    gx = -delta1 * c + delta2 * s
    gz = delta1 * s + delta2 * c
    h = dressed_frame_hamiltonian(theta, angle.theta_dot[:n], angle.G0[:n], kappa, mu, mu_dot, gx, gz, gamma)
    c_plus, c_minus = leakage_elements(h)
    return LeakageReport(t=t[:n], c_plus=c_plus, c_minus=c_minus, gap_max=float(np.max(angle.G0)))


def leakage_profile(
    corrected: CorrectedSchedule,
    kappa: Optional[float] = None,
    gamma: float = 0.0,
) -> LeakageReport:
    """
    Leakage elements over the dressed region of a corrected schedule.

    kappa defaults to the value the correction was built for; pass the
    physical value to see what a κ-free correction leaves behind.
    """
    kappa = corrected.kappa if kappa is None else kappa
    n = corrected.dressed_span
    angle = schedule_angle_profile(corrected.base)
    return _leakage(
        corrected.base.t,
        angle,
        n,
        kappa,
        corrected.dressing.mu,
        corrected.dressing.mu_dot,
        corrected.corrected.g1[:n] - corrected.base.g1[:n],
        corrected.corrected.g2[:n] - corrected.base.g2[:n],
        gamma,
    )


def uncorrected_leakage(base: ControlSchedule, kappa: float, gamma: float = 0.0) -> LeakageReport:
    n = base.t.size
    zeros = np.zeros(n)
    return _leakage(base.t, schedule_angle_profile(base), n, kappa, zeros, zeros, zeros, zeros, gamma)

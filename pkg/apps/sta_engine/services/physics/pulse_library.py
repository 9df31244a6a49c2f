"""
Pulse Library (Canonical)
=========================

Purpose:
- The two uncorrected adiabatic protocol families:
  - constant-gap "optimal STIRAP" pulses, θ(t) = π/[2(1 + e^{−νt})]
  - tanh turn-on/turn-off pulse on G₁ with a constant G₂ = g
- Truncation of each family to a finite window by root-finding on the exact
  closed forms (G₁(t_i) = ε·reference).
- Angle profiles θ, θ̇, θ̈, G₀, Ġ₀ over any schedule.

Non-goals:
- Pulse-shape optimization. Arbitrary user pulses enter only through
  ControlSchedule.sampled, with no check of adiabatic suitability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .errors import InvalidSpecError, StepTooCoarseError
from .model_core import ArrayLike, ControlSchedule, PulseShape, mixing_angles, rms_gaps

# Points per fastest period used by the default step rule.
POINTS_PER_PERIOD = 200

# dt·ν above this is rejected.
MAX_STEP_FRACTION = 0.01

# Delay rule t₀ = −2 t_i + TANH_PLATEAU / ν.
TANH_PLATEAU = 5.0


# -----------------------------
# Specs
# -----------------------------
@dataclass(frozen=True)
class VitanovSpec:
    G0: float
    nu: float
    epsilon: float = 1e-3

    def __post_init__(self) -> None:
        if not self.G0 > 0:
            raise InvalidSpecError("VitanovSpec.G0 must be > 0")
        if not self.nu > 0:
            raise InvalidSpecError("VitanovSpec.nu must be > 0")
        if not 0 < self.epsilon < 1:
            raise InvalidSpecError("VitanovSpec.epsilon must lie in (0, 1)")

    def to_dict(self) -> Dict[str, Any]:
        return {"G0": self.G0, "nu": self.nu, "epsilon": self.epsilon}


@dataclass(frozen=True)
class TanhSpec:
    """
    G₁ = (Gmax/2)[tanh νt − tanh ν(t − t₀)], G₂ = g.

    t0=None selects the delay rule t₀ = −2t_i + 5/ν, solved self-consistently
    with the truncation condition.
    """

    Gmax: float
    g: float
    nu: float
    t0: Optional[float] = None
    epsilon: float = 1e-3

    def __post_init__(self) -> None:
        if not self.g > 0:
            raise InvalidSpecError("TanhSpec.g must be > 0")
        if not self.Gmax > self.g:
            raise InvalidSpecError("TanhSpec requires Gmax > g")
        if not self.nu > 0:
            raise InvalidSpecError("TanhSpec.nu must be > 0")
        if self.t0 is not None and not self.t0 > 0:
            raise InvalidSpecError("TanhSpec.t0 must be > 0")
        if not 0 < self.epsilon < 1:
            raise InvalidSpecError("TanhSpec.epsilon must lie in (0, 1)")
        if self.Gmax <= self.epsilon * self.g:
            raise InvalidSpecError("TanhSpec requires Gmax > epsilon * g")

    def to_dict(self) -> Dict[str, Any]:
        return {"Gmax": self.Gmax, "g": self.g, "nu": self.nu, "t0": self.t0, "epsilon": self.epsilon}


# -----------------------------
# Closed forms
# -----------------------------
class VitanovShape(PulseShape):
    def __init__(self, G0: float, nu: float) -> None:
        self.G0 = float(G0)
        self.nu = float(nu)

    def angle(self, t: ArrayLike) -> Tuple[Any, Any, Any]:
        s = expit(self.nu * np.asarray(t, dtype=float))
        theta = 0.5 * math.pi * s
        theta_dot = 0.5 * math.pi * self.nu * s * (1.0 - s)
        theta_ddot = 0.5 * math.pi * self.nu**2 * s * (1.0 - s) * (1.0 - 2.0 * s)
        return theta, theta_dot, theta_ddot

    def values(self, t: ArrayLike) -> Tuple[Any, Any]:
        theta, _, _ = self.angle(t)
        return self.G0 * np.sin(theta), self.G0 * np.cos(theta)

    def derivatives(self, t: ArrayLike) -> Tuple[Any, Any]:
        theta, theta_dot, _ = self.angle(t)
        return self.G0 * np.cos(theta) * theta_dot, -self.G0 * np.sin(theta) * theta_dot

    def second_derivatives(self, t: ArrayLike) -> Tuple[Any, Any]:
        theta, theta_dot, theta_ddot = self.angle(t)
        c, s = np.cos(theta), np.sin(theta)
        return (
            self.G0 * (c * theta_ddot - s * theta_dot**2),
            -self.G0 * (s * theta_ddot + c * theta_dot**2),
        )

    def describe(self) -> Dict[str, Any]:
        return {"kind": "vitanov", "G0": self.G0, "nu": self.nu}


class TanhShape(PulseShape):
    def __init__(self, Gmax: float, g: float, nu: float, t0: float) -> None:
        self.Gmax = float(Gmax)
        self.g = float(g)
        self.nu = float(nu)
        self.t0 = float(t0)

    def values(self, t: ArrayLike) -> Tuple[Any, Any]:
        t = np.asarray(t, dtype=float)
        g1 = 0.5 * self.Gmax * (np.tanh(self.nu * t) - np.tanh(self.nu * (t - self.t0)))
        return g1, np.full_like(t, self.g)

    def derivatives(self, t: ArrayLike) -> Tuple[Any, Any]:
        t = np.asarray(t, dtype=float)
        sa = 1.0 / np.cosh(self.nu * t) ** 2
        sb = 1.0 / np.cosh(self.nu * (t - self.t0)) ** 2
        return 0.5 * self.Gmax * self.nu * (sa - sb), np.zeros_like(t)

    def second_derivatives(self, t: ArrayLike) -> Tuple[Any, Any]:
        t = np.asarray(t, dtype=float)
        a = self.nu * t
        b = self.nu * (t - self.t0)
        d2 = self.Gmax * self.nu**2 * (np.tanh(b) / np.cosh(b) ** 2 - np.tanh(a) / np.cosh(a) ** 2)
        return d2, np.zeros_like(t)

    def describe(self) -> Dict[str, Any]:
        return {"kind": "tanh", "Gmax": self.Gmax, "g": self.g, "nu": self.nu, "t0": self.t0}


# -----------------------------
# Step + window helpers
# -----------------------------
def default_time_step(nu: float, kappa: float = 0.0, g_max: float = 0.0) -> float:
    """
    dt = min(1/(200ν), 1/(200κ), 1/(200 G₀max)) over the positive rates.
    """
    rates = [r for r in (nu, kappa, g_max) if r > 0]
    if not rates:
        raise InvalidSpecError("default_time_step needs at least one positive rate")
    return 1.0 / (POINTS_PER_PERIOD * max(rates))


def _check_step(dt: float, nu: float) -> None:
    if not dt > 0:
        raise InvalidSpecError("dt must be > 0")
    if dt * nu > MAX_STEP_FRACTION:
        raise StepTooCoarseError(f"dt*nu = {dt * nu:.3g} exceeds {MAX_STEP_FRACTION}")


def _uniform_grid(t_i: float, t_f: float, dt: float, *, even: bool = False) -> np.ndarray:
    n = int(math.ceil((t_f - t_i) / dt - 1e-9))
    n = max(n, 2)
    if even and n % 2:
        n += 1
    return np.linspace(t_i, t_f, n + 1)


def _bracket_below(f, upper: float, scale: float) -> float:
    # walk left from `upper` until f changes sign
    span = 10.0 * scale
    for _ in range(60):
        lower = upper - span
        if f(lower) < 0:
            return lower
        span *= 2.0
    raise InvalidSpecError("could not bracket the truncation time")


def vitanov_truncation_time(nu: float, epsilon: float = 1e-3) -> float:
    """
    t_f such that G₂(t_f) = ε G₀ (and, by symmetry, G₁(−t_f) = ε G₀).
    """
    shape = VitanovShape(1.0, nu)

    def residual(t: float) -> float:
        return float(np.sin(shape.angle(t)[0])) - epsilon

    if residual(0.0) <= 0:
        raise InvalidSpecError("epsilon must be below sin(pi/4) for a symmetric window")
    lower = _bracket_below(residual, 0.0, 1.0 / nu)
    t_i = brentq(residual, lower, 0.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return -t_i


def _tanh_turn_on(spec: TanhSpec, t0: float) -> float:
    shape = TanhShape(spec.Gmax, spec.g, spec.nu, t0)
    target = spec.epsilon * spec.g
    mid = 0.5 * t0

    def residual(t: float) -> float:
        return float(shape.values(t)[0]) - target

    if residual(mid) <= 0:
        raise InvalidSpecError("tanh pulse never exceeds epsilon*g; plateau missing")
    lower = _bracket_below(residual, mid, 1.0 / spec.nu)
    return brentq(residual, lower, mid, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def tanh_window(spec: TanhSpec, *, max_iter: int = 200) -> Tuple[float, float, float]:
    """
    (t_i, t_f, t₀). The pulse is symmetric about t₀/2, so t_f = t₀ − t_i.
    """
    if spec.t0 is not None:
        t0 = spec.t0
        if spec.nu * t0 <= 3.0:
            raise InvalidSpecError("tanh pulse needs nu*t0 > 3 for a plateau")
        t_i = _tanh_turn_on(spec, t0)
        return t_i, t0 - t_i, t0

    t0 = 2.0 * TANH_PLATEAU / spec.nu
    for _ in range(max_iter):
        t_i = _tanh_turn_on(spec, t0)
        t0_next = -2.0 * t_i + TANH_PLATEAU / spec.nu
        if abs(t0_next - t0) <= 1e-13 * max(1.0, abs(t0)):
            t0 = t0_next
            break
        t0 = t0_next
    else:
        raise InvalidSpecError("delay rule t0 = -2 t_i + 5/nu did not converge")
    t_i = _tanh_turn_on(spec, t0)
    return t_i, t0 - t_i, t0


# -----------------------------
# Schedules
# -----------------------------
def vitanov_schedule(spec: VitanovSpec, dt: Optional[float] = None, *, kappa: float = 0.0) -> ControlSchedule:
    if dt is None:
        dt = default_time_step(spec.nu, kappa, spec.G0)
    _check_step(dt, spec.nu)
    t_f = vitanov_truncation_time(spec.nu, spec.epsilon)
    shape = VitanovShape(spec.G0, spec.nu)
    grid = _uniform_grid(-t_f, t_f, dt)
    return ControlSchedule.from_shape(
        shape,
        grid,
        source="vitanov",
        meta={"protocol": "vitanov", **spec.to_dict()},
    )


def tanh_schedule(spec: TanhSpec, dt: Optional[float] = None, *, kappa: float = 0.0) -> ControlSchedule:
    """
    Even number of steps so that t₀/2 (the splice point) lies on the grid.
    """
    if dt is None:
        dt = default_time_step(spec.nu, kappa, spec.Gmax)
    _check_step(dt, spec.nu)
    t_i, t_f, t0 = tanh_window(spec)
    shape = TanhShape(spec.Gmax, spec.g, spec.nu, t0)
    grid = _uniform_grid(t_i, t_f, dt, even=True)
    return ControlSchedule.from_shape(
        shape,
        grid,
        source="tanh",
        meta={"protocol": "tanh", **spec.to_dict(), "t0": t0, "t_mid": 0.5 * t0},
    )


# -----------------------------
# Angle profiles
# -----------------------------
@dataclass(frozen=True, eq=False)
class AngleProfile:
    t: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    theta_ddot: np.ndarray
    G0: np.ndarray
    G0_dot: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta_max": float(np.max(self.theta)),
            "theta_dot_max": float(np.max(np.abs(self.theta_dot))),
            "G0_min": float(np.min(self.G0)),
            "G0_max": float(np.max(self.G0)),
        }


def angle_fields(g1, g2, dg1, dg2, ddg1, ddg2) -> Dict[str, Any]:
    """
    θ, θ̇, θ̈, G₀, Ġ₀ from couplings and their first two derivatives.
    Works on scalars and arrays alike.
    """
    G0_sq = g1 * g1 + g2 * g2
    G0 = np.sqrt(G0_sq)
    num = g2 * dg1 - g1 * dg2
    num_dot = g2 * ddg1 - g1 * ddg2
    cross = g1 * dg1 + g2 * dg2
    theta = np.arctan2(g1, g2)
    theta_dot = num / G0_sq
    theta_ddot = num_dot / G0_sq - 2.0 * num * cross / G0_sq**2
    return {
        "theta": theta,
        "theta_dot": theta_dot,
        "theta_ddot": theta_ddot,
        "G0": G0,
        "G0_dot": cross / G0,
    }


def schedule_angle_profile(schedule: ControlSchedule) -> AngleProfile:
    mixing_angles(schedule.g1, schedule.g2)  # raises on (0, 0)
    dg1, dg2 = schedule.derivatives()
    ddg1, ddg2 = schedule.second_derivatives()
    fields = angle_fields(schedule.g1, schedule.g2, dg1, dg2, ddg1, ddg2)
    return AngleProfile(
        t=schedule.t,
        theta=fields["theta"],
        theta_dot=fields["theta_dot"],
        theta_ddot=fields["theta_ddot"],
        G0=rms_gaps(schedule.g1, schedule.g2),
        G0_dot=fields["G0_dot"],
    )

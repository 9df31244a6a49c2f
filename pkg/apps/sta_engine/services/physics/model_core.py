"""
Model Core (Canonical)
======================

Purpose:
- Λ-system parameterization: couplings G₁ (A↔B), G₂ (B↔C), decay κ on C and
  optional incoherent decay Γ on B.
- Mixing angle θ = atan2(G₁, G₂) and RMS gap G₀ = √(G₁² + G₂²).
- Reduced non-Hermitian Hamiltonian H₁ in the {A, B, C} basis.
- ControlSchedule: the time-sampled (and optionally closed-form) pulse pair
  that every other module consumes.

Non-goals:
- Detunings, complex coupling phases, more than three discrete levels.

All value objects are immutable after construction and safe to hand to
worker processes.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from .errors import DegenerateInputError, InvalidSpecError

ArrayLike = Any

# Relative tolerance for the "uniform dt" check of sampled schedules.
_UNIFORM_RTOL = 1e-8


# -----------------------------
# Parameters and samples
# -----------------------------
@dataclass(frozen=True)
class ModelParams:
    """
    Decay rates of the Λ-system (angular-frequency units).
    """

    kappa: float
    gamma: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        self._validate()

    def _validate(self) -> None:
        if not math.isfinite(self.kappa) or self.kappa < 0:
            raise InvalidSpecError("kappa must be finite and >= 0")
        if not math.isfinite(self.gamma) or self.gamma < 0:
            raise InvalidSpecError("gamma must be finite and >= 0")

    def to_dict(self) -> Dict[str, Any]:
        return {"kappa": self.kappa, "gamma": self.gamma, "label": self.label}


@dataclass(frozen=True)
class ControlSample:
    t: float
    g1: float
    g2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g1) and math.isfinite(self.g2)):
            raise InvalidSpecError(f"non-finite coupling at t={self.t}")


@dataclass(frozen=True)
class SystemAmplitudes:
    """
    Discrete-system wavefunction u_A|A⟩ + u_B|B⟩ + u_C|C⟩.
    """

    uA: complex
    uB: complex
    uC: complex

    @classmethod
    def e_A(cls) -> "SystemAmplitudes":
        return cls(1.0 + 0j, 0j, 0j)

    @classmethod
    def e_B(cls) -> "SystemAmplitudes":
        return cls(0j, 1.0 + 0j, 0j)

    @classmethod
    def e_C(cls) -> "SystemAmplitudes":
        return cls(0j, 0j, 1.0 + 0j)

    @classmethod
    def from_array(cls, values: ArrayLike) -> "SystemAmplitudes":
        v = np.asarray(values, dtype=complex).reshape(3)
        return cls(complex(v[0]), complex(v[1]), complex(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.uA, self.uB, self.uC], dtype=complex)

    @property
    def norm(self) -> float:
        return float(abs(self.uA) ** 2 + abs(self.uB) ** 2 + abs(self.uC) ** 2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "uA": [self.uA.real, self.uA.imag],
            "uB": [self.uB.real, self.uB.imag],
            "uC": [self.uC.real, self.uC.imag],
            "norm": self.norm,
        }


# -----------------------------
# Angle + gap
# -----------------------------
def mixing_angle(sample: ControlSample) -> float:
    """
    θ with G₁ = G₀ sin θ and G₂ = G₀ cos θ.
    """
    if sample.g1 == 0.0 and sample.g2 == 0.0:
        raise DegenerateInputError(f"mixing angle undefined at t={sample.t}: both couplings vanish")
    if sample.g1 < 0.0 or sample.g2 < 0.0:
        raise InvalidSpecError(f"couplings must be non-negative at t={sample.t}")
    return math.atan2(sample.g1, sample.g2)


def rms_gap(sample: ControlSample) -> float:
    return math.hypot(sample.g1, sample.g2)


def mixing_angles(g1: ArrayLike, g2: ArrayLike) -> np.ndarray:
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    if np.any((g1 == 0.0) & (g2 == 0.0)):
        raise DegenerateInputError("mixing angle undefined where both couplings vanish")
    if np.any((g1 < 0.0) | (g2 < 0.0)):
        first = int(np.argmax((g1 < 0.0) | (g2 < 0.0)))
        raise InvalidSpecError(f"couplings must be non-negative (first violation at index {first})")
    return np.arctan2(g1, g2)


def rms_gaps(g1: ArrayLike, g2: ArrayLike) -> np.ndarray:
    return np.hypot(np.asarray(g1, dtype=float), np.asarray(g2, dtype=float))


# -----------------------------
# Hamiltonian
# -----------------------------
def h1_matrix(sample: ControlSample, params: ModelParams) -> np.ndarray:
    """
    Effective non-Hermitian Hamiltonian, basis order (A, B, C).
    """
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = sample.g1
    h[1, 2] = h[2, 1] = sample.g2
    h[1, 1] = -0.5j * params.gamma
    h[2, 2] = -0.5j * params.kappa
    return h


# -----------------------------
# Pulse shapes
# -----------------------------
class PulseShape(ABC):
    """
    Closed-form (G₁(t), G₂(t)) pair evaluated at arbitrary times.

    Shapes with `analytic_derivatives = False` only provide values; their
    schedules fall back to finite differences on the grid.
    """

    analytic_derivatives: bool = True

    @abstractmethod
    def values(self, t: ArrayLike) -> Tuple[Any, Any]:
        ...

    def derivatives(self, t: ArrayLike) -> Tuple[Any, Any]:
        raise NotImplementedError

    def second_derivatives(self, t: ArrayLike) -> Tuple[Any, Any]:
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        return {"kind": type(self).__name__}


# -----------------------------
# Schedule
# -----------------------------
@dataclass(frozen=True, eq=False)
class ControlSchedule:
    """
    Uniformly sampled pulse pair on the protocol window [t_i, t_f].

    Off-grid access (`evaluate`) uses the closed form when a shape is attached,
    otherwise a cubic spline through the samples. Outside the window the
    pulses are held at their endpoint values.
    """

    t: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    source: str = "sampled"
    shape: Optional[PulseShape] = field(default=None, repr=False)
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        object.__setattr__(self, "g1", np.asarray(self.g1, dtype=float))
        object.__setattr__(self, "g2", np.asarray(self.g2, dtype=float))
        self._validate()
        spline = None
        if self.shape is None:
            spline = CubicSpline(self.t, np.column_stack([self.g1, self.g2]), axis=0)
        object.__setattr__(self, "_spline", spline)

    def _validate(self) -> None:
        t = self.t
        if t.ndim != 1 or t.size < 3:
            raise InvalidSpecError("schedule needs at least three samples")
        if self.g1.shape != t.shape or self.g2.shape != t.shape:
            raise InvalidSpecError("g1/g2 must be sampled on the time grid")
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise InvalidSpecError("schedule times must be strictly increasing")
        dt = (t[-1] - t[0]) / (t.size - 1)
        tol = _UNIFORM_RTOL * dt + 8.0 * np.finfo(float).eps * float(np.max(np.abs(t)))
        if np.any(np.abs(steps - dt) > tol):
            raise InvalidSpecError("sampled schedules must use a uniform time step")
        if not (np.all(np.isfinite(self.g1)) and np.all(np.isfinite(self.g2))):
            raise InvalidSpecError("schedule contains non-finite couplings")

    # -----------------------------
    # Constructors
    # -----------------------------
    @classmethod
    def sampled(
        cls,
        t: ArrayLike,
        g1: ArrayLike,
        g2: ArrayLike,
        *,
        source: str = "sampled",
        meta: Optional[Dict[str, Any]] = None,
    ) -> "ControlSchedule":
        return cls(t=t, g1=g1, g2=g2, source=source, meta=dict(meta or {}))

    @classmethod
    def from_shape(
        cls,
        shape: PulseShape,
        t: ArrayLike,
        *,
        source: str,
        meta: Optional[Dict[str, Any]] = None,
    ) -> "ControlSchedule":
        t = np.asarray(t, dtype=float)
        g1, g2 = shape.values(t)
        return cls(
            t=t,
            g1=np.broadcast_to(g1, t.shape).copy(),
            g2=np.broadcast_to(g2, t.shape).copy(),
            source=source,
            shape=shape,
            meta=dict(meta or {}),
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, *, source: str = "sampled") -> "ControlSchedule":
        missing = {"t", "g1", "g2"} - set(frame.columns)
        if missing:
            raise InvalidSpecError(f"schedule frame missing columns: {sorted(missing)}")
        return cls.sampled(frame["t"].to_numpy(), frame["g1"].to_numpy(), frame["g2"].to_numpy(), source=source)

    # -----------------------------
    # Accessors
    # -----------------------------
    @property
    def window(self) -> Tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    @property
    def dt(self) -> float:
        return float((self.t[-1] - self.t[0]) / (self.t.size - 1))

    @property
    def is_closed_form(self) -> bool:
        return self.shape is not None

    def samples(self) -> List[ControlSample]:
        return [ControlSample(float(a), float(b), float(c)) for a, b, c in zip(self.t, self.g1, self.g2)]

    def evaluate(self, t: ArrayLike) -> Tuple[Any, Any]:
        """
        (G₁, G₂) at arbitrary times, held at endpoint values outside the window.
        """
        tc = np.clip(t, self.t[0], self.t[-1])
        if self.shape is not None:
            return self.shape.values(tc)
        vals = self._spline(tc)
        return vals[..., 0], vals[..., 1]

    def derivatives(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        (Ġ₁, Ġ₂) on the grid: analytic for closed forms, centered differences
        (second-order one-sided at the endpoints) otherwise.
        """
        if self.shape is not None and self.shape.analytic_derivatives:
            d1, d2 = self.shape.derivatives(self.t)
            return np.broadcast_to(d1, self.t.shape).copy(), np.broadcast_to(d2, self.t.shape).copy()
        dt = self.dt
        return (
            np.gradient(self.g1, dt, edge_order=2),
            np.gradient(self.g2, dt, edge_order=2),
        )

    def second_derivatives(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.shape is not None and self.shape.analytic_derivatives:
            d1, d2 = self.shape.second_derivatives(self.t)
            return np.broadcast_to(d1, self.t.shape).copy(), np.broadcast_to(d2, self.t.shape).copy()
        d1, d2 = self.derivatives()
        dt = self.dt
        return np.gradient(d1, dt, edge_order=2), np.gradient(d2, dt, edge_order=2)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "g1": self.g1, "g2": self.g2})

    def describe(self) -> Dict[str, Any]:
        t_i, t_f = self.window
        out: Dict[str, Any] = {
            "source": self.source,
            "t_i": t_i,
            "t_f": t_f,
            "dt": self.dt,
            "samples": int(self.t.size),
        }
        if self.shape is not None:
            out["shape"] = self.shape.describe()
        out.update(self.meta)
        return out

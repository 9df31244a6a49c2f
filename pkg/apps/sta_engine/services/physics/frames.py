"""
Frames (Canonical)
==================

Purpose:
- Adiabatic eigenbasis of the closed Λ-system and its frame Hamiltonian.
- Dressing unitary V(μ) = exp(iμX) and the dressed-frame Hamiltonian
  H̃ = V†(H₁,ad + H_cor,ad)V − iV†V̇.
- Leakage elements ⟨±̃|H̃|d̃k⟩ whose vanishing means the dressed dark state
  is followed exactly.

Conventions:
- Basis ordering (+, −, dk) in every adiabatic/dressed matrix.
- dark   = cosθ e_A − sinθ e_C
- bright = sinθ e_A + cosθ e_C
- plus   = −(bright + e_B)/√2, minus = −(bright − e_B)/√2
  This phase makes (|+⟩+|−⟩)/√2 = −bright and (|+⟩−|−⟩)/√2 = −e_B, which is
  the phase under which the frame Hamiltonian carries −i(θ̇ + κ/4 sin2θ) on
  the s→dk element.

Everything here is vectorised: scalar inputs give (3, 3) matrices, arrays of
shape (n,) give (n, 3, 3) stacks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd

from .errors import InvalidSpecError
from .model_core import ArrayLike

SQRT_HALF = np.sqrt(0.5)

# (+, −, dk) coordinates of the symmetric/antisymmetric bright combinations.
S_VEC = np.array([SQRT_HALF, SQRT_HALF, 0.0])
A_VEC = np.array([SQRT_HALF, -SQRT_HALF, 0.0])
D_VEC = np.array([0.0, 0.0, 1.0])

# X = (|+⟩ − |−⟩)/√2 ⟨dk| + h.c.; Z = |+⟩⟨+| − |−⟩⟨−|
X_OP = np.outer(A_VEC, D_VEC) + np.outer(D_VEC, A_VEC)
Z_OP = np.diag([1.0, -1.0, 0.0])
X_SQ = X_OP @ X_OP

_SS = np.outer(S_VEC, S_VEC)
_AA = np.outer(A_VEC, A_VEC)
_DD = np.outer(D_VEC, D_VEC)
_SD = np.outer(S_VEC, D_VEC)
_DS = np.outer(D_VEC, S_VEC)
_SA = np.outer(S_VEC, A_VEC)
_AS = np.outer(A_VEC, S_VEC)
_AD = np.outer(A_VEC, D_VEC)
_DA = np.outer(D_VEC, A_VEC)

DRESSING_SCHEMES = ("satd_kappa", "single_control", "custom")


def _c(coeff: ArrayLike) -> np.ndarray:
    return np.asarray(coeff)[..., None, None]


# -----------------------------
# Adiabatic basis
# -----------------------------
@dataclass(frozen=True, eq=False)
class AdiabaticBasis:
    dark: np.ndarray
    plus: np.ndarray
    minus: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """Columns (plus, minus, dark) in the {A, B, C} basis."""
        return np.column_stack([self.plus, self.minus, self.dark])


def adiabatic_unitary(theta: ArrayLike) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    u = np.zeros(theta.shape + (3, 3))
    # plus
    u[..., 0, 0] = -SQRT_HALF * s
    u[..., 1, 0] = -SQRT_HALF
    u[..., 2, 0] = -SQRT_HALF * c
    # minus
    u[..., 0, 1] = -SQRT_HALF * s
    u[..., 1, 1] = SQRT_HALF
    u[..., 2, 1] = -SQRT_HALF * c
    # dark
    u[..., 0, 2] = c
    u[..., 2, 2] = -s
    return u


def adiabatic_basis(theta: float) -> AdiabaticBasis:
    if not -1e-12 <= theta <= 0.5 * np.pi + 1e-12:
        raise InvalidSpecError(f"theta={theta} outside [0, pi/2]")
    u = adiabatic_unitary(theta)
    return AdiabaticBasis(dark=u[:, 2].copy(), plus=u[:, 0].copy(), minus=u[:, 1].copy())


# -----------------------------
# Dressing
# -----------------------------
def dressing_unitary(mu: ArrayLike) -> np.ndarray:
    """
    V = I + i sinμ X + (cosμ − 1) X², using X³ = X.
    """
    mu = np.asarray(mu, dtype=float)
    return np.eye(3) + 1j * _c(np.sin(mu)) * X_OP + _c(np.cos(mu) - 1.0) * X_SQ


def dressing_unitary_derivative(mu: ArrayLike, mu_dot: ArrayLike) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    return _c(mu_dot) * (1j * _c(np.cos(mu)) * X_OP - _c(np.sin(mu)) * X_SQ)


def dressed_basis_lab(theta: ArrayLike, mu: ArrayLike) -> np.ndarray:
    """
    Columns (+̃, −̃, d̃k) expressed in the {A, B, C} basis.
    """
    return adiabatic_unitary(theta) @ dressing_unitary(mu)


# -----------------------------
# Frame Hamiltonians
# -----------------------------
def h1_adiabatic(
    theta: ArrayLike,
    theta_dot: ArrayLike,
    G0: ArrayLike,
    kappa: float,
    gamma: float = 0.0,
) -> np.ndarray:
    """
    U_ad† H₁ U_ad − i U_ad† U̇_ad in closed form, ordering (+, −, dk).
    """
    theta = np.asarray(theta, dtype=float)
    k = 0.25 * kappa * np.sin(2.0 * theta)
    h = (
        _c(G0) * Z_OP
        - 0.5j * kappa * _c(np.sin(theta) ** 2) * _DD
        - 0.5j * kappa * _c(np.cos(theta) ** 2) * _SS
        - 1j * _c(theta_dot + k) * _SD
        - 1j * _c(k - theta_dot) * _DS
    )
    if gamma:
        h = h - 0.5j * gamma * _AA
    return h


def h1_adiabatic_transform(
    theta: float,
    theta_dot: float,
    G0: float,
    kappa: float,
    gamma: float = 0.0,
    *,
    step: float = 1e-5,
) -> np.ndarray:
    """
    Same matrix built numerically from h1_matrix with a centered-difference U̇_ad.
    """
    u = adiabatic_unitary(theta)
    u_dot = (adiabatic_unitary(theta + step) - adiabatic_unitary(theta - step)) / (2.0 * step) * theta_dot
    h_lab = np.zeros((3, 3), dtype=complex)
    h_lab[0, 1] = h_lab[1, 0] = G0 * np.sin(theta)
    h_lab[1, 2] = h_lab[2, 1] = G0 * np.cos(theta)
    h_lab[1, 1] = -0.5j * gamma
    h_lab[2, 2] = -0.5j * kappa
    return u.T @ h_lab @ u - 1j * (u.T @ u_dot)


def correction_hamiltonian(gx: ArrayLike, gz: ArrayLike) -> np.ndarray:
    return _c(gx) * X_OP + _c(gz) * Z_OP


def dressed_frame_hamiltonian(
    theta: ArrayLike,
    theta_dot: ArrayLike,
    G0: ArrayLike,
    kappa: float,
    mu: ArrayLike,
    mu_dot: ArrayLike,
    gx: ArrayLike,
    gz: ArrayLike,
    gamma: float = 0.0,
) -> np.ndarray:
    v = dressing_unitary(mu)
    v_dag = np.conj(np.swapaxes(v, -1, -2))
    v_dot = dressing_unitary_derivative(mu, mu_dot)
    h = h1_adiabatic(theta, theta_dot, G0, kappa, gamma) + correction_hamiltonian(gx, gz)
    return v_dag @ h @ v - 1j * (v_dag @ v_dot)


def dressed_frame_closed_form(
    theta: ArrayLike,
    theta_dot: ArrayLike,
    G0: ArrayLike,
    kappa: float,
    mu: ArrayLike,
    mu_dot: ArrayLike,
    gx: ArrayLike,
    gz: ArrayLike,
) -> np.ndarray:
    """
    Expanded dressed-frame matrix (Γ = 0), term by term.

    Written on the s̃ = (|+̃⟩+|−̃⟩)/√2, ã = (|+̃⟩−|−̃⟩)/√2, d̃k projectors and
    returned in (+̃, −̃, d̃k) ordering.
    """
    theta = np.asarray(theta, dtype=float)
    mu = np.asarray(mu, dtype=float)
    sin_t2 = np.sin(theta) ** 2
    k = 0.25 * kappa * np.sin(2.0 * theta)
    cm, sm = np.cos(mu), np.sin(mu)
    gap = G0 + np.asarray(gz)
    sym = cm * gap + sm * theta_dot
    skew = sm * k
    tilt = 0.25 * kappa * sin_t2 * np.sin(2.0 * mu)
    return (
        _c(sym + skew) * _SA
        + _c(sym - skew) * _AS
        - 0.5j * kappa * _c(np.cos(theta) ** 2) * _SS
        - 0.5j * kappa * _c(sin_t2 * sm**2) * _AA
        - 0.5j * kappa * _c(sin_t2 * cm**2) * _DD
        + 1j * _c(gap * sm - (theta_dot + k) * cm) * _SD
        - 1j * _c(gap * sm + (k - theta_dot) * cm) * _DS
        + _c(gx + mu_dot - tilt) * _AD
        + _c(gx + mu_dot + tilt) * _DA
    )


def leakage_elements(h_dressed: np.ndarray) -> Tuple[Any, Any]:
    """
    (⟨+̃|H̃|d̃k⟩, ⟨−̃|H̃|d̃k⟩). The reverse elements are not required to vanish.
    """
    return h_dressed[..., 0, 2], h_dressed[..., 1, 2]


# -----------------------------
# Dressing profile
# -----------------------------
@dataclass(frozen=True, eq=False)
class DressingProfile:
    t: np.ndarray
    mu: np.ndarray
    mu_dot: np.ndarray
    scheme: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))
        object.__setattr__(self, "mu_dot", np.asarray(self.mu_dot, dtype=float))
        self._validate()

    def _validate(self) -> None:
        if self.scheme not in DRESSING_SCHEMES:
            raise InvalidSpecError(f"unknown dressing scheme '{self.scheme}'")
        if self.mu.shape != self.t.shape or self.mu_dot.shape != self.t.shape:
            raise InvalidSpecError("dressing profile arrays must share the time grid")
        if not (np.all(np.isfinite(self.mu)) and np.all(np.isfinite(self.mu_dot))):
            raise InvalidSpecError("dressing profile contains non-finite values")

    @classmethod
    def zero(cls, t: ArrayLike) -> "DressingProfile":
        t = np.asarray(t, dtype=float)
        return cls(t=t, mu=np.zeros_like(t), mu_dot=np.zeros_like(t), scheme="custom")

    @property
    def boundary_values(self) -> Tuple[float, float]:
        return float(self.mu[0]), float(self.mu[-1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "mu": self.mu, "mu_dot": self.mu_dot})

    def to_dict(self) -> Dict[str, Any]:
        mu_i, mu_f = self.boundary_values
        return {
            "scheme": self.scheme,
            "mu_start": mu_i,
            "mu_end": mu_f,
            "mu_max": float(np.max(np.abs(self.mu))),
        }

"""
Stepping driver around scipy's OdeSolver classes.

solve_ivp hides the per-step loop; here the loop is explicit so that every
accepted step can be checked (finite state, step floor, early stop) and the
step statistics can be reported with the trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.integrate import BDF, DOP853, RK23, RK45, Radau

from apps.sta_engine.config.settings import settings

from .errors import InvalidSpecError, NonFiniteStateError, ToleranceNotMetError

SOLVERS = {
    "RK45": RK45,
    "RK23": RK23,
    "DOP853": DOP853,
    "Radau": Radau,
    "BDF": BDF,
}


@dataclass
class DriveResult:
    t: np.ndarray
    y: np.ndarray
    t_end: float
    y_end: np.ndarray
    stopped: bool
    stats: Dict[str, Any] = field(default_factory=dict)


def _rejected_steps(solver_cls: type, nfev: int, accepted: int) -> Optional[int]:
    n_stages = getattr(solver_cls, "n_stages", None)
    if not n_stages:
        return None
    # one evaluation at t0, one in the initial-step heuristic, n_stages per attempt
    attempts = (nfev - 2) // n_stages
    return max(int(attempts) - accepted, 0)


def drive(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: np.ndarray,
    t_bound: float,
    *,
    t_eval: np.ndarray,
    method: str = "RK45",
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_step: float = np.inf,
    dt_min: Optional[float] = None,
    stop: Optional[Callable[[float, np.ndarray], bool]] = None,
) -> DriveResult:
    """
    Integrate y' = fun(t, y) from t0 to t_bound, sampling the dense output at
    t_eval (sorted, within [t0, t_bound]). `stop(t, y)` is checked after
    every accepted step and ends the run early when it returns True.
    """
    solver_cls = SOLVERS.get(method)
    if solver_cls is None:
        raise InvalidSpecError(f"unknown integrator '{method}'")
    dt_min = settings.STA_DT_MIN if dt_min is None else dt_min

    y0 = np.asarray(y0)
    t_eval = np.asarray(t_eval, dtype=float)
    out = np.empty((t_eval.size, y0.size), dtype=y0.dtype)

    k = 0
    while k < t_eval.size and t_eval[k] <= t0:
        out[k] = y0
        k += 1

    solver = solver_cls(fun, t0, y0, t_bound, rtol=rtol, atol=atol, max_step=max_step)
    accepted = 0
    stopped = False
    h_min = np.inf
    while solver.status == "running":
        t_old = solver.t
        message = solver.step()
        if solver.status == "failed":
            raise ToleranceNotMetError(f"integrator failed at t={t_old:.6g}: {message}")
        accepted += 1
        if accepted > settings.STA_MAX_STEPS:
            raise ToleranceNotMetError(f"more than {settings.STA_MAX_STEPS} steps")
        if not np.all(np.isfinite(solver.y)):
            raise NonFiniteStateError(f"non-finite state at t={solver.t:.6g}")

        h = solver.t - t_old
        h_min = min(h_min, h)
        if h < dt_min and solver.status == "running":
            raise ToleranceNotMetError(f"step collapsed to {h:.3e} at t={solver.t:.6g}")

        if k < t_eval.size and t_eval[k] <= solver.t:
            dense = solver.dense_output()
            j = k + int(np.searchsorted(t_eval[k:], solver.t, side="right"))
            out[k:j] = dense(t_eval[k:j]).T
            k = j

        if stop is not None and stop(solver.t, solver.y):
            stopped = True
            break

    stats = {
        "method": method,
        "rtol": rtol,
        "atol": atol,
        "steps": accepted,
        "rejected": _rejected_steps(solver_cls, solver.nfev, accepted),
        "nfev": int(solver.nfev),
        "step_min": float(h_min) if accepted else None,
    }
    return DriveResult(
        t=t_eval[:k],
        y=out[:k],
        t_end=float(solver.t),
        y_end=np.array(solver.y, copy=True),
        stopped=stopped,
        stats=stats,
    )

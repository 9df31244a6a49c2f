"""
Experiment Configuration (Canonical)
====================================

Purpose:
- Schema for one reviewable experiment file (YAML or JSON): protocol(s),
  physical parameters, ν sweep, numerics, optional continuum-oracle grids and
  output options.
- Every field is validated before any run; unknown keys are rejected.

Non-goals:
- Process-level knobs (logging, solver guard rails). Those live in
  config.settings and come from the environment.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from apps.sta_engine.services.physics.errors import ConfigError

SCHEMA_VERSION = 1

ProtocolName = Literal[
    "vitanov_uncorrected",
    "vitanov_satd",
    "vitanov_satd_kappa",
    "tanh_uncorrected",
    "tanh_corrected",
]

PROTOCOLS = (
    "vitanov_uncorrected",
    "vitanov_satd",
    "vitanov_satd_kappa",
    "tanh_uncorrected",
    "tanh_corrected",
)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ===== Sections =====
class PhysicsConfig(_Strict):
    """Rates in units of κ, times in units of 1/κ."""

    kappa: float = Field(1.0, ge=0)
    gamma: float = Field(0.0, ge=0)
    G0: float = Field(1.0, gt=0)
    epsilon: float = Field(1e-3, gt=0, lt=1)
    Gmax: float = Field(30.0, gt=0)
    g: float = Field(6.0, gt=0)
    t0: Optional[float] = Field(None, gt=0)
    label: str = ""


class LogRange(_Strict):
    start: float = Field(0.1, gt=0)
    stop: float = Field(10.0, gt=0)
    points: int = Field(25, ge=0)

    def values(self) -> List[float]:
        if self.points == 0:
            return []
        if self.points == 1:
            return [float(self.start)]
        return [float(v) for v in np.logspace(np.log10(self.start), np.log10(self.stop), self.points)]


class SweepConfig(_Strict):
    nu: Optional[List[float]] = None
    log_range: Optional[LogRange] = None

    @field_validator("nu")
    @classmethod
    def _positive(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and any(not x > 0 for x in v):
            raise ValueError("every nu must be > 0")
        return v

    @model_validator(mode="after")
    def _one_source(self) -> "SweepConfig":
        if self.nu is not None and self.log_range is not None:
            raise ValueError("give either nu or log_range, not both")
        return self

    def values(self) -> List[float]:
        if self.nu is not None:
            return [float(v) for v in self.nu]
        return (self.log_range or LogRange()).values()


class TailConfig(_Strict):
    enabled: bool = True
    max_length: float = Field(50.0, gt=0)
    tolerance: float = Field(1e-14, gt=0)


class NumericsConfig(_Strict):
    dt: Optional[float] = Field(None, gt=0)
    rtol: float = Field(1e-10, gt=0)
    atol: float = Field(1e-12, gt=0)
    method: Literal["RK45", "RK23", "DOP853", "Radau", "BDF"] = "RK45"
    tail: TailConfig = Field(default_factory=TailConfig)
    initial_state: Literal["A", "dressed_dark"] = "A"
    # "limit": F after the free-decay tail; "window_end": F(t_f)
    fidelity_at: Literal["limit", "window_end"] = "limit"


class GridConfig(_Strict):
    omega_max: float = Field(..., gt=0)
    n_modes: int = Field(..., ge=2)


class OracleConfig(_Strict):
    grids: List[GridConfig] = Field(default_factory=list)
    protocol: Optional[ProtocolName] = None
    nu: float = Field(1.0, gt=0)
    dt: float = Field(0.01, gt=0)
    scheme: Literal["cf4", "midpoint"] = "cf4"
    total_time: Optional[float] = Field(None, gt=0)


class OutputConfig(_Strict):
    directory: Optional[str] = None
    format: Literal["csv"] = "csv"
    write_trajectories: bool = True
    trajectory_stride: int = Field(10, ge=1)


class ExperimentConfig(_Strict):
    version: int
    protocol: Union[ProtocolName, List[ProtocolName]]
    physics: PhysicsConfig = Field(default_factory=PhysicsConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    oracle: Optional[OracleConfig] = None
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("version")
    @classmethod
    def _known_version(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported config version {v} (expected {SCHEMA_VERSION})")
        return v

    @model_validator(mode="after")
    def _protocol_inputs(self) -> "ExperimentConfig":
        if isinstance(self.protocol, list) and not self.protocol:
            raise ValueError("protocol list is empty")
        if any(p.startswith("tanh") for p in self.protocols) and not self.physics.Gmax > self.physics.g:
            raise ValueError("tanh protocols require physics.Gmax > physics.g")
        return self

    @property
    def protocols(self) -> List[str]:
        return list(self.protocol) if isinstance(self.protocol, list) else [self.protocol]

    @property
    def nu_values(self) -> List[float]:
        return self.sweep.values()

    def dump(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


# ===== Loading =====
def _field_path(loc) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def parse_config(data: Any) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        details = "; ".join(f"{_field_path(err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigError(details) from None


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from None
    return parse_config(data)

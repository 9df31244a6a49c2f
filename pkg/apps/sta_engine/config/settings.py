"""
Runtime Settings (Canonical)
============================

Purpose:
- Process-level knobs read from the environment (and an optional .env file).
- Numerical guard rails shared by every module (μ-ODE solver, step floors).
- Output formatting that must stay fixed for byte-identical reruns.

Non-goals:
- Per-experiment physics parameters. Those live in config.experiment and are
  validated from a reviewable YAML/JSON file.
"""

from __future__ import annotations

from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=True,
    )

    STA_VERSION: str = "1.0.0"

    # -----------------------------
    # Logging
    # -----------------------------
    STA_LOG_LEVEL: str = "INFO"
    STA_LOG_FORMAT: Literal["text", "json"] = "text"

    # -----------------------------
    # Execution
    # -----------------------------
    STA_THREADS: int = 1
    STA_RESULTS_DIR: str = "results"

    # -----------------------------
    # Single-control dressing ODE
    # -----------------------------
    STA_MU_ODE_METHOD: str = "Radau"
    STA_MU_ODE_RTOL: float = 1e-12
    STA_MU_ODE_ATOL: float = 1e-15
    STA_MU_BOUNDARY_TOL: float = 1e-5
    STA_MU_BOUNDARY_STRICT: bool = False

    # -----------------------------
    # Integrator guard rails
    # -----------------------------
    STA_DT_MIN: float = 1e-13
    STA_MAX_STEPS: int = 5_000_000

    # -----------------------------
    # Output
    # -----------------------------
    STA_CSV_FLOAT_FORMAT: str = "%.12e"
    STA_ORACLE_CHUNK: int = 512


settings = Settings()

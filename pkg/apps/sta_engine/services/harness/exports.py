"""
Result files: CSV tables with a fixed float format, and the run manifest.

Reruns of the same config must produce byte-identical files, so every table
goes through write_table and the manifest carries no timestamps.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from apps.sta_engine.config.settings import settings
from apps.sta_engine.services.admin.observability import system_snapshot

RESULTS_FILE = "results.csv"
MANIFEST_FILE = "manifest.json"
TRAJECTORY_DIR = "trajectories"
MODE_DIR = "modes"


def resolve_directory(configured: Optional[str], override: Optional[Union[str, Path]] = None) -> Path:
    if override is not None:
        return Path(override)
    return Path(configured or settings.STA_RESULTS_DIR)


def point_stem(protocol: str, nu: float) -> str:
    return f"{protocol}_nu{nu:.6e}"


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=settings.STA_CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def write_manifest(directory: Union[str, Path], config: Dict[str, Any], **extra: Any) -> Path:
    path = Path(directory) / MANIFEST_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"config": config, "system": system_snapshot(), **extra}
    path.write_text(json.dumps(body, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path

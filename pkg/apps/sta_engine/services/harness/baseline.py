"""
Regression check of a results table against a stored baseline results.csv.

Records are matched on (protocol, ν rounded to 10 significant digits) and
compared on final_fidelity and infidelity with a relative tolerance plus a
small absolute floor for values at round-off level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from apps.sta_engine.services.admin.logger import log_event
from apps.sta_engine.services.harness.exports import RESULTS_FILE
from apps.sta_engine.services.physics.errors import ConfigError, MissingBaselineError

log = logging.getLogger("sta.harness")

COMPARED = ("final_fidelity", "infidelity")
KEY_DIGITS = 10


@dataclass(frozen=True)
class Mismatch:
    protocol: str
    nu: float
    column: str
    current: float
    baseline: float

    @property
    def relative(self) -> float:
        scale = max(abs(self.current), abs(self.baseline))
        return abs(self.current - self.baseline) / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class ComparisonReport:
    checked: int
    mismatches: List[Mismatch] = field(default_factory=list)
    missing: List[Tuple[str, float]] = field(default_factory=list)
    rtol: float = 1e-6
    atol: float = 1e-12

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.missing

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "rtol": self.rtol,
            "atol": self.atol,
            "mismatches": [
                {"protocol": m.protocol, "nu": m.nu, "column": m.column,
                 "current": m.current, "baseline": m.baseline, "relative": m.relative}
                for m in self.mismatches
            ],
            "missing": [{"protocol": p, "nu": nu} for p, nu in self.missing],
        }


def _key(protocol: str, nu: float) -> Tuple[str, float]:
    return str(protocol), float(f"{float(nu):.{KEY_DIGITS - 1}e}")


def _read(source: Union[str, Path, pd.DataFrame], *, baseline: bool) -> pd.DataFrame:
    if isinstance(source, pd.DataFrame):
        return source
    path = Path(source)
    if path.is_dir():
        path = path / RESULTS_FILE
    if not path.is_file():
        if baseline:
            raise MissingBaselineError(f"baseline not found: {path}")
        raise ConfigError(f"results not found: {path}")
    return pd.read_csv(path)


def compare_with_baseline(
    results: Union[str, Path, pd.DataFrame],
    baseline: Union[str, Path, pd.DataFrame],
    *,
    rtol: float = 1e-6,
    atol: float = 1e-12,
) -> ComparisonReport:
    current = _read(results, baseline=False)
    reference = _read(baseline, baseline=True)
    missing_cols = [c for c in ("protocol", "nu", *COMPARED) if c not in reference.columns]
    if missing_cols:
        raise ConfigError(f"baseline lacks columns: {', '.join(missing_cols)}")

    ref_rows = {_key(r["protocol"], r["nu"]): r for r in reference.to_dict("records")}
    mismatches: List[Mismatch] = []
    missing: List[Tuple[str, float]] = []
    checked = 0
    for row in current.to_dict("records"):
        key = _key(row["protocol"], row["nu"])
        ref = ref_rows.get(key)
        if ref is None:
            missing.append(key)
            continue
        checked += 1
        for column in COMPARED:
            a, b = float(row[column]), float(ref[column])
            if np.isnan(a) and np.isnan(b):
                continue
            if not np.isclose(a, b, rtol=rtol, atol=atol):
                mismatches.append(Mismatch(key[0], key[1], column, a, b))

    report = ComparisonReport(checked=checked, mismatches=mismatches, missing=missing, rtol=rtol, atol=atol)
    log_event(
        log, "baseline_compared", logging.INFO if report.passed else logging.WARNING,
        checked=checked, mismatches=len(mismatches), missing=len(missing),
    )
    return report

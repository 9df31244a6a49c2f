"""
Experiment Runner (Canonical)
=============================

Purpose:
- Build any configured protocol at a given ν (base pulses + correction).
- Simulate single points and whole ν sweeps; one ResultRecord per
  (protocol, ν), gathered in input order.
- Report services: μ(t) profiles of the single-control dressing and the
  continuum-oracle convergence table.

Rules:
- Per-point StaErrors are recorded on the record (status="failed") and never
  abort a sweep.
- Workers only compute. All files are written by the calling process, in
  input order, so serial and parallel sweeps write identical bytes.

Non-goals:
- Plot rendering, distribution across machines.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from apps.sta_engine.config.experiment import ExperimentConfig, PhysicsConfig
from apps.sta_engine.config.settings import settings
from apps.sta_engine.services.admin.logger import log_event
from apps.sta_engine.services.harness import exports
from apps.sta_engine.services.physics.continuum_oracle import build_grid, markovian_deviation
from apps.sta_engine.services.physics.dynamics import (
    TailSettings,
    Trajectory,
    fidelity_at,
    fidelity_final,
    mode_frame,
    propagate,
    trajectory_frame,
)
from apps.sta_engine.services.physics.errors import ConfigError, InvalidSpecError, StaError, ToleranceNotMetError
from apps.sta_engine.services.physics.frames import dressed_basis_lab
from apps.sta_engine.services.physics.model_core import ControlSchedule, ModelParams, SystemAmplitudes
from apps.sta_engine.services.physics.pulse_library import (
    TanhSpec,
    VitanovSpec,
    schedule_angle_profile,
    tanh_schedule,
    vitanov_schedule,
)
from apps.sta_engine.services.physics.sta_synthesis import (
    CorrectedSchedule,
    LeakageReport,
    leakage_profile,
    satd_kappa_schedule,
    satd_schedule,
    single_control_fixed_point,
    single_control_mu,
    single_control_schedule,
    uncorrected_leakage,
)

log = logging.getLogger("sta.harness")

INFIDELITY_FLOOR = -1e-12

# Extra free-decay time appended to the protocol window for oracle runs (1/κ units).
ORACLE_TAIL = 10.0


# ===== Records =====
@dataclass(frozen=True)
class ResultRecord:
    protocol: str
    nu: float
    final_fidelity: float = float("nan")
    infidelity: float = float("nan")
    max_pop_b: float = float("nan")
    leakage_max: float = float("nan")
    runtime: float = 0.0
    status: str = "ok"
    error: str = ""
    trajectory_file: str = ""
    mode_file: str = ""

    def to_row(self) -> Dict[str, Any]:
        # runtime stays out of results.csv
        row = asdict(self)
        row.pop("runtime")
        return row


@dataclass(frozen=True, eq=False)
class ProtocolBuild:
    protocol: str
    nu: float
    params: ModelParams
    base: ControlSchedule
    corrected: Optional[CorrectedSchedule]
    leakage: LeakageReport

    @property
    def schedule(self) -> ControlSchedule:
        return self.base if self.corrected is None else self.corrected.corrected

    def pulse_frame(self) -> pd.DataFrame:
        if self.corrected is not None:
            return self.corrected.to_frame()
        frame = self.base.to_frame()
        n = frame.shape[0]
        return frame.assign(mu=np.zeros(n), gx=np.zeros(n), gz=np.zeros(n), g1_base=self.base.g1, g2_base=self.base.g2)


@dataclass(frozen=True, eq=False)
class PointOutput:
    record: ResultRecord
    trajectory: Optional[pd.DataFrame] = None
    mode: Optional[pd.DataFrame] = None


@dataclass(frozen=True, eq=False)
class RunResult:
    records: List[ResultRecord]
    directory: Optional[Path] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def table(self) -> pd.DataFrame:
        return results_frame(self.records)


def results_frame(records: List[ResultRecord]) -> pd.DataFrame:
    columns = [k for k in ResultRecord.__dataclass_fields__ if k != "runtime"]
    return pd.DataFrame([r.to_row() for r in records], columns=columns)


# ===== Protocol construction =====
def model_params(physics: PhysicsConfig) -> ModelParams:
    return ModelParams(kappa=physics.kappa, gamma=physics.gamma, label=physics.label)


def build_protocol(protocol: str, nu: float, physics: PhysicsConfig, dt: Optional[float] = None) -> ProtocolBuild:
    """
    vitanov_satd is built with κ=0 and simulated with the physical κ; its
    leakage is therefore measured with the physical κ.
    """
    params = model_params(physics)
    kappa, gamma = physics.kappa, physics.gamma
    corrected: Optional[CorrectedSchedule] = None

    if protocol.startswith("vitanov"):
        base = vitanov_schedule(VitanovSpec(G0=physics.G0, nu=nu, epsilon=physics.epsilon), dt, kappa=kappa)
        if protocol == "vitanov_uncorrected":
            leakage = uncorrected_leakage(base, kappa, gamma)
        elif protocol == "vitanov_satd":
            corrected = satd_schedule(base)
            leakage = leakage_profile(corrected, kappa=kappa, gamma=gamma)
        elif protocol == "vitanov_satd_kappa":
            corrected = satd_kappa_schedule(base, kappa)
            leakage = leakage_profile(corrected, gamma=gamma)
        else:
            raise InvalidSpecError(f"unknown protocol '{protocol}'")
    elif protocol.startswith("tanh"):
        spec = TanhSpec(Gmax=physics.Gmax, g=physics.g, nu=nu, t0=physics.t0, epsilon=physics.epsilon)
        base = tanh_schedule(spec, dt, kappa=kappa)
        if protocol == "tanh_uncorrected":
            leakage = uncorrected_leakage(base, kappa, gamma)
        elif protocol == "tanh_corrected":
            corrected = single_control_schedule(base, physics.g, kappa)
            leakage = leakage_profile(corrected, gamma=gamma)
        else:
            raise InvalidSpecError(f"unknown protocol '{protocol}'")
    else:
        raise InvalidSpecError(f"unknown protocol '{protocol}'")

    return ProtocolBuild(protocol=protocol, nu=nu, params=params, base=base, corrected=corrected, leakage=leakage)


def initial_state(build: ProtocolBuild, mode: str) -> SystemAmplitudes:
    """
    "A": the bare initial level. "dressed_dark": the (dressed) dark state at t_i,
    which differs from e_A by the finite truncation of the pulses.
    """
    if mode == "A":
        return SystemAmplitudes.e_A()
    if mode != "dressed_dark":
        raise InvalidSpecError(f"unknown initial state '{mode}'")
    theta_i = float(schedule_angle_profile(build.base).theta[0])
    mu_i = 0.0 if build.corrected is None else float(build.corrected.dressing.mu[0])
    vec = dressed_basis_lab(theta_i, mu_i)[:, 2]
    return SystemAmplitudes.from_array(vec / np.linalg.norm(vec))


def _tail(config: ExperimentConfig) -> TailSettings:
    t = config.numerics.tail
    return TailSettings(enabled=t.enabled, max_length=t.max_length, tolerance=t.tolerance)


def _simulate(build: ProtocolBuild, config: ExperimentConfig) -> Trajectory:
    num = config.numerics
    return propagate(
        build.schedule,
        build.params,
        initial_state(build, num.initial_state),
        rtol=num.rtol,
        atol=num.atol,
        method=num.method,
        tail=_tail(config),
    )


def scored_fidelity(traj: Trajectory, config: ExperimentConfig) -> float:
    if config.numerics.fidelity_at == "window_end":
        return fidelity_at(traj, traj.window_count - 1)
    return fidelity_final(traj)


# ===== Single point =====
def run_point(protocol: str, nu: float, config: ExperimentConfig) -> PointOutput:
    started = time.perf_counter()
    try:
        build = build_protocol(protocol, nu, config.physics, config.numerics.dt)
        traj = _simulate(build, config)
        fidelity = scored_fidelity(traj, config)
        infidelity = 1.0 - fidelity
        if infidelity < INFIDELITY_FLOOR:
            raise ToleranceNotMetError(f"emitted probability exceeds one by {-infidelity:.3e}")
        record = ResultRecord(
            protocol=protocol,
            nu=nu,
            final_fidelity=fidelity,
            infidelity=infidelity,
            max_pop_b=float(np.max(traj.populations[:, 1])),
            leakage_max=build.leakage.max_abs,
            runtime=time.perf_counter() - started,
        )
    except StaError as e:
        log_event(log, "point_failed", logging.WARNING, protocol=protocol, nu=nu, error=e.code, message=e.message)
        record = ResultRecord(
            protocol=protocol, nu=nu, runtime=time.perf_counter() - started, status="failed", error=e.message
        )
        return PointOutput(record=record)

    if not config.output.write_trajectories:
        return PointOutput(record=record)
    stride = config.output.trajectory_stride
    return PointOutput(record=record, trajectory=trajectory_frame(traj, stride), mode=mode_frame(traj, stride))


def _run_task(task: Tuple[str, float, ExperimentConfig]) -> PointOutput:
    protocol, nu, config = task
    return run_point(protocol, nu, config)


def _store_point(out: PointOutput, directory: Path) -> ResultRecord:
    record = out.record
    if out.trajectory is None:
        return record
    stem = exports.point_stem(record.protocol, record.nu)
    traj_rel = f"{exports.TRAJECTORY_DIR}/{stem}.csv"
    mode_rel = f"{exports.MODE_DIR}/{stem}.csv"
    exports.write_table(out.trajectory, directory / traj_rel)
    exports.write_table(out.mode, directory / mode_rel)
    return ResultRecord(**{**asdict(record), "trajectory_file": traj_rel, "mode_file": mode_rel})


# ===== Sweep =====
def run(
    config: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    *,
    threads: Optional[int] = None,
    progress: bool = True,
) -> RunResult:
    """
    Every configured protocol over every ν; results.csv, per-point trajectory
    and mode CSVs, and manifest.json under the output directory.
    """
    directory = exports.resolve_directory(config.output.directory, out)
    threads = max(int(threads or settings.STA_THREADS), 1)
    tasks = [(p, nu, config) for p in config.protocols for nu in config.nu_values]
    log_event(log, "sweep_start", points=len(tasks), threads=threads, directory=str(directory))

    bar = tqdm(total=len(tasks), desc="sweep", unit="pt", disable=None if progress and tasks else True)
    records: List[ResultRecord] = []
    try:
        if threads == 1 or len(tasks) <= 1:
            outputs = map(_run_task, tasks)
            for output in outputs:
                records.append(_store_point(output, directory))
                bar.update(1)
        else:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                for output in pool.map(_run_task, tasks):
                    records.append(_store_point(output, directory))
                    bar.update(1)
    finally:
        bar.close()

    exports.write_table(results_frame(records), directory / exports.RESULTS_FILE)
    failed = sum(r.status != "ok" for r in records)
    exports.write_manifest(
        directory,
        config.dump(),
        command="sweep",
        points=len(records),
        failed=failed,
    )
    log_event(
        log, "sweep_finish", points=len(records), failed=failed,
        runtime=float(sum(r.runtime for r in records)),
    )
    return RunResult(records=records, directory=directory, meta={"failed": failed, "threads": threads})


# ===== Point services =====
def _pick(config: ExperimentConfig, protocol: Optional[str], nu: Optional[float]) -> Tuple[str, float]:
    protocol = protocol or config.protocols[0]
    if protocol not in config.protocols:
        raise ConfigError(f"protocol '{protocol}' is not configured")
    if nu is None:
        values = config.nu_values
        if not values:
            raise ConfigError("no nu given and the sweep is empty")
        nu = values[0]
    return protocol, float(nu)


def synthesize_point(
    config: ExperimentConfig,
    protocol: Optional[str] = None,
    nu: Optional[float] = None,
    out: Optional[Union[str, Path]] = None,
) -> Tuple[ProtocolBuild, pd.DataFrame]:
    """
    Corrected pulse table (t, g1, g2, mu, gx, gz, g1_base, g2_base) for one point.
    """
    protocol, nu = _pick(config, protocol, nu)
    build = build_protocol(protocol, nu, config.physics, config.numerics.dt)
    frame = build.pulse_frame()
    if out is not None:
        exports.write_table(frame, Path(out) / f"{exports.point_stem(protocol, nu)}_pulse.csv")
    return build, frame


def simulate_point(
    config: ExperimentConfig,
    protocol: Optional[str] = None,
    nu: Optional[float] = None,
    out: Optional[Union[str, Path]] = None,
) -> PointOutput:
    """Single point with the full (undecimated) trajectory."""
    protocol, nu = _pick(config, protocol, nu)
    build = build_protocol(protocol, nu, config.physics, config.numerics.dt)
    started = time.perf_counter()
    traj = _simulate(build, config)
    fidelity = scored_fidelity(traj, config)
    record = ResultRecord(
        protocol=protocol,
        nu=nu,
        final_fidelity=fidelity,
        infidelity=1.0 - fidelity,
        max_pop_b=float(np.max(traj.populations[:, 1])),
        leakage_max=build.leakage.max_abs,
        runtime=time.perf_counter() - started,
    )
    output = PointOutput(record=record, trajectory=trajectory_frame(traj), mode=mode_frame(traj))
    if out is not None:
        output = PointOutput(record=_store_point(output, Path(out)), trajectory=output.trajectory, mode=output.mode)
    return output


# ===== Report services =====
def mu_profile_report(
    config: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    μ(t) on [t_i, t₀/2] for every ν (long table) plus a per-ν summary.
    """
    if not any(p.startswith("tanh") for p in config.protocols):
        raise ConfigError("mu-report needs a tanh protocol in the config")
    physics = config.physics
    profiles: List[pd.DataFrame] = []
    summary: List[Dict[str, Any]] = []
    for nu in config.nu_values:
        spec = TanhSpec(Gmax=physics.Gmax, g=physics.g, nu=nu, t0=physics.t0, epsilon=physics.epsilon)
        base = tanh_schedule(spec, config.numerics.dt, kappa=physics.kappa)
        dressing = single_control_mu(base, physics.g, physics.kappa)
        theta_mid = float(schedule_angle_profile(base).theta[dressing.profile.t.size - 1])
        profiles.append(dressing.profile.to_frame().assign(nu=nu)[["nu", "t", "mu", "mu_dot"]])
        summary.append(
            {
                "nu": nu,
                "t_i": float(base.t[0]),
                "t_mid": dressing.t_mid,
                "mu_start": dressing.mu_start,
                "mu_mid": dressing.mu_mid,
                "mu_fixed_point": single_control_fixed_point(theta_mid, physics.g, physics.kappa),
                "mu_max": float(np.max(dressing.profile.mu)),
            }
        )
        log_event(log, "mu_profile", nu=nu, mu_mid=dressing.mu_mid)

    columns = ["nu", "t", "mu", "mu_dot"]
    profile_frame = pd.concat(profiles, ignore_index=True) if profiles else pd.DataFrame(columns=columns)
    summary_frame = pd.DataFrame(summary, columns=["nu", "t_i", "t_mid", "mu_start", "mu_mid", "mu_fixed_point", "mu_max"])
    if out is not None:
        directory = Path(out)
        exports.write_table(profile_frame, directory / "mu_profiles.csv")
        exports.write_table(summary_frame, directory / "mu_summary.csv")
        exports.write_manifest(directory, config.dump(), command="mu-report", points=len(summary))
    return profile_frame, summary_frame


def run_oracle(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> pd.DataFrame:
    """
    Full-continuum vs Markovian deviations for every configured grid.
    """
    oracle = config.oracle
    if oracle is None or not oracle.grids:
        raise ConfigError("oracle: at least one grid is required")
    physics = config.physics
    if physics.gamma > 0:
        raise ConfigError("physics.gamma: the continuum model runs with gamma = 0 only")
    if not physics.kappa > 0:
        raise ConfigError("physics.kappa: the continuum model needs kappa > 0")

    protocol = oracle.protocol or config.protocols[0]
    build = build_protocol(protocol, oracle.nu, physics, config.numerics.dt)
    t_i, t_f = build.schedule.window
    total_time = oracle.total_time or (t_f - t_i) + ORACLE_TAIL / physics.kappa
    grids = [build_grid(g.omega_max, g.n_modes, physics.kappa, total_time) for g in oracle.grids]

    table = markovian_deviation(
        build.schedule,
        build.params,
        grids,
        initial_state(build, config.numerics.initial_state),
        dt=oracle.dt,
        scheme=oracle.scheme,
        rtol=config.numerics.rtol,
        atol=config.numerics.atol,
    )
    table.insert(0, "nu", oracle.nu)
    table.insert(0, "protocol", protocol)
    if out is not None:
        directory = Path(out)
        exports.write_table(table, directory / "oracle.csv")
        exports.write_manifest(directory, config.dump(), command="oracle", points=len(grids))
    return table

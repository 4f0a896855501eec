# capwave_core/running.py
"""The work behind the `dispersion`, `field` and `trajectory` commands."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .config import RunConfig
from .errors import ConfigurationError
from .exact_case_equal import trajectory_case1
from .exact_case_general import trajectory_case2
from .particle_dynamics import IntegratorConfig, ParticleState, Trajectory, integrate
from .serialization import output_path, output_times, serialize, write_difference, write_plot_data
from .wave_model import WaveParameters, dispersion_speed, field_values, resolve_current


class DispersionRow(NamedTuple):
    delta: float
    weber: float
    c: float
    c_squared: float


def run_dispersion(deltas: Sequence[float], webers: Sequence[float]) -> List[DispersionRow]:
    """Phase speed over the (delta, weber) grid, delta-major."""
    if not deltas or not webers:
        raise ConfigurationError("The dispersion grid is empty; give at least one delta and one weber value.")
    rows = []
    for delta in deltas:
        for weber in webers:
            c = dispersion_speed(float(delta), float(weber))
            rows.append(DispersionRow(float(delta), float(weber), c, c * c))
    return rows


class FieldRow(NamedTuple):
    x: float
    z: float
    eta: float
    u: float
    v: float
    p: float


def run_field(wp: WaveParameters, t: float = 0.0, nx: int = 21, nz: int = 11) -> List[FieldRow]:
    """Samples of the linear field on an nx-by-nz grid over one wavelength and the full depth."""
    if nx < 1 or nz < 1:
        raise ConfigurationError(f"Field grid needs nx >= 1 and nz >= 1, got {nx} x {nz}.")
    xs = np.linspace(0.0, 1.0, nx)
    zs = np.linspace(0.0, 1.0, nz) if nz > 1 else np.array([1.0])
    X, Z = np.meshgrid(xs, zs, indexing="ij")
    sample = field_values(X.ravel(), Z.ravel(), t, wp)
    n = X.size
    columns = [np.broadcast_to(np.asarray(v, dtype=float), (n,)) for v in (sample.eta, sample.u, sample.v, sample.p)]
    return [FieldRow(float(x), float(z), *(float(col[i]) for col in columns))
            for i, (x, z) in enumerate(zip(X.ravel(), Z.ravel()))]


def wave_parameters(cfg: RunConfig) -> WaveParameters:
    return WaveParameters(delta=cfg.delta, weber=cfg.weber, c0=resolve_current(cfg.c0, cfg.delta, cfg.weber))


def integrator_config(cfg: RunConfig) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_step=cfg.max_step)


def exact_trajectory(cfg: RunConfig, wp: WaveParameters, grid: np.ndarray, verbose: bool = False) -> Trajectory:
    """Case I when c0 = c, Case II otherwise."""
    icfg = integrator_config(cfg)
    if wp.is_equal_current:
        return trajectory_case1(cfg.x0, cfg.z0, grid, wp, icfg, fallback=cfg.fallback, verbose=verbose)
    return trajectory_case2(cfg.x0, cfg.z0, grid, wp, icfg, fallback=cfg.fallback, verbose=verbose)


def numeric_trajectory(cfg: RunConfig, wp: WaveParameters, grid: np.ndarray, verbose: bool = False) -> Trajectory:
    return integrate(ParticleState(cfg.x0, cfg.z0, 0.0), float(grid[-1]), wp, integrator_config(cfg),
                     t_eval=grid, verbose=verbose)


@dataclass
class TrajectoryRun:
    trajectories: Dict[str, Trajectory] = field(default_factory=dict)
    files: List[Path] = field(default_factory=list)
    max_difference: Optional[float] = None


def run_trajectory(cfg: RunConfig, verbose: bool = False) -> TrajectoryRun:
    """Computes the requested trajectories and writes every output file."""
    wp = wave_parameters(cfg)
    grid = output_times(cfg.t_end, cfg.dt_out)
    if verbose:
        kind = "c0 = c" if wp.is_equal_current else "c0 != c"
        print(f"[Run] delta={wp.delta} weber={wp.weber} c={wp.c:.12g} c0={wp.c0:.12g} ({kind}), {grid.size} output times")
    run = TrajectoryRun()
    if cfg.method in ("exact", "both"):
        run.trajectories["exact"] = exact_trajectory(cfg, wp, grid, verbose)
    if cfg.method in ("numeric", "both"):
        run.trajectories["numeric"] = numeric_trajectory(cfg, wp, grid, verbose)

    both = len(run.trajectories) == 2
    for tag, traj in run.trajectories.items():
        suffix_tag = tag if both else ""
        run.files.append(serialize(traj, cfg.output_format, output_path(cfg.out, cfg.output_format, suffix_tag)))
        if cfg.plot_data:
            run.files.append(write_plot_data(traj, output_path(cfg.out, "plot", suffix_tag)))
    if both:
        diff_path, largest = write_difference(run.trajectories["exact"], run.trajectories["numeric"],
                                              output_path(cfg.out, "csv", "diff"))
        run.files.append(diff_path)
        run.max_difference = largest if math.isfinite(largest) else math.inf
    return run

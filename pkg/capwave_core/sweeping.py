# capwave_core/sweeping.py
"""Runs one trajectory per (delta, weber, z0) combination, optionally in worker processes."""

import itertools
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Any, Dict, List, Sequence

import numpy as np

from .config import RunConfig
from .errors import CapwaveError, exit_code_for
from .running import exact_trajectory, numeric_trajectory, wave_parameters
from .serialization import output_times


def sweep_configs(base: RunConfig, deltas: Sequence[float], webers: Sequence[float], z0s: Sequence[float]) -> List[RunConfig]:
    """One validated config per grid point; empty axes fall back to the base value."""
    deltas = list(deltas) or [base.delta]
    webers = list(webers) or [base.weber]
    z0s = list(z0s) or [base.z0]
    return [replace(base, delta=float(d), weber=float(w), z0=float(z))
            for d, w, z in itertools.product(deltas, webers, z0s)]


def sweep_point(cfg: RunConfig) -> Dict[str, Any]:
    """Summary of one trajectory. Top-level so worker processes can pickle it."""
    row: Dict[str, Any] = {"delta": cfg.delta, "weber": cfg.weber, "z0": cfg.z0, "method": cfg.method}
    try:
        wp = wave_parameters(cfg)
        grid = output_times(cfg.t_end, cfg.dt_out)
        row["c"] = wp.c
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if cfg.method == "numeric":
                traj = numeric_trajectory(cfg, wp, grid)
            else:
                traj = exact_trajectory(cfg, wp, grid)
        row.update(
            status="ok",
            samples=len(traj),
            x_end=float(traj.x[-1]),
            z_end=float(traj.z[-1]),
            z_range=[float(np.min(traj.z)), float(np.max(traj.z))],
            truncated_at=traj.meta.truncated_at,
            events=list(traj.meta.events),
            warnings=len(caught),
        )
    except CapwaveError as e:
        row.update(status="error", exit_code=exit_code_for(e), message=str(e))
    return row


def run_sweep(base: RunConfig, deltas: Sequence[float], webers: Sequence[float], z0s: Sequence[float],
              workers: int = 1, verbose: bool = False) -> List[Dict[str, Any]]:
    """Rows come back in grid order whatever the number of workers."""
    configs = sweep_configs(base, deltas, webers, z0s)
    if base.method == "both":
        configs = [replace(c, method="exact") for c in configs]
    if verbose: print(f"[Sweep] {len(configs)} trajectories on {max(1, workers)} worker(s)")
    if workers <= 1 or len(configs) == 1:
        rows = []
        for cfg in configs:
            rows.append(sweep_point(cfg))
            if verbose: print(f"[Sweep] delta={cfg.delta} weber={cfg.weber} z0={cfg.z0}: {rows[-1]['status']}")
        return rows
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(sweep_point, configs))
    if verbose:
        failed = sum(1 for r in rows if r["status"] != "ok")
        print(f"[Sweep] done, {failed} failed")
    return rows

# capwave_core/serialization.py
"""Writers and readers for trajectory files (CSV, JSON, plot data, differences)."""

import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .config import TOOL_NAME, __version__
from .errors import ConfigurationError, DomainError
from .particle_dynamics import Frame, Trajectory
from .wave_model import field_values

COLUMNS = ("t", "x", "z", "X", "Z", "u", "v", "p")
CSV_HEADER = ",".join(COLUMNS)
FLOAT_FORMAT = "%.17g"
SUFFIXES = {"csv": ".csv", "json": ".json"}
PLOT_SUFFIX = ".dat"
_ALL_SUFFIXES = {**SUFFIXES, "plot": PLOT_SUFFIX}

PathLike = Union[str, Path]


def output_times(t_end: float, dt_out: float) -> np.ndarray:
    """Output grid 0, dt_out, 2 dt_out, ... with floor(t_end / dt_out) + 1 points."""
    if not (t_end > 0 and dt_out > 0) or not math.isfinite(t_end / dt_out):
        raise ConfigurationError(f"Need t_end > 0 and dt_out > 0, got t_end={t_end}, dt_out={dt_out}.")
    # 5 / 0.01 evaluates to 499.999...; a relative nudge keeps the exact multiple
    n = int(math.floor(t_end / dt_out * (1.0 + 1e-12))) + 1
    return np.minimum(dt_out * np.arange(n, dtype=float), t_end)


def trajectory_table(traj: Trajectory) -> np.ndarray:
    """Rows of (t, x, z, X, Z, u, v, p); u, v, p are the field values at the particle."""
    X, Z = traj.coordinates(Frame.MOVING)
    sample = field_values(traj.x, traj.z, traj.t, traj.params)
    columns = [traj.t, traj.x, traj.z, X, Z,
               np.broadcast_to(sample.u, traj.t.shape),
               np.broadcast_to(sample.v, traj.t.shape),
               np.broadcast_to(sample.p, traj.t.shape)]
    return np.column_stack(columns) if len(traj) else np.empty((0, len(COLUMNS)))


def metadata(traj: Trajectory) -> Dict[str, Any]:
    wp = traj.params
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "method": traj.meta.method.value,
        "frame": traj.frame.value,
        "parameters": {"delta": wp.delta, "weber": wp.weber, "c0": wp.c0, "c": wp.c, "epsilon": wp.epsilon},
        "closed_form": dict(traj.meta.closed_form),
        "events": list(traj.meta.events),
        "truncated_at": traj.meta.truncated_at,
    }


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    try: path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e: raise OSError(f"Could not create output dir {path.parent}: {e}") from e
    return path


def write_csv(traj: Trajectory, path: PathLike) -> Path:
    path = _prepare(path)
    try:
        np.savetxt(path, trajectory_table(traj), fmt=FLOAT_FORMAT, delimiter=",", header=CSV_HEADER, comments="")
    except IOError as e: raise IOError(f"Could not write to output file {path}: {e}") from e
    return path


def read_csv(path: PathLike) -> Dict[str, np.ndarray]:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
    if header != CSV_HEADER:
        raise DomainError(f"'{path.name}' does not start with the header '{CSV_HEADER}'.")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.size == 0:
        table = np.empty((0, len(COLUMNS)))
    return {name: table[:, i] for i, name in enumerate(COLUMNS)}


def write_json(traj: Trajectory, path: PathLike) -> Path:
    """Same columns as the CSV, plus run metadata. Floats keep their shortest round-trip repr."""
    path = _prepare(path)
    table = trajectory_table(traj)
    document = metadata(traj)
    document["columns"] = list(COLUMNS)
    document["data"] = {name: table[:, i].tolist() for i, name in enumerate(COLUMNS)}
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, allow_nan=True)
            f.write("\n")
    except IOError as e: raise IOError(f"Could not write to output file {path}: {e}") from e
    return path


def read_json(path: PathLike) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    """(columns, metadata) of a file written by write_json."""
    with open(path, "r", encoding="utf-8") as f:
        document = json.load(f)
    data = document.pop("data", {})
    document.pop("columns", None)
    missing = [name for name in COLUMNS if name not in data]
    if missing:
        raise DomainError(f"'{Path(path).name}' lacks columns: {', '.join(missing)}.")
    return {name: np.asarray(data[name], dtype=float) for name in COLUMNS}, document


def write_plot_data(traj: Trajectory, path: PathLike) -> Path:
    """Two whitespace-separated columns (x z) for generic plotting tools."""
    path = _prepare(path)
    try:
        np.savetxt(path, np.column_stack([traj.x, traj.z]), fmt=FLOAT_FORMAT, header="x z")
    except IOError as e: raise IOError(f"Could not write to output file {path}: {e}") from e
    return path


def trajectory_difference(exact: Trajectory, numeric: Trajectory) -> np.ndarray:
    """Rows (t, dx, dz) over the samples both trajectories share."""
    n = min(len(exact), len(numeric))
    if n and not np.array_equal(exact.t[:n], numeric.t[:n]):
        raise DomainError("Exact and numeric trajectories are not sampled on the same grid.")
    return np.column_stack([exact.t[:n], exact.x[:n] - numeric.x[:n], exact.z[:n] - numeric.z[:n]])


def write_difference(exact: Trajectory, numeric: Trajectory, path: PathLike) -> Tuple[Path, float]:
    """Writes the pointwise differences; returns the path and the largest |dx|, |dz|."""
    path = _prepare(path)
    diff = trajectory_difference(exact, numeric)
    try:
        np.savetxt(path, diff, fmt=FLOAT_FORMAT, delimiter=",", header="t,dx,dz", comments="")
    except IOError as e: raise IOError(f"Could not write to output file {path}: {e}") from e
    largest = float(np.max(np.abs(diff[:, 1:]))) if diff.size else 0.0
    return path, largest


def output_path(out: PathLike, output_format: str, tag: str = "") -> Path:
    """`out` is a stem (a known suffix on it is dropped); `tag` goes before the suffix.

    `output_format` is csv, json or plot (the two-column .dat files).
    """
    if output_format not in _ALL_SUFFIXES:
        raise ConfigurationError(f"Unknown output format '{output_format}'.")
    out = Path(out)
    stem = out.with_suffix("") if out.suffix in _ALL_SUFFIXES.values() else out
    name = f"{stem.name}_{tag}" if tag else stem.name
    return stem.with_name(name + _ALL_SUFFIXES[output_format])


def serialize(traj: Trajectory, output_format: str, path: PathLike) -> Path:
    writers = {"csv": write_csv, "json": write_json}
    if output_format not in writers:
        raise ConfigurationError(f"Unknown output format '{output_format}'.")
    return writers[output_format](traj, path)


def read_table(path: PathLike) -> Dict[str, np.ndarray]:
    path = Path(path)
    if path.suffix == ".json":
        return read_json(path)[0]
    return read_csv(path)


def write_summary(rows: List[Mapping[str, Any]], path: PathLike) -> Path:
    """Writes a list of flat records as JSON (used for sweep summaries)."""
    path = _prepare(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"tool": TOOL_NAME, "version": __version__, "rows": list(rows)}, f, indent=2)
        f.write("\n")
    return path


def rows_to_csv(columns: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    """Comma-separated text with a header line; values at 17 significant digits."""
    lines = [",".join(columns)]
    lines.extend(",".join(format(float(v), ".17g") for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_rows(columns: Sequence[str], rows: Iterable[Sequence[float]], path: PathLike) -> Path:
    path = _prepare(path)
    try:
        path.write_text(rows_to_csv(columns, rows), encoding="utf-8")
    except IOError as e: raise IOError(f"Could not write to output file {path}: {e}") from e
    return path

# capwave_core/config.py

import sys
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, Any, Optional, Union, Mapping, Tuple

try:
    import tomllib
except ImportError:
    try:
        import tomli as tomllib
    except ImportError:
        print("Error: 'tomli' package is required but not installed.", file=sys.stderr)
        print("Please install it: pip install tomli", file=sys.stderr)
        sys.exit(1)

from .errors import ConfigurationError

__version__ = "0.4.1"
TOOL_NAME = "capwave-paths"

# --- Default Configuration Values ---
CONFIG_FILENAME = "capwave.toml"
CONFIG_TABLE = "capwave"
DEFAULT_DELTA = 0.5
DEFAULT_WEBER = 0.0
DEFAULT_C0 = "equal"
DEFAULT_X0 = 0.0
DEFAULT_Z0 = 0.5
DEFAULT_T_END = 5.0
DEFAULT_DT_OUT = 0.01
DEFAULT_METHOD = "numeric"
DEFAULT_FORMAT = "csv"
DEFAULT_OUT = "trajectory"
DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-10
DEFAULT_MAX_STEP = 0.1
DEFAULT_WORKERS = 1

METHODS = ("exact", "numeric", "both")
FORMATS = ("csv", "json")
EQUAL_CURRENT = "equal"


@dataclass(frozen=True)
class Tolerances:
    """Every numerical threshold of the package, in one place."""
    # special functions
    elliptic_eps: float = 1e-15
    agm_max_iter: int = 40
    hyperbolic_limit: float = 1e-12
    # wave model
    shallow_series: float = 1e-6
    fd_step: float = 1e-4
    field_residual: float = 1e-6
    mean_current: float = 1e-10
    # case selection and exact trajectories
    case_switch: float = 1e-12
    first_integral: float = 1e-8
    identity: float = 1e-10
    canonical_residual: float = 1e-9
    root_xtol: float = 1e-14
    quad_epsabs: float = 1e-13
    quad_epsrel: float = 1e-12
    quad_limit: int = 200
    quad_error_max: float = 1e-10
    quad_max_depth: int = 8
    bridge_nodes: int = 32
    scan_step_max: float = 0.02
    scan_step_min: float = 1e-9
    max_branches: int = 64
    blowup_cap: float = 30.0


TOLERANCES = Tolerances()

# Keys accepted in [tool.capwave] and the types they must have.
_KEY_TYPES: Dict[str, Tuple[type, ...]] = {
    "delta": (int, float),
    "weber": (int, float),
    "c0": (int, float, str),
    "x0": (int, float),
    "z0": (int, float),
    "t_end": (int, float),
    "dt_out": (int, float),
    "method": (str,),
    "format": (str,),
    "out": (str,),
    "tol": (int, float),
    "abs_tol": (int, float),
    "max_step": (int, float),
    "fallback": (bool,),
    "plot_data": (bool,),
    "sweep_deltas": (list,),
    "sweep_webers": (list,),
    "sweep_z0s": (list,),
    "workers": (int,),
}


def find_project_root(start_path: Path) -> Optional[Path]:
    current = start_path.resolve()
    while current.exists() and current != current.parent:
        if (current / CONFIG_FILENAME).is_file():
            return current
        current = current.parent
    if current.exists() and (current / CONFIG_FILENAME).is_file():
        return current
    return None


def _accepts(key: str, value: Any) -> bool:
    expected = _KEY_TYPES[key]
    # bool is an int subclass; only accept it where a flag is expected
    if isinstance(value, bool) and bool not in expected:
        return False
    if isinstance(value, list):
        return list in expected and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    return isinstance(value, expected)


def _filter_table(table: Mapping[str, Any], source: str) -> Dict[str, Any]:
    config: Dict[str, Any] = {}
    for key, value in table.items():
        if key not in _KEY_TYPES:
            print(f"Warning: Unknown key '{key}' in {source} ignored.", file=sys.stderr)
        elif not _accepts(key, value):
            print(f"Warning: Key '{key}' in {source} has the wrong type ({type(value).__name__}); ignored.", file=sys.stderr)
        elif key == "c0" and isinstance(value, str) and value != EQUAL_CURRENT:
            print(f"Warning: 'c0' in {source} must be a number or \"{EQUAL_CURRENT}\"; ignored.", file=sys.stderr)
        else:
            config[key] = value
    return config


def load_config_file(config_file_path: Path) -> Dict[str, Any]:
    """Reads the [tool.capwave] table of one TOML file, keeping only well-typed known keys."""
    config: Dict[str, Any] = {}
    if not config_file_path.is_file():
        print(f"Warning: Config file '{config_file_path}' not found.", file=sys.stderr)
        return config
    try:
        with open(config_file_path, "rb") as f:
            toml_data = tomllib.load(f)
        table = toml_data.get("tool", {}).get(CONFIG_TABLE, {})
        return _filter_table(table, f"'{config_file_path.name}'")
    except tomllib.TOMLDecodeError as e:
        print(f"Warning: Error parsing '{config_file_path.name}': {e}", file=sys.stderr)
    except IOError as e:
        print(f"Warning: Could not read '{config_file_path.name}': {e}", file=sys.stderr)
    return config


def load_config(project_root: Optional[Path]) -> Dict[str, Any]:
    if not project_root:
        return {}
    return load_config_file(project_root / CONFIG_FILENAME)


@dataclass(frozen=True)
class RunConfig:
    """Everything one `trajectory` run needs. Validated on construction."""
    delta: float = DEFAULT_DELTA
    weber: float = DEFAULT_WEBER
    c0: Union[float, str] = DEFAULT_C0
    x0: float = DEFAULT_X0
    z0: float = DEFAULT_Z0
    t_end: float = DEFAULT_T_END
    dt_out: float = DEFAULT_DT_OUT
    method: str = DEFAULT_METHOD
    output_format: str = DEFAULT_FORMAT
    out: str = DEFAULT_OUT
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    max_step: float = DEFAULT_MAX_STEP
    fallback: bool = False
    plot_data: bool = False

    def __post_init__(self):
        for name in ("delta", "weber", "x0", "z0", "t_end", "dt_out", "rel_tol", "abs_tol", "max_step"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigurationError(f"'{name}' must be a finite number, got {value!r}.")
        if self.delta <= 0:
            raise ConfigurationError(f"delta must be > 0, got {self.delta}.")
        if self.weber < 0:
            raise ConfigurationError(f"weber must be >= 0, got {self.weber}.")
        if not 0.0 <= self.z0 <= 1.0:
            raise ConfigurationError(f"z0 must lie in [0, 1], got {self.z0}.")
        if self.t_end <= 0:
            raise ConfigurationError(f"t_end must be > 0, got {self.t_end}.")
        if self.dt_out <= 0:
            raise ConfigurationError(f"dt_out must be > 0, got {self.dt_out}.")
        if min(self.rel_tol, self.abs_tol, self.max_step) <= 0:
            raise ConfigurationError("Tolerances and max_step must be > 0.")
        if self.method not in METHODS:
            raise ConfigurationError(f"method must be one of {', '.join(METHODS)}; got '{self.method}'.")
        if self.output_format not in FORMATS:
            raise ConfigurationError(f"format must be one of {', '.join(FORMATS)}; got '{self.output_format}'.")
        if isinstance(self.c0, str):
            if self.c0 != EQUAL_CURRENT:
                raise ConfigurationError(f"c0 must be a number or '{EQUAL_CURRENT}', got '{self.c0}'.")
        elif isinstance(self.c0, bool) or not math.isfinite(self.c0):
            raise ConfigurationError(f"c0 must be finite, got {self.c0!r}.")
        if not self.out:
            raise ConfigurationError("Output path must not be empty.")

    @property
    def equal_current(self) -> bool:
        return self.c0 == EQUAL_CURRENT

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "RunConfig":
        """Builds a config from [tool.capwave]-style keys; unrelated keys are ignored."""
        renames = {"format": "output_format", "tol": "rel_tol"}
        known = {f.name for f in fields(cls)}
        kwargs: Dict[str, Any] = {}
        for key, value in mapping.items():
            name = renames.get(key, key)
            if name in known:
                kwargs[name] = value
        return cls(**kwargs)

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Returns a copy where every non-None override wins."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self

    def to_mapping(self) -> Dict[str, Any]:
        return {
            "delta": self.delta, "weber": self.weber, "c0": self.c0,
            "x0": self.x0, "z0": self.z0, "t_end": self.t_end, "dt_out": self.dt_out,
            "method": self.method, "format": self.output_format, "out": self.out,
            "tol": self.rel_tol, "abs_tol": self.abs_tol, "max_step": self.max_step,
            "fallback": self.fallback, "plot_data": self.plot_data,
        }

    def to_toml(self) -> str:
        lines = [f"[tool.{CONFIG_TABLE}]"]
        for key, value in self.to_mapping().items():
            lines.append(f"{key} = {_toml_value(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_toml(cls, text: str) -> "RunConfig":
        data = tomllib.loads(text)
        return cls.from_mapping(data.get("tool", {}).get(CONFIG_TABLE, {}))


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    escaped = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'

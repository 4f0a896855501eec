# capwave_core/particle_dynamics.py
"""Particle-path equations, frame changes and the adaptive integrator used as the oracle.

The lab-frame system is dx/dt = u(x, z, t), dz/dt = v(x, z, t) with the linear
field of ``wave_model``. In the frame moving with the wave, X = 2 pi (x - c t),
Z = 2 pi delta z, it becomes autonomous:

    dX/dt = A cosh Z cos X + b,     dZ/dt = A sinh Z sin X

with A = 4 pi^2 delta c / sinh(2 pi delta) and b = 2 pi (c0 - c).
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicSpline

from .config import TOLERANCES, DEFAULT_REL_TOL, DEFAULT_ABS_TOL, DEFAULT_MAX_STEP
from .errors import (
    ConfigurationError, DomainError, NumericalFailureError, OutOfRangeError, StripExitWarning,
)
from .wave_model import TWO_PI, WaveParameters, field_values

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ParticleState:
    x: float
    z: float
    t: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.z, self.t)):
            raise DomainError(f"Particle state must be finite, got ({self.x}, {self.z}, {self.t}).")


@dataclass(frozen=True)
class MovingFrameState:
    X: float
    Z: float
    t: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.X, self.Z, self.t)):
            raise DomainError(f"Moving-frame state must be finite, got ({self.X}, {self.Z}, {self.t}).")


class Frame(str, Enum):
    LAB = "lab"
    MOVING = "moving"


class FrameDirection(str, Enum):
    LAB_TO_MOVING = "lab-to-moving"
    MOVING_TO_LAB = "moving-to-lab"


class MethodTag(str, Enum):
    EXACT_CASE_I = "exact-case-I"
    EXACT_CASE_II = "exact-case-II"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    max_step: float = DEFAULT_MAX_STEP
    dense_output: bool = True

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigurationError(f"IntegratorConfig.{name} must be > 0, got {value}.")

    def tightened(self, factor: float) -> "IntegratorConfig":
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


@dataclass
class TrajectoryMeta:
    params: WaveParameters
    method: MethodTag
    closed_form: Dict[str, bool] = field(default_factory=lambda: {"x": False, "z": False})
    events: List[str] = field(default_factory=list)
    truncated_at: Optional[float] = None


DenseEvaluator = Callable[[ArrayLike], Tuple[np.ndarray, np.ndarray]]


@dataclass
class Trajectory:
    """Lab-frame samples of one particle path.

    ``frame`` names the frame of the stored (x, z) samples, lab for every solver;
    ``dense`` evaluates (x, z) at arbitrary times inside the covered span when available.
    """
    t: np.ndarray
    x: np.ndarray
    z: np.ndarray
    meta: TrajectoryMeta
    frame: Frame = Frame.LAB
    dense: Optional[DenseEvaluator] = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.z = np.asarray(self.z, dtype=float)
        if not (self.t.shape == self.x.shape == self.z.shape) or self.t.ndim != 1:
            raise DomainError("Trajectory arrays must be one-dimensional and of equal length.")
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0):
            raise DomainError("Trajectory timestamps must be strictly increasing.")

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def params(self) -> WaveParameters:
        return self.meta.params

    @property
    def samples(self) -> List[ParticleState]:
        return [ParticleState(float(x), float(z), float(t)) for t, x, z in zip(self.t, self.x, self.z)]

    @property
    def moving_samples(self) -> List[MovingFrameState]:
        X, Z = self.coordinates(Frame.MOVING)
        return [MovingFrameState(float(a), float(b), float(t)) for t, a, b in zip(self.t, X, Z)]

    def coordinates(self, frame: Union[Frame, str] = Frame.LAB) -> Tuple[np.ndarray, np.ndarray]:
        if Frame(frame) is Frame.LAB:
            return self.x, self.z
        return to_moving(self.x, self.z, self.t, self.params)

    def span(self) -> Tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def evaluate(self, t: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """(x, z) at arbitrary covered times, from the dense evaluator or a cubic spline."""
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.span()
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any(t_arr < lo - slack) or np.any(t_arr > hi + slack):
            raise OutOfRangeError(f"Requested time outside the trajectory span [{lo}, {hi}].")
        if self.dense is not None:
            return self.dense(t_arr)
        if len(self) < 2:
            return np.full_like(t_arr, self.x[0]), np.full_like(t_arr, self.z[0])
        return CubicSpline(self.t, self.x)(t_arr), CubicSpline(self.t, self.z)(t_arr)


# --- Right-hand sides ---

def rhs_lab(state: ParticleState, wp: WaveParameters) -> Tuple[float, float]:
    sample = field_values(state.x, state.z, state.t, wp)
    return sample.u, sample.v


def rhs_moving(state: MovingFrameState, wp: WaveParameters) -> Tuple[float, float]:
    return moving_velocity(state.X, state.Z, wp)


def moving_velocity(X: ArrayLike, Z: ArrayLike, wp: WaveParameters) -> Tuple[ArrayLike, ArrayLike]:
    A = wp.frame_amplitude
    Xdot = A * np.cosh(Z) * np.cos(X) + wp.b
    Zdot = A * np.sinh(Z) * np.sin(X)
    if np.ndim(Xdot) == 0:
        return float(Xdot), float(Zdot)
    return Xdot, Zdot


def stream_function(X: ArrayLike, Z: ArrayLike, wp: WaveParameters) -> ArrayLike:
    """psi = A sinh Z cos X + b Z, constant along every moving-frame path."""
    return wp.frame_amplitude * np.sinh(Z) * np.cos(X) + wp.b * Z


# --- Frame changes ---

def to_moving(x: ArrayLike, z: ArrayLike, t: ArrayLike, wp: WaveParameters) -> Tuple[np.ndarray, np.ndarray]:
    return TWO_PI * (np.asarray(x) - wp.c * np.asarray(t)), TWO_PI * wp.delta * np.asarray(z)


def to_lab(X: ArrayLike, Z: ArrayLike, t: ArrayLike, wp: WaveParameters) -> Tuple[np.ndarray, np.ndarray]:
    return np.asarray(X) / TWO_PI + wp.c * np.asarray(t), np.asarray(Z) / (TWO_PI * wp.delta)


def transform_frame(state: Union[ParticleState, MovingFrameState], wp: WaveParameters,
                    direction: Union[FrameDirection, str]) -> Union[ParticleState, MovingFrameState]:
    direction = FrameDirection(direction)
    if direction is FrameDirection.LAB_TO_MOVING:
        if not isinstance(state, ParticleState):
            raise DomainError("lab-to-moving expects a ParticleState.")
        X, Z = to_moving(state.x, state.z, state.t, wp)
        return MovingFrameState(float(X), float(Z), state.t)
    if not isinstance(state, MovingFrameState):
        raise DomainError("moving-to-lab expects a MovingFrameState.")
    x, z = to_lab(state.X, state.Z, state.t, wp)
    return ParticleState(float(x), float(z), state.t)


# --- Integration ---

def _check_grid(t_grid: Sequence[float], t_start: float) -> np.ndarray:
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("Time grid must be a non-empty one-dimensional sequence.")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise DomainError("Time grid must be finite and strictly increasing.")
    if grid[0] < t_start:
        raise DomainError(f"Time grid starts at {grid[0]}, before the initial time {t_start}.")
    return grid


def warn_on_strip_exit(z: np.ndarray, t: np.ndarray, events: List[str], verbose: bool = False):
    outside = (z < 0.0) | (z > 1.0)
    if np.any(outside):
        t_out = float(t[np.argmax(outside)])
        message = f"particle left the strip 0 <= z <= 1 at t = {t_out:.6g}"
        events.append(message)
        warnings.warn(message, StripExitWarning, stacklevel=3)
        if verbose: print(f"[Integrator] {message}")


def integrate(initial: ParticleState, t_end: float, wp: WaveParameters,
              cfg: Optional[IntegratorConfig] = None, t_eval: Optional[Sequence[float]] = None,
              amplitude_factor: float = 1.0, verbose: bool = False) -> Trajectory:
    """Dormand-Prince 5(4) solution of the lab-frame particle equations.

    ``amplitude_factor`` scales the wave part of the field; 0 leaves only the current.
    """
    cfg = cfg or IntegratorConfig()
    if not t_end > initial.t:
        raise DomainError(f"t_end = {t_end} must exceed the initial time {initial.t}.")
    grid = None if t_eval is None else _check_grid(t_eval, initial.t)
    if grid is not None and grid[-1] > t_end:
        raise DomainError("Output times extend past t_end.")

    def rhs(t, y):
        sample = field_values(y[0], y[1], t, wp, amplitude_factor)
        return [sample.u, sample.v]

    if verbose: print(f"[Integrator] RK45 on [{initial.t}, {t_end}] rtol={cfg.rel_tol} atol={cfg.abs_tol} max_step={cfg.max_step}")
    sol = solve_ivp(rhs, (initial.t, t_end), [initial.x, initial.z], method="RK45",
                    rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
                    dense_output=cfg.dense_output, t_eval=grid)
    if sol.status != 0:
        t_stop = float(sol.t[-1]) if len(sol.t) else initial.t
        raise NumericalFailureError(f"Integration stopped at t = {t_stop}: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise NumericalFailureError("Integration produced non-finite values.")
    if verbose: print(f"[Integrator] {sol.nfev} right-hand side evaluations, {len(sol.t)} samples.")

    meta = TrajectoryMeta(params=wp, method=MethodTag.NUMERIC)
    if amplitude_factor != 1.0:
        meta.events.append(f"wave amplitude factor {amplitude_factor}")
    warn_on_strip_exit(sol.y[1], sol.t, meta.events, verbose)

    dense = None
    if sol.sol is not None:
        ode_solution = sol.sol

        def dense(tt):
            values = ode_solution(np.asarray(tt, dtype=float))
            return values[0], values[1]

    return Trajectory(t=sol.t, x=sol.y[0], z=sol.y[1], meta=meta, frame=Frame.LAB, dense=dense)


@dataclass
class ComponentSolution:
    """Numerical solution of one decoupled second-order equation q'' = f(q)."""
    t: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    stopped_at: Optional[float]
    evaluate: Callable[[ArrayLike], np.ndarray]


def integrate_component(component: str, q0: float, qdot0: float, t_grid: Sequence[float], a_sq: float,
                        cfg: Optional[IntegratorConfig] = None, cap: Optional[float] = None) -> ComponentSolution:
    """Integrates X'' = -a^2 sin 2X ('x') or Z'' = a^2 sinh 2Z ('z') from t = 0.

    For 'z' the run stops when |Z| reaches ``cap``; the stop time is reported and
    the returned samples end before it.
    """
    cfg = cfg or IntegratorConfig()
    grid = _check_grid(t_grid, 0.0)
    if component == "x":
        def rhs(t, y): return [y[1], -a_sq * math.sin(2.0 * y[0])]
    elif component == "z":
        def rhs(t, y): return [y[1], a_sq * math.sinh(2.0 * y[0])]
    else:
        raise DomainError(f"Unknown component '{component}'.")

    events = None
    cap = TOLERANCES.blowup_cap if cap is None else cap
    if component == "z":
        def blowup(t, y): return abs(y[0]) - cap
        blowup.terminal = True
        events = [blowup]

    t_final = float(grid[-1])
    if t_final == 0.0:
        evaluate = lambda tt: np.full_like(np.asarray(tt, dtype=float), q0)
        return ComponentSolution(grid, np.array([q0]), np.array([qdot0]), None, evaluate)
    sol = solve_ivp(rhs, (0.0, t_final), [q0, qdot0], method="RK45", rtol=cfg.rel_tol, atol=cfg.abs_tol,
                    max_step=cfg.max_step, dense_output=True, events=events)
    if sol.status == -1:
        raise NumericalFailureError(f"Component '{component}' integration failed: {sol.message}")
    stopped_at = float(sol.t_events[0][0]) if events and sol.status == 1 else None
    keep = grid if stopped_at is None else grid[grid < stopped_at]
    values = sol.sol(keep)
    ode_solution = sol.sol
    return ComponentSolution(keep, values[0], values[1], stopped_at, lambda tt: ode_solution(np.asarray(tt, dtype=float))[0])


# --- Diagnostics ---

def mean_current_check(z: float, t: float, wp: WaveParameters) -> float:
    """Average of u over one wavelength in x; equals c0 for the linear field."""
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"Mean current is checked inside the strip only, got z = {z}.")
    value, _ = quad(lambda x: field_values(x, z, t, wp).u, 0.0, 1.0,
                    epsabs=TOLERANCES.quad_epsabs, epsrel=TOLERANCES.quad_epsrel, limit=TOLERANCES.quad_limit)
    return float(value)


def drift_diagnostic(traj: Trajectory, period: float, t0: Optional[float] = None) -> Tuple[float, float]:
    """(x, z) displacement over one period starting at ``t0`` (default: start of the path)."""
    if not period > 0:
        raise DomainError(f"Period must be > 0, got {period}.")
    lo, hi = traj.span()
    start = lo if t0 is None else t0
    if start < lo or start + period > hi * (1.0 + 1e-12) + 1e-12:
        raise OutOfRangeError(f"Period {period} from t = {start} exceeds the trajectory span [{lo}, {hi}].")
    x, z = traj.evaluate(np.array([start, min(start + period, hi)]))
    return float(x[1] - x[0]), float(z[1] - z[0])

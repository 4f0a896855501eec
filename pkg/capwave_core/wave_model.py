# capwave_core/wave_model.py
"""Non-dimensional scales, the dispersion relation and the linear capillary-gravity field."""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Mapping, NamedTuple, Optional, Union

import numpy as np

from .config import TOLERANCES, EQUAL_CURRENT
from .errors import ConfigurationError, DomainError

TWO_PI = 2.0 * math.pi
ArrayLike = Union[float, np.ndarray]


# --- Shallow-limit safe ratios ---

def _tanh_over_x(x: float) -> float:
    if x < TWO_PI * TOLERANCES.shallow_series:
        x2 = x * x
        return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0
    return math.tanh(x) / x


def _x_over_sinh(x: float) -> float:
    if x < TWO_PI * TOLERANCES.shallow_series:
        x2 = x * x
        return 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    # sinh overflows past ~710; the ratio is zero to double precision long before that
    if x > 700.0:
        return 0.0
    return x / math.sinh(x)


def _require_positive_finite(name: str, value: float):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite real, got {value!r}.")
    if value <= 0:
        raise DomainError(f"{name} must be > 0, got {value}.")


# --- Dimensional input ---

@dataclass(frozen=True)
class DimensionalParameters:
    h0: float                      # undisturbed depth
    wavelength: float
    gamma: float = 0.0             # surface-tension coefficient
    g: float = 9.81
    rho: float = 1000.0
    a_amp: float = 0.0             # wave amplitude
    p0: Optional[float] = None     # atmospheric pressure

    def __post_init__(self):
        _require_positive_finite("h0", self.h0)
        _require_positive_finite("wavelength", self.wavelength)
        _require_positive_finite("g", self.g)
        _require_positive_finite("rho", self.rho)
        for name in ("gamma", "a_amp"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be a finite value >= 0, got {value}.")
        if self.p0 is not None and not math.isfinite(self.p0):
            raise DomainError(f"p0 must be finite, got {self.p0}.")

    @property
    def delta(self) -> float:
        return self.h0 / self.wavelength

    @property
    def epsilon(self) -> float:
        return self.a_amp / self.h0

    @property
    def velocity_scale(self) -> float:
        return math.sqrt(self.g * self.h0)


def weber_number(params: DimensionalParameters) -> float:
    """W_e = Gamma / (rho g h0^2)."""
    return params.gamma / (params.rho * params.g * params.h0 ** 2)


def dispersion_speed(delta: float, weber: float = 0.0) -> float:
    """Linear phase speed c of a capillary-gravity wave (wavenumber 2 pi)."""
    _require_positive_finite("delta", delta)
    if not math.isfinite(weber) or weber < 0:
        raise DomainError(f"Weber number must be a finite value >= 0, got {weber}.")
    x = TWO_PI * delta
    return math.sqrt(_tanh_over_x(x) * (1.0 + x * x * weber))


def dimensional_speed(params: DimensionalParameters) -> float:
    """Phase speed in physical units, sqrt(g h0) times the non-dimensional speed."""
    return params.velocity_scale * dispersion_speed(params.delta, weber_number(params))


def resolve_current(c0: Union[float, str], delta: float, weber: float) -> float:
    """Turns the 'equal' current mode into c0 = c, passing numbers through."""
    if isinstance(c0, str):
        if c0 != EQUAL_CURRENT:
            raise ConfigurationError(f"Current must be a number or '{EQUAL_CURRENT}', got '{c0}'.")
        return dispersion_speed(delta, weber)
    return float(c0)


class CurrentKind(str, Enum):
    STILL = "still"
    FAVOURABLE = "favourable"
    ADVERSE = "adverse"


@dataclass(frozen=True)
class WaveParameters:
    """Non-dimensional wave and flow parameters. ``c`` is derived, never passed in."""
    delta: float
    weber: float = 0.0
    c0: float = 0.0
    epsilon: float = 0.0
    c: float = field(init=False)
    k_wavenumber: float = field(init=False, default=TWO_PI)

    def __post_init__(self):
        if not math.isfinite(self.c0):
            raise DomainError(f"c0 must be finite, got {self.c0}.")
        if not math.isfinite(self.epsilon) or self.epsilon < 0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}.")
        object.__setattr__(self, "c", dispersion_speed(self.delta, self.weber))

    @classmethod
    def equal_current(cls, delta: float, weber: float = 0.0, epsilon: float = 0.0) -> "WaveParameters":
        return cls(delta=delta, weber=weber, c0=dispersion_speed(delta, weber), epsilon=epsilon)

    @classmethod
    def from_dimensional(cls, params: DimensionalParameters, c0: Union[float, str] = 0.0) -> "WaveParameters":
        delta, weber = params.delta, weber_number(params)
        return cls(delta=delta, weber=weber, c0=resolve_current(c0, delta, weber), epsilon=params.epsilon)

    def with_current(self, c0: float) -> "WaveParameters":
        return replace(self, c0=c0)

    @property
    def sinh_ratio(self) -> float:
        """2 pi delta / sinh(2 pi delta)."""
        return _x_over_sinh(TWO_PI * self.delta)

    @property
    def frame_amplitude(self) -> float:
        """4 pi^2 delta c / sinh(2 pi delta), the prefactor of the moving-frame system."""
        return TWO_PI * self.c * self.sinh_ratio

    @property
    def b(self) -> float:
        return TWO_PI * (self.c0 - self.c)

    @property
    def is_equal_current(self) -> bool:
        return abs(self.c0 - self.c) <= TOLERANCES.case_switch


def current_kind(wp: WaveParameters) -> CurrentKind:
    if wp.c0 == 0.0:
        return CurrentKind.STILL
    return CurrentKind.FAVOURABLE if wp.c0 > 0 else CurrentKind.ADVERSE


# --- The linear field ---

class FieldSample(NamedTuple):
    u: ArrayLike
    v: ArrayLike
    p: ArrayLike
    eta: ArrayLike


def field_values(x: ArrayLike, z: ArrayLike, t: ArrayLike, wp: WaveParameters, amplitude_factor: float = 1.0) -> FieldSample:
    """Evaluates the linear solution without checking that z lies in the strip."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    phase = TWO_PI * (x - wp.c * t)
    depth_arg = TWO_PI * wp.delta * z
    ratio = wp.sinh_ratio * amplitude_factor
    cos_p, sin_p = np.cos(phase), np.sin(phase)
    cosh_z = np.cosh(depth_arg)
    u = wp.c * ratio * cosh_z * cos_p + wp.c0
    v = (wp.c * ratio / wp.delta) * np.sinh(depth_arg) * sin_p
    p = wp.c * wp.c * ratio * cosh_z * cos_p
    eta = amplitude_factor * cos_p
    if u.ndim == 0:
        return FieldSample(float(u), float(v), float(p), float(eta))
    return FieldSample(u, v, p, eta)


def field_sample(x: ArrayLike, z: ArrayLike, t: ArrayLike, wp: WaveParameters) -> FieldSample:
    """(u, v, p, eta) of the linear solution at a point of the fluid strip 0 <= z <= 1."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z_arr)) or np.any(z_arr < 0.0) or np.any(z_arr > 1.0):
        raise DomainError(f"Linear field is defined for 0 <= z <= 1 only, got z = {z}.")
    return field_values(x, z, t, wp)


def mean_curvature(eta_x: ArrayLike, eta_xx: ArrayLike) -> ArrayLike:
    return eta_xx / (1.0 + np.square(eta_x)) ** 1.5


# --- Finite-difference verification of the linearised equations ---

class FieldResiduals(NamedTuple):
    momentum_x: np.ndarray     # u_t + p_x
    momentum_z: np.ndarray     # delta^2 v_t + p_z
    continuity: np.ndarray     # u_x + v_z
    irrotational: np.ndarray   # u_z - delta^2 v_x
    kinematic: np.ndarray      # v - eta_t on z = 1
    dynamic: np.ndarray        # p - eta + delta^2 W_e eta_xx on z = 1

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(np.asarray(r))) for r in self))


def _d1(f, h: float) -> np.ndarray:
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def _d2(f, h: float) -> np.ndarray:
    return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h)


def field_residuals(x: ArrayLike, z: ArrayLike, t: ArrayLike, wp: WaveParameters,
                    step: Optional[float] = None) -> FieldResiduals:
    """Residuals of the linearised system by fourth-order central differences."""
    h = TOLERANCES.fd_step if step is None else step
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    d2 = wp.delta ** 2

    def comp(name: str, dx=0.0, dz=0.0, dt=0.0, zz=None):
        zz = z if zz is None else zz
        return getattr(field_values(x + dx, zz + dz, t + dt, wp), name)

    u_t = _d1(lambda s: comp("u", dt=s), h)
    u_x = _d1(lambda s: comp("u", dx=s), h)
    u_z = _d1(lambda s: comp("u", dz=s), h)
    v_t = _d1(lambda s: comp("v", dt=s), h)
    v_x = _d1(lambda s: comp("v", dx=s), h)
    v_z = _d1(lambda s: comp("v", dz=s), h)
    p_x = _d1(lambda s: comp("p", dx=s), h)
    p_z = _d1(lambda s: comp("p", dz=s), h)

    surface = np.ones_like(z)
    top = field_values(x, surface, t, wp)
    eta_t = _d1(lambda s: comp("eta", dt=s, zz=surface), h)
    # second differences lose digits fast; a coarser step keeps roundoff below truncation
    eta_xx = _d2(lambda s: comp("eta", dx=s, zz=surface), max(h, 1e-3))

    return FieldResiduals(
        momentum_x=u_t + p_x,
        momentum_z=d2 * v_t + p_z,
        continuity=u_x + v_z,
        irrotational=u_z - d2 * v_x,
        kinematic=np.asarray(top.v) - eta_t,
        dynamic=np.asarray(top.p) - np.asarray(top.eta) + d2 * wp.weber * eta_xx,
    )


# --- Scaling between physical and non-dimensional variables ---

class ScaleDirection(str, Enum):
    TO_NONDIMENSIONAL = "to-nondimensional"
    TO_DIMENSIONAL = "to-dimensional"


SCALED_LABELS = ("x", "z", "t", "eta", "u", "v", "p")


def _unit_scales(params: DimensionalParameters, amplitude_scaled: bool) -> Dict[str, float]:
    eps = params.epsilon if amplitude_scaled else 1.0
    return {
        "x": params.wavelength,
        "z": params.h0,
        "t": params.wavelength / params.velocity_scale,
        "eta": params.a_amp,
        "u": params.velocity_scale * eps,
        "v": params.h0 * params.velocity_scale / params.wavelength * eps,
        "p": params.rho * params.g * params.h0 * eps,
    }


def scale_variables(direction: Union[ScaleDirection, str], state: Mapping[str, float],
                    params: Optional[DimensionalParameters], amplitude_scaled: bool = True) -> Dict[str, float]:
    """Maps labelled quantities between physical and non-dimensional form.

    Pressure carries the hydrostatic part: p_phys = p0 + rho g h0 (1 - z) + rho g h0 eps p,
    so a state holding ``p`` must also hold ``z``.
    """
    try:
        direction = ScaleDirection(direction)
    except ValueError as e:
        raise ConfigurationError(f"Unknown scaling direction '{direction}'.") from e
    if params is None:
        raise ConfigurationError("Scaling needs dimensional parameters.")
    unknown = set(state) - set(SCALED_LABELS)
    if unknown:
        raise ConfigurationError(f"Cannot scale unknown quantities: {', '.join(sorted(unknown))}.")

    scales = _unit_scales(params, amplitude_scaled)
    for label in state:
        if scales[label] == 0.0:
            raise ConfigurationError(f"Scaling '{label}' needs a nonzero wave amplitude a_amp.")
    if "p" in state:
        if params.p0 is None:
            raise ConfigurationError("Scaling pressure needs the atmospheric pressure p0.")
        if "z" not in state:
            raise ConfigurationError("Scaling pressure needs the vertical coordinate z in the same state.")

    hydro = params.rho * params.g * params.h0
    out: Dict[str, float] = {}
    if direction is ScaleDirection.TO_DIMENSIONAL:
        for label, value in state.items():
            if label == "p":
                out[label] = params.p0 + hydro * (1.0 - state["z"]) + scales["p"] * value
            else:
                out[label] = scales[label] * value
    else:
        for label, value in state.items():
            if label == "p":
                z_nd = state["z"] / params.h0
                out[label] = (value - params.p0 - hydro * (1.0 - z_nd)) / scales["p"]
            else:
                out[label] = value / scales[label]
    return out

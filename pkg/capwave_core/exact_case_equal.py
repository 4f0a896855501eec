# capwave_core/exact_case_equal.py
"""Closed-form particle paths when the current equals the wave speed (c0 = c).

With b = 0 the moving-frame system decouples into

    X'' = -a^2 sin 2X,     Z'' = a^2 sinh 2Z,      a^2 = A^2 / 2,

with first integrals c1 = X'^2 - a^2 cos 2X and c2 = Z'^2 - a^2 cosh 2Z.
Writing y = tan X and w = tanh Z, the regimes -a^2 < c1 < a^2 and
c2 < -a^2 have Jacobi-function solutions

    y = +-B cn(sqrt(2) a (t - t0_x) | m1),   B^2 = (a^2 + c1)/(a^2 - c1),  m1 = (a^2 + c1)/(2 a^2)
    w = +-dn(sqrt(a^2 - c2) (t - t0_z) | m2),                              m2 = 2 a^2/(a^2 - c2)

Every other regime is served by numerical integration of the same scalar
equation. For physical initial data c1 >= a^2 always holds, so the x part of a
real particle path always takes that numerical route; the y formula is exposed
for free constants of the scalar equation.

dn reaches 1 at even multiples of K(m2), where Z becomes infinite: closed-form
vertical motion ends in finite time and paths are truncated there.
"""

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import TOLERANCES
from .errors import DomainError, RegimeUnsupportedError, TruncationWarning, WrongCaseError
from .particle_dynamics import (
    ComponentSolution, Frame, IntegratorConfig, MethodTag, Trajectory, TrajectoryMeta,
    integrate_component, moving_velocity, warn_on_strip_exit, _check_grid,
)
from .special_functions import (
    EllipticModulusSquared, complete_elliptic_K, incomplete_elliptic_F, jacobi_elliptic,
)
from .wave_model import TWO_PI, WaveParameters

ArrayLike = Union[float, np.ndarray]


def a_squared(wp: WaveParameters) -> float:
    """8 pi^4 delta^2 c^2 / sinh^2(2 pi delta)."""
    A = wp.frame_amplitude
    return 0.5 * A * A


class Regime(str, Enum):
    MINUS_A2_POSITIVE = "minus_a2_positive"   # q - a^2 > 0
    MIXED = "mixed"                           # q - a^2 < 0 < q + a^2
    BOTH_NEGATIVE = "both_negative"           # q + a^2 < 0
    BOUNDARY = "boundary"                     # q = +-a^2


def classify_constant(q: float, a_sq: float) -> Regime:
    tol = TOLERANCES.identity * max(1.0, a_sq)
    if abs(q - a_sq) <= tol or abs(q + a_sq) <= tol:
        return Regime.BOUNDARY
    if q > a_sq:
        return Regime.MINUS_A2_POSITIVE
    if q > -a_sq:
        return Regime.MIXED
    return Regime.BOTH_NEGATIVE


@dataclass(frozen=True)
class RegimeTag:
    x_regime: Regime
    z_regime: Regime

    @property
    def x_closed_form(self) -> bool:
        return self.x_regime is Regime.MIXED

    @property
    def z_closed_form(self) -> bool:
        return self.z_regime is Regime.BOTH_NEGATIVE


@dataclass(frozen=True)
class CaseIConstants:
    a_sq: float
    c1: float
    c2: float
    regime: RegimeTag
    X0: float
    Xdot0: float
    Z0: float
    Zdot0: float
    m1: Optional[EllipticModulusSquared] = None
    m2: Optional[EllipticModulusSquared] = None
    sign_x: int = 1
    sign_z: int = 1
    t0_x: Optional[float] = None
    t0_z: Optional[float] = None
    x_turns: int = 0   # X = x_turns * pi + arctan(y)

    @property
    def x_amplitude(self) -> float:
        return math.sqrt((self.a_sq + self.c1) / (self.a_sq - self.c1))

    @property
    def x_rate(self) -> float:
        return math.sqrt(2.0 * self.a_sq)

    @property
    def z_rate(self) -> float:
        return math.sqrt(self.a_sq - self.c2)


def regime_classify(constants: CaseIConstants) -> RegimeTag:
    return RegimeTag(classify_constant(constants.c1, constants.a_sq), classify_constant(constants.c2, constants.a_sq))


def first_integral_values(X: ArrayLike, Z: ArrayLike, Xdot: ArrayLike, Zdot: ArrayLike, a_sq: float):
    """(c1, c2) evaluated on states; constant along every c0 = c path."""
    c1 = np.square(Xdot) - a_sq * np.cos(2.0 * np.asarray(X))
    c2 = np.square(Zdot) - a_sq * np.cosh(2.0 * np.asarray(Z))
    return c1, c2


def physical_first_integral(X0: ArrayLike, Z0: ArrayLike, a_sq: float) -> ArrayLike:
    """c1 for coupled initial data: a^2 (1 + 2 cos^2 X0 sinh^2 Z0); c2 is its negative."""
    return a_sq * (1.0 + 2.0 * np.square(np.cos(X0)) * np.square(np.sinh(Z0)))


def case1_constants(a_sq: float, X0: float, Xdot0: float, Z0: float, Zdot0: float) -> CaseIConstants:
    """Constants, moduli, signs and time offsets from data of the two scalar equations at t = 0."""
    if not a_sq > 0:
        raise DomainError(f"a^2 must be > 0, got {a_sq}.")
    c1 = Xdot0 * Xdot0 - a_sq * math.cos(2.0 * X0)
    c2 = Zdot0 * Zdot0 - a_sq * math.cosh(2.0 * Z0)
    regime = RegimeTag(classify_constant(c1, a_sq), classify_constant(c2, a_sq))
    turns = int(math.floor(X0 / math.pi + 0.5))
    values: Dict[str, object] = {}

    if regime.x_closed_form:
        m1 = EllipticModulusSquared((a_sq + c1) / (2.0 * a_sq))
        amplitude = math.sqrt((a_sq + c1) / (a_sq - c1))
        y0 = math.tan(X0 - turns * math.pi)
        sign_x = 1 if y0 >= 0 else -1
        phi = math.acos(min(1.0, abs(y0) / amplitude))
        F = incomplete_elliptic_F(phi, m1)
        # on [0, K] cn falls, so y moves toward zero: sign_x * Xdot0 <= 0 there
        v0 = F if sign_x * Xdot0 <= 0 else -F
        values.update(m1=m1, sign_x=sign_x, t0_x=-v0 / math.sqrt(2.0 * a_sq))

    if regime.z_closed_form:
        m2 = EllipticModulusSquared(2.0 * a_sq / (a_sq - c2))
        sign_z = 1 if Z0 >= 0 else -1
        w0 = math.tanh(abs(Z0))
        sn_sq = min(1.0, max(0.0, (1.0 - w0 * w0) / m2.m))
        F = incomplete_elliptic_F(math.asin(math.sqrt(sn_sq)), m2)
        # on [0, K] dn falls, so |Z| decreases: sign_z * Zdot0 <= 0 there
        v0 = F if sign_z * Zdot0 <= 0 else -F
        values.update(m2=m2, sign_z=sign_z, t0_z=-v0 / math.sqrt(a_sq - c2))

    return CaseIConstants(a_sq=a_sq, c1=c1, c2=c2, regime=regime, X0=X0, Xdot0=Xdot0, Z0=Z0, Zdot0=Zdot0,
                          x_turns=turns, **values)


def first_integral_constants(X0: float, Z0: float, wp: WaveParameters) -> CaseIConstants:
    """Constants of a real particle starting at (X0, Z0), velocities from the moving-frame system."""
    if not wp.is_equal_current:
        raise WrongCaseError(f"Elliptic closed forms need c0 = c; got c0 = {wp.c0}, c = {wp.c}.")
    if not Z0 >= 0:
        raise DomainError(f"Z0 must be >= 0, got {Z0}.")
    Xdot0, Zdot0 = moving_velocity(X0, Z0, wp)
    return case1_constants(a_squared(wp), X0, Xdot0, Z0, Zdot0)


def y_exact(t: ArrayLike, constants: CaseIConstants) -> ArrayLike:
    """y = tan X from the cn solution; mixed x regime only."""
    if not constants.regime.x_closed_form:
        raise RegimeUnsupportedError(
            f"No closed form for y in the '{constants.regime.x_regime.value}' regime; integrate numerically.")
    v = constants.x_rate * (np.asarray(t, dtype=float) - constants.t0_x)
    cn = jacobi_elliptic(v, constants.m1).cn
    return constants.sign_x * constants.x_amplitude * cn


def w_exact(t: ArrayLike, constants: CaseIConstants) -> ArrayLike:
    """w = tanh Z from the dn solution; both-negative z regime only."""
    if not constants.regime.z_closed_form:
        raise RegimeUnsupportedError(
            f"No closed form for w in the '{constants.regime.z_regime.value}' regime; integrate numerically.")
    v = constants.z_rate * (np.asarray(t, dtype=float) - constants.t0_z)
    sn = jacobi_elliptic(v, constants.m2).sn
    return constants.sign_z * np.sqrt(np.maximum(0.0, 1.0 - constants.m2.m * np.square(sn)))


def y_ode_residual(t: ArrayLike, constants: CaseIConstants) -> ArrayLike:
    """ydot^2 - (1 + y^2)(c1 (1 + y^2) + a^2 (1 - y^2)) along the cn solution."""
    c = constants
    y = np.asarray(y_exact(t, c))
    sn, cn, dn = jacobi_elliptic(c.x_rate * (np.asarray(t, dtype=float) - c.t0_x), c.m1)
    ydot = -c.sign_x * c.x_amplitude * c.x_rate * np.asarray(sn) * np.asarray(dn)
    one_y2 = 1.0 + y * y
    return ydot ** 2 - one_y2 * (c.c1 * one_y2 + c.a_sq * (1.0 - y * y))


def w_ode_residual(t: ArrayLike, constants: CaseIConstants) -> ArrayLike:
    """wdot^2 - (1 - w^2)(c2 (1 - w^2) + a^2 (1 + w^2)) along the dn solution."""
    c = constants
    w = np.asarray(w_exact(t, c))
    sn, cn, dn = jacobi_elliptic(c.z_rate * (np.asarray(t, dtype=float) - c.t0_z), c.m2)
    wdot = -c.sign_z * c.m2.m * c.z_rate * np.asarray(sn) * np.asarray(cn)
    one_w2 = 1.0 - w * w
    return wdot ** 2 - one_w2 * (c.c2 * one_w2 + c.a_sq * (1.0 + w * w))


def x_period(constants: CaseIConstants) -> float:
    """Period of y (and of X) in t: 4K(m1) / (sqrt(2) a)."""
    if not constants.regime.x_closed_form:
        raise RegimeUnsupportedError("x is not periodic in closed form outside the mixed regime.")
    return 4.0 * complete_elliptic_K(constants.m1) / constants.x_rate


def z_period(constants: CaseIConstants) -> float:
    """Period of w in t: 2K(m2) / sqrt(a^2 - c2)."""
    if not constants.regime.z_closed_form:
        raise RegimeUnsupportedError("w is not periodic in closed form outside the both-negative regime.")
    return 2.0 * complete_elliptic_K(constants.m2) / constants.z_rate


def blowup_time(constants: CaseIConstants) -> Optional[float]:
    """First t > 0 where w reaches +-1 (|Z| infinite), or None when z has no closed form."""
    if not constants.regime.z_closed_form:
        return None
    v0 = -constants.z_rate * constants.t0_z
    K = complete_elliptic_K(constants.m2)
    # dn = 1 at even multiples of K
    next_even = 2.0 * K * (math.floor(v0 / (2.0 * K)) + 1.0)
    return (next_even - v0) / constants.z_rate


@dataclass
class Case1Solution:
    """Evaluates X(t), Z(t) from closed forms where available, numerics otherwise."""
    constants: CaseIConstants
    x_numeric: Optional[ComponentSolution] = None
    z_numeric: Optional[ComponentSolution] = None
    stop_time: Optional[float] = None
    events: List[str] = field(default_factory=list)

    @property
    def closed_form(self) -> Dict[str, bool]:
        return {"x": self.x_numeric is None, "z": self.z_numeric is None}

    def X(self, t: ArrayLike) -> np.ndarray:
        if self.x_numeric is not None:
            return np.asarray(self.x_numeric.evaluate(t))
        return self.constants.x_turns * math.pi + np.arctan(y_exact(t, self.constants))

    def Z(self, t: ArrayLike) -> np.ndarray:
        if self.z_numeric is not None:
            return np.asarray(self.z_numeric.evaluate(t))
        c = self.constants
        if c.Z0 == 0.0 and c.Zdot0 == 0.0:
            return np.zeros_like(np.asarray(t, dtype=float))
        w = np.clip(w_exact(t, c), -1.0 + 1e-16, 1.0 - 1e-16)
        return np.arctanh(w)

    def __call__(self, t: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        return self.X(t), self.Z(t)


def evaluate_case1(constants: CaseIConstants, t_grid: Sequence[float], cfg: Optional[IntegratorConfig] = None,
                   fallback: bool = True, verbose: bool = False) -> Case1Solution:
    """Builds the per-component solution over [0, t_grid[-1]], integrating unsupported components."""
    grid = _check_grid(t_grid, 0.0)
    solution = Case1Solution(constants)
    bed = constants.Z0 == 0.0 and constants.Zdot0 == 0.0
    missing = []
    if not constants.regime.x_closed_form:
        missing.append(f"x ({constants.regime.x_regime.value})")
    if not constants.regime.z_closed_form and not bed:
        missing.append(f"z ({constants.regime.z_regime.value})")
    if missing and not fallback:
        raise RegimeUnsupportedError(
            f"No closed form for {' and '.join(missing)}; rerun with numeric fallback enabled.")

    if not constants.regime.x_closed_form:
        if verbose: print(f"[CaseI] x regime '{constants.regime.x_regime.value}': numeric fallback")
        solution.x_numeric = integrate_component("x", constants.X0, constants.Xdot0, grid, constants.a_sq, cfg)
        solution.events.append(f"x component integrated numerically ({constants.regime.x_regime.value} regime)")
    if not constants.regime.z_closed_form and not bed:
        if verbose: print(f"[CaseI] z regime '{constants.regime.z_regime.value}': numeric fallback")
        solution.z_numeric = integrate_component("z", constants.Z0, constants.Zdot0, grid, constants.a_sq, cfg)
        solution.events.append(f"z component integrated numerically ({constants.regime.z_regime.value} regime)")
        solution.stop_time = solution.z_numeric.stopped_at
    elif not bed:
        t_blow = blowup_time(constants)
        if t_blow is not None and t_blow <= grid[-1]:
            solution.stop_time = t_blow
    return solution


def trajectory_case1(x0: float, z0: float, t_grid: Sequence[float], wp: WaveParameters,
                     cfg: Optional[IntegratorConfig] = None, fallback: bool = True,
                     verbose: bool = False) -> Trajectory:
    """Particle path for c0 = c from closed forms, with per-component numeric fallback."""
    if not wp.is_equal_current:
        raise WrongCaseError(f"trajectory_case1 needs c0 = c; got c0 = {wp.c0}, c = {wp.c}.")
    if not 0.0 <= z0 <= 1.0:
        raise DomainError(f"z0 must lie in [0, 1], got {z0}.")
    grid = _check_grid(t_grid, 0.0)
    X0, Z0 = TWO_PI * x0, TWO_PI * wp.delta * z0
    constants = first_integral_constants(X0, Z0, wp)
    if verbose:
        print(f"[CaseI] a^2={constants.a_sq:.6g} c1={constants.c1:.6g} c2={constants.c2:.6g} "
              f"regimes x={constants.regime.x_regime.value} z={constants.regime.z_regime.value}")
    solution = evaluate_case1(constants, grid, cfg, fallback, verbose)

    meta = TrajectoryMeta(params=wp, method=MethodTag.EXACT_CASE_I, closed_form=solution.closed_form,
                          events=list(solution.events))
    if solution.stop_time is not None:
        keep = grid < solution.stop_time
        # the last kept sample must stay clear of the singular point
        Z_kept = solution.Z(grid[keep]) if np.any(keep) else np.array([])
        keep_idx = np.flatnonzero(keep)[np.abs(Z_kept) < TOLERANCES.blowup_cap]
        grid = grid[keep_idx]
        message = f"vertical coordinate becomes infinite at t = {solution.stop_time:.6g}; path truncated"
        meta.events.append(message)
        meta.truncated_at = float(solution.stop_time)
        warnings.warn(message, TruncationWarning, stacklevel=2)
        if verbose: print(f"[CaseI] {message}")

    X, Z = solution(grid)
    x = X / TWO_PI + wp.c * grid
    z = Z / (TWO_PI * wp.delta)
    warn_on_strip_exit(z, grid, meta.events, verbose)

    def dense(tt):
        tt = np.asarray(tt, dtype=float)
        Xd, Zd = solution(tt)
        return Xd / TWO_PI + wp.c * tt, Zd / (TWO_PI * wp.delta)

    return Trajectory(t=grid, x=x, z=z, meta=meta, frame=Frame.LAB, dense=dense)

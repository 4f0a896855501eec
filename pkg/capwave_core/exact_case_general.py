# capwave_core/exact_case_general.py
"""Parametric particle paths when the current differs from the wave speed (c0 != c).

With y = tan X and u = y'/(1 + y^2) the moving-frame system reduces to an
Abel equation of the second kind in the variable xi = -(b/2) ln(1 + y^2):

    u du/dxi = u + (2 a^2 / b) exp(2 xi / b) - b

whose solution is known in parametric form. With R = sqrt(tau^2 - 2 a^2) and
D = C - b ln|tau + R|:

    u   = tau D / R + b,          xi = -b ln|R / D|,
    y   = +-sqrt(R^2 / D^2 - 1),  dt/dtau = 1 / (R D y).

Along a real path tau = A cosh Z, R = A sinh Z and D = R cos X, so C is the
stream function plus b ln A. Time is recovered from the last relation by
quadrature, done in the variable theta = arccosh(tau / A) = Z, where it reads
dt = dtheta / sqrt(g(theta)) with g = A^2 sinh^2 theta - (psi - b theta)^2.

tau(t) is not monotone for all t: it reverses at roots of g (where y = 0).
The bridge walks these branches one after the other and stops where D = 0
(X leaves the tan chart), where Z runs away, or once the window is covered.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .config import TOLERANCES
from .errors import (
    DomainError, NumericalFailureError, OutOfRangeError, RegimeUnsupportedError, TruncationWarning,
    UnsupportedInitialDataError, WrongCaseError,
)
from .particle_dynamics import (
    Frame, IntegratorConfig, MethodTag, ParticleState, Trajectory, TrajectoryMeta,
    integrate, moving_velocity, warn_on_strip_exit, _check_grid,
)
from .wave_model import TWO_PI, WaveParameters

ArrayLike = Union[float, np.ndarray]


class BranchEnd(str, Enum):
    TURNING = "turning"          # y -> 0, tau reverses
    CHART_EXIT = "chart_exit"    # D -> 0, |y| -> infinity
    BLOWUP = "blowup"            # Z passes the cap in finite time
    STALLED = "stalled"          # no further progress (degenerate root)


@dataclass(frozen=True)
class CaseIIConstants:
    a_sq: float
    b: float
    C: float
    z_const: float
    psi: float
    amplitude: float             # A = sqrt(2 a^2)
    kappa: int                   # sign of cos X on the chart
    turns: int                   # X = turns * pi + arctan(y)
    y_sign: int                  # sign of y leaving t = 0
    direction: int               # sign of dtau/dt leaving t = 0
    tau0: float
    theta0: float
    u0: float
    xi0: float
    tau_domain: Tuple[float, float]
    xi_radicand_factor: float = 2.0
    stationary: bool = False

    def __post_init__(self):
        if self.b == 0.0:
            raise WrongCaseError("The parametric solution needs b = 2 pi (c0 - c) != 0.")
        if not self.tau_domain[0] <= self.tau0 <= self.tau_domain[1]:
            raise DomainError("tau0 must lie in the fitted tau domain.")


# --- Functions of theta = Z ---

def _D_theta(theta, k: CaseIIConstants):
    return k.psi - k.b * theta


def _g(theta, k: CaseIIConstants):
    s = k.amplitude * np.sinh(theta)
    d = _D_theta(theta, k)
    return (s - d) * (s + d)


def _g_prime(theta, k: CaseIIConstants):
    return 2.0 * k.amplitude ** 2 * np.sinh(theta) * np.cosh(theta) + 2.0 * k.b * _D_theta(theta, k)


def _theta_of_tau(tau, k: CaseIIConstants):
    ratio = np.asarray(tau, dtype=float) / k.amplitude
    return np.arccosh(np.maximum(ratio, 1.0))


def _check_tau(tau, k: CaseIIConstants) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    tau = np.asarray(tau, dtype=float)
    if np.any(~np.isfinite(tau)) or np.any(tau * tau <= 2.0 * k.a_sq):
        raise DomainError(f"tau must satisfy tau^2 > 2 a^2 = {2.0 * k.a_sq:.6g}.")
    R = np.sqrt((tau - k.amplitude) * (tau + k.amplitude))
    D = k.C - k.b * np.log(np.abs(tau + R))
    if np.any(D == 0.0):
        raise DomainError("tau is at a zero of C - b ln|tau + R|; excluded from the domain.")
    return tau, R, D


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


# --- Residual oracles ---

def abel_reduction_residual(y: ArrayLike, ydot: ArrayLike, yddot: ArrayLike, constants: CaseIIConstants) -> ArrayLike:
    """Residual of the second-order equation satisfied by y = tan X."""
    a_sq, b = constants.a_sq, constants.b
    y, ydot, yddot = np.asarray(y), np.asarray(ydot), np.asarray(yddot)
    one_y2 = 1.0 + y * y
    return _scalar(yddot - 2.0 * y * ydot ** 2 / one_y2 + b * y * ydot + 2.0 * a_sq * y - b * b * y * one_y2)


def canonical_form_residual(u_val: ArrayLike, dudxi: ArrayLike, xi: ArrayLike, constants: CaseIIConstants) -> ArrayLike:
    """u du/dxi - u - (2 a^2 / b) exp(2 xi / b) + b."""
    b = constants.b
    u_val, dudxi, xi = np.asarray(u_val), np.asarray(dudxi), np.asarray(xi)
    return _scalar(u_val * dudxi - u_val - (2.0 * constants.a_sq / b) * np.exp(2.0 * xi / b) + b)


# --- The parametric solution ---

def parametric_solution(tau: ArrayLike, constants: CaseIIConstants) -> Tuple[ArrayLike, ArrayLike]:
    tau, R, D = _check_tau(tau, constants)
    u = tau * D / R + constants.b
    R_xi = np.sqrt(tau * tau - constants.xi_radicand_factor * constants.a_sq)
    xi = -constants.b * np.log(np.abs(R_xi / D))
    return _scalar(u), _scalar(xi)


def parametric_derivatives(tau: ArrayLike, constants: CaseIIConstants) -> Tuple[ArrayLike, ArrayLike]:
    """(du/dtau, dxi/dtau), analytically."""
    tau, R, D = _check_tau(tau, constants)
    b = constants.b
    du = -2.0 * constants.a_sq * D / R ** 3 - b * tau / R ** 2
    R_xi_sq = tau * tau - constants.xi_radicand_factor * constants.a_sq
    dxi = -b * (tau / R_xi_sq + b / (R * D))
    return _scalar(du), _scalar(dxi)


@dataclass(frozen=True)
class RadicandCheck:
    factor: float
    residual: float
    alternative_factor: float
    alternative_residual: float

    @property
    def passed(self) -> bool:
        return self.residual < TOLERANCES.canonical_residual


def _interior_taus(constants: CaseIIConstants, n: int) -> np.ndarray:
    lo, hi = constants.tau_domain
    if not math.isfinite(hi):
        hi = lo + 10.0 * max(1.0, lo)
    s = 0.5 * (1.0 - np.cos(np.pi * (np.arange(1, n + 1) / (n + 1))))
    return lo + (hi - lo) * (0.02 + 0.96 * s)


def canonical_residual_on_grid(constants: CaseIIConstants, taus: Optional[np.ndarray] = None) -> float:
    """Largest canonical-form residual of the parametric solution on a tau grid."""
    taus = _interior_taus(constants, 64) if taus is None else np.asarray(taus, dtype=float)
    u, xi = parametric_solution(taus, constants)
    du, dxi = parametric_derivatives(taus, constants)
    u, xi, du, dxi = map(np.atleast_1d, (u, xi, du, dxi))
    # du/dxi is ill-conditioned where xi is stationary in tau
    usable = np.abs(dxi) > 1e-6 * np.max(np.abs(dxi))
    residual = canonical_form_residual(u[usable], du[usable] / dxi[usable], xi[usable], constants)
    return float(np.max(np.abs(residual))) if np.size(residual) else 0.0


def reconcile_radicand(constants: CaseIIConstants, taus: Optional[np.ndarray] = None) -> Tuple[CaseIIConstants, RadicandCheck]:
    """Picks the xi radicand (tau^2 - 2a^2 or tau^2 - a^2) that satisfies the canonical form."""
    results = []
    for factor in (2.0, 1.0):
        candidate = replace(constants, xi_radicand_factor=factor)
        try:
            results.append((factor, canonical_residual_on_grid(candidate, taus)))
        except DomainError:
            results.append((factor, math.inf))
    results.sort(key=lambda item: (item[1] >= TOLERANCES.canonical_residual, item[0] != 2.0))
    (best, best_res), (alt, alt_res) = results[0], results[1]
    return replace(constants, xi_radicand_factor=best), RadicandCheck(best, best_res, alt, alt_res)


def y_of_tau(tau: ArrayLike, constants: CaseIIConstants, y_sign: Optional[int] = None) -> ArrayLike:
    tau, R, D = _check_tau(tau, constants)
    sign = constants.y_sign if y_sign is None else y_sign
    q = (R / D) ** 2
    radicand = q - 1.0
    if np.any(radicand < -1e-12 * q):
        raise DomainError("tau lies where (R/D)^2 < 1; y is not real there.")
    return _scalar(sign * np.sqrt(np.maximum(radicand, 0.0)))


def dy_dtau(tau: ArrayLike, constants: CaseIIConstants, y_sign: Optional[int] = None) -> ArrayLike:
    tau, R, D = _check_tau(tau, constants)
    y = np.asarray(y_of_tau(tau, constants, y_sign))
    return _scalar((tau * D + constants.b * R) / (D ** 3 * y))


def dt_dtau(tau: ArrayLike, constants: CaseIIConstants, y_sign: Optional[int] = None) -> ArrayLike:
    """Integrand of the time relation, 1 / (R D y)."""
    tau, R, D = _check_tau(tau, constants)
    y = np.asarray(y_of_tau(tau, constants, y_sign))
    return _scalar(1.0 / (R * D * y))


# --- Quadrature in theta ---

def checked_quad(func: Callable[[float], float], a: float, b: float, depth: int = 0) -> float:
    """Adaptive quadrature whose error estimate is checked, not discarded.

    An estimate above ``quad_error_max`` (absolute, or relative to the value)
    splits the interval in two; past ``quad_max_depth`` splits the integral is
    reported as a numerical failure.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, error = quad(func, a, b, epsabs=TOLERANCES.quad_epsabs,
                            epsrel=TOLERANCES.quad_epsrel, limit=TOLERANCES.quad_limit)
    if math.isfinite(value) and error <= TOLERANCES.quad_error_max * max(1.0, abs(value)):
        return value
    if depth >= TOLERANCES.quad_max_depth or a == b:
        raise NumericalFailureError(
            f"Quadrature on [{a:.17g}, {b:.17g}] did not converge (value {value:.6g}, error estimate {error:.3g}).")
    mid = 0.5 * (a + b)
    return checked_quad(func, a, mid, depth + 1) + checked_quad(func, mid, b, depth + 1)


def _cell_time(theta_a: float, theta_b: float, k: CaseIIConstants) -> float:
    """Integral of 1/sqrt(g) between two thetas (nonnegative).

    Each half is mapped by theta = end +- s^2, which removes the inverse
    square-root singularity when that end is a root of g.
    """
    lo, hi = min(theta_a, theta_b), max(theta_a, theta_b)
    if hi - lo <= 0.0:
        return 0.0
    mid = 0.5 * (lo + hi)

    def half(end: float, sign: float, length: float) -> float:
        slope = abs(float(_g_prime(end, k)))
        limit = 2.0 / math.sqrt(slope) if slope > 0 else 0.0

        def integrand(s):
            gv = float(_g(end + sign * s * s, k))
            return 2.0 * s / math.sqrt(gv) if gv > 0.0 else limit

        return checked_quad(integrand, 0.0, math.sqrt(length))

    return half(lo, 1.0, mid - lo) + half(hi, -1.0, hi - mid)


def _z_increment(theta_a: float, theta_b: float, k: CaseIIConstants) -> float:
    """Signed integral of A / (tau^2 - 2 a^2) dtau from tau(theta_a) to tau(theta_b).

    Written in theta the integrand is 1 / sinh(theta), which stays well scaled
    where tau itself grows like exp(theta).
    """
    if theta_a == theta_b:
        return 0.0
    return checked_quad(lambda th: 1.0 / math.sinh(th), theta_a, theta_b)


def _branch_limit(theta: float, direction: int, k: CaseIIConstants) -> Tuple[float, BranchEnd]:
    """Scans from theta in one direction to the first root of g, zero of D, or the cap."""
    cap, floor = TOLERANCES.blowup_cap, TOLERANCES.scan_step_min
    theta_D = k.psi / k.b
    h = TOLERANCES.scan_step_min * max(1.0, theta)
    prev = theta
    while True:
        nxt = prev + direction * h
        if direction > 0 and nxt >= cap:
            nxt = cap
        if direction < 0 and nxt <= floor:
            nxt = floor
        g_next = float(_g(nxt, k))
        d_next = k.kappa * float(_D_theta(nxt, k))
        if g_next < 0.0 or d_next <= 0.0:
            candidates = []
            if d_next <= 0.0:
                candidates.append((theta_D, BranchEnd.CHART_EXIT))
            if g_next < 0.0:
                if float(_g(prev, k)) <= 0.0:
                    root = prev
                else:
                    root = brentq(lambda th: float(_g(th, k)), min(prev, nxt), max(prev, nxt),
                                  xtol=TOLERANCES.root_xtol, rtol=4 * np.finfo(float).eps)
                candidates.append((root, BranchEnd.TURNING))
            return min(candidates, key=lambda item: direction * (item[0] - theta))
        if nxt == cap:
            return cap, BranchEnd.BLOWUP
        if nxt == floor:
            return floor, BranchEnd.STALLED
        prev = nxt
        h = min(2.0 * h, TOLERANCES.scan_step_max)


# --- Fitting ---

def fit_constants(X0: float, Z0: float, wp: WaveParameters) -> CaseIIConstants:
    """Constants of the parametric solution through the moving-frame point (X0, Z0) at t = 0."""
    if wp.is_equal_current:
        raise WrongCaseError(f"The parametric solution needs c0 != c; got c0 = c = {wp.c}.")
    if not Z0 > 0:
        raise UnsupportedInitialDataError(f"Parametric fit needs Z0 > 0, got {Z0}.")
    turns = int(math.floor(X0 / math.pi + 0.5))
    X_red = X0 - turns * math.pi
    if math.cos(X_red) < 1e-12:
        raise UnsupportedInitialDataError(f"X0 = {X0} sits on the edge of the tan chart (cos X0 = 0).")
    kappa = 1 if turns % 2 == 0 else -1
    A = wp.frame_amplitude
    a_sq = 0.5 * A * A
    b = wp.b
    y0 = math.tan(X_red)
    u0, _ = moving_velocity(X0, Z0, wp)
    xi0 = -0.5 * b * math.log1p(y0 * y0)
    sec = math.sqrt(1.0 + y0 * y0)
    tau0 = kappa * (u0 - b) * sec
    if not tau0 * tau0 > 2.0 * a_sq:
        raise UnsupportedInitialDataError(f"No parametric branch through X0 = {X0}, Z0 = {Z0} (tau0 = {tau0}).")
    R0 = math.sqrt((tau0 - A) * (tau0 + A))
    D0 = kappa * R0 / sec
    C = D0 + b * math.log(tau0 + R0)
    psi = C - b * math.log(A)
    z_const = math.log(math.tanh(0.5 * Z0))

    stationary = y0 == 0.0 and u0 == 0.0
    if y0 != 0.0:
        direction = (1 if y0 > 0 else -1) * kappa
    else:
        direction = 1 if kappa * u0 > 0 else -1
    theta0 = Z0
    provisional = CaseIIConstants(
        a_sq=a_sq, b=b, C=C, z_const=z_const, psi=psi, amplitude=A, kappa=kappa, turns=turns,
        y_sign=kappa * direction, direction=direction, tau0=tau0, theta0=theta0, u0=u0, xi0=xi0,
        tau_domain=(tau0, tau0), stationary=stationary,
    )
    if stationary:
        return provisional
    lo, _ = _branch_limit(theta0, -1, provisional)
    hi, _ = _branch_limit(theta0, +1, provisional)
    return replace(provisional, tau_domain=(A * math.cosh(lo), A * math.cosh(hi)))


# --- Time bridge ---

@dataclass(frozen=True, eq=False)
class TauBranch:
    """One stretch of monotone tau(t); node arrays are in path (time) order."""
    theta_nodes: np.ndarray
    t_nodes: np.ndarray
    z_nodes: np.ndarray
    direction: int
    y_sign: int
    end_kind: BranchEnd

    @property
    def t_start(self) -> float:
        return float(self.t_nodes[0])

    @property
    def t_end(self) -> float:
        return float(self.t_nodes[-1])

    @property
    def theta_end(self) -> float:
        return float(self.theta_nodes[-1])


@dataclass(frozen=True, eq=False)
class TauBridge:
    constants: CaseIIConstants
    branches: Tuple[TauBranch, ...]
    interpolation_order: int = 3
    _splines: Tuple[CubicSpline, ...] = field(default=(), repr=False)

    @property
    def t_max(self) -> float:
        if self.constants.stationary or not self.branches:
            return math.inf
        return self.branches[-1].t_end

    @property
    def end_kind(self) -> Optional[BranchEnd]:
        return self.branches[-1].end_kind if self.branches else None

    @property
    def tau_grid(self) -> np.ndarray:
        """tau at every node, branch after branch (increasing within a branch when tau increases)."""
        if not self.branches:
            return np.array([self.constants.tau0])
        A = self.constants.amplitude
        return np.concatenate([A * np.cosh(br.theta_nodes) for br in self.branches])

    @property
    def t_values(self) -> np.ndarray:
        if not self.branches:
            return np.array([0.0])
        return np.concatenate([br.t_nodes for br in self.branches])

    def approximate_tau(self, t: float) -> float:
        """Cubic interpolation of tau(t) through the node table (no root-finding)."""
        index = _branch_index(self, t)
        theta = float(self._splines[index](t))
        return self.constants.amplitude * math.cosh(theta)


def _branch_nodes(theta_start: float, theta_end: float, n: int) -> np.ndarray:
    s = 0.5 * (1.0 - np.cos(np.pi * np.arange(n + 1) / n))
    nodes = theta_start + (theta_end - theta_start) * s
    nodes[0], nodes[-1] = theta_start, theta_end
    return nodes


def build_tau_bridge(constants: CaseIIConstants, t_end: float, verbose: bool = False) -> TauBridge:
    """Walks tau-branches from t = 0 until t_end is covered or the path leaves the chart."""
    if constants.stationary:
        return TauBridge(constants, ())
    k = constants
    theta, direction, t, z_int = k.theta0, k.direction, 0.0, k.z_const
    branches: List[TauBranch] = []
    for _ in range(TOLERANCES.max_branches):
        theta_e, kind = _branch_limit(theta, direction, k)
        if abs(theta_e - theta) < 1e-14:
            # double root of g: the path creeps towards it and never turns
            break
        nodes = _branch_nodes(theta, theta_e, TOLERANCES.bridge_nodes)
        dt = np.array([_cell_time(a, b, k) for a, b in zip(nodes[:-1], nodes[1:])])
        dz = np.array([_z_increment(a, b, k) for a, b in zip(nodes[:-1], nodes[1:])])
        t_nodes = t + np.concatenate([[0.0], np.cumsum(dt)])
        z_nodes = z_int + np.concatenate([[0.0], np.cumsum(dz)])
        # near a blow-up the cell times fall below the spacing of t; such nodes add nothing
        keep = np.concatenate([[True], np.diff(t_nodes) > 0.0])
        if keep.sum() < 2:
            break
        if not keep.all() and verbose:
            print(f"[CaseII] dropped {int((~keep).sum())} nodes with no time increment near theta {theta_e:.6g}")
        branch = TauBranch(
            theta_nodes=nodes[keep], t_nodes=t_nodes[keep], z_nodes=z_nodes[keep],
            direction=direction, y_sign=k.kappa * direction, end_kind=kind,
        )
        branches.append(branch)
        if verbose:
            print(f"[CaseII] branch {len(branches)}: theta {theta:.6g} -> {theta_e:.6g} "
                  f"({kind.value}), t {branch.t_start:.6g} -> {branch.t_end:.6g}")
        t, z_int = branch.t_end, float(branch.z_nodes[-1])
        if kind is not BranchEnd.TURNING or t >= t_end:
            break
        theta, direction = theta_e, -direction
    if not branches:
        raise DomainError("The fitted tau branch is empty; t(tau) cannot be integrated.")
    splines = tuple(CubicSpline(br.t_nodes, br.theta_nodes) for br in branches)
    return TauBridge(constants, tuple(branches), 3, splines)


def _branch_index(bridge: TauBridge, t: float) -> int:
    if not bridge.branches:
        raise OutOfRangeError("A stationary solution has no tau bridge.")
    slack = 1e-12 * max(1.0, abs(bridge.t_max))
    if t < -slack or t > bridge.t_max + slack:
        raise OutOfRangeError(f"t = {t} is outside the bridge range [0, {bridge.t_max}].")
    for i, br in enumerate(bridge.branches):
        if t <= br.t_end:
            return i
    return len(bridge.branches) - 1


def _theta_of_t(t: float, bridge: TauBridge) -> Tuple[float, TauBranch, int]:
    """theta at time t plus the branch and the node cell holding it."""
    branch = bridge.branches[_branch_index(bridge, t)]
    k = bridge.constants
    t = min(max(t, branch.t_start), branch.t_end)
    j = int(np.searchsorted(branch.t_nodes, t, side="left"))
    if j < len(branch.t_nodes) and branch.t_nodes[j] == t:
        return float(branch.theta_nodes[j]), branch, max(j - 1, 0)
    j = min(max(j, 1), len(branch.t_nodes) - 1)
    th_a, th_b = float(branch.theta_nodes[j - 1]), float(branch.theta_nodes[j])
    t_a = float(branch.t_nodes[j - 1])
    target = lambda th: t_a + _cell_time(th_a, th, k) - t
    if target(th_b) <= 0.0:
        return th_b, branch, j - 1
    theta = brentq(target, min(th_a, th_b), max(th_a, th_b), xtol=TOLERANCES.root_xtol,
                   rtol=4 * np.finfo(float).eps)
    return float(theta), branch, j - 1


def tau_of_t(t: float, bridge: TauBridge) -> float:
    """Inverts the time relation on the branch covering t."""
    if bridge.constants.stationary:
        return bridge.constants.tau0
    theta, _, _ = _theta_of_t(float(t), bridge)
    return bridge.constants.amplitude * math.cosh(theta)


def t_of_tau(tau: float, constants: CaseIIConstants, bridge: Optional[TauBridge] = None, branch: int = 0) -> float:
    """Time at which the path passes tau.

    Without a bridge the first branch through tau0 is used (negative for points
    behind tau0); with a bridge, the given branch.
    """
    tau, _, _ = _check_tau(tau, constants)
    theta = float(_theta_of_tau(tau, constants))
    if bridge is None:
        lo, hi = constants.tau_domain
        if not lo * (1 - 1e-12) <= float(tau) <= hi * (1 + 1e-12):
            raise DomainError(f"tau = {float(tau)} is outside the fitted branch [{lo}, {hi}].")
        ahead = constants.direction * (theta - constants.theta0) >= 0
        duration = _cell_time(constants.theta0, theta, constants)
        return duration if ahead else -duration
    br = bridge.branches[branch]
    first, last = sorted((float(br.theta_nodes[0]), float(br.theta_nodes[-1])))
    if not first - 1e-12 <= theta <= last + 1e-12:
        raise DomainError(f"tau = {float(tau)} is not on branch {branch}.")
    return br.t_start + _cell_time(float(br.theta_nodes[0]), theta, constants)


# --- Trajectories ---

@dataclass
class Case2Solution:
    """Moving-frame (X, Z) of a c0 != c path: exact on the bridge, numeric past a chart exit."""
    constants: CaseIIConstants
    bridge: TauBridge
    wp: WaveParameters
    continuation: Optional[Trajectory] = None
    stop_time: Optional[float] = None

    @property
    def exact_until(self) -> float:
        return self.bridge.t_max

    def exact_state(self, t: float) -> Tuple[float, float, float]:
        """(X, Z, z-integral) at t from the bridge."""
        k = self.constants
        if k.stationary:
            # y0 = 0 and u0 = 0: the particle sits at X = turns * pi
            return k.turns * math.pi, k.theta0, k.z_const
        theta, branch, cell = _theta_of_t(t, self.bridge)
        g = max(float(_g(theta, k)), 0.0)
        D = abs(float(_D_theta(theta, k)))
        X_local = branch.y_sign * (0.5 * math.pi if D == 0.0 else math.atan(math.sqrt(g) / D))
        z_int = float(branch.z_nodes[cell]) + _z_increment(float(branch.theta_nodes[cell]), theta, k)
        return k.turns * math.pi + X_local, theta, z_int

    def __call__(self, t: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        X = np.empty_like(t_arr)
        Z = np.empty_like(t_arr)
        for i, ti in enumerate(t_arr):
            if self.constants.stationary or ti <= self.exact_until:
                X[i], _, z_int = self.exact_state(ti)
                Z[i] = 2.0 * math.atanh(math.exp(z_int)) if z_int < 0 else math.inf
            elif self.continuation is not None:
                x_c, z_c = (self.continuation.dense or self.continuation.evaluate)(ti)
                X[i] = TWO_PI * (float(x_c) - self.wp.c * ti)
                Z[i] = TWO_PI * self.wp.delta * float(z_c)
            else:
                raise OutOfRangeError(f"t = {ti} is past the end of the solution.")
        if np.ndim(t) == 0:
            return X[0], Z[0]
        return X, Z


def trajectory_case2(x0: float, z0: float, t_grid: Sequence[float], wp: WaveParameters,
                     cfg: Optional[IntegratorConfig] = None, fallback: bool = True,
                     verbose: bool = False) -> Trajectory:
    """Particle path for c0 != c from the parametric solution."""
    if wp.is_equal_current:
        raise WrongCaseError(f"trajectory_case2 needs c0 != c; got c0 = c = {wp.c}.")
    if not 0.0 <= z0 <= 1.0:
        raise DomainError(f"z0 must lie in [0, 1], got {z0}.")
    grid = _check_grid(t_grid, 0.0)
    X0, Z0 = TWO_PI * x0, TWO_PI * wp.delta * z0

    try:
        constants = fit_constants(X0, Z0, wp)
    except UnsupportedInitialDataError as e:
        if not fallback:
            raise
        if verbose: print(f"[CaseII] {e} Falling back to numerical integration.")
        traj = integrate(ParticleState(x0, z0, 0.0), max(float(grid[-1]), 1e-12), wp, cfg, t_eval=grid, verbose=verbose)
        traj.meta.events.insert(0, f"parametric fit unavailable ({e}); numeric fallback")
        return traj

    if not constants.stationary:
        constants, check = reconcile_radicand(constants)
        if verbose:
            print(f"[CaseII] C={constants.C:.10g} psi={constants.psi:.10g} tau0={constants.tau0:.10g} "
                  f"radicand factor {check.factor:g} (residual {check.residual:.2e})")
    bridge = build_tau_bridge(constants, float(grid[-1]), verbose)
    solution = Case2Solution(constants, bridge, wp)
    meta = TrajectoryMeta(params=wp, method=MethodTag.EXACT_CASE_II, closed_form={"x": True, "z": True})

    t_exact_end = bridge.t_max
    if grid[-1] > t_exact_end:
        kind = bridge.end_kind
        if kind is BranchEnd.CHART_EXIT:
            X_e, Z_e, _ = solution.exact_state(t_exact_end)
            x_e = X_e / TWO_PI + wp.c * t_exact_end
            z_e = Z_e / (TWO_PI * wp.delta)
            later = grid[grid > t_exact_end]
            message = f"X left the tan chart at t = {t_exact_end:.6g}; continued numerically"
            meta.events.append(message)
            if verbose: print(f"[CaseII] {message}")
            solution.continuation = integrate(ParticleState(x_e, z_e, t_exact_end), float(later[-1]), wp, cfg,
                                              t_eval=later, verbose=verbose)
        else:
            solution.stop_time = t_exact_end
            what = "Z runs away" if kind is BranchEnd.BLOWUP else "the branch stalls"
            message = f"{what} at t = {t_exact_end:.6g}; path truncated"
            meta.events.append(message)
            meta.truncated_at = t_exact_end
            warnings.warn(message, TruncationWarning, stacklevel=2)
            if verbose: print(f"[CaseII] {message}")
            grid = grid[grid < t_exact_end]

    X, Z = solution(grid)
    X, Z = np.atleast_1d(X), np.atleast_1d(Z)
    bad = ~np.isfinite(Z)
    if np.any(bad):
        # exp(z-integral) reached 1: the arctanh argument left (0, 1)
        first = int(np.argmax(bad))
        message = f"z-integral condition violated at t = {grid[first]:.6g}; path truncated"
        meta.events.append(message)
        meta.truncated_at = float(grid[first])
        warnings.warn(message, TruncationWarning, stacklevel=2)
        grid, X, Z = grid[:first], X[:first], Z[:first]

    x = X / TWO_PI + wp.c * grid
    z = Z / (TWO_PI * wp.delta)
    warn_on_strip_exit(z, grid, meta.events, verbose)

    def dense(tt):
        tt = np.asarray(tt, dtype=float)
        Xd, Zd = solution(tt)
        return np.asarray(Xd) / TWO_PI + wp.c * tt, np.asarray(Zd) / (TWO_PI * wp.delta)

    return Trajectory(t=grid, x=x, z=z, meta=meta, frame=Frame.LAB, dense=dense)

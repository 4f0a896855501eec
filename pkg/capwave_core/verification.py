# capwave_core/verification.py
"""The `verify` suite: identities, residuals and oracle comparisons as named checks."""

import json
import math
import tempfile
import time
import traceback
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy import special

from .config import TOOL_NAME, RunConfig, __version__
from .exact_case_equal import (
    a_squared, case1_constants, evaluate_case1, first_integral_constants, first_integral_values,
    physical_first_integral, x_period, w_ode_residual, y_ode_residual,
)
from .exact_case_general import (
    dt_dtau, fit_constants, parametric_solution, reconcile_radicand, trajectory_case2, y_of_tau,
)
from .particle_dynamics import (
    IntegratorConfig, ParticleState, integrate, integrate_component, mean_current_check,
    moving_velocity, stream_function, to_moving,
)
from .serialization import read_json, trajectory_table, write_csv, write_json
from .special_functions import complete_elliptic_K, incomplete_elliptic_F, jacobi_elliptic
from .wave_model import TWO_PI, WaveParameters, dispersion_speed, field_residuals

SEED = 20240611
TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, max_step=0.05)

# (delta, weber, c0 - c, x0, z0); both signs of c0 - c. Every set starts on a
# stream line that stays bounded in Z, so the path is finite for all t.
CASE2_SETS: Tuple[Tuple[float, float, float, float, float], ...] = (
    (0.8, 0.0, 0.06, -0.04, 0.05),
    (1.0, 0.0, 0.05, -0.03, 0.15),
    (0.5, 0.1, 0.5, -0.05, 0.1),
    (0.8, 0.5, -0.2, 0.02, 0.1),
    (1.0, 0.2, -0.08, 0.01, 0.15),
)

# free data of the decoupled equations: a^2, X0, Xdot0, Z0, Zdot0
CASE1_A_SQ = 0.01
CASE1_SETS: Tuple[Tuple[float, float, float, float], ...] = tuple(
    (0.3, 0.1 * xd, 0.4, 0.1 * zd) for xd, zd in ((0.2, 0.0), (0.5, -0.2), (0.9, 0.3), (1.1, 0.1), (1.3, -0.5))
)


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    seconds: float
    detail: str = ""


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_json(self) -> str:
        document = {
            "tool": TOOL_NAME, "version": __version__, "passed": self.passed, "seconds": self.seconds,
            "checks": [_finite_or_str(asdict(check)) for check in self.checks],
        }
        return json.dumps(document, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        document = json.loads(text)
        checks = []
        for entry in document["checks"]:
            entry = dict(entry)
            entry["residual"] = float(entry["residual"])
            checks.append(CheckResult(**entry))
        return cls(checks=checks, seconds=float(document.get("seconds", 0.0)))

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def _finite_or_str(entry: Dict) -> Dict:
    # strict JSON has no inf/nan
    if not math.isfinite(entry["residual"]):
        entry["residual"] = str(entry["residual"])
    return entry


# --- Special functions ---

def _check_jacobi_identities() -> Tuple[float, str]:
    u = np.linspace(-20.0, 20.0, 10_000)
    worst = 0.0
    for m in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99):
        sn, cn, dn = jacobi_elliptic(u, m)
        worst = max(worst, float(np.max(np.abs(sn ** 2 + cn ** 2 - 1.0))),
                    float(np.max(np.abs(dn ** 2 + m * sn ** 2 - 1.0))))
    return worst, "sn^2 + cn^2 = 1 and dn^2 + m sn^2 = 1 on [-20, 20]"


def _check_k_at_zero() -> Tuple[float, str]:
    return abs(complete_elliptic_K(0.0) - math.pi / 2.0), "K(0) = pi / 2"


def _check_sn_inverts_f() -> Tuple[float, str]:
    phi = np.linspace(-1.5, 1.5, 301)
    worst = 0.0
    for m in (0.05, 0.3, 0.6, 0.9, 0.99):
        sn = jacobi_elliptic(incomplete_elliptic_F(phi, m), m).sn
        worst = max(worst, float(np.max(np.abs(sn - np.sin(phi)))))
    return worst, "sn(F(phi|m)|m) = sin(phi)"


def _check_elliptic_oracle() -> Tuple[float, str]:
    ms = np.array([0.0, 0.1, 0.5, 0.9, 0.99])
    u = np.linspace(-5.0, 5.0, 101)
    worst = max(abs(complete_elliptic_K(m) - special.ellipk(m)) / special.ellipk(m) for m in ms)
    for m in ms:
        ours = jacobi_elliptic(u, m)
        ref = special.ellipj(u, m)
        worst = max(worst, max(float(np.max(np.abs(a - b))) for a, b in zip(ours, ref[:3])))
        phi = np.linspace(0.0, 1.5, 31)
        worst = max(worst, float(np.max(np.abs(incomplete_elliptic_F(phi, m) - special.ellipkinc(phi, m)))))
    return worst, "K, F and sn/cn/dn against scipy.special"


# --- Wave model ---

def _check_field_residuals() -> Tuple[float, str]:
    rng = np.random.default_rng(SEED)
    x, z, t = rng.random(1000), rng.random(1000), rng.random(1000)
    worst = 0.0
    for delta in (0.1, 0.5, 1.0):
        for weber in (0.0, 0.5, 2.0):
            wp = WaveParameters(delta=delta, weber=weber, c0=0.3)
            worst = max(worst, field_residuals(x, z, t, wp, step=1e-4).max_abs())
    return worst, "linear system and boundary conditions by central differences"


def _check_mean_current() -> Tuple[float, str]:
    worst = 0.0
    for c0 in (-0.5, 0.0, 0.7):
        wp = WaveParameters(delta=0.5, weber=0.5, c0=c0)
        worst = max(worst, abs(mean_current_check(0.4, 0.3, wp) - c0))
    return worst, "average of u over a wavelength equals c0"


# --- Case I ---

def _check_first_integrals() -> Tuple[float, str]:
    # sinh Z cos X = 1e-3 along the path, so Z stays below 0.3 on [0, 10]
    wp = WaveParameters.equal_current(0.5, 0.0)
    X0 = -1.5
    Z0 = math.asinh(1e-3 / math.cos(X0))
    t = np.linspace(0.0, 10.0, 501)
    traj = integrate(ParticleState(X0 / TWO_PI, Z0 / (TWO_PI * wp.delta), 0.0), 10.0, wp,
                     IntegratorConfig(rel_tol=1e-10, abs_tol=1e-14, max_step=0.05), t_eval=t)
    X, Z = to_moving(traj.x, traj.z, traj.t, wp)
    Xdot, Zdot = moving_velocity(X, Z, wp)
    c1, c2 = first_integral_values(X, Z, Xdot, Zdot, a_squared(wp))
    return float(max(np.max(np.abs(c1 - c1[0])), np.max(np.abs(c2 - c2[0])))), "c1, c2 along a numerical path on [0, 10]"


def _check_first_integral_identities() -> Tuple[float, str]:
    rng = np.random.default_rng(SEED + 1)
    wp = WaveParameters.equal_current(0.5, 0.0)
    a_sq = a_squared(wp)
    worst = 0.0
    for X0, z0 in zip(rng.uniform(-math.pi, math.pi, 1000), rng.random(1000)):
        Z0 = TWO_PI * wp.delta * z0
        constants = first_integral_constants(float(X0), float(Z0), wp)
        scale = max(1.0, abs(constants.c1))
        worst = max(worst, abs(constants.c1 - physical_first_integral(X0, Z0, a_sq)) / scale,
                    abs(constants.c1 + constants.c2) / scale)
    return worst, "c1 = a^2 (1 + 2 cos^2 X0 sinh^2 Z0) and c1 + c2 = 0"


def _case1_free_constants():
    return [case1_constants(CASE1_A_SQ, *data) for data in CASE1_SETS]


def _check_case1_odes() -> Tuple[float, str]:
    t = np.linspace(0.0, 5.0, 401)
    worst = 0.0
    for constants in _case1_free_constants():
        worst = max(worst, float(np.max(np.abs(y_ode_residual(t, constants)))),
                    float(np.max(np.abs(w_ode_residual(t, constants)))))
    return worst, "cn and dn solutions satisfy the first-order equations for y and w"


def _check_case1_oracle() -> Tuple[float, str]:
    t = np.linspace(0.0, 5.0, 201)
    worst = 0.0
    for constants in _case1_free_constants():
        solution = evaluate_case1(constants, t, fallback=False)
        x_ref = integrate_component("x", constants.X0, constants.Xdot0, t, constants.a_sq, TIGHT)
        z_ref = integrate_component("z", constants.Z0, constants.Zdot0, t, constants.a_sq, TIGHT)
        worst = max(worst, float(np.max(np.abs(solution.X(t) - x_ref.q))),
                    float(np.max(np.abs(solution.Z(t) - z_ref.q))))
    return worst, "closed forms against RK45 on the decoupled equations, t in [0, 5]"


def _check_case1_drift() -> Tuple[float, str]:
    c = dispersion_speed(0.5, 0.0)
    worst = 0.0
    for constants in _case1_free_constants():
        period = x_period(constants)
        solution = evaluate_case1(constants, np.array([0.0, period]), fallback=False)
        X = solution.X(np.array([0.0, period]))
        drift = (X[1] - X[0]) / TWO_PI + c * period
        worst = max(worst, abs(drift - c * period))
    return worst, "horizontal drift over one x period equals c T"


# --- Case II ---

def _case2_parameters(data) -> Tuple[WaveParameters, float, float]:
    delta, weber, dc, x0, z0 = data
    wp = WaveParameters(delta=delta, weber=weber, c0=dispersion_speed(delta, weber) + dc)
    return wp, x0, z0


def _check_stream_function() -> Tuple[float, str]:
    worst = 0.0
    for data in CASE2_SETS:
        wp, x0, z0 = _case2_parameters(data)
        t = np.linspace(0.0, 5.0, 251)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            traj = integrate(ParticleState(x0, z0, 0.0), 5.0, wp, TIGHT, t_eval=t)
        X, Z = to_moving(traj.x, traj.z, traj.t, wp)
        psi = stream_function(X, Z, wp)
        worst = max(worst, float(np.max(np.abs(psi - psi[0]))))
    return worst, "A sinh Z cos X + b Z along numerical paths"


def _fitted(data):
    wp, x0, z0 = _case2_parameters(data)
    constants = fit_constants(TWO_PI * x0, TWO_PI * wp.delta * z0, wp)
    return wp, z0, constants


def _check_case2_identities() -> Tuple[float, str]:
    worst = 0.0
    for data in CASE2_SETS:
        wp, z0, k = _fitted(data)
        Z0 = TWO_PI * wp.delta * z0
        worst = max(worst, abs(k.tau0 - k.amplitude * math.cosh(Z0)) / k.tau0,
                    abs(k.C - (k.psi + k.b * math.log(k.amplitude))) / max(1.0, abs(k.C)))
    return worst, "tau0 = A cosh Z0 and C = psi + b ln A"


def _check_canonical_form() -> Tuple[float, str]:
    worst = 0.0
    for data in CASE2_SETS:
        _, _, k = _fitted(data)
        _, check = reconcile_radicand(k)
        worst = max(worst, check.residual)
    return worst, "parametric solution satisfies the canonical Abel form"


def _check_substitution_chain() -> Tuple[float, str]:
    worst = 0.0
    for data in CASE2_SETS:
        _, _, k = _fitted(data)
        lo, hi = k.tau_domain
        hi = min(hi, lo + 10.0 * max(1.0, lo))
        h = 1e-5 * (hi - lo)
        for tau in lo + (hi - lo) * np.linspace(0.1, 0.9, 17):
            y = y_of_tau(tau, k)
            if abs(y) < 1e-6:
                continue
            dy = (y_of_tau(tau + h, k) - y_of_tau(tau - h, k)) / (2.0 * h)
            ydot = dy / dt_dtau(tau, k)
            u, _ = parametric_solution(tau, k)
            worst = max(worst, abs(u - ydot / (1.0 + y * y)))
    return worst, "u = ydot / (1 + y^2) with ydot = (dy/dtau) / (dt/dtau)"


def _check_case2_oracle() -> Tuple[float, str]:
    t = np.linspace(0.0, 1.0, 21)
    worst = 0.0
    for data in CASE2_SETS:
        wp, x0, z0 = _case2_parameters(data)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            exact = trajectory_case2(x0, z0, t, wp, TIGHT, fallback=False)
            ref = integrate(ParticleState(x0, z0, 0.0), 1.0, wp, TIGHT, t_eval=t)
        n = len(exact)
        worst = max(worst, float(np.max(np.abs(exact.x - ref.x[:n]))), float(np.max(np.abs(exact.z - ref.z[:n]))))
    return worst, "parametric paths against RK45 on t in [0, 1], c0 > c and c0 < c"


# --- Serialization and config ---

def _check_determinism() -> Tuple[float, str]:
    wp = WaveParameters(delta=0.8, weber=0.0, c0=0.1)
    t = np.linspace(0.0, 1.0, 11)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        traj_a = integrate(ParticleState(0.0, 0.5, 0.0), 1.0, wp, t_eval=t)
        traj_b = integrate(ParticleState(0.0, 0.5, 0.0), 1.0, wp, t_eval=t)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        same = write_csv(traj_a, tmp / "a.csv").read_bytes() == write_csv(traj_b, tmp / "b.csv").read_bytes()
        data, _ = read_json(write_json(traj_a, tmp / "a.json"))
        table = trajectory_table(traj_a)
        lossless = all(np.array_equal(data[name], table[:, i]) for i, name in enumerate(data))
    return (0.0 if same and lossless else 1.0), "identical runs give identical bytes; JSON round trip is exact"


def _check_config_round_trip() -> Tuple[float, str]:
    config = RunConfig(delta=0.7, weber=0.25, c0=0.125, x0=0.1, z0=0.3, t_end=2.5, dt_out=0.05,
                       method="both", output_format="json", out="runs/a", rel_tol=1e-9, fallback=True)
    same = all(RunConfig.from_toml(c.to_toml()) == c for c in (config, RunConfig()))
    return (0.0 if same else 1.0), "parse(serialize(config)) = config"


CheckFunction = Callable[[], Tuple[float, str]]

CHECKS: Tuple[Tuple[str, float, CheckFunction], ...] = (
    ("jacobi_identities", 1e-11, _check_jacobi_identities),
    ("complete_k_at_zero", 1e-13, _check_k_at_zero),
    ("sn_inverts_f", 1e-11, _check_sn_inverts_f),
    ("elliptic_vs_scipy", 1e-11, _check_elliptic_oracle),
    ("field_residuals", 1e-6, _check_field_residuals),
    ("mean_current", 1e-10, _check_mean_current),
    ("case1_first_integrals", 1e-8, _check_first_integrals),
    ("case1_identities", 1e-10, _check_first_integral_identities),
    ("case1_closed_form_odes", 1e-8, _check_case1_odes),
    ("case1_vs_rk45", 1e-8, _check_case1_oracle),
    ("case1_drift", 1e-8, _check_case1_drift),
    ("stream_function", 1e-8, _check_stream_function),
    ("case2_identities", 1e-10, _check_case2_identities),
    ("case2_canonical_form", 1e-9, _check_canonical_form),
    ("case2_substitution_chain", 1e-8, _check_substitution_chain),
    ("case2_vs_rk45", 1e-6, _check_case2_oracle),
    ("determinism", 0.5, _check_determinism),
    ("config_round_trip", 0.5, _check_config_round_trip),
)


def run_verify(perturbations: Optional[Mapping[str, float]] = None, only: Optional[List[str]] = None,
               verbose: bool = False) -> VerificationReport:
    """Runs every check (or those named in `only`).

    `perturbations` adds a fixed amount to a check's measured residual; tests
    use it to make sure a failing check is reported as such.
    """
    perturbations = dict(perturbations or {})
    unknown = set(perturbations) | set(only or ())
    unknown -= {name for name, _, _ in CHECKS}
    if unknown:
        raise KeyError(f"Unknown check(s): {', '.join(sorted(unknown))}")
    report = VerificationReport()
    start_all = time.perf_counter()
    for name, tolerance, check in CHECKS:
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            residual, detail = check()
        except Exception as e:
            residual, detail = math.inf, f"{type(e).__name__}: {e}"
            if verbose: traceback.print_exc()
        residual += perturbations.get(name, 0.0)
        elapsed = time.perf_counter() - start
        passed = bool(residual < tolerance)
        report.checks.append(CheckResult(name, float(residual), tolerance, passed, elapsed, detail))
        if verbose:
            status = "ok" if passed else "FAILED"
            print(f"[Verify] {name}: {residual:.3e} (tol {tolerance:.0e}) {status} in {elapsed:.2f}s")
    report.seconds = time.perf_counter() - start_all
    return report

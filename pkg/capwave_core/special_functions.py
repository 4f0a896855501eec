# capwave_core/special_functions.py
"""Elliptic integrals of the first kind and the Jacobi elliptic functions.

Everything here is built on the arithmetic-geometric mean:

* ``complete_elliptic_K`` iterates the AGM of 1 and sqrt(1 - m).
* ``incomplete_elliptic_F`` runs the descending Landen (AGM) phase recursion
  after reducing the amplitude to [-pi/2, pi/2].
* ``jacobi_elliptic`` reduces u modulo 4K, runs the AGM forward and then the
  backward phase recursion.

All functions are pure and safe to call from several threads at once.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .config import TOLERANCES
from .errors import DomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class EllipticModulusSquared:
    """The parameter m = k^2 of an elliptic integral, restricted to [0, 1)."""
    m: float

    def __post_init__(self):
        if not isinstance(self.m, (int, float, np.floating)) or not math.isfinite(self.m):
            raise DomainError(f"Elliptic parameter must be a finite real, got {self.m!r}.")
        if not 0.0 <= self.m < 1.0:
            raise DomainError(f"Elliptic parameter m = {self.m} is outside [0, 1).")
        object.__setattr__(self, "m", float(self.m))

    @property
    def k(self) -> float:
        return math.sqrt(self.m)

    @property
    def complementary(self) -> float:
        return 1.0 - self.m


class JacobiTriple(NamedTuple):
    sn: ArrayLike
    cn: ArrayLike
    dn: ArrayLike


ModulusLike = Union[EllipticModulusSquared, float]


def _parameter(m: ModulusLike) -> float:
    if isinstance(m, EllipticModulusSquared):
        return m.m
    return EllipticModulusSquared(m).m


def _agm_table(m: float):
    """Forward AGM sequence (a_n, c_n) for the pair (1, sqrt(1-m))."""
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(TOLERANCES.agm_max_iter):
        if abs(c) <= TOLERANCES.elliptic_eps * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def complete_elliptic_K(m: ModulusLike) -> float:
    """K(m) = integral of 1/sqrt(1 - m sin^2) over [0, pi/2]."""
    if not isinstance(m, EllipticModulusSquared) and isinstance(m, (int, float)) and m >= 1.0:
        raise DomainError(f"K(m) diverges for m = {m} >= 1.")
    m_val = _parameter(m)
    a_seq, _ = _agm_table(m_val)
    return math.pi / (2.0 * a_seq[-1])


def _reduced_F(phi: float, m: float) -> float:
    """F(phi|m) for 0 <= phi < pi/2 by the descending Landen recursion."""
    if phi == 0.0:
        return 0.0
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    t = math.tan(phi)
    turns = 0  # multiples of pi accumulated by the doubling phase
    scale = 1.0
    for _ in range(TOLERANCES.agm_max_iter):
        if abs(c) <= TOLERANCES.elliptic_eps * a:
            break
        ratio = b / a
        phi = phi + math.atan(t * ratio) + turns * math.pi
        denom = 1.0 - ratio * t * t
        if abs(denom) > 10.0 * np.finfo(float).eps:
            t = t * (1.0 + ratio) / denom
            turns = int((phi + math.pi / 2.0) / math.pi)
        else:
            t = math.tan(phi)
            turns = int((phi - math.atan(t)) / math.pi)
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        scale += scale
    return (math.atan(t) + turns * math.pi) / (scale * a)


def _incomplete_F_scalar(phi: float, m: float) -> float:
    if not math.isfinite(phi):
        raise DomainError(f"Amplitude must be finite, got {phi}.")
    if m == 1.0:
        if abs(phi) >= math.pi / 2.0:
            raise DomainError("F(phi|1) diverges for |phi| >= pi/2.")
        return math.atanh(math.sin(phi))
    half_turns = math.floor(phi / math.pi + 0.5)
    r = phi - half_turns * math.pi
    sign = -1.0 if r < 0 else 1.0
    r = abs(r)
    K = complete_elliptic_K(m) if (half_turns or r >= math.pi / 2.0) else 0.0
    inner = K if r >= math.pi / 2.0 else _reduced_F(r, m)
    return 2.0 * half_turns * K + sign * inner


def incomplete_elliptic_F(phi: ArrayLike, m: ModulusLike) -> ArrayLike:
    """F(phi|m). Odd in phi, and F(pi/2|m) = K(m).

    m = 1 is accepted for |phi| < pi/2, where F reduces to artanh(sin phi).
    """
    if isinstance(m, EllipticModulusSquared):
        m_val = m.m
    elif isinstance(m, (int, float)) and m == 1.0:
        m_val = 1.0
    else:
        if isinstance(m, (int, float)) and m > 1.0:
            raise DomainError(f"F(phi|m) is not real for m = {m} > 1 on this domain.")
        m_val = _parameter(m)
    if np.ndim(phi) == 0:
        return _incomplete_F_scalar(float(phi), m_val)
    flat = np.asarray(phi, dtype=float)
    return np.array([_incomplete_F_scalar(float(p), m_val) for p in flat.ravel()]).reshape(flat.shape)


def jacobi_elliptic(u: ArrayLike, m: ModulusLike) -> JacobiTriple:
    """(sn, cn, dn)(u|m), vectorised over u."""
    m_val = _parameter(m)
    u_arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u_arr)):
        raise DomainError("Jacobi functions need a finite argument.")
    scalar = u_arr.ndim == 0

    if 1.0 - m_val < TOLERANCES.hyperbolic_limit:
        sech = 1.0 / np.cosh(u_arr)
        triple = JacobiTriple(np.tanh(u_arr), sech, sech.copy())
    else:
        a_seq, c_seq = _agm_table(m_val)
        K = math.pi / (2.0 * a_seq[-1])
        period = 4.0 * K
        v = u_arr - period * np.round(u_arr / period)
        n = len(a_seq) - 1
        phi = (2.0 ** n) * a_seq[-1] * v
        prev = phi
        for i in range(n, 0, -1):
            prev = phi
            ratio = np.clip(c_seq[i] * np.sin(phi) / a_seq[i], -1.0, 1.0)
            phi = 0.5 * (np.arcsin(ratio) + phi)
        cn = np.cos(phi)
        dn = cn / np.cos(prev - phi) if n > 0 else np.ones_like(phi)
        triple = JacobiTriple(np.sin(phi), cn, dn)

    if scalar:
        return JacobiTriple(float(triple.sn), float(triple.cn), float(triple.dn))
    return triple

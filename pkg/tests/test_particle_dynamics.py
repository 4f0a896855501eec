# tests/test_particle_dynamics.py

import math
import sys
import unittest
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

PROJECT_ROOT_DIR = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT_DIR))

from capwave_core.errors import DomainError, NumericalFailureError, OutOfRangeError, StripExitWarning
from capwave_core.particle_dynamics import (
    Frame, FrameDirection, IntegratorConfig, MethodTag, MovingFrameState, ParticleState, Trajectory,
    TrajectoryMeta, drift_diagnostic, integrate, integrate_component, mean_current_check, moving_velocity,
    stream_function, to_lab, to_moving, transform_frame,
)
from capwave_core.wave_model import WaveParameters, field_values

TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, max_step=0.05)


class TestIntegrate(unittest.TestCase):

    def setUp(self):
        self.wp = WaveParameters(delta=0.5, weber=0.1, c0=0.2)

    def test_01_samples_on_requested_grid(self):
        grid = np.linspace(0.0, 1.0, 11)
        traj = integrate(ParticleState(0.0, 0.5), 1.0, self.wp, t_eval=grid)
        np.testing.assert_array_equal(traj.t, grid)
        self.assertEqual(traj.meta.method, MethodTag.NUMERIC)
        self.assertEqual(traj.frame, Frame.LAB)
        self.assertEqual(traj.x[0], 0.0)
        self.assertEqual(traj.z[0], 0.5)

    def test_02_zero_amplitude_is_uniform_drift(self):
        grid = np.linspace(0.0, 2.0, 21)
        traj = integrate(ParticleState(0.1, 0.3), 2.0, self.wp, t_eval=grid, amplitude_factor=0.0)
        np.testing.assert_allclose(traj.x, 0.1 + 0.2 * grid, atol=1e-12)
        np.testing.assert_allclose(traj.z, 0.3, atol=1e-14)
        self.assertTrue(any("amplitude factor" in e for e in traj.meta.events))

    def test_03_stream_function_is_conserved(self):
        # each start lies on a stream line that stays finite over [0, 3]
        cases = (
            (self.wp, ParticleState(0.0, 0.5)),
            (WaveParameters(delta=1.0, c0=-0.3), ParticleState(0.2, 0.4)),
            (WaveParameters.equal_current(1.0), ParticleState(0.0, 0.4)),
        )
        for wp, start in cases:
            with self.subTest(wp=wp):
                grid = np.linspace(0.0, 3.0, 61)
                traj = integrate(start, 3.0, wp, cfg=TIGHT, t_eval=grid)
                self.assertEqual(len(traj), 61)
                X, Z = traj.coordinates("moving")
                psi = stream_function(X, Z, wp)
                self.assertLess(np.max(np.abs(psi - psi[0])), 1e-8)

    def test_04_velocity_matches_field(self):
        traj = integrate(ParticleState(0.0, 0.5), 0.5, self.wp, cfg=TIGHT, t_eval=[0.0, 0.5])
        # backward difference of the dense output against the field at the same point
        h = 1e-6
        x1, z1 = traj.evaluate(np.array([0.5 - h, 0.5]))
        sample = field_values(x1[1], z1[1], 0.5, self.wp)
        self.assertAlmostEqual((x1[1] - x1[0]) / h, sample.u, delta=1e-4)
        self.assertAlmostEqual((z1[1] - z1[0]) / h, sample.v, delta=1e-4)

    def test_05_invalid_arguments(self):
        with self.assertRaises(DomainError): integrate(ParticleState(0.0, 0.5), 0.0, self.wp)
        with self.assertRaises(DomainError): integrate(ParticleState(0.0, 0.5), 1.0, self.wp, t_eval=[0.0, 2.0])
        with self.assertRaises(DomainError): integrate(ParticleState(0.0, 0.5), 1.0, self.wp, t_eval=[0.5, 0.2])
        with self.assertRaises(DomainError): ParticleState(float("nan"), 0.5)

    def test_06_strip_exit_warns(self):
        # strong adverse current: the stream line through z = 0.98 peaks near z = 1.015
        wp = WaveParameters(delta=0.5, c0=-3.0)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            traj = integrate(ParticleState(0.5 / (2 * math.pi), 0.98), 0.5, wp, t_eval=np.linspace(0.0, 0.5, 51))
        self.assertEqual(len(traj), 51)
        self.assertGreater(traj.z.max(), 1.0)
        self.assertTrue(any(issubclass(w.category, StripExitWarning) for w in caught))
        self.assertTrue(any("left the strip" in e for e in traj.meta.events))

    def test_07_blowup_before_first_output_time_fails(self):
        # Z runs away near t = 0.5, before the first requested sample
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with self.assertRaises(NumericalFailureError):
                integrate(ParticleState(0.2, 0.4), 3.0, self.wp, t_eval=[2.0, 3.0])


class TestMovingFrame(unittest.TestCase):

    def test_01_moving_system_matches_lab_field(self):
        wp = WaveParameters(delta=0.7, weber=0.4, c0=0.5)
        x, z, t = 0.3, 0.45, 0.8
        sample = field_values(x, z, t, wp)
        X, Z = to_moving(x, z, t, wp)
        Xdot, Zdot = moving_velocity(X, Z, wp)
        self.assertAlmostEqual(Xdot, 2 * math.pi * (sample.u - wp.c), delta=1e-12)
        self.assertAlmostEqual(Zdot, 2 * math.pi * wp.delta * sample.v, delta=1e-12)

    def test_02_transform_frame_type_checks(self):
        wp = WaveParameters(delta=0.5)
        moving = transform_frame(ParticleState(0.1, 0.2, 0.3), wp, FrameDirection.LAB_TO_MOVING)
        self.assertIsInstance(moving, MovingFrameState)
        with self.assertRaises(DomainError):
            transform_frame(moving, wp, "lab-to-moving")
        with self.assertRaises(DomainError):
            transform_frame(ParticleState(0.0, 0.0), wp, "moving-to-lab")


@given(st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False),
       st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False),
       st.floats(min_value=0.0, max_value=20.0, allow_nan=False, allow_infinity=False),
       st.floats(min_value=0.05, max_value=3.0, allow_nan=False, allow_infinity=False))
@settings(max_examples=200, deadline=None)
def test_frame_round_trip(x, z, t, delta):
    wp = WaveParameters(delta=delta, c0=0.1)
    there = transform_frame(ParticleState(x, z, t), wp, "lab-to-moving")
    back = transform_frame(there, wp, "moving-to-lab")
    assert abs(back.x - x) <= 1e-12 * max(1.0, abs(x), abs(wp.c * t))
    assert abs(back.z - z) <= 1e-14
    assert back.t == t


@pytest.mark.parametrize("delta,weber,c0", [(0.5, 0.0, 0.0), (1.0, 0.5, 0.3), (0.2, 1.0, -0.4)])
def test_mean_current_is_c0(delta, weber, c0):
    wp = WaveParameters(delta=delta, weber=weber, c0=c0)
    for z in (0.0, 0.5, 1.0):
        assert abs(mean_current_check(z, 0.4, wp) - c0) < 1e-10


def test_mean_current_outside_strip():
    with pytest.raises(DomainError):
        mean_current_check(1.5, 0.0, WaveParameters(delta=0.5))


def test_integrate_component_pendulum_energy():
    a_sq = 0.3
    sol = integrate_component("x", 0.4, 0.2, np.linspace(0.0, 5.0, 101), a_sq, cfg=TIGHT)
    energy = sol.qdot ** 2 - a_sq * np.cos(2.0 * sol.q)
    assert np.max(np.abs(energy - energy[0])) < 1e-9
    assert sol.stopped_at is None


def test_integrate_component_stops_at_cap():
    sol = integrate_component("z", 0.5, 1.0, np.linspace(0.0, 10.0, 1001), 0.5, cap=5.0)
    assert sol.stopped_at is not None and sol.stopped_at < 10.0
    assert sol.t[-1] < sol.stopped_at
    assert np.all(np.abs(sol.q) <= 5.0)
    with pytest.raises(DomainError):
        integrate_component("y", 0.0, 0.0, [0.0, 1.0], 0.5)


def test_trajectory_evaluate_and_drift():
    wp = WaveParameters(delta=0.5, c0=0.25)
    t = np.linspace(0.0, 4.0, 41)
    traj = Trajectory(t=t, x=0.25 * t, z=np.full_like(t, 0.5), meta=TrajectoryMeta(params=wp, method=MethodTag.NUMERIC))
    x, z = traj.evaluate(np.array([0.55, 3.3]))
    np.testing.assert_allclose(x, [0.1375, 0.825], atol=1e-12)
    np.testing.assert_allclose(z, 0.5, atol=1e-12)
    dx, dz = drift_diagnostic(traj, 2.0, t0=1.0)
    assert abs(dx - 0.5) < 1e-12 and abs(dz) < 1e-12
    with pytest.raises(OutOfRangeError):
        traj.evaluate(4.5)
    with pytest.raises(OutOfRangeError):
        drift_diagnostic(traj, 3.5, t0=1.0)
    assert len(traj.samples) == 41 and isinstance(traj.samples[3], ParticleState)


def test_trajectory_rejects_unsorted_times():
    wp = WaveParameters(delta=0.5)
    with pytest.raises(DomainError):
        Trajectory(t=[0.0, 0.2, 0.1], x=[0, 0, 0], z=[0, 0, 0], meta=TrajectoryMeta(params=wp, method=MethodTag.NUMERIC))


def test_to_lab_inverts_to_moving_on_arrays():
    wp = WaveParameters(delta=0.8, weber=0.2, c0=0.1)
    x = np.linspace(-1.0, 1.0, 7)
    z = np.linspace(0.0, 1.0, 7)
    t = np.linspace(0.0, 3.0, 7)
    xb, zb = to_lab(*to_moving(x, z, t, wp), t, wp)
    np.testing.assert_allclose(xb, x, atol=1e-13)
    np.testing.assert_allclose(zb, z, atol=1e-15)

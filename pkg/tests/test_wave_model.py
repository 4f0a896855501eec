# tests/test_wave_model.py

import math
import sys
import unittest
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

PROJECT_ROOT_DIR = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT_DIR))

from capwave_core.errors import ConfigurationError, DomainError
from capwave_core.wave_model import (
    CurrentKind, DimensionalParameters, ScaleDirection, WaveParameters, current_kind, dimensional_speed,
    dispersion_speed, field_residuals, field_sample, field_values, mean_curvature, resolve_current, scale_variables,
    weber_number,
)


class TestDispersion(unittest.TestCase):

    def test_01_gravity_wave_at_half_depth(self):
        expected = math.sqrt(math.tanh(math.pi) / math.pi)
        self.assertAlmostEqual(dispersion_speed(0.5, 0.0), expected, delta=1e-15)

    def test_02_surface_tension_speeds_waves_up(self):
        speeds = [dispersion_speed(0.5, w) for w in (0.0, 0.1, 0.5, 1.0, 4.0)]
        self.assertTrue(all(a < b for a, b in zip(speeds, speeds[1:])))

    def test_03_shallow_limit_is_one(self):
        self.assertAlmostEqual(dispersion_speed(1e-9), 1.0, delta=1e-15)
        self.assertAlmostEqual(dispersion_speed(1e-3), math.sqrt(math.tanh(2e-3 * math.pi) / (2e-3 * math.pi)), delta=1e-14)

    def test_04_invalid_inputs(self):
        for delta, weber in ((0.0, 0.0), (-1.0, 0.0), (float("nan"), 0.0), (float("inf"), 0.0), (0.5, -0.1)):
            with self.subTest(delta=delta, weber=weber):
                with self.assertRaises(DomainError):
                    dispersion_speed(delta, weber)

    def test_05_dimensional_round_trip(self):
        params = DimensionalParameters(h0=0.5, wavelength=1.0, gamma=0.0728, a_amp=0.01)
        self.assertAlmostEqual(params.delta, 0.5)
        self.assertAlmostEqual(params.epsilon, 0.02)
        we = weber_number(params)
        self.assertAlmostEqual(we, 0.0728 / (1000.0 * 9.81 * 0.25))
        self.assertAlmostEqual(dimensional_speed(params), math.sqrt(9.81 * 0.5) * dispersion_speed(0.5, we))

    def test_06_dimensional_validation(self):
        with self.assertRaises(DomainError): DimensionalParameters(h0=0.0, wavelength=1.0)
        with self.assertRaises(DomainError): DimensionalParameters(h0=1.0, wavelength=1.0, gamma=-1.0)


class TestWaveParameters(unittest.TestCase):

    def test_01_speed_is_derived(self):
        wp = WaveParameters(delta=0.8, weber=0.2, c0=0.3)
        self.assertEqual(wp.c, dispersion_speed(0.8, 0.2))
        self.assertAlmostEqual(wp.b, 2 * math.pi * (0.3 - wp.c))
        self.assertFalse(wp.is_equal_current)

    def test_02_equal_current(self):
        wp = WaveParameters.equal_current(0.5, 0.1)
        self.assertTrue(wp.is_equal_current)
        self.assertEqual(resolve_current("equal", 0.5, 0.1), wp.c0)
        with self.assertRaises(ConfigurationError): resolve_current("same", 0.5, 0.1)

    def test_03_current_kind(self):
        self.assertIs(current_kind(WaveParameters(0.5)), CurrentKind.STILL)
        self.assertIs(current_kind(WaveParameters(0.5, c0=0.2)), CurrentKind.FAVOURABLE)
        self.assertIs(current_kind(WaveParameters(0.5, c0=-0.2)), CurrentKind.ADVERSE)

    def test_04_from_dimensional(self):
        params = DimensionalParameters(h0=2.0, wavelength=4.0, a_amp=0.1)
        wp = WaveParameters.from_dimensional(params, "equal")
        self.assertAlmostEqual(wp.delta, 0.5)
        self.assertAlmostEqual(wp.epsilon, 0.05)
        self.assertTrue(wp.is_equal_current)


class TestLinearField(unittest.TestCase):

    def setUp(self):
        self.grid_x, self.grid_z = np.meshgrid(np.linspace(0.0, 1.0, 9), np.linspace(0.05, 0.95, 7))

    def test_01_residuals_small_for_parameter_grid(self):
        for delta in (0.1, 0.5, 1.0, 2.0):
            for weber in (0.0, 0.5):
                for c0 in (0.0, 0.3, -0.2):
                    wp = WaveParameters(delta=delta, weber=weber, c0=c0)
                    for t in (0.0, 0.37):
                        with self.subTest(delta=delta, weber=weber, c0=c0, t=t):
                            res = field_residuals(self.grid_x, self.grid_z, t, wp)
                            self.assertLess(res.max_abs(), 1e-6)

    def test_02_no_flow_through_bed(self):
        wp = WaveParameters(delta=0.7, weber=0.3, c0=0.1)
        sample = field_sample(np.linspace(0, 1, 17), 0.0, 0.25, wp)
        np.testing.assert_allclose(sample.v, 0.0, atol=1e-15)

    def test_03_kinematic_condition_holds_exactly_at_surface(self):
        wp = WaveParameters(delta=0.5, weber=0.2)
        x = np.linspace(0.0, 1.0, 11)
        top = field_values(x, 1.0, 0.0, wp)
        # eta_t = 2 pi c sin(2 pi x) at t = 0
        np.testing.assert_allclose(top.v, 2 * math.pi * wp.c * np.sin(2 * math.pi * x), atol=1e-13)

    def test_04_field_sample_rejects_points_outside_strip(self):
        wp = WaveParameters(delta=0.5)
        with self.assertRaises(DomainError): field_sample(0.0, 1.2, 0.0, wp)
        with self.assertRaises(DomainError): field_sample(0.0, -0.01, 0.0, wp)
        with self.assertRaises(DomainError): field_sample(0.0, float("nan"), 0.0, wp)

    def test_05_scalar_inputs_give_floats(self):
        sample = field_sample(0.1, 0.5, 0.0, WaveParameters(delta=0.5))
        self.assertIsInstance(sample.u, float)
        self.assertIsInstance(sample.eta, float)


class TestScaling(unittest.TestCase):

    def setUp(self):
        self.params = DimensionalParameters(h0=1.0, wavelength=2.0, gamma=0.07, a_amp=0.05, p0=101325.0)

    def test_01_round_trip_including_pressure(self):
        state = {"x": 0.3, "z": 0.4, "t": 1.5, "u": 0.2, "v": -0.1, "p": 0.7, "eta": 0.5}
        physical = scale_variables(ScaleDirection.TO_DIMENSIONAL, state, self.params)
        back = scale_variables("to-nondimensional", physical, self.params)
        for key, value in state.items():
            with self.subTest(key=key):
                self.assertAlmostEqual(back[key], value, places=10)

    def test_02_pressure_includes_hydrostatic_part(self):
        physical = scale_variables("to-dimensional", {"z": 0.0, "p": 0.0}, self.params)
        self.assertAlmostEqual(physical["p"], 101325.0 + 1000.0 * 9.81 * 1.0)

    def test_03_missing_parameters(self):
        with self.assertRaises(ConfigurationError):
            scale_variables("to-dimensional", {"x": 1.0}, None)
        no_p0 = DimensionalParameters(h0=1.0, wavelength=2.0, a_amp=0.05)
        with self.assertRaises(ConfigurationError):
            scale_variables("to-dimensional", {"z": 0.5, "p": 1.0}, no_p0)
        flat = DimensionalParameters(h0=1.0, wavelength=2.0)
        with self.assertRaises(ConfigurationError):
            scale_variables("to-dimensional", {"u": 1.0}, flat)
        with self.assertRaises(ConfigurationError):
            scale_variables("sideways", {"x": 1.0}, self.params)


@given(st.floats(min_value=0.05, max_value=3.0, allow_nan=False, allow_infinity=False),
       st.floats(min_value=0.0, max_value=2.0, allow_nan=False, allow_infinity=False))
@settings(max_examples=100, deadline=None)
def test_dispersion_relation_solves_linear_system(delta, weber):
    wp = WaveParameters(delta=delta, weber=weber, c0=0.25)
    res = field_residuals(np.array([0.1, 0.45]), np.array([0.2, 0.8]), 0.3, wp)
    assert res.max_abs() < 1e-6


@pytest.mark.parametrize("delta", [0.2, 0.5, 1.5])
def test_mean_horizontal_velocity_is_current(delta):
    wp = WaveParameters(delta=delta, c0=0.4)
    x = np.linspace(0.0, 1.0, 256, endpoint=False)
    for z in (0.0, 0.5, 1.0):
        assert abs(np.mean(field_values(x, z, 0.1, wp).u) - 0.4) < 1e-12


@pytest.mark.parametrize("eta_x,eta_xx,expected", [
    (0.0, 3.5, 3.5),
    (0.7, 0.0, 0.0),
    (1.0, 2.0, 2.0 / 2.0 ** 1.5),
])
def test_mean_curvature(eta_x, eta_xx, expected):
    assert mean_curvature(eta_x, eta_xx) == pytest.approx(expected, abs=1e-15)


def test_mean_curvature_of_a_circle_is_inverse_radius():
    # upper arc of a circle of radius 2: eta = sqrt(4 - x^2), curvature -1/2 everywhere
    x = np.linspace(-1.5, 1.5, 13)
    root = np.sqrt(4.0 - x * x)
    kappa = mean_curvature(-x / root, -4.0 / root ** 3)
    np.testing.assert_allclose(kappa, -0.5, atol=1e-14)

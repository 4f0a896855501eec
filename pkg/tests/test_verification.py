# tests/test_verification.py

import math
import sys
import unittest
from pathlib import Path

import pytest

PROJECT_ROOT_DIR = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT_DIR))

from capwave_core.config import RunConfig
from capwave_core.sweeping import run_sweep, sweep_configs, sweep_point
from capwave_core.verification import CHECKS, CheckResult, VerificationReport, run_verify


class TestVerify(unittest.TestCase):

    def test_01_full_suite_passes(self):
        report = run_verify()
        self.assertEqual(len(report.checks), len(CHECKS))
        self.assertEqual([c.name for c in report.failed], [])
        self.assertTrue(report.passed)

    def test_02_perturbation_is_reported_as_failure(self):
        report = run_verify(perturbations={"mean_current": 1e-3}, only=["mean_current", "complete_k_at_zero"])
        self.assertFalse(report.passed)
        self.assertEqual([c.name for c in report.failed], ["mean_current"])

    def test_03_unknown_names_rejected(self):
        with self.assertRaises(KeyError): run_verify(only=["nope"])
        with self.assertRaises(KeyError): run_verify(perturbations={"nope": 1.0})

    def test_04_report_json_round_trip(self):
        report = VerificationReport(checks=[
            CheckResult("a", 1e-12, 1e-10, True, 0.01, "ok"),
            CheckResult("b", math.inf, 1e-10, False, 0.02, "RuntimeError: boom"),
        ], seconds=0.03)
        back = VerificationReport.from_json(report.to_json())
        self.assertEqual(back.checks[0], report.checks[0])
        self.assertTrue(math.isinf(back.checks[1].residual))
        self.assertFalse(back.passed)
        self.assertNotIn("Infinity", report.to_json())

    def test_05_check_names_are_unique(self):
        names = [name for name, _, _ in CHECKS]
        self.assertEqual(len(names), len(set(names)))


class TestSweep(unittest.TestCase):

    def setUp(self):
        self.base = RunConfig(c0=0.2, t_end=0.2, dt_out=0.1)

    def test_01_grid_order_and_fallback_axes(self):
        configs = sweep_configs(self.base, [0.5, 1.0], [], [0.2, 0.4])
        self.assertEqual([(c.delta, c.weber, c.z0) for c in configs],
                         [(0.5, 0.0, 0.2), (0.5, 0.0, 0.4), (1.0, 0.0, 0.2), (1.0, 0.0, 0.4)])

    def test_02_errors_are_recorded_per_point(self):
        row = sweep_point(RunConfig(c0="equal", method="exact", t_end=0.2, dt_out=0.1, fallback=False))
        self.assertEqual(row["status"], "error")
        self.assertEqual(row["exit_code"], 2)

    def test_03_worker_processes_keep_order(self):
        serial = run_sweep(self.base, [0.5, 0.8, 1.0], [0.0], [0.5], workers=1)
        parallel = run_sweep(self.base, [0.5, 0.8, 1.0], [0.0], [0.5], workers=2)
        self.assertEqual(serial, parallel)
        self.assertTrue(all(row["status"] == "ok" for row in serial))


@pytest.mark.parametrize("name", [name for name, _, _ in CHECKS if name.startswith(("jacobi", "complete", "sn_", "mean"))])
def test_fast_checks_pass_individually(name):
    report = run_verify(only=[name])
    assert report.passed, report.checks[0].detail

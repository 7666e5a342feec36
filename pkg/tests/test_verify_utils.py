import unittest

import numpy as np
import sympy

from utils.fp_utils import FieldError
from utils.verify_utils import VerificationReport, random_invertible, run_suite


class TestVerificationReport(unittest.TestCase):
    def test_records_failures(self):
        report = VerificationReport()
        report.record("fp", "ok", True)
        report.record("fp", "broken", False, "detail")
        self.assertEqual(report.checks, 2)
        self.assertFalse(report.passed)
        self.assertEqual(
            report.to_dict()["failures"], [{"suite": "fp", "check": "broken", "detail": "detail"}]
        )

    def test_domain_errors_count_as_failures(self):
        def raises():
            raise FieldError("bad residue")

        report = VerificationReport()
        report.run("poly", "raises", raises)
        self.assertFalse(report.passed)
        self.assertIn("FieldError", report.failures[0]["detail"])


class TestSuites(unittest.TestCase):
    def test_field_suite(self):
        report = run_suite("fp", 3, 5, 2, seed=7)
        self.assertTrue(report.passed, report.failures)
        self.assertGreater(report.checks, 0)

    def test_search_suite(self):
        report = run_suite("search", 2, 4, 3, seed=7)
        self.assertTrue(report.passed, report.failures)

    def test_field_suite_runs_group_and_character_laws(self):
        report = run_suite("fp", 5, 6, 2, seed=7)
        self.assertTrue(report.passed, report.failures)
        for name in (
            "associativity",
            "commutativity",
            "identity",
            "inverse",
            "embedding homomorphism",
            "character homomorphism",
        ):
            self.assertGreater(report.counts[f"fp/{name}"], 0, name)
        self.assertEqual(report.counts["fp/embedding homomorphism"], 25)

    def test_gowers_suite(self):
        report = run_suite("gowers", 2, 4, 3, seed=7)
        self.assertTrue(report.passed, report.failures)
        for name in ("parseval", "random norm one", "U1 phase invariance", "U3 phase invariance"):
            self.assertGreater(report.counts[f"gowers/{name}"], 0, name)

    def test_gowers_suite_odd_characteristic(self):
        report = run_suite("gowers", 5, 6, 2, seed=7)
        self.assertTrue(report.passed, report.failures)
        self.assertGreater(report.counts["gowers/random norm one"], 0)

    def test_poly_suite_round_trips_documents(self):
        report = run_suite("poly", 3, 4, 2, seed=7)
        self.assertTrue(report.passed, report.failures)
        self.assertGreater(report.counts["poly/document round trip"], 0)

    def test_symmetrize_suite_full_target(self):
        report = run_suite("symmetrize", 2, 4, 4, seed=7)
        self.assertTrue(report.passed, report.failures)
        for d in (1, 2, 3):
            self.assertGreater(report.counts[f"symmetrize/symmetric full target d={d}"], 0)

    def test_given_seed_is_reported(self):
        self.assertEqual(run_suite("fp", 2, 4, 2, seed=7).to_dict()["seed"], 7)

    def test_entropy_seed_reproduces(self):
        first = run_suite("poly", 2, 4, 2)
        self.assertIsInstance(first.seed, int)
        again = run_suite("poly", 2, 4, 2, seed=first.seed)
        self.assertEqual(first.to_dict(), again.to_dict())

    def test_deterministic(self):
        first = run_suite("poly", 2, 4, 2, seed=3).to_dict()
        second = run_suite("poly", 2, 4, 2, seed=3).to_dict()
        self.assertEqual(first, second)

    def test_unknown_suite(self):
        with self.assertRaises(ValueError):
            run_suite("nope", 2, 4, 3)

    def test_random_invertible(self):
        rng = np.random.default_rng(0)
        for p, n in ((2, 3), (3, 2), (5, 4)):
            M = random_invertible(p, n, rng)
            self.assertNotEqual(sympy.Matrix(M.tolist()).det() % p, 0)


if __name__ == "__main__":
    unittest.main()

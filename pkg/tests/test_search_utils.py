import math
import unittest
from fractions import Fraction

import numpy as np

from utils.gowers_utils import EnumerationBudgetError, correlation
from utils.poly_utils import ClassicalPoly, phase_function, random_classical
from utils.quasisym_utils import MultiaffineForm, ZeroLeadingCoefficientError, make_counterexample
from utils.search_utils import (
    CURVE_COLUMNS,
    candidate_from_index,
    count_candidates,
    decay_curve,
    enumerate_classical,
    max_correlation,
    resolve_seed,
    walsh_hadamard,
    zero_bound,
    zero_prob_experiment,
)

COS_EIGHTH = math.cos(math.pi / 8)


def brute_force_max(f, p, d):
    """Maximum over the candidate stream, one correlation at a time."""
    n = round(math.log(f.size, p))
    return max(correlation(f, Q) for Q in enumerate_classical(p, n, d))


class TestCandidateSpace(unittest.TestCase):
    def test_linear_forms(self):
        candidates = list(enumerate_classical(2, 2, 1))
        self.assertEqual(len(candidates), 4)
        self.assertEqual(
            set(Q.to_json() for Q in candidates),
            {
                ClassicalPoly.zero(2, 2).to_json(),
                ClassicalPoly.linear(2, [1, 0]).to_json(),
                ClassicalPoly.linear(2, [0, 1]).to_json(),
                ClassicalPoly.linear(2, [1, 1]).to_json(),
            },
        )

    def test_counts(self):
        self.assertEqual(count_candidates(2, 4, 3), 2**14)
        self.assertEqual(count_candidates(3, 1, 2), 9)
        self.assertEqual(count_candidates(2, 5, 3), 2**25)

    def test_budget(self):
        with self.assertRaises(EnumerationBudgetError) as ctx:
            next(enumerate_classical(2, 4, 3, budget=100))
        self.assertEqual(ctx.exception.count, 2**14)

    def test_index_order(self):
        self.assertEqual(candidate_from_index(2, 2, 2, 1), ClassicalPoly.linear(2, [1, 0]))
        self.assertEqual(candidate_from_index(2, 2, 2, 4), ClassicalPoly(2, 2, {(1, 1): 1}))


class TestWalshHadamard(unittest.TestCase):
    def test_matches_fft(self):
        rng = np.random.default_rng(0)
        rows = rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8))
        expected = np.fft.fftn(rows.reshape(3, 2, 2, 2), axes=(1, 2, 3)).reshape(3, 8) / 8
        np.testing.assert_allclose(walsh_hadamard(rows), expected)


class TestMaxCorrelation(unittest.TestCase):
    def test_single_variable(self):
        f = phase_function(make_counterexample(2, 4, 1))
        report = max_correlation(f, 2, 3)
        self.assertAlmostEqual(report.best_value, COS_EIGHTH, places=9)
        self.assertEqual(report.best_poly, ClassicalPoly.zero(2, 1))
        self.assertEqual(report.candidates, 2)

    def test_two_variables(self):
        f = phase_function(make_counterexample(2, 4, 2))
        report = max_correlation(f, 2, 3)
        self.assertAlmostEqual(report.best_value, COS_EIGHTH**2, places=9)
        self.assertAlmostEqual(report.best_value, brute_force_max(f, 2, 3), places=12)
        self.assertEqual(report.candidates, 8)

    def test_packed_path_matches_stream(self):
        rng = np.random.default_rng(5)
        for n, d in ((3, 2), (3, 3), (4, 2)):
            f = np.exp(2j * np.pi * rng.uniform(0, 1, 2**n))
            report = max_correlation(f, 2, d, block_size=16)
            self.assertAlmostEqual(report.best_value, brute_force_max(f, 2, d), places=12)
            self.assertAlmostEqual(correlation(f, report.best_poly), report.best_value, places=12)

    def test_odd_characteristic_matches_stream(self):
        rng = np.random.default_rng(6)
        f = np.exp(2j * np.pi * rng.uniform(0, 1, 9))
        report = max_correlation(f, 3, 2, block_size=9)
        self.assertAlmostEqual(report.best_value, brute_force_max(f, 3, 2), places=12)
        self.assertAlmostEqual(correlation(f, report.best_poly), report.best_value, places=12)

    def test_planted_classical(self):
        rng = np.random.default_rng(7)
        for p, n, d in ((2, 4, 3), (3, 2, 2)):
            Q = random_classical(p, n, d, rng)
            report = max_correlation(Q.phase_function(), p, d)
            self.assertAlmostEqual(report.best_value, 1.0, places=9)
            self.assertEqual(report.best_poly, Q.without_constant())

    def test_tie_break_prefers_smallest_index(self):
        report = max_correlation(np.ones(4, dtype=complex), 2, 2)
        self.assertEqual(report.best_poly, ClassicalPoly.zero(2, 2))

    def test_budget_exceeded(self):
        f = phase_function(make_counterexample(2, 4, 3))
        with self.assertRaises(EnumerationBudgetError):
            max_correlation(f, 2, 3, mode="exhaustive", budget=10)

    def test_auto_falls_back_to_sampling(self):
        f = phase_function(make_counterexample(2, 4, 3))
        report = max_correlation(f, 2, 3, mode="auto", budget=10, seed=3)
        self.assertEqual(report.mode, "sampled")

    def test_sampled_is_reproducible_and_below_exhaustive(self):
        f = phase_function(make_counterexample(2, 4, 3))
        exhaustive = max_correlation(f, 2, 3).best_value
        first = max_correlation(f, 2, 3, mode="sampled", budget=64, seed=11)
        second = max_correlation(f, 2, 3, mode="sampled", budget=64, seed=11)
        self.assertEqual(first, second)
        self.assertLessEqual(first.best_value, exhaustive + 1e-12)
        self.assertAlmostEqual(correlation(f, first.best_poly), first.best_value, places=12)

    def test_parallel_matches_serial(self):
        f = phase_function(make_counterexample(2, 4, 3))
        serial = max_correlation(f, 2, 3, block_size=16)
        parallel = max_correlation(f, 2, 3, block_size=16, n_jobs=2)
        self.assertEqual(serial, parallel)

    def test_decay(self):
        values = [
            max_correlation(phase_function(make_counterexample(2, 4, n)), 2, 3).best_value
            for n in (1, 2, 3, 4)
        ]
        for earlier, later in zip(values, values[1:]):
            self.assertLess(later, earlier)


class TestZeroProbability(unittest.TestCase):
    def test_equality_cases(self):
        self.assertEqual(zero_prob_experiment(lambda x: x[0] % 2, 1, 2).probability, Fraction(1, 2))
        product = zero_prob_experiment(lambda x: x[0] * x[1] % 2, 2, 2)
        self.assertEqual(product.probability, Fraction(3, 4))
        self.assertEqual(product.bound, Fraction(3, 4))
        self.assertEqual(zero_prob_experiment(lambda x: x[0] % 3, 1, 3).probability, Fraction(1, 3))

    def test_bound(self):
        self.assertEqual(zero_bound(3, 2), Fraction(5, 9))

    def test_zero_leading_coefficient(self):
        form = MultiaffineForm(2, 2, {(0,): 1})
        with self.assertRaises(ZeroLeadingCoefficientError):
            zero_prob_experiment(form, 2, 2)

    def test_sampled_mode(self):
        report = zero_prob_experiment(lambda x: x[0] * x[1] % 3, 2, 3, mode="sampled", samples=2000, seed=1)
        self.assertLess(abs(report.probability - 5 / 9), 5 * report.standard_error + 1e-9)
        self.assertEqual(report.seed, 1)


class TestDecayCurve(unittest.TestCase):
    def test_rows(self):
        curve = decay_curve(2, 4, range(1, 3), controls=True, seed=0)
        frame = curve.to_frame()
        self.assertEqual(list(frame.columns), CURVE_COLUMNS)
        self.assertEqual(frame["n"].tolist(), [1, 2])
        self.assertAlmostEqual(frame["best_value"][0], COS_EIGHTH, places=9)
        self.assertAlmostEqual(frame["best_value"][1], COS_EIGHTH**2, places=9)
        self.assertFalse(curve.boundary)
        for row in curve.controls:
            self.assertAlmostEqual(row["best_value"], 1.0, places=9)
            self.assertEqual(row["mode"], "exhaustive-control")

    def test_boundary_flag(self):
        self.assertTrue(decay_curve(2, 3, range(1, 2)).boundary)

    def test_given_seed_on_every_row(self):
        curve = decay_curve(2, 4, range(1, 3), controls=True, seed=11)
        self.assertEqual(curve.seed, 11)
        self.assertEqual([row["seed"] for row in curve.rows + curve.controls], [11] * 4)

    def test_entropy_seed_recorded(self):
        curve = decay_curve(2, 4, range(1, 3))
        self.assertIsInstance(curve.seed, int)
        self.assertEqual(curve.to_frame()["seed"].tolist(), [curve.seed] * 2)
        self.assertEqual(curve.to_dict()["seed"], curve.seed)

    def test_resolve_seed(self):
        self.assertEqual(resolve_seed(5), 5)
        drawn = resolve_seed(None)
        self.assertTrue(0 <= drawn < 2**63)


if __name__ == "__main__":
    unittest.main()

import cmath
import math
import unittest

import numpy as np

from utils.fp_utils import PhaseValue
from utils.gowers_utils import (
    EnumerationBudgetError,
    GowersInputError,
    correlation,
    fourier_array,
    fourier_fp,
    gowers_norm,
    gowers_norm_phase,
    mult_derivative,
)
from utils.poly_utils import (
    ClassicalPoly,
    Monomial,
    NonClassicalPoly,
    phase_function,
    random_nonclassical,
)
from utils.quasisym_utils import make_counterexample

EIGHTH = NonClassicalPoly(2, 1, PhaseValue.zero(2), {Monomial((1,), 2): 1})
EXPECTED_U3 = 0.75 ** (1 / 8)


def random_bounded(p, n, rng):
    size = p**n
    return rng.uniform(0, 1, size) * np.exp(2j * np.pi * rng.uniform(0, 1, size))


class TestMultiplicativeDerivative(unittest.TestCase):
    def test_constant_function(self):
        f = np.ones(9, dtype=complex)
        np.testing.assert_allclose(mult_derivative(f, 3, (1, 2)), np.ones(9))

    def test_linear_phase(self):
        f = np.exp(2j * np.pi * np.arange(5) / 5)
        np.testing.assert_allclose(
            mult_derivative(f, 5, (1,)), np.full(5, cmath.exp(2j * math.pi / 5))
        )

    def test_zero_shift(self):
        f = phase_function(EIGHTH)
        np.testing.assert_allclose(mult_derivative(f, 2, (0,)), np.ones(2))


class TestGowersNorm(unittest.TestCase):
    def test_constant_function(self):
        for d in (1, 2, 3):
            self.assertAlmostEqual(gowers_norm(np.ones(4, dtype=complex), 2, d).norm, 1.0)

    def test_eighth_phase(self):
        f = phase_function(EIGHTH)
        for method in ("direct_enumeration", "recursive_table"):
            with self.subTest(method=method):
                self.assertAlmostEqual(gowers_norm(f, 2, 3, method=method).norm, EXPECTED_U3, places=9)

    def test_low_degree_phase_has_norm_one(self):
        f = phase_function(make_counterexample(2, 4, 2))
        self.assertAlmostEqual(gowers_norm(f, 2, 4).norm, 1.0, places=9)

    def test_methods_agree(self):
        rng = np.random.default_rng(1)
        for n, d in ((2, 2), (2, 3), (3, 2)):
            f = random_bounded(2, n, rng)
            direct = gowers_norm(f, 2, d, method="direct_enumeration").norm
            recursive = gowers_norm(f, 2, d, method="recursive_table").norm
            self.assertAlmostEqual(direct, recursive, places=9)

    def test_monotone_in_order(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            f = random_bounded(2, 3, rng)
            norms = [gowers_norm(f, 2, d).norm for d in (2, 3, 4)]
            self.assertLessEqual(norms[0], norms[1] + 1e-9)
            self.assertLessEqual(norms[1], norms[2] + 1e-9)

    def test_fourier_identity(self):
        rng = np.random.default_rng(3)
        f = random_bounded(3, 2, rng)
        fourth = np.sum(np.abs(fourier_array(f, 3)) ** 4) ** 0.25
        self.assertAlmostEqual(gowers_norm(f, 3, 2).norm, fourth, places=9)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(4)
        for p, n in ((2, 3), (3, 2), (5, 1)):
            f = random_bounded(p, n, rng)
            rotated = f * np.exp(2j * np.pi * rng.uniform())
            for d in (1, 2, 3):
                with self.subTest(p=p, n=n, d=d):
                    self.assertAlmostEqual(
                        gowers_norm(rotated, p, d).norm, gowers_norm(f, p, d).norm, places=9
                    )

    def test_rejects_order_zero(self):
        with self.assertRaises(GowersInputError):
            gowers_norm(np.ones(2, dtype=complex), 2, 0)

    def test_rejects_unbounded(self):
        with self.assertRaises(GowersInputError):
            gowers_norm(np.full(2, 2.0, dtype=complex), 2, 2)


class TestPhaseHistogram(unittest.TestCase):
    def test_eighth_phase(self):
        self.assertAlmostEqual(gowers_norm_phase(EIGHTH, 3).norm, EXPECTED_U3, places=9)

    def test_counterexample_is_exactly_one(self):
        for p, k, n in ((2, 4, 3), (2, 5, 2), (3, 5, 2)):
            with self.subTest(p=p, k=k, n=n):
                result = gowers_norm_phase(make_counterexample(p, k, n), k)
                self.assertEqual(result.norm, 1.0)
                self.assertEqual(result.method, "phase_histogram")

    def test_constant(self):
        P = NonClassicalPoly(3, 2, PhaseValue(1, 2, 3), {})
        self.assertEqual(gowers_norm_phase(P, 1).norm, 1.0)

    def test_random_polynomial_has_norm_one(self):
        rng = np.random.default_rng(5)
        for p, n, degree in ((2, 3, 3), (3, 2, 3), (5, 2, 2)):
            for _ in range(4):
                P = random_nonclassical(p, n, degree, rng)
                d = max(P.degree, 1) + 1
                with self.subTest(P=P.to_json(), d=d):
                    self.assertEqual(gowers_norm_phase(P, d).norm, 1.0)

    def test_cap(self):
        with self.assertRaises(EnumerationBudgetError) as ctx:
            gowers_norm_phase(make_counterexample(2, 4, 3), 4, cap=10)
        self.assertEqual(ctx.exception.count, 2**12)


class TestCorrelation(unittest.TestCase):
    def test_self_correlation(self):
        Q = ClassicalPoly(3, 2, {(1, 1): 1, (2, 0): 2})
        self.assertAlmostEqual(correlation(Q.phase_function(), Q), 1.0)

    def test_eighth_against_zero_and_linear(self):
        f = phase_function(EIGHTH)
        self.assertAlmostEqual(correlation(f, ClassicalPoly.zero(2, 1)), math.cos(math.pi / 8))
        self.assertAlmostEqual(correlation(f, ClassicalPoly.linear(2, [1])), math.sin(math.pi / 8))

    def test_fourier_of_eighth(self):
        coefficients = fourier_fp(phase_function(EIGHTH), 2)
        w = cmath.exp(1j * math.pi / 4)
        self.assertTrue(cmath.isclose(coefficients[(0,)], (1 + w) / 2))
        self.assertTrue(cmath.isclose(coefficients[(1,)], (1 - w) / 2))

    def test_parseval(self):
        rng = np.random.default_rng(6)
        for p, n in ((2, 3), (3, 2), (5, 2)):
            f = random_bounded(p, n, rng)
            energy = sum(abs(value) ** 2 for value in fourier_fp(f, p).values())
            with self.subTest(p=p, n=n):
                self.assertAlmostEqual(energy, float(np.mean(np.abs(f) ** 2)), places=9)

    def test_fourier_delta(self):
        Q = ClassicalPoly.linear(3, [2, 1])
        coefficients = fourier_fp(Q.phase_function(), 3)
        self.assertTrue(cmath.isclose(coefficients[(2, 1)], 1))
        self.assertAlmostEqual(sum(abs(v) for a, v in coefficients.items() if a != (2, 1)), 0)


if __name__ == "__main__":
    unittest.main()

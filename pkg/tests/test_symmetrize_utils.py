import unittest

import numpy as np

from utils.fp_utils import DimensionError
from utils.gowers_utils import EnumerationBudgetError
from utils.poly_utils import ClassicalPoly, random_classical
from utils.quasisym_utils import Composition, quasisym_poly
from utils.symmetrize_utils import (
    ColoringError,
    DecompositionError,
    edge_color,
    find_monochromatic,
    lambda_set,
    largest_monochromatic,
    planted_quasisymmetric,
    restrict_decompose,
    verify_decomposition,
)

TRIANGLE = ClassicalPoly(2, 3, {(1, 1, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1})
MIXED = ClassicalPoly(3, 3, {(1, 1, 0): 1, (1, 0, 1): 2})


class TestColoring(unittest.TestCase):
    def test_lambda_set(self):
        self.assertEqual(lambda_set(3, 2), [(0, 2), (1, 1), (2, 0)])
        self.assertEqual(lambda_set(2, 2), [(1, 1)])

    def test_symmetric_input(self):
        for edge in ((0, 1), (0, 2), (1, 2)):
            self.assertEqual(edge_color(TRIANGLE, edge, 2).as_dict(), {(1, 1): 1})

    def test_absent_monomial(self):
        P = ClassicalPoly(2, 3, {(1, 1, 0): 1})
        self.assertEqual(edge_color(P, (0, 2), 2).as_dict(), {(1, 1): 0})

    def test_coefficient_lookup(self):
        color = edge_color(MIXED, (0, 2), 2)
        self.assertEqual(color.coefficient(Composition((1, 1))), 2)
        self.assertEqual(color.coefficient(Composition((2,))), 0)

    def test_bad_edges(self):
        with self.assertRaises(ColoringError):
            edge_color(TRIANGLE, (0,), 2)
        with self.assertRaises(ColoringError):
            edge_color(TRIANGLE, (1, 0), 2)


class TestMonochromaticSearch(unittest.TestCase):
    def test_symmetric_polynomial(self):
        self.assertEqual(find_monochromatic(TRIANGLE, 2, 3), (0, 1, 2))

    def test_single_edge(self):
        # any single edge is monochromatic, so the smallest pair wins
        self.assertEqual(find_monochromatic(MIXED, 2, 2), (0, 1))

    def test_no_triple(self):
        self.assertIsNone(find_monochromatic(MIXED, 2, 3))

    def test_target_range(self):
        with self.assertRaises(ColoringError):
            find_monochromatic(MIXED, 2, 1)
        with self.assertRaises(ColoringError):
            find_monochromatic(MIXED, 2, 4)

    def test_degree_too_high(self):
        with self.assertRaises(ColoringError):
            find_monochromatic(ClassicalPoly(2, 3, {(1, 1, 1): 1}), 2, 2)

    def test_budget(self):
        with self.assertRaises(EnumerationBudgetError):
            find_monochromatic(MIXED, 2, 3, node_budget=2)

    def test_largest(self):
        search = largest_monochromatic(TRIANGLE, 2)
        self.assertEqual(search.subset, (0, 1, 2))
        self.assertTrue(search.complete)
        self.assertEqual(len(largest_monochromatic(MIXED, 2).subset), 2)

    def test_planted_subset_is_found(self):
        rng = np.random.default_rng(13)
        P = planted_quasisymmetric(3, 6, 2, (1, 3, 4, 5), rng)
        subset = find_monochromatic(P, 2, 4)
        self.assertIsNotNone(subset)
        self.assertLessEqual(subset, (1, 3, 4, 5))


class TestDecomposition(unittest.TestCase):
    def test_symmetric_input(self):
        result = restrict_decompose(TRIANGLE, (0, 1, 2), {}, 2)
        self.assertEqual(result.coefficients, {Composition((1, 1)): 1})
        self.assertEqual(result.remainder, ClassicalPoly.zero(2, 3))

    def test_linear_remainder(self):
        P = quasisym_poly((1, 1), 3, 2) + ClassicalPoly.linear(2, [1, 0, 0])
        result = restrict_decompose(P, (0, 1, 2), {}, 2)
        self.assertEqual(result.coefficients, {Composition((1, 1)): 1})
        self.assertEqual(result.remainder, ClassicalPoly.linear(2, [1, 0, 0]))

    def test_substitution(self):
        result = restrict_decompose(MIXED, (1, 2), {0: 2}, 2)
        self.assertEqual(
            result.coefficients, {Composition((1, 1)): 0, Composition((2,)): 0}
        )
        self.assertEqual(result.remainder, ClassicalPoly(3, 3, {(0, 1, 0): 2, (0, 0, 1): 1}))
        self.assertEqual(result.to_dict()["I"], [1, 2])
        self.assertEqual(result.to_dict()["y"], {"0": 2})

    def test_non_monochromatic_subset_fails(self):
        with self.assertRaises(DecompositionError):
            restrict_decompose(MIXED, (0, 1, 2), {}, 2)

    def test_assignment_must_cover_outside(self):
        with self.assertRaises(DimensionError):
            restrict_decompose(MIXED, (1, 2), {}, 2)

    def test_random_instances(self):
        rng = np.random.default_rng(31)
        # a single edge decomposes cleanly only in characteristic 2
        for p, d, n in ((2, 2, 5), (2, 3, 6)):
            for _ in range(5):
                P = random_classical(p, n, d, rng)
                subset = find_monochromatic(P, d, d)
                self.assertGreater(verify_decomposition(P, subset, d, rng), 0)

    def test_planted_instances(self):
        rng = np.random.default_rng(37)
        for p, d, n in ((2, 3, 7), (3, 2, 6), (3, 3, 6)):
            P = planted_quasisymmetric(p, n, d, tuple(range(2 * d - 1)), rng)
            subset = find_monochromatic(P, d, 2 * d - 1)
            self.assertIsNotNone(subset)
            self.assertGreater(verify_decomposition(P, subset, d, rng, limit=50), 0)


if __name__ == "__main__":
    unittest.main()

import cmath
import math
import unittest

import numpy as np

from utils.fp_utils import (
    DimensionError,
    FieldError,
    FpContext,
    PhaseDepthError,
    PhaseValue,
    e_p,
    format_phase,
    fp_to_phase,
    normalize,
    parse_phase,
    parse_vector,
    phase_combine,
    phase_to_complex,
    phase_to_fp,
    roots_of_unity,
    same_phase,
    validate_prime,
    wilson_holds,
)


class TestFieldContext(unittest.TestCase):
    def test_rejects_composite_modulus(self):
        with self.assertRaises(FieldError):
            validate_prime(4)
        with self.assertRaises(FieldError):
            FpContext(1)

    def test_rejects_non_integer_modulus(self):
        with self.assertRaises(TypeError):
            validate_prime(3.0)

    def test_vector_helpers(self):
        ctx = FpContext(5)
        self.assertEqual(ctx.add((4, 1), (3, 4)), (2, 0))
        self.assertEqual(ctx.dot((1, 2, 3), (4, 4, 4)), 4)
        self.assertEqual(ctx.basis_vector(3, 1), (0, 1, 0))
        self.assertEqual(ctx.element(-1), 4)

    def test_vector_out_of_range(self):
        with self.assertRaises(FieldError):
            FpContext(3).vector((0, 3))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            FpContext(3).add((1,), (1, 2))


class TestPhaseValue(unittest.TestCase):
    def test_normalize_reduces_depth(self):
        self.assertEqual(normalize(PhaseValue(2, 2, 2)), PhaseValue(1, 1, 2))
        self.assertEqual(normalize(PhaseValue(0, 3, 3)), PhaseValue(0, 0, 3))

    def test_combine_across_depths(self):
        a = PhaseValue(1, 1, 2)
        b = PhaseValue(1, 2, 2)
        self.assertEqual(a + b, PhaseValue(3, 2, 2))
        self.assertEqual(a - b, PhaseValue(1, 2, 2))
        self.assertEqual(a + a, PhaseValue.zero(2))

    def test_negation(self):
        self.assertEqual(-PhaseValue(1, 2, 3), PhaseValue(8, 2, 3))

    def test_out_of_range_numerator(self):
        with self.assertRaises(FieldError):
            PhaseValue(4, 1, 3)

    def test_depth_limit(self):
        with self.assertRaises(PhaseDepthError):
            PhaseValue(0, 17, 2)

    def test_mixed_moduli(self):
        with self.assertRaises(FieldError):
            PhaseValue(1, 1, 2) + PhaseValue(1, 1, 3)

    def test_same_phase_ignores_depth(self):
        self.assertTrue(same_phase(PhaseValue(3, 2, 3), PhaseValue(1, 1, 3)))
        self.assertFalse(same_phase(PhaseValue(1, 2, 3), PhaseValue(1, 1, 3)))


class TestPhaseGroup(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(21)

    def random_phase(self, p):
        depth = int(self.rng.integers(0, 4))
        return PhaseValue.from_int(int(self.rng.integers(0, p**depth)), depth, p)

    def test_group_laws_over_mixed_depths(self):
        for p in (2, 3, 5):
            zero = PhaseValue.zero(p)
            for _ in range(50):
                a, b, c = (self.random_phase(p) for _ in range(3))
                with self.subTest(p=p, a=str(a), b=str(b), c=str(c)):
                    self.assertEqual(phase_combine(phase_combine(a, b, 1), c, 1), a + (b + c))
                    self.assertEqual(phase_combine(a, b, 1), phase_combine(b, a, 1))
                    self.assertEqual(phase_combine(a, zero, 1), a)
                    self.assertEqual(phase_combine(phase_combine(a, b, 1), b, -1), a)
                    self.assertEqual(a + (-a), zero)

    def test_bad_sign(self):
        with self.assertRaises(ValueError):
            phase_combine(PhaseValue.zero(2), PhaseValue.zero(2), 2)


class TestHomomorphisms(unittest.TestCase):
    def test_character_is_multiplicative(self):
        for p in (2, 3, 5):
            for x in range(p):
                for y in range(p):
                    with self.subTest(p=p, x=x, y=y):
                        product = e_p(x, p) * e_p(y, p)
                        self.assertTrue(cmath.isclose(e_p((x + y) % p, p), product, abs_tol=1e-12))

    def test_field_embedding_is_additive(self):
        for p in (2, 3, 5):
            for x in range(p):
                for y in range(p):
                    with self.subTest(p=p, x=x, y=y):
                        total = fp_to_phase(x, p) + fp_to_phase(y, p)
                        self.assertEqual(fp_to_phase((x + y) % p, p), total)
                        self.assertEqual(phase_to_fp(total), (x + y) % p)


class TestCharacters(unittest.TestCase):
    def test_quarter_turns_are_exact(self):
        self.assertEqual(phase_to_complex(PhaseValue(1, 2, 2)), 1j)
        self.assertEqual(phase_to_complex(PhaseValue(3, 2, 2)), -1j)
        self.assertEqual(phase_to_complex(PhaseValue(1, 1, 2)), -1)
        self.assertEqual(phase_to_complex(PhaseValue.zero(5)), 1)

    def test_generic_phase(self):
        value = phase_to_complex(PhaseValue(1, 1, 3))
        self.assertTrue(cmath.isclose(value, cmath.exp(2j * math.pi / 3)))

    def test_e_p_matches_standard_map(self):
        for x in range(5):
            self.assertTrue(cmath.isclose(e_p(x, 5), cmath.exp(2j * math.pi * x / 5)))

    def test_standard_map_round_trip(self):
        for x in range(7):
            self.assertEqual(phase_to_fp(fp_to_phase(x, 7)), x)

    def test_deep_phase_not_in_field(self):
        with self.assertRaises(FieldError):
            phase_to_fp(PhaseValue(1, 2, 3))

    def test_root_table(self):
        roots = roots_of_unity(2, 3)
        self.assertEqual(len(roots), 8)
        self.assertEqual(roots[2], 1j)
        self.assertEqual(roots[4], -1)
        self.assertFalse(roots.flags.writeable)


class TestFormats(unittest.TestCase):
    def test_phase_text(self):
        self.assertEqual(format_phase(PhaseValue(3, 2, 2)), "3/2^2")
        self.assertEqual(parse_phase("6/3^2"), PhaseValue(2, 1, 3))

    def test_malformed_phase_text(self):
        with self.assertRaises(FieldError):
            parse_phase("1/4")
        with self.assertRaises(FieldError):
            parse_phase("1/4^1")

    def test_vector_text(self):
        self.assertEqual(parse_vector("1,0,2", 3), (1, 0, 2))
        with self.assertRaises(FieldError):
            parse_vector("1,x", 3)


class TestWilson(unittest.TestCase):
    def test_small_primes(self):
        for p in (2, 3, 5, 7, 11, 13):
            self.assertTrue(wilson_holds(p))


if __name__ == "__main__":
    unittest.main()

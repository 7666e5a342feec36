"""
This module contains the exact arithmetic used across the toolkit: residues of F_p,
vectors of F_p^n, and phases in U_D = (1/p^D)Z/Z, together with the standard map and
the characters e(.) and e_p(.).
"""

import cmath
import functools
import logging
import math
import re
from dataclasses import dataclass

import numpy as np
import sympy

from .io_utils import config_value

logger = logging.getLogger(__name__)

# an element of F_p is its standard representative in {0, ..., p-1}
FpElement = int
FpVector = tuple[int, ...]

_PHASE_PATTERN = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*\^\s*(\d+)\s*$")


class PhaseKitError(ValueError):
    """Base class of every domain error raised by the toolkit"""

    def __init__(self, message):
        # leveraging the Exception class attributes to add message
        super().__init__(message)


class FieldError(PhaseKitError):
    """Raised when a modulus is not prime, residues are out of range or moduli differ"""


class PhaseDepthError(PhaseKitError):
    """Raised when a phase exceeds the configured maximum depth"""


class DimensionError(PhaseKitError):
    """Raised when vector, table or matrix dimensions do not match"""


def max_phase_depth() -> int:
    """Returns the configured maximum phase depth."""
    return int(config_value("general_configs", "max_phase_depth"))


@functools.lru_cache(maxsize=None, typed=True)
def validate_prime(p: int) -> int:
    """Checks that `p` is a prime and returns it.

    Parameters
    ----------
    p : int
        Candidate modulus.

    Returns
    -------
    int
        The validated prime.

    Raises
    ------
    TypeError
        If `p` is not an integer.
    FieldError
        If `p` is not prime.
    """
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise TypeError("'p' must be an integer")
    if not sympy.isprime(int(p)):
        raise FieldError(f"p must be prime, got {p}")
    return int(p)


@dataclass(frozen=True)
class FpContext:
    """Shared context carrying the prime modulus and the phase depth bound.

    Residues themselves are plain integers; the context validates them and provides the
    vector helpers, so dense tables never store p per entry.
    """

    p: int
    max_depth: int | None = None

    def __post_init__(self):
        validate_prime(self.p)
        if self.max_depth is None:
            object.__setattr__(self, "max_depth", max_phase_depth())

    def element(self, value: int) -> FpElement:
        """Reduces an integer to its standard representative."""
        return int(value) % self.p

    def vector(self, coords) -> FpVector:
        """Builds a vector of residues, rejecting out-of-range coordinates."""
        vec = tuple(int(c) for c in coords)
        if any(c < 0 or c >= self.p for c in vec):
            raise FieldError(f"coordinates of {vec} must lie in 0..{self.p - 1}")
        return vec

    def zero(self, n: int) -> FpVector:
        return (0,) * n

    def add(self, x: FpVector, y: FpVector) -> FpVector:
        if len(x) != len(y):
            raise DimensionError(f"cannot add vectors of lengths {len(x)} and {len(y)}")
        return tuple((a + b) % self.p for a, b in zip(x, y))

    def dot(self, x: FpVector, y: FpVector) -> FpElement:
        if len(x) != len(y):
            raise DimensionError(f"cannot pair vectors of lengths {len(x)} and {len(y)}")
        return sum(a * b for a, b in zip(x, y)) % self.p

    def basis_vector(self, n: int, i: int) -> FpVector:
        return tuple(1 if idx == i else 0 for idx in range(n))


@dataclass(frozen=True, order=True)
class PhaseValue:
    """An exact element numerator / p^depth of R/Z.

    Instances are always valid (0 <= numerator < p^depth) but not necessarily of minimal
    depth; `normalize` returns the minimal-depth representative and equality of phases
    should be tested on normalized values (or with `same_phase`).
    """

    numerator: int
    depth: int
    p: int

    def __post_init__(self):
        validate_prime(self.p)
        if self.depth < 0:
            raise PhaseDepthError(f"depth must be non-negative, got {self.depth}")
        if self.depth > max_phase_depth():
            raise PhaseDepthError(
                f"depth {self.depth} exceeds the maximum phase depth {max_phase_depth()}"
            )
        if not 0 <= self.numerator < self.p**self.depth:
            raise FieldError(
                f"numerator {self.numerator} out of range for depth {self.depth} (p={self.p})"
            )

    @classmethod
    def zero(cls, p: int) -> "PhaseValue":
        return cls(0, 0, p)

    @classmethod
    def from_int(cls, numerator: int, depth: int, p: int) -> "PhaseValue":
        """Builds numerator / p^depth mod 1 from any integer numerator, normalized."""
        return normalize(cls(int(numerator) % p**depth, depth, p))

    def embed(self, depth: int) -> int:
        """Numerator of this phase written over p^depth (depth >= self.depth)."""
        if depth < self.depth:
            raise PhaseDepthError(f"cannot embed depth {self.depth} into depth {depth}")
        return self.numerator * self.p ** (depth - self.depth)

    def __add__(self, other: "PhaseValue") -> "PhaseValue":
        return phase_combine(self, other, 1)

    def __sub__(self, other: "PhaseValue") -> "PhaseValue":
        return phase_combine(self, other, -1)

    def __neg__(self) -> "PhaseValue":
        return phase_combine(PhaseValue.zero(self.p), self, -1)

    def __str__(self) -> str:
        return format_phase(self)


def normalize(a: PhaseValue) -> PhaseValue:
    """Returns the minimal-depth representative of a phase.

    Parameters
    ----------
    a : PhaseValue
        Phase to normalize.

    Returns
    -------
    PhaseValue
        Same element of R/Z with a numerator not divisible by p (or 0 at depth 0).
    """
    numerator, depth = a.numerator, a.depth
    if numerator == 0:
        return PhaseValue(0, 0, a.p)
    while depth > 0 and numerator % a.p == 0:
        numerator //= a.p
        depth -= 1
    if numerator == a.numerator:
        return a
    return PhaseValue(numerator, depth, a.p)


def same_phase(a: PhaseValue, b: PhaseValue) -> bool:
    """Exact equality in R/Z regardless of the depth each phase is written at."""
    return a.p == b.p and normalize(a) == normalize(b)


def phase_combine(a: PhaseValue, b: PhaseValue, sign: int) -> PhaseValue:
    """Computes a + sign*b exactly in U_max(Da, Db), normalized to minimal depth.

    Parameters
    ----------
    a, b : PhaseValue
        Phases sharing the same modulus p.
    sign : int
        +1 or -1.

    Returns
    -------
    PhaseValue
        The normalized sum or difference.
    """
    if not isinstance(a, PhaseValue) or not isinstance(b, PhaseValue):
        raise TypeError("'a' and 'b' must be PhaseValue objects")
    if sign not in (1, -1):
        raise ValueError(f"Invalid sign: {sign}. Choose either 1 or -1.")
    if a.p != b.p:
        raise FieldError(f"cannot combine phases with moduli {a.p} and {b.p}")

    depth = max(a.depth, b.depth)
    modulus = a.p**depth
    numerator = (a.embed(depth) + sign * b.embed(depth)) % modulus
    return normalize(PhaseValue(numerator, depth, a.p))


def phase_to_complex(a: PhaseValue) -> complex:
    """Returns e(a) = exp(2 pi i a) as a unit complex number."""
    a = normalize(a)
    if a.numerator == 0:
        return complex(1.0, 0.0)
    denominator = a.p**a.depth
    # halve the angle range so that exact quarter turns come out exact
    numerator = a.numerator
    if 2 * numerator > denominator:
        numerator -= denominator
    if 4 * numerator == denominator:
        return complex(0.0, 1.0)
    if 4 * numerator == -denominator:
        return complex(0.0, -1.0)
    if 2 * numerator == denominator:
        return complex(-1.0, 0.0)
    return cmath.exp(2j * math.pi * numerator / denominator)


def fp_to_phase(x: FpElement, p: int) -> PhaseValue:
    """The identification F_p -> U_1, x -> |x|/p."""
    return PhaseValue.from_int(int(x) % p, 1, p)


def phase_to_fp(a: PhaseValue) -> FpElement:
    """The inverse identification U_1 -> F_p.

    Raises
    ------
    FieldError
        If the phase does not lie in U_1.
    """
    a = normalize(a)
    if a.depth > 1:
        raise FieldError(f"phase {format_phase(a)} does not lie in U_1")
    return a.numerator if a.depth == 1 else 0


def e_p(x: FpElement, p: int) -> complex:
    """The additive character e_p(x) = exp(2 pi i |x| / p)."""
    return phase_to_complex(fp_to_phase(x, p))


@functools.lru_cache(maxsize=64)
def roots_of_unity(p: int, depth: int) -> np.ndarray:
    """Table of e(k / p^depth) for k = 0, ..., p^depth - 1.

    Parameters
    ----------
    p : int
        Prime modulus.
    depth : int
        Phase depth D.

    Returns
    -------
    np.ndarray
        Complex array of length p^depth; exact quarter turns are set exactly.
    """
    modulus = p**depth
    if modulus > 2**24:
        raise PhaseDepthError(f"root table for {p}^{depth} is too large to precompute")
    roots = np.exp(2j * np.pi * np.arange(modulus) / modulus)
    for k in range(0, modulus, max(1, modulus // 4)):
        if (4 * k) % modulus == 0:
            roots[k] = phase_to_complex(PhaseValue(k, depth, p))
    roots.flags.writeable = False
    return roots


def phases_to_complex(numerators: np.ndarray, depth: int, p: int) -> np.ndarray:
    """Vectorised e(N / p^depth) for an integer array of numerators."""
    numerators = np.asarray(numerators, dtype=np.int64)
    if p**depth <= 2**24:
        return roots_of_unity(p, depth)[numerators % p**depth]
    return np.exp(2j * np.pi * (numerators % p**depth) / float(p**depth))


def format_phase(a: PhaseValue) -> str:
    """Serializes a phase as "num/p^D" at the depth it is written at."""
    return f"{a.numerator}/{a.p}^{a.depth}"


def parse_phase(text: str) -> PhaseValue:
    """Parses "num/p^D" into a normalized phase.

    Raises
    ------
    FieldError
        If the text is malformed, p is not prime or the numerator is out of range.
    """
    if not isinstance(text, str):
        raise TypeError("'text' must be a string")
    match = _PHASE_PATTERN.match(text)
    if match is None:
        raise FieldError(f"cannot parse phase {text!r}; expected 'num/p^D'")
    numerator, p, depth = (int(group) for group in match.groups())
    return normalize(PhaseValue(numerator, depth, validate_prime(p)))


def format_vector(x: FpVector) -> str:
    """Serializes a vector as comma-separated digits, e.g. "1,0,2"."""
    return ",".join(str(int(c)) for c in x)


def parse_vector(text: str, p: int) -> FpVector:
    """Parses comma-separated digits into a vector of residues mod p."""
    if not isinstance(text, str):
        raise TypeError("'text' must be a string")
    stripped = text.strip()
    if stripped == "":
        return ()
    try:
        coords = [int(part) for part in stripped.split(",")]
    except ValueError as err:
        raise FieldError(f"cannot parse vector {text!r}") from err
    return FpContext(p).vector(coords)


def wilson_holds(p: int) -> bool:
    """Checks (p-1)! = -1 mod p."""
    validate_prime(p)
    return math.factorial(p - 1) % p == p - 1

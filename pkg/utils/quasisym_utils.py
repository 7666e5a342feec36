"""
This module contains the counterexample family sum_i |x_i|^r / p^(l+1), elementary
quasisymmetric polynomials, the derivative forms iota_k and tau_alpha with their
vector versions I_k and T_alpha, and leading-coefficient extraction for multiaffine
functions.
"""

import functools
import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .fp_utils import FieldError, PhaseKitError, PhaseValue, phase_to_fp, validate_prime
from .io_utils import config_value
from .poly_utils import (
    ClassicalPoly,
    Monomial,
    NonClassicalPoly,
    PolynomialFormatError,
    iterated_derivative,
)

logger = logging.getLogger(__name__)


class DerivativeFormError(PhaseKitError):
    """Raised when a shift tuple does not match the weight of a derivative form"""


class MultiaffineError(PhaseKitError):
    """Raised when an oracle fails the multiaffinity spot check"""


class ZeroLeadingCoefficientError(PhaseKitError):
    """Raised when a multiaffine function has a zero leading coefficient"""


@dataclass(frozen=True, order=True)
class Composition:
    """A tuple (a_1, ..., a_s) of positive integers; parts must also be below p."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(part) for part in self.parts)
        if not parts or any(part < 1 for part in parts):
            raise PolynomialFormatError(f"a composition needs positive parts, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def check(self, p: int) -> "Composition":
        if any(part >= p for part in self.parts):
            raise FieldError(f"parts of {self} must be below p={p}")
        return self

    def __str__(self) -> str:
        return json.dumps(list(self.parts), separators=(",", ":"))

    @classmethod
    def parse(cls, text: str) -> "Composition":
        try:
            parts = json.loads(text)
        except json.JSONDecodeError as err:
            raise PolynomialFormatError(f"cannot parse composition {text!r}") from err
        if not isinstance(parts, list):
            raise PolynomialFormatError(f"a composition is a JSON list, got {text!r}")
        return cls(tuple(parts))


def as_composition(alpha, p: int) -> Composition:
    if not isinstance(alpha, Composition):
        alpha = Composition(tuple(alpha))
    return alpha.check(p)


def compositions(weight: int, p: int) -> list[Composition]:
    """All compositions of `weight` with parts in 1..p-1, in lexicographic order."""
    validate_prime(p)

    def _build(remaining):
        if remaining == 0:
            yield ()
            return
        for part in range(1, min(p - 1, remaining) + 1):
            for tail in _build(remaining - part):
                yield (part,) + tail

    return [Composition(parts) for parts in _build(weight)] if weight >= 1 else []


# ---------------------------------------------------------------------------
# counterexample family
# ---------------------------------------------------------------------------
class DegreeSplit(NamedTuple):
    d: int
    r: int
    ell: int


def decompose_degree(d: int, p: int) -> DegreeSplit:
    """The unique split d = r + (p-1)*ell with 0 < r < p and ell >= 0."""
    validate_prime(p)
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise DerivativeFormError(f"degree must be at least 1, got {d}")
    r = (d - 1) % (p - 1) + 1
    return DegreeSplit(int(d), int(r), int((d - r) // (p - 1)))


def family_polynomial(p: int, degree: int, n: int) -> NonClassicalPoly:
    """The polynomial sum_i |x_i|^r / p^(ell+1) of the given degree."""
    split = decompose_degree(degree, p)
    terms = {}
    for i in range(n):
        exps = [0] * n
        exps[i] = split.r
        terms[Monomial(tuple(exps), split.ell)] = 1
    return NonClassicalPoly(p, n, PhaseValue.zero(p), terms)


def is_boundary(p: int, k: int) -> bool:
    """k = p+1 is the smallest k for which the family is defined; classical correlates exist."""
    return k == p + 1


def make_counterexample(p: int, k: int, n: int) -> NonClassicalPoly:
    """The degree k-1 member of the counterexample family on n variables.

    Parameters
    ----------
    p : int
        Field characteristic.
    k : int
        Norm order; the polynomial has degree k-1 and U^k norm exactly 1.
    n : int
        Number of variables.

    Returns
    -------
    NonClassicalPoly
        sum_i |x_i|^r / p^(ell+1) with (r, ell) the split of k-1.

    Raises
    ------
    DerivativeFormError
        If k <= p, where ell would be 0 and the polynomial classical.
    """
    validate_prime(p)
    if k <= p:
        raise DerivativeFormError(f"k must be at least p+1={p + 1}, got {k}")
    if n < 1:
        raise DerivativeFormError(f"n must be at least 1, got {n}")
    if is_boundary(p, k):
        logger.info("k=%d is the boundary case p+1; classical correlates exist", k)
    return family_polynomial(p, k - 1, n)


def quasisym_poly(alpha, n: int, p: int) -> ClassicalPoly:
    """Q_alpha(x) = sum over i_1 < ... < i_s of prod_j x_{i_j}^alpha_j."""
    alpha = as_composition(alpha, p)
    terms = {}
    for indices in itertools.combinations(range(n), alpha.length):
        exps = [0] * n
        for index, part in zip(indices, alpha.parts):
            exps[index] = part
        terms[tuple(exps)] = 1
    return ClassicalPoly(p, n, terms)


# ---------------------------------------------------------------------------
# derivative forms
# ---------------------------------------------------------------------------
def _shift_tuple(shifts, p: int) -> list[tuple[int, ...]]:
    vectors = [tuple(int(c) % p for c in shift) for shift in shifts]
    if len({len(vector) for vector in vectors}) > 1:
        raise DerivativeFormError("all shifts must have the same dimension")
    return vectors


def _constant_derivative(P: NonClassicalPoly, shifts) -> int:
    return phase_to_fp(iterated_derivative(P, shifts, (0,) * P.n))


def iota_form(shifts, p: int, mode: str = "symbolic") -> int:
    """iota_k(h_1, ..., h_k) = (-1)^ell r! sum_i (h_1)_i ... (h_k)_i with k = len(shifts).

    The brute-force mode differentiates the degree-k family polynomial instead.
    """
    shifts = _shift_tuple(shifts, p)
    split = decompose_degree(len(shifts), p)
    if mode == "brute_force":
        return _constant_derivative(family_polynomial(p, split.d, len(shifts[0])), shifts)
    if mode != "symbolic":
        raise ValueError(f"Invalid mode: {mode}. Choose either 'symbolic' or 'brute_force'.")

    coordinate_sum = sum(math.prod(column) for column in zip(*shifts))
    return (-1) ** split.ell * math.factorial(split.r) * coordinate_sum % p


def _block_labels(parts: tuple[int, ...]) -> list[int]:
    return [block for block, part in enumerate(parts) for _ in range(part)]


def tau_form(alpha, shifts, p: int, mode: str = "symbolic") -> int:
    """tau_alpha(h_1, ..., h_k), the k-th derivative of Q_alpha along the shifts.

    The symbolic mode sums over permutations and over index sequences made of blocks of
    equal indices (sizes alpha_1, ..., alpha_s) strictly increasing between blocks.

    Raises
    ------
    DerivativeFormError
        If the weight of alpha differs from the number of shifts.
    """
    alpha = as_composition(alpha, p)
    shifts = _shift_tuple(shifts, p)
    k = len(shifts)
    if alpha.weight != k:
        raise DerivativeFormError(f"composition {alpha} has weight {alpha.weight}, got {k} shifts")
    n = len(shifts[0])

    if mode == "brute_force":
        return _constant_derivative(quasisym_poly(alpha, n, p).to_nonclassical(), shifts)
    if mode != "symbolic":
        raise ValueError(f"Invalid mode: {mode}. Choose either 'symbolic' or 'brute_force'.")

    labels = _block_labels(alpha.parts)
    total = 0
    for blocks in itertools.combinations(range(n), alpha.length):
        for perm in itertools.permutations(range(k)):
            product = 1
            for shift, position in zip(shifts, perm):
                product *= shift[blocks[labels[position]]]
                if product == 0:
                    break
            total += product
    return total % p


def vector_form(shifts, p: int, n: int, alpha=None) -> tuple[int, ...]:
    """I_k(h_1, ..., h_(k-1)) when alpha is None, otherwise T_alpha(h_1, ..., h_(k-1)).

    Coordinate i is the form evaluated with the i-th basis vector appended as h_k.
    """
    shifts = _shift_tuple(shifts, p)
    if shifts and len(shifts[0]) != n:
        raise DerivativeFormError(f"shifts have dimension {len(shifts[0])}, expected {n}")
    if alpha is not None and as_composition(alpha, p).weight != len(shifts) + 1:
        raise DerivativeFormError(f"composition {alpha} needs {len(shifts) + 1} shifts in total")

    coords = []
    for i in range(n):
        basis = tuple(1 if idx == i else 0 for idx in range(n))
        if alpha is None:
            coords.append(iota_form(shifts + [basis], p))
        else:
            coords.append(tau_form(alpha, shifts + [basis], p))
    return tuple(coords)


def decoupled_coordinate(
    alpha,
    shifts,
    i: int,
    p: int,
    tau_values: Callable[[tuple, tuple], int] | None = None,
    z=None,
) -> int:
    """T_alpha(h_1, ..., h_(k-1))_i with the full-length tau values held as free inputs.

    The coordinate splits over the block of alpha sitting at index i: blocks before it use
    coordinates < i, blocks after it use coordinates > i. The latter are rewritten by
    inclusion-exclusion in terms of tau_beta(h_L) over all coordinates, which are read from
    `tau_values(beta, L)` instead of recomputed. With the default `tau_values` the result
    equals `vector_form(shifts, p, n, alpha)[i]`; its coefficient of z_1 ... z_(k-1) is
    (-1)^(s-1) alpha_1 (k-1)! whatever `tau_values` returns.

    Parameters
    ----------
    alpha : Composition | tuple
        Composition of weight k.
    shifts : sequence of vectors
        The k-1 shifts; only coordinates other than i are read when `z` is given.
    i : int
        Coordinate, 0-based.
    p : int
        Field characteristic.
    tau_values : callable | None, optional
        Map (beta, L) -> F_p standing for tau_beta of the shifts in L.
    z : sequence of int | None, optional
        Values of (h_1)_i, ..., (h_(k-1))_i, by default read from the shifts.

    Returns
    -------
    int
        The coordinate in F_p.
    """
    alpha = as_composition(alpha, p)
    shifts = _shift_tuple(shifts, p)
    k = alpha.weight
    if len(shifts) != k - 1:
        raise DerivativeFormError(f"composition {alpha} needs {k - 1} shifts, got {len(shifts)}")
    z = tuple(shift[i] for shift in shifts) if z is None else tuple(int(v) % p for v in z)
    lower = [shift[:i] for shift in shifts]

    if tau_values is None:

        def tau_values(beta, members):
            return tau_form(beta, [shifts[m] for m in members], p)

    def tau_lower(beta, members):
        if not beta:
            return 1
        if i == 0:
            return 0
        return tau_form(beta, [lower[m] for m in members], p)

    def z_product(members):
        return math.prod(z[m] for m in members)

    def splits(members, first, second):
        """Yields (A, B, rest) with |A| = first and |B| = second."""
        for chosen in itertools.combinations(members, first):
            rest = tuple(m for m in members if m not in chosen)
            for block in itertools.combinations(rest, second):
                remaining = tuple(m for m in rest if m not in block)
                yield chosen, block, remaining

    @functools.lru_cache(maxsize=None)
    def upper(beta, members):
        # tau_beta of the shifts in `members` restricted to coordinates > i
        if not beta:
            return 1 if not members else 0
        value = tau_values(beta, members)
        for cut in range(1, len(beta) + 1):
            for chosen, _, rest in splits(members, sum(beta[:cut]), 0):
                value -= tau_lower(beta[:cut], chosen) * upper(beta[cut:], rest)
        for ell, part in enumerate(beta):
            for chosen, block, rest in splits(members, sum(beta[:ell]), part):
                value -= (
                    math.factorial(part)
                    * tau_lower(beta[:ell], chosen)
                    * z_product(block)
                    * upper(beta[ell + 1 :], rest)
                )
        return value % p

    parts = alpha.parts
    total = 0
    for ell, part in enumerate(parts):
        for chosen, block, rest in splits(tuple(range(k - 1)), sum(parts[:ell]), part - 1):
            total += (
                math.factorial(part)
                * tau_lower(parts[:ell], chosen)
                * z_product(block)
                * upper(parts[ell + 1 :], rest)
            )
    return total % p


def expected_leading_coeff(alpha, p: int) -> int:
    """(-1)^(s-1) alpha_1 (k-1)! mod p."""
    alpha = as_composition(alpha, p)
    value = (-1) ** (alpha.length - 1) * alpha.parts[0] * math.factorial(alpha.weight - 1)
    return value % p


def combined_coordinate(
    k: int,
    coeffs: dict,
    shifts,
    i: int,
    p: int,
    tau_values: Callable[[tuple, tuple], int] | None = None,
    z=None,
) -> int:
    """I_k(h)_i + sum_alpha c_alpha T_alpha(h)_i with the T parts decoupled."""
    shifts = _shift_tuple(shifts, p)
    z = tuple(shift[i] for shift in shifts) if z is None else tuple(int(v) % p for v in z)
    split = decompose_degree(k, p)
    total = (-1) ** split.ell * math.factorial(split.r) * math.prod(z)
    for alpha, coeff in coeffs.items():
        total += coeff * decoupled_coordinate(alpha, shifts, i, p, tau_values=tau_values, z=z)
    return total % p


# ---------------------------------------------------------------------------
# multiaffine functions
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class MultiaffineForm:
    """sum over subsets S of [r] of c_S prod_{i in S} x_i over F_p."""

    p: int
    r: int
    coeffs: dict = field(default_factory=dict)

    def __call__(self, x) -> int:
        total = 0
        for subset, coeff in self.coeffs.items():
            total += coeff * math.prod(x[i] for i in subset)
        return total % self.p

    @property
    def leading_coefficient(self) -> int:
        return self.coeffs.get(tuple(range(self.r)), 0) % self.p


def enumerate_multiaffine(p: int, r: int):
    """Yields every multiaffine form in r variables with nonzero leading coefficient."""
    validate_prime(p)
    subsets = [
        subset for size in range(r + 1) for subset in itertools.combinations(range(r), size)
    ]
    lower, full = subsets[:-1], subsets[-1]
    for values in itertools.product(range(p), repeat=len(lower)):
        for top in range(1, p):
            coeffs = dict(zip(lower, values))
            coeffs[full] = top
            yield MultiaffineForm(p, r, coeffs)


def _spot_check(L, r: int, p: int, rng: np.random.Generator, checks: int) -> None:
    for _ in range(checks):
        point = [int(v) for v in rng.integers(0, p, size=r)]
        var = int(rng.integers(0, r))
        line = []
        for t in range(p):
            point[var] = t
            line.append(int(L(tuple(point))) % p)
        slope = (line[1] - line[0]) % p
        if any(line[t] != (line[0] + t * slope) % p for t in range(p)):
            raise MultiaffineError(f"oracle is not affine in variable {var} along {point}")


def multiaffine_leading_coeff(
    L,
    r: int,
    p: int,
    rng: np.random.Generator | None = None,
    checks: int | None = None,
) -> int:
    """Coefficient of x_1 ... x_r of a multiaffine oracle.

    Computed as sum over w in {0,1}^r of (-1)^(r-|w|) L(w); random lines are checked for
    affinity first.

    Parameters
    ----------
    L : callable
        Oracle taking a tuple of r residues and returning a residue.
    r : int
        Number of variables.
    p : int
        Field characteristic.
    rng : np.random.Generator | None, optional
        Source of the spot-check lines, by default seeded from the configuration.
    checks : int | None, optional
        Number of spot-check lines, by default the configured count.

    Raises
    ------
    MultiaffineError
        If a spot-check line is not affine.
    """
    validate_prime(p)
    if r == 0:
        return int(L(())) % p
    rng = np.random.default_rng(config_value("general_configs", "seed")) if rng is None else rng
    checks = config_value("search_configs", "multiaffine_spot_checks") if checks is None else checks
    if p > 2:
        _spot_check(L, r, p, rng, checks)

    total = 0
    for omega in itertools.product((0, 1), repeat=r):
        sign = -1 if (r - sum(omega)) % 2 else 1
        total += sign * int(L(omega))
    return total % p

"""
This module contains classical and non-classical polynomials over F_p^n written in the
canonical monomial basis

    P(x) = alpha + sum_{e, j} c_{e,j} |x_1|^e_1 ... |x_n|^e_n / p^(j+1)  mod 1

together with exact evaluation tables, canonicalization of tables, additive
derivatives and composition with linear maps.

Points of F_p^n are indexed by their base-p digit expansion with x_1 as the most
significant digit, so a flat table reshaped to (p,)*n has axis i holding x_(i+1).
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .fp_utils import (
    DimensionError,
    FieldError,
    FpContext,
    PhaseDepthError,
    PhaseKitError,
    PhaseValue,
    format_phase,
    max_phase_depth,
    normalize,
    parse_phase,
    phase_to_fp,
    phases_to_complex,
    validate_prime,
)
from .io_utils import dumps_compact

logger = logging.getLogger(__name__)

# exact tables keep numerators below this bound so products fit in int64
MAX_EXACT_MODULUS = 2**31


class PolynomialFormatError(PhaseKitError):
    """Raised when a polynomial document or literal is malformed or not canonical"""


# ---------------------------------------------------------------------------
# indexing helpers
# ---------------------------------------------------------------------------
def place_values(p: int, n: int) -> np.ndarray:
    """Weights p^(n-1), ..., p, 1 turning a point into its table index."""
    return p ** np.arange(n - 1, -1, -1, dtype=np.int64)


def point_index(x, p: int) -> int:
    """Table index of a point (x_1 most significant)."""
    index = 0
    for coord in x:
        index = index * p + int(coord)
    return index


def all_points(p: int, n: int) -> np.ndarray:
    """Array of shape (p^n, n) whose row i is the point with table index i."""
    return np.indices((p,) * n, dtype=np.int64).reshape(n, -1).T


def _check_point(x, p: int, n: int) -> tuple[int, ...]:
    if len(x) != n:
        raise DimensionError(f"expected a point of dimension {n}, got {len(x)}")
    return FpContext(p).vector(x)


def _power_matrix(p: int, modulus: int) -> np.ndarray:
    """Matrix M[x][e] = x^e mod modulus for x, e in 0..p-1 (0^0 = 1)."""
    return np.array(
        [[pow(x, e, modulus) for e in range(p)] for x in range(p)], dtype=np.int64
    )


def _indicator_matrix(p: int) -> np.ndarray:
    """Matrix W[e][a] with sum_e W[e][a] x^e = 1 - (x-a)^(p-1) = [x == a] over F_p."""
    binomials = [1]
    for e in range(1, p):
        binomials.append(binomials[-1] * (p - e) // e)
    matrix = np.zeros((p, p), dtype=np.int64)
    for a in range(p):
        for e in range(p):
            entry = (1 if e == 0 else 0) - binomials[e] * pow(-a, p - 1 - e)
            matrix[e, a] = entry % p
    return matrix


def _mode_product(matrix: np.ndarray, tensor: np.ndarray, axis: int, modulus: int):
    """Applies `matrix` along one axis of `tensor`, reducing after every accumulation."""
    moved = np.moveaxis(tensor, axis, 0)
    out = np.zeros((matrix.shape[0],) + moved.shape[1:], dtype=np.int64)
    for col in range(matrix.shape[1]):
        out = (out + np.multiply.outer(matrix[:, col], moved[col])) % modulus
    return np.moveaxis(out, 0, axis)


def _apply_all_axes(matrix: np.ndarray, tensor: np.ndarray, modulus: int) -> np.ndarray:
    for axis in range(tensor.ndim):
        tensor = _mode_product(matrix, tensor, axis, modulus)
    return tensor


def monomial_exponents(
    p: int, n: int, max_weight: int, min_weight: int = 1
) -> list[tuple[int, ...]]:
    """Exponent vectors with per-variable exponents below p and total weight in range.

    Sorted by weight first and then so that x_1 comes before x_2 within a weight, which
    puts the linear monomials x_1, ..., x_n at the front.
    """
    exponents = [
        exps
        for exps in itertools.product(range(p), repeat=n)
        if min_weight <= sum(exps) <= max_weight
    ]
    return sorted(exponents, key=lambda exps: (sum(exps), tuple(-e for e in exps)))


# ---------------------------------------------------------------------------
# exact tables
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class PhaseTable:
    """Exact table of a function F_p^n -> U_depth, stored as numerators over p^depth."""

    p: int
    n: int
    numerators: np.ndarray
    depth: int

    def __post_init__(self):
        validate_prime(self.p)
        if self.depth < 0 or self.depth > max_phase_depth():
            raise PhaseDepthError(f"table depth {self.depth} is out of range")
        if self.p**self.depth > MAX_EXACT_MODULUS:
            raise PhaseDepthError(
                f"{self.p}^{self.depth} is too large for exact tables (limit 2^31)"
            )
        numerators = np.asarray(self.numerators, dtype=np.int64).reshape(-1)
        if numerators.size != self.p**self.n:
            raise DimensionError(
                f"table has {numerators.size} entries, expected {self.p}^{self.n}"
            )
        object.__setattr__(self, "numerators", numerators % self.p**self.depth)

    @property
    def modulus(self) -> int:
        return self.p**self.depth

    def phase(self, index: int) -> PhaseValue:
        return PhaseValue.from_int(int(self.numerators[index]), self.depth, self.p)

    def phases(self) -> list[PhaseValue]:
        return [self.phase(index) for index in range(self.numerators.size)]

    def to_complex(self) -> np.ndarray:
        """The numeric table e(t(x))."""
        return phases_to_complex(self.numerators, self.depth, self.p)

    def equals(self, other: "PhaseTable") -> bool:
        """Exact equality of the two functions, whatever depth they are written at."""
        if (self.p, self.n) != (other.p, other.n):
            return False
        depth = max(self.depth, other.depth)
        lhs = self.numerators * self.p ** (depth - self.depth)
        rhs = other.numerators * other.p ** (depth - other.depth)
        return bool(np.array_equal(lhs, rhs))

    @classmethod
    def from_phases(cls, p: int, n: int, phases: list[PhaseValue]) -> "PhaseTable":
        if any(phase.p != p for phase in phases):
            raise FieldError("all table phases must share the modulus p")
        depth = max((phase.depth for phase in phases), default=0)
        return cls(p, n, np.array([phase.embed(depth) for phase in phases]), depth)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "values": [format_phase(phase) for phase in self.phases()],
        }

    @classmethod
    def from_dict(cls, document: dict) -> "PhaseTable":
        if not isinstance(document, dict):
            raise PolynomialFormatError("a table document must be a JSON object")
        try:
            p, n, values = document["p"], document["n"], document["values"]
        except KeyError as err:
            raise PolynomialFormatError(f"table document is missing key {err}") from err
        phases = [parse_phase(value) for value in values]
        return cls.from_phases(p, n, phases)


def validate_complex_table(f: np.ndarray, p: int) -> int:
    """Checks that `f` is a flat complex table over F_p^n and returns n."""
    if not isinstance(f, np.ndarray):
        raise TypeError("'f' must be a numpy array")
    size, n = f.size, 0
    while size > 1 and size % p == 0:
        size //= p
        n += 1
    if size != 1 or f.ndim != 1:
        raise DimensionError(f"table of shape {f.shape} is not a flat table over F_{p}^n")
    return n


# ---------------------------------------------------------------------------
# non-classical polynomials
# ---------------------------------------------------------------------------
@dataclass(frozen=True, order=True)
class Monomial:
    """The monomial |x_1|^e_1 ... |x_n|^e_n / p^(j+1)."""

    exps: tuple[int, ...]
    j: int = 0

    def __post_init__(self):
        object.__setattr__(self, "exps", tuple(int(e) for e in self.exps))
        object.__setattr__(self, "j", int(self.j))
        if self.j < 0:
            raise PolynomialFormatError(f"monomial depth index must be >= 0, got {self.j}")
        if any(e < 0 for e in self.exps):
            raise PolynomialFormatError(f"negative exponent in {self.exps}")
        if not any(self.exps):
            raise PolynomialFormatError("a monomial needs at least one nonzero exponent")

    @property
    def weight(self) -> int:
        return sum(self.exps)

    def degree(self, p: int) -> int:
        return self.weight + self.j * (p - 1)


@dataclass(frozen=True)
class NonClassicalPoly:
    """A non-classical polynomial in canonical form.

    Terms map monomials to coefficients in 1..p-1; absent monomials have coefficient 0.
    The constructor rejects non-canonical input rather than reducing it, since a
    coefficient of p on level j is a different function than 0.
    """

    p: int
    n: int
    alpha: PhaseValue
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        validate_prime(self.p)
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DimensionError(f"'n' must be a positive integer, got {self.n}")
        if not isinstance(self.alpha, PhaseValue):
            raise TypeError("'alpha' must be a PhaseValue object")
        if self.alpha.p != self.p:
            raise FieldError(f"alpha has modulus {self.alpha.p}, polynomial has {self.p}")

        clean = {}
        for mono, coeff in self.terms.items():
            if not isinstance(mono, Monomial):
                raise TypeError("term keys must be Monomial objects")
            if len(mono.exps) != self.n:
                raise DimensionError(f"monomial {mono.exps} does not have {self.n} exponents")
            if any(e >= self.p for e in mono.exps):
                raise PolynomialFormatError(f"exponents of {mono.exps} must be below p={self.p}")
            if not isinstance(coeff, (int, np.integer)) or not 0 <= coeff < self.p:
                raise PolynomialFormatError(f"coefficient {coeff} must lie in 0..{self.p - 1}")
            if mono.j + 1 > max_phase_depth():
                raise PhaseDepthError(f"monomial depth {mono.j + 1} exceeds the maximum")
            if coeff:
                clean[mono] = int(coeff)

        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        object.__setattr__(self, "alpha", normalize(self.alpha))

    @classmethod
    def zero(cls, p: int, n: int) -> "NonClassicalPoly":
        return cls(p, n, PhaseValue.zero(p), {})

    @property
    def degree(self) -> int:
        return max((mono.degree(self.p) for mono in self.terms), default=0)

    @property
    def depth(self) -> int:
        return 1 + max((mono.j for mono in self.terms), default=-1)

    @property
    def table_depth(self) -> int:
        """Depth at which every value P(x) can be written."""
        return max(self.depth, self.alpha.depth)

    @property
    def is_classical_plus_constant(self) -> bool:
        return all(mono.j == 0 for mono in self.terms)

    def is_zero(self) -> bool:
        return not self.terms and self.alpha.numerator == 0

    def __call__(self, x) -> PhaseValue:
        return eval_nonclassical(self, x)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "alpha": format_phase(self.alpha),
            "terms": [
                {"exps": list(mono.exps), "j": mono.j, "coeff": coeff}
                for mono, coeff in self.terms.items()
            ],
        }

    def to_json(self) -> str:
        return dumps_compact(self.to_dict())

    @classmethod
    def from_dict(cls, document: dict) -> "NonClassicalPoly":
        p, n, alpha, raw_terms = _read_poly_document(document)
        terms = {}
        for raw in raw_terms:
            mono = Monomial(tuple(raw["exps"]), raw.get("j", 0))
            if mono in terms:
                raise PolynomialFormatError(f"duplicate term {mono.exps}, j={mono.j}")
            terms[mono] = raw["coeff"]
        return cls(p, n, alpha, terms)


def _read_poly_document(document: dict):
    if not isinstance(document, dict):
        raise PolynomialFormatError("a polynomial document must be a JSON object")
    try:
        p = validate_prime(document["p"])
        n = document["n"]
        alpha = parse_phase(document.get("alpha", f"0/{p}^0"))
        raw_terms = document.get("terms", [])
    except KeyError as err:
        raise PolynomialFormatError(f"polynomial document is missing key {err}") from err
    for raw in raw_terms:
        if not isinstance(raw, dict) or "exps" not in raw or "coeff" not in raw:
            raise PolynomialFormatError(f"malformed term {raw!r}; expected exps, j and coeff")
    if alpha.p != p:
        raise FieldError(f"alpha has modulus {alpha.p}, document has p={p}")
    return p, n, alpha, raw_terms


def eval_nonclassical(P: NonClassicalPoly, x) -> PhaseValue:
    """Evaluates P at a single point exactly.

    Parameters
    ----------
    P : NonClassicalPoly
        Polynomial to evaluate.
    x : sequence of int
        Point of F_p^n.

    Returns
    -------
    PhaseValue
        Normalized value P(x).
    """
    x = _check_point(x, P.p, P.n)
    depth = P.table_depth
    total = P.alpha.embed(depth)
    for mono, coeff in P.terms.items():
        product = coeff
        for coord, exp in zip(x, mono.exps):
            product *= coord**exp
        total += product * P.p ** (depth - 1 - mono.j)
    return PhaseValue.from_int(total, depth, P.p)


def evaluate_table(P: NonClassicalPoly) -> PhaseTable:
    """Exact table of P over all of F_p^n."""
    p, n, depth = P.p, P.n, P.table_depth
    modulus = p**depth
    if modulus > MAX_EXACT_MODULUS:
        raise PhaseDepthError(f"{p}^{depth} is too large for exact tables")
    powers = _power_matrix(p, modulus)

    by_level = defaultdict(lambda: np.zeros((p,) * n, dtype=np.int64))
    for mono, coeff in P.terms.items():
        by_level[mono.j][mono.exps] = coeff

    total = np.full((p,) * n, P.alpha.embed(depth), dtype=np.int64)
    for level, coeffs in by_level.items():
        lift = _apply_all_axes(powers, coeffs, modulus)
        total = (total + lift * p ** (depth - 1 - level)) % modulus
    return PhaseTable(p, n, total.reshape(-1), depth)


def phase_function(P: NonClassicalPoly) -> np.ndarray:
    """The complex table e(P(x))."""
    return evaluate_table(P).to_complex()


def canonicalize(table: PhaseTable) -> NonClassicalPoly:
    """Recovers the unique canonical polynomial agreeing with an exact table.

    Depth layers are peeled from the top: at depth D the numerators mod p form a classical
    function whose interpolation gives the level D-1 coefficients; their exact integer
    lift is subtracted and the remainder, now divisible by p, is one level shallower.

    Parameters
    ----------
    table : PhaseTable
        Exact table of length p^n.

    Returns
    -------
    NonClassicalPoly
        Canonical form whose table equals `table` at every point.
    """
    if not isinstance(table, PhaseTable):
        raise TypeError("'table' must be a PhaseTable object")
    p, n, depth = table.p, table.n, table.depth
    modulus = p**depth

    values = table.numerators.reshape((p,) * n)
    base = int(values.flat[0])
    alpha = PhaseValue.from_int(base, depth, p)
    residual = (values - base) % modulus

    indicator = _indicator_matrix(p)
    terms = {}
    for level in range(depth, 0, -1):
        level_modulus = p**level
        coeffs = _apply_all_axes(indicator, residual % p, p)
        for exps in np.argwhere(coeffs):
            exps = tuple(int(e) for e in exps)
            terms[Monomial(exps, level - 1)] = int(coeffs[exps])
        lift = _apply_all_axes(_power_matrix(p, level_modulus), coeffs, level_modulus)
        residual = ((residual - lift) % level_modulus) // p

    logger.debug("canonicalized a depth-%d table into %d terms", depth, len(terms))
    return NonClassicalPoly(p, n, alpha, terms)


def additive_derivative(P: NonClassicalPoly, h) -> NonClassicalPoly:
    """Canonical form of x -> P(x+h) - P(x), computed through the exact table."""
    h = _check_point(h, P.p, P.n)
    table = evaluate_table(P)
    values = table.numerators.reshape((P.p,) * P.n)
    shifted = values
    for axis, shift in enumerate(h):
        shifted = np.roll(shifted, -shift, axis=axis)
    difference = (shifted - values).reshape(-1)
    return canonicalize(PhaseTable(P.p, P.n, difference, table.depth))


def degree_and_depth(P: NonClassicalPoly) -> tuple[int, int]:
    """Returns (degree, depth); the zero and constant polynomials give (0, 0)."""
    return P.degree, P.depth


def _as_matrix(M, p: int, n: int) -> np.ndarray:
    matrix = np.asarray(M, dtype=np.int64)
    if matrix.shape != (n, n):
        raise DimensionError(f"expected a {n}x{n} matrix, got shape {matrix.shape}")
    return matrix % p


def pullback_indices(M, p: int, n: int) -> np.ndarray:
    """For every table index of x, the table index of Mx."""
    matrix = _as_matrix(M, p, n)
    images = (all_points(p, n) @ matrix.T) % p
    return images @ place_values(p, n)


def compose_linear(P: NonClassicalPoly, M) -> NonClassicalPoly:
    """Canonical form of x -> P(Mx) for an n x n matrix over F_p."""
    table = evaluate_table(P)
    indices = pullback_indices(M, P.p, P.n)
    return canonicalize(PhaseTable(P.p, P.n, table.numerators[indices], table.depth))


def iterated_derivative(P: NonClassicalPoly, shifts, x) -> PhaseValue:
    """Exact value of Delta_{h_1} ... Delta_{h_k} P at x.

    Uses the expansion sum over w in {0,1}^k of (-1)^(k-|w|) P(x + w.h).
    """
    x = _check_point(x, P.p, P.n)
    shifts = [_check_point(h, P.p, P.n) for h in shifts]
    k, depth = len(shifts), P.table_depth
    total = 0
    for omega in itertools.product((0, 1), repeat=k):
        point = list(x)
        for bit, h in zip(omega, shifts):
            if bit:
                point = [(a + b) % P.p for a, b in zip(point, h)]
        sign = -1 if (k - sum(omega)) % 2 else 1
        total += sign * eval_nonclassical(P, point).embed(depth)
    return PhaseValue.from_int(total, depth, P.p)


# ---------------------------------------------------------------------------
# classical polynomials
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ClassicalPoly:
    """A classical polynomial F_p^n -> F_p; `terms` maps exponent vectors to coefficients.

    The all-zero exponent vector holds the constant term.
    """

    p: int
    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        validate_prime(self.p)
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DimensionError(f"'n' must be a positive integer, got {self.n}")
        clean = {}
        for exps, coeff in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.n:
                raise DimensionError(f"exponent vector {exps} does not have {self.n} entries")
            if any(e < 0 or e >= self.p for e in exps):
                raise PolynomialFormatError(f"exponents of {exps} must lie in 0..{self.p - 1}")
            coeff = int(coeff) % self.p
            if coeff:
                clean[exps] = coeff
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, p: int, n: int) -> "ClassicalPoly":
        return cls(p, n, {})

    @classmethod
    def linear(cls, p: int, coeffs) -> "ClassicalPoly":
        """The linear form a_1 x_1 + ... + a_n x_n."""
        n = len(coeffs)
        terms = {}
        for i, a in enumerate(coeffs):
            exps = [0] * n
            exps[i] = 1
            terms[tuple(exps)] = a
        return cls(p, n, terms)

    @property
    def degree(self) -> int:
        return max((sum(exps) for exps in self.terms), default=0)

    @property
    def constant_term(self) -> int:
        return self.terms.get((0,) * self.n, 0)

    def without_constant(self) -> "ClassicalPoly":
        return ClassicalPoly(
            self.p, self.n, {exps: c for exps, c in self.terms.items() if any(exps)}
        )

    def coefficient(self, exps) -> int:
        return self.terms.get(tuple(exps), 0)

    def coefficient_tensor(self) -> np.ndarray:
        coeffs = np.zeros((self.p,) * self.n, dtype=np.int64)
        for exps, coeff in self.terms.items():
            coeffs[exps] = coeff
        return coeffs

    def table(self) -> np.ndarray:
        """Flat table of values in F_p, indexed like every other table."""
        values = _apply_all_axes(_power_matrix(self.p, self.p), self.coefficient_tensor(), self.p)
        return values.reshape(-1)

    def __call__(self, x) -> int:
        x = _check_point(x, self.p, self.n)
        total = 0
        for exps, coeff in self.terms.items():
            product = coeff
            for coord, exp in zip(x, exps):
                product *= pow(coord, exp, self.p)
            total += product
        return total % self.p

    @classmethod
    def interpolate(cls, values: np.ndarray, p: int, n: int) -> "ClassicalPoly":
        """The unique polynomial with per-variable exponents below p matching `values`."""
        values = np.asarray(values, dtype=np.int64).reshape(-1)
        if values.size != p**n:
            raise DimensionError(f"table has {values.size} entries, expected {p}^{n}")
        coeffs = _apply_all_axes(_indicator_matrix(p), values.reshape((p,) * n) % p, p)
        terms = {tuple(int(e) for e in exps): int(coeffs[tuple(exps)]) for exps in np.argwhere(coeffs)}
        return cls(p, n, terms)

    def _check_compatible(self, other: "ClassicalPoly"):
        if not isinstance(other, ClassicalPoly):
            raise TypeError("operand must be a ClassicalPoly object")
        if (self.p, self.n) != (other.p, other.n):
            raise DimensionError("polynomials must share p and n")

    def __add__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        self._check_compatible(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = terms.get(exps, 0) + coeff
        return ClassicalPoly(self.p, self.n, terms)

    def __neg__(self) -> "ClassicalPoly":
        return self.scale(-1)

    def __sub__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        return self + (-other)

    def __mul__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        # product of functions, so x^p folds back to x
        self._check_compatible(other)
        return ClassicalPoly.interpolate(self.table() * other.table() % self.p, self.p, self.n)

    def scale(self, factor: int) -> "ClassicalPoly":
        return ClassicalPoly(
            self.p, self.n, {exps: coeff * factor for exps, coeff in self.terms.items()}
        )

    def substitute(self, assignment: dict[int, int]) -> "ClassicalPoly":
        """Fixes the variables named in `assignment` (0-based index -> value).

        The result still has n variables; the fixed ones no longer appear.
        """
        terms: dict = defaultdict(int)
        for exps, coeff in self.terms.items():
            new_exps = list(exps)
            for var, value in assignment.items():
                if not 0 <= var < self.n:
                    raise DimensionError(f"variable index {var} out of range for n={self.n}")
                coeff = coeff * pow(int(value) % self.p, exps[var], self.p)
                new_exps[var] = 0
            terms[tuple(new_exps)] += coeff
        return ClassicalPoly(self.p, self.n, dict(terms))

    def derivative(self, h) -> "ClassicalPoly":
        """The additive derivative x -> Q(x+h) - Q(x)."""
        h = _check_point(h, self.p, self.n)
        values = self.table().reshape((self.p,) * self.n)
        shifted = values
        for axis, shift in enumerate(h):
            shifted = np.roll(shifted, -shift, axis=axis)
        return ClassicalPoly.interpolate((shifted - values) % self.p, self.p, self.n)

    def compose_linear(self, M) -> "ClassicalPoly":
        """The polynomial x -> self(Mx)."""
        indices = pullback_indices(M, self.p, self.n)
        return ClassicalPoly.interpolate(self.table()[indices], self.p, self.n)

    def phase_function(self) -> np.ndarray:
        """The complex table e_p(Q(x))."""
        return phases_to_complex(self.table(), 1, self.p)

    def to_nonclassical(self) -> NonClassicalPoly:
        alpha = PhaseValue.from_int(self.constant_term, 1, self.p)
        terms = {Monomial(exps, 0): c for exps, c in self.terms.items() if any(exps)}
        return NonClassicalPoly(self.p, self.n, alpha, terms)

    @classmethod
    def from_nonclassical(cls, P: NonClassicalPoly) -> "ClassicalPoly":
        if not P.is_classical_plus_constant or P.alpha.depth > 1:
            raise PolynomialFormatError("polynomial is not classical (a term has j > 0)")
        terms = {mono.exps: coeff for mono, coeff in P.terms.items()}
        terms[(0,) * P.n] = phase_to_fp(P.alpha)
        return cls(P.p, P.n, terms)

    def to_dict(self) -> dict:
        return self.to_nonclassical().to_dict()

    def to_json(self) -> str:
        return dumps_compact(self.to_dict())

    @classmethod
    def from_dict(cls, document: dict) -> "ClassicalPoly":
        return cls.from_nonclassical(NonClassicalPoly.from_dict(document))


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------
def random_nonclassical(
    p: int,
    n: int,
    degree: int,
    rng: np.random.Generator,
    depth: int | None = None,
    with_alpha: bool = True,
) -> NonClassicalPoly:
    """Random canonical polynomial of degree at most `degree`.

    Parameters
    ----------
    p, n : int
        Field and dimension.
    degree : int
        Degree bound.
    rng : np.random.Generator
        Source of randomness.
    depth : int | None, optional
        Cap on the depth of the terms, by default the largest depth the degree allows.
    with_alpha : bool, optional
        Draw a random constant alpha in U_depth, by default True.
    """
    validate_prime(p)
    max_depth = (degree - 1) // (p - 1) + 1 if degree >= 1 else 0
    depth = max_depth if depth is None else min(depth, max_depth)
    terms = {}
    for level in range(depth):
        weight_bound = degree - level * (p - 1)
        for exps in monomial_exponents(p, n, weight_bound):
            coeff = int(rng.integers(0, p))
            if coeff:
                terms[Monomial(exps, level)] = coeff
    alpha_depth = max(depth, 1)
    alpha = (
        PhaseValue.from_int(int(rng.integers(0, p**alpha_depth)), alpha_depth, p)
        if with_alpha
        else PhaseValue.zero(p)
    )
    return NonClassicalPoly(p, n, alpha, terms)


def random_classical(
    p: int, n: int, degree: int, rng: np.random.Generator, constant: bool = True
) -> ClassicalPoly:
    """Random classical polynomial of degree at most `degree`."""
    validate_prime(p)
    min_weight = 0 if constant else 1
    terms = {
        exps: int(rng.integers(0, p))
        for exps in monomial_exponents(p, n, degree, min_weight=min_weight)
    }
    return ClassicalPoly(p, n, terms)


def load_polynomial(document: dict) -> NonClassicalPoly:
    """Reads a polynomial document, raising PolynomialFormatError on malformed input."""
    try:
        return NonClassicalPoly.from_dict(document)
    except PhaseKitError:
        raise
    except (TypeError, AttributeError, ValueError) as err:
        raise PolynomialFormatError(f"malformed polynomial document: {err}") from err

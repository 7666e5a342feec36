"""
This module contains the coefficient coloring of d-subsets of variables, the search for
monochromatic variable subsets and the decomposition of a restricted polynomial into a
weight-d quasisymmetric combination plus lower-degree terms.

Variables are indexed from 0.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fp_utils import DimensionError, PhaseKitError, validate_prime
from .gowers_utils import EnumerationBudgetError
from .io_utils import config_value
from .poly_utils import ClassicalPoly, monomial_exponents
from .quasisym_utils import Composition, compositions, quasisym_poly

logger = logging.getLogger(__name__)


class ColoringError(PhaseKitError):
    """Raised for edges of the wrong size, target sizes out of range or degree too high"""


class DecompositionError(PhaseKitError):
    """Raised when the remainder of a restriction has degree d or more"""


def lambda_set(p: int, d: int) -> list[tuple[int, ...]]:
    """All lambda in {0, ..., p-1}^d with |lambda| = d, in lexicographic order."""
    return [lam for lam in itertools.product(range(p), repeat=d) if sum(lam) == d]


@dataclass(frozen=True)
class EdgeColor:
    """Coefficients of P read on one edge, one entry per lambda in lexicographic order."""

    p: int
    d: int
    values: tuple[int, ...]

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(zip(lambda_set(self.p, self.d), self.values))

    def coefficient(self, alpha: Composition) -> int:
        """c(alpha, 0, ..., 0), the value on the lambda made of alpha padded with zeros."""
        padded = alpha.parts + (0,) * (self.d - alpha.length)
        return self.as_dict()[padded]


def edge_color(P: ClassicalPoly, edge, d: int) -> EdgeColor:
    """Color of a d-subset of variables.

    For every lambda, the entry is the coefficient of prod_m x_(edge_m)^(lambda_m);
    zeros in lambda drop the corresponding vertex.

    Raises
    ------
    ColoringError
        If the edge does not have d strictly increasing vertices.
    """
    edge = tuple(int(v) for v in edge)
    if d < 1 or len(edge) != d:
        raise ColoringError(f"edge {edge} has {len(edge)} vertices, expected d={d}")
    if any(a >= b for a, b in zip(edge, edge[1:])) or edge[0] < 0 or edge[-1] >= P.n:
        raise ColoringError(f"edge {edge} must be strictly increasing within 0..{P.n - 1}")

    values = []
    for lam in lambda_set(P.p, d):
        exps = [0] * P.n
        for vertex, exp in zip(edge, lam):
            exps[vertex] = exp
        values.append(P.coefficient(exps))
    return EdgeColor(P.p, d, tuple(values))


class MonochromaticSearch(NamedTuple):
    subset: tuple[int, ...] | None
    complete: bool
    nodes: int


class _SubsetSearch:
    """Depth-first extension of increasing vertex sequences keeping one edge color.

    The reference color is the color of the first d vertices; a vertex is appended only
    if every new d-subset through it has the reference color. Visiting children in
    increasing order makes the first full-size set found the lexicographically smallest.
    """

    def __init__(self, P: ClassicalPoly, d: int, node_budget: int):
        self.P = P
        self.d = d
        self.node_budget = node_budget
        self.nodes = 0
        self._colors: dict[tuple[int, ...], EdgeColor] = {}

    def color(self, edge: tuple[int, ...]) -> EdgeColor:
        if edge not in self._colors:
            self._colors[edge] = edge_color(self.P, edge, self.d)
        return self._colors[edge]

    def can_extend(self, current: tuple[int, ...], vertex: int) -> bool:
        if len(current) + 1 <= self.d:
            return True
        reference = self.color(current[: self.d])
        return all(
            self.color(prefix + (vertex,)) == reference
            for prefix in itertools.combinations(current, self.d - 1)
        )

    def children(self, current: tuple[int, ...]):
        start = current[-1] + 1 if current else 0
        for vertex in range(start, self.P.n):
            if self.can_extend(current, vertex):
                yield current + (vertex,)

    def tick(self) -> bool:
        self.nodes += 1
        return self.nodes <= self.node_budget


def _check_degree(P: ClassicalPoly, d: int) -> None:
    if d < 1:
        raise ColoringError(f"uniformity d must be at least 1, got {d}")
    if P.degree > d:
        raise ColoringError(f"polynomial has degree {P.degree} > d={d}")


def find_monochromatic(
    P: ClassicalPoly, d: int, target_m: int, node_budget: int | None = None
) -> tuple[int, ...] | None:
    """Lexicographically smallest monochromatic subset of size `target_m`.

    Parameters
    ----------
    P : ClassicalPoly
        Polynomial of degree at most d.
    d : int
        Uniformity of the coloring.
    target_m : int
        Requested subset size, d <= target_m <= n.
    node_budget : int | None, optional
        Largest number of search nodes, by default the configured budget.

    Returns
    -------
    tuple[int, ...] | None
        The subset, or None if no monochromatic subset of that size exists.

    Raises
    ------
    ColoringError
        If target_m is out of range or P has degree above d.
    EnumerationBudgetError
        If the search needs more nodes than the budget.
    """
    _check_degree(P, d)
    if target_m > P.n:
        raise ColoringError(f"target size {target_m} exceeds n={P.n}")
    if target_m < d:
        raise ColoringError(f"target size {target_m} is below d={d}")
    node_budget = config_value("symmetrize_configs", "node_budget") if node_budget is None else node_budget

    search = _SubsetSearch(P, d, node_budget)
    stack = [()]
    while stack:
        current = stack.pop()
        if not search.tick():
            raise EnumerationBudgetError(
                f"monochromatic search exceeded {node_budget} nodes", search.nodes
            )
        if len(current) == target_m:
            logger.debug("found monochromatic subset %s after %d nodes", current, search.nodes)
            return current
        # room left for the remaining vertices
        children = [
            child
            for child in search.children(current)
            if P.n - child[-1] - 1 >= target_m - len(child)
        ]
        stack.extend(reversed(children))
    return None


def largest_monochromatic(
    P: ClassicalPoly, d: int, node_budget: int | None = None
) -> MonochromaticSearch:
    """Largest monochromatic subset found within the node budget.

    `complete` is True when the whole search tree was explored, in which case the subset
    is a largest one overall (lexicographically smallest among those).
    """
    _check_degree(P, d)
    node_budget = config_value("symmetrize_configs", "node_budget") if node_budget is None else node_budget

    search = _SubsetSearch(P, d, node_budget)
    best: tuple[int, ...] = ()
    stack = [()]
    complete = True
    while stack:
        current = stack.pop()
        if not search.tick():
            complete = False
            logger.info("node budget %d reached, returning best subset so far", node_budget)
            break
        if len(current) > len(best):
            best = current
        children = [
            child
            for child in search.children(current)
            if len(child) + P.n - child[-1] - 1 > len(best)
        ]
        stack.extend(reversed(children))
    return MonochromaticSearch(best if len(best) >= min(d, P.n) else None, complete, search.nodes)


@dataclass(frozen=True)
class RestrictionResult:
    subset: tuple[int, ...]
    assignment: dict
    coefficients: dict
    remainder: ClassicalPoly

    def to_dict(self) -> dict:
        return {
            "I": list(self.subset),
            "y": {str(var): value for var, value in sorted(self.assignment.items())},
            "coeffs": {str(alpha): coeff for alpha, coeff in self.coefficients.items()},
            "remainder": self.remainder.to_dict(),
        }


def embedded_quasisym(alpha, subset, n: int, p: int) -> ClassicalPoly:
    """Q_alpha in the variables of `subset`, written as a polynomial in all n variables."""
    local = quasisym_poly(alpha, len(subset), p)
    terms = {}
    for exps, coeff in local.terms.items():
        full = [0] * n
        for var, exp in zip(subset, exps):
            full[var] = exp
        terms[tuple(full)] = coeff
    return ClassicalPoly(p, n, terms)


def restrict_decompose(P: ClassicalPoly, subset, y: dict, d: int) -> RestrictionResult:
    """Splits P(x_I, y) into sum_alpha c(alpha) Q_alpha(x_I) plus a remainder.

    Parameters
    ----------
    P : ClassicalPoly
        Polynomial of degree at most d.
    subset : sequence of int
        Monochromatic subset I (strictly increasing, size >= d).
    y : dict
        Values of every variable outside I.
    d : int
        Uniformity of the coloring.

    Returns
    -------
    RestrictionResult
        Coefficients keyed by composition of weight d and the remainder.

    Raises
    ------
    DecompositionError
        If the remainder has degree d or more.
    """
    _check_degree(P, d)
    subset = tuple(int(v) for v in subset)
    if len(subset) < d:
        raise ColoringError(f"subset {subset} has fewer than d={d} vertices")
    outside = sorted(set(range(P.n)) - set(subset))
    assignment = {int(var): int(value) % P.p for var, value in y.items()}
    if sorted(assignment) != outside:
        raise DimensionError(f"assignment must fix exactly the variables {outside}")

    color = edge_color(P, subset[:d], d)
    coefficients = {alpha: color.coefficient(alpha) for alpha in compositions(d, P.p)}

    remainder = P.substitute(assignment)
    for alpha, coeff in coefficients.items():
        if coeff:
            remainder = remainder - embedded_quasisym(alpha, subset, P.n, P.p).scale(coeff)
    if remainder.degree > d - 1:
        raise DecompositionError(
            f"remainder on {subset} has degree {remainder.degree} > {d - 1}"
        )
    return RestrictionResult(subset, assignment, coefficients, remainder)


def outside_assignments(
    n: int, subset, p: int, rng: np.random.Generator, limit: int | None = None
):
    """Every assignment of the variables outside `subset`, or `limit` random ones."""
    limit = config_value("symmetrize_configs", "outside_sample_limit") if limit is None else limit
    outside = sorted(set(range(n)) - set(subset))
    if p ** len(outside) <= limit:
        for values in itertools.product(range(p), repeat=len(outside)):
            yield dict(zip(outside, values))
        return
    for _ in range(limit):
        yield dict(zip(outside, (int(v) for v in rng.integers(0, p, size=len(outside)))))


def verify_decomposition(
    P: ClassicalPoly, subset, d: int, rng: np.random.Generator, limit: int | None = None
) -> int:
    """Runs restrict_decompose for the outside assignments; returns how many were checked."""
    checked = 0
    for y in outside_assignments(P.n, subset, P.p, rng, limit):
        result = restrict_decompose(P, subset, y, d)
        rebuilt = result.remainder
        for alpha, coeff in result.coefficients.items():
            rebuilt = rebuilt + embedded_quasisym(alpha, subset, P.n, P.p).scale(coeff)
        if rebuilt != P.substitute(y):
            raise DecompositionError(f"decomposition does not reproduce P at y={y}")
        checked += 1
    return checked


def planted_quasisymmetric(
    p: int, n: int, d: int, inside, rng: np.random.Generator
) -> ClassicalPoly:
    """Random polynomial whose degree-d part on the variables of `inside` is quasisymmetric.

    The degree-d monomials are a random combination of Q_alpha(x_inside) plus random
    monomials touching at least one variable outside `inside`; every monomial of lower
    degree is random.
    """
    validate_prime(p)
    inside = tuple(sorted(int(v) for v in inside))
    poly = ClassicalPoly.zero(p, n)
    for alpha in compositions(d, p):
        coeff = int(rng.integers(0, p))
        if coeff:
            poly = poly + embedded_quasisym(alpha, inside, n, p).scale(coeff)

    inside_set = set(inside)
    extra = {}
    for exps in monomial_exponents(p, n, d, min_weight=0):
        touches_outside = any(e and var not in inside_set for var, e in enumerate(exps))
        if sum(exps) < d or touches_outside:
            extra[exps] = int(rng.integers(0, p))
    return poly + ClassicalPoly(p, n, extra)

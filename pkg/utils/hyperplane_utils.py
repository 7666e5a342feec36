"""
This module contains the hyperplane restriction of a non-classical polynomial of degree at
most p and the extraction of a classical correlate from it.

A polynomial of degree at most p has the canonical form

    P(x) = alpha + P'(x)/p + (c_1|x_1| + ... + c_n|x_n|)/p^2

and on the hyperplane c.x = 0 it agrees with alpha + |Q(x)|/p for a classical Q.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import sympy

from .fp_utils import DimensionError, PhaseKitError, PhaseValue, format_phase
from .gowers_utils import correlation, phase_correlation
from .io_utils import config_value
from .poly_utils import (
    ClassicalPoly,
    Monomial,
    NonClassicalPoly,
    all_points,
    compose_linear,
    evaluate_table,
    pullback_indices,
    validate_complex_table,
)

logger = logging.getLogger(__name__)

# slack when comparing Fourier magnitudes for the smallest-frequency tie-break
_TIE_TOLERANCE = 1e-12


class HyperplaneError(PhaseKitError):
    """Raised when a polynomial is out of range for the restriction or the check fails"""


@dataclass(frozen=True)
class HyperplaneSplit:
    c: tuple[int, ...]
    basis_change: tuple[tuple[int, ...], ...]
    alpha: PhaseValue
    Q: ClassicalPoly
    a: int | None = None

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis_change, dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "c": list(self.c),
            "basis_change": [list(row) for row in self.basis_change],
            "alpha": format_phase(self.alpha),
            "Q": self.Q.to_dict(),
            "a": self.a,
        }


class Extraction(NamedTuple):
    Q_total: ClassicalPoly
    corr: float
    split: HyperplaneSplit
    epsilon: float


def basis_change_for(c, p: int) -> np.ndarray:
    """Invertible B whose first row is c, so that c.x = 0 becomes u_1 = 0 for u = Bx.

    The remaining rows are the basis vectors e_j for every j except the first index
    where c is nonzero. When c = 0, B is the identity.
    """
    n = len(c)
    if not any(c):
        return np.eye(n, dtype=np.int64)
    pivot = next(i for i, value in enumerate(c) if value)
    rows = [list(c)]
    for j in range(n):
        if j != pivot:
            rows.append([1 if idx == j else 0 for idx in range(n)])
    return np.array(rows, dtype=np.int64) % p


def inverse_mod(M: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over F_p."""
    inverse = sympy.Matrix(M.tolist()).inv_mod(p)
    return np.array(inverse.tolist(), dtype=np.int64) % p


def _check_input(P: NonClassicalPoly) -> None:
    if not isinstance(P, NonClassicalPoly):
        raise TypeError("'P' must be a NonClassicalPoly object")
    if P.degree > P.p:
        raise HyperplaneError(f"polynomial degree {P.degree} exceeds p={P.p}")
    if P.depth > 2:
        raise HyperplaneError(f"polynomial depth {P.depth} exceeds 2")


def _split(P: NonClassicalPoly):
    """Returns the split together with Q in hyperplane coordinates and B^-1."""
    _check_input(P)
    p, n = P.p, P.n
    c = [0] * n
    for mono, coeff in P.terms.items():
        if mono.j == 1:
            c[mono.exps.index(1)] = coeff
    c = tuple(c)

    basis = basis_change_for(c, p)
    inverse = inverse_mod(basis, p)
    local = compose_linear(P, inverse)

    first = Monomial(tuple(1 if idx == 0 else 0 for idx in range(n)), 1)
    leftover = {mono: coeff for mono, coeff in local.terms.items() if mono.j > 0}
    if any(mono != first for mono in leftover):
        raise HyperplaneError(f"deep terms {list(leftover)} do not reduce to |u_1|/p^2")

    local_q = ClassicalPoly(
        p, n, {mono.exps: coeff for mono, coeff in local.terms.items() if mono.j == 0}
    )
    Q = local_q.compose_linear(basis)
    split = HyperplaneSplit(c, tuple(tuple(int(v) for v in row) for row in basis), P.alpha, Q)
    return split, local_q, inverse


def verify_split(P: NonClassicalPoly, split: HyperplaneSplit) -> int:
    """Checks P(x) = alpha + |Q(x)|/p on every point of the hyperplane; returns the count."""
    table = evaluate_table(P)
    depth = max(table.depth, 1)
    scale = P.p ** (depth - table.depth)
    actual = table.numerators * scale
    expected = (
        split.alpha.embed(depth) + split.Q.table() * P.p ** (depth - 1)
    ) % P.p**depth

    # the first row of B cuts out the hyperplane (x_1 = 0 when c = 0)
    on_plane = (all_points(P.p, P.n) @ split.matrix[0]) % P.p == 0
    mismatches = np.flatnonzero(on_plane & (actual != expected))
    if mismatches.size:
        raise HyperplaneError(f"split disagrees with P at table index {int(mismatches[0])}")
    return int(on_plane.sum())


def hyperplane_restriction(P: NonClassicalPoly, verify_limit: int | None = None) -> HyperplaneSplit:
    """Restricts P of degree at most p to a hyperplane on which it is classical.

    Parameters
    ----------
    P : NonClassicalPoly
        Polynomial of degree at most p.
    verify_limit : int | None, optional
        The agreement is checked point by point when the hyperplane has at most this many
        points, by default the configured limit.

    Returns
    -------
    HyperplaneSplit
        Covector c, basis change B, alpha and Q.

    Raises
    ------
    HyperplaneError
        If deg(P) > p, depth(P) > 2 or the agreement check fails.
    """
    split, _, _ = _split(P)
    verify_limit = config_value("hyperplane_configs", "verify_limit") if verify_limit is None else verify_limit
    if P.p ** (P.n - 1) <= verify_limit:
        checked = verify_split(P, split)
        logger.debug("hyperplane agreement verified on %d points", checked)
    return split


def extract_classical_correlate(
    f: np.ndarray, P: NonClassicalPoly, verify_limit: int | None = None
) -> Extraction:
    """Finds a classical polynomial correlating with f at least |E f e(-P)| / sqrt(p).

    In hyperplane coordinates u = Bx, g(u_1) = E_y f(u) e_p(-Q(u)) is averaged over each
    slice and the frequency a maximizing its Fourier coefficient is appended as a u_1.

    Parameters
    ----------
    f : np.ndarray
        Flat complex table over F_p^n.
    P : NonClassicalPoly
        Polynomial of degree at most p.
    verify_limit : int | None, optional
        Passed to the hyperplane check.

    Returns
    -------
    Extraction
        Q_total, its correlation with f, the populated split and epsilon = |E f e(-P)|.
    """
    n = validate_complex_table(f, P.p)
    if n != P.n:
        raise DimensionError(f"table over F_{P.p}^{n} against a polynomial in {P.n} variables")
    split, local_q, inverse = _split(P)
    verify_limit = config_value("hyperplane_configs", "verify_limit") if verify_limit is None else verify_limit
    if P.p ** (P.n - 1) <= verify_limit:
        verify_split(P, split)

    p = P.p
    local_f = f[pullback_indices(inverse, p, n)]
    slices = (local_f * np.conj(local_q.phase_function())).reshape(p, -1).mean(axis=1)
    spectrum = np.abs(np.fft.fft(slices) / p)
    a = int(np.flatnonzero(spectrum >= spectrum.max() - _TIE_TOLERANCE)[0])

    Q_total = split.Q + ClassicalPoly.linear(p, [a * int(v) for v in split.matrix[0]])
    split = HyperplaneSplit(split.c, split.basis_change, split.alpha, split.Q, a)
    corr = correlation(f, Q_total)
    epsilon = phase_correlation(f, P)
    logger.debug("extraction picked a=%d: corr=%.6f, epsilon=%.6f", a, corr, epsilon)
    return Extraction(Q_total, corr, split, epsilon)

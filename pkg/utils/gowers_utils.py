"""
This module contains multiplicative derivatives, Gowers uniformity norms, the Fourier
transform over F_p^n and correlations with classical polynomial phases.

Complex tables are flat numpy arrays of length p^n indexed as in `poly_utils`.
"""

import itertools
import logging
from dataclasses import asdict, dataclass

import numpy as np

from .fp_utils import DimensionError, PhaseKitError, phases_to_complex
from .io_utils import config_value
from .poly_utils import (
    ClassicalPoly,
    NonClassicalPoly,
    all_points,
    evaluate_table,
    place_values,
    validate_complex_table,
)

logger = logging.getLogger(__name__)

GOWERS_METHODS = ("direct_enumeration", "recursive_table", "phase_histogram")

# rows processed at once by the recursive paths
_BLOCK_ENTRIES = 2**22


class GowersInputError(PhaseKitError):
    """Raised when the order is below 1 or the input table is not 1-bounded"""


class EnumerationBudgetError(PhaseKitError):
    """Raised when an enumeration would exceed its configured cap"""

    def __init__(self, message, count):
        super().__init__(message)
        # exact size of the enumeration that was refused
        self.count = count


@dataclass(frozen=True)
class GowersResult:
    norm: float
    d: int
    method: str
    count: int

    def to_dict(self) -> dict:
        return asdict(self)


def shift_index_table(p: int, n: int) -> np.ndarray:
    """Array S with S[h, x] = index(x + h) for all pairs of points."""
    points = all_points(p, n)
    sums = (points[:, None, :] + points[None, :, :]) % p
    return sums @ place_values(p, n)


def _check_order(d) -> int:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise TypeError("'d' must be an integer")
    if d < 1:
        raise GowersInputError(f"the Gowers norm order must be at least 1, got {d}")
    return int(d)


def _check_bounded(f: np.ndarray, tolerance: float) -> None:
    if f.size and np.max(np.abs(f)) > 1 + tolerance:
        raise GowersInputError("input table is not 1-bounded")


def mult_derivative(f: np.ndarray, p: int, h) -> np.ndarray:
    """The multiplicative derivative x -> f(x+h) * conj(f(x)).

    Parameters
    ----------
    f : np.ndarray
        Flat complex table over F_p^n.
    p : int
        Field characteristic.
    h : sequence of int
        Shift vector of dimension n.

    Returns
    -------
    np.ndarray
        Flat complex table of the derivative.
    """
    n = validate_complex_table(f, p)
    if len(h) != n:
        raise DimensionError(f"shift of dimension {len(h)} for a table over F_{p}^{n}")
    shifted = f.reshape((p,) * n)
    for axis, shift in enumerate(h):
        shifted = np.roll(shifted, -(int(shift) % p), axis=axis)
    return shifted.reshape(-1) * np.conj(f)


def _direct_enumeration(f: np.ndarray, p: int, n: int, d: int) -> float:
    points = [tuple(int(c) for c in row) for row in all_points(p, n)]
    total = 0j
    for shifts in itertools.product(points, repeat=d):
        g = f
        for h in shifts:
            g = mult_derivative(g, p, h)
        total += g.sum()
    return (abs(total) / float(p ** (n * (d + 1)))) ** (1.0 / 2**d)


def _recursive_sum(stack: np.ndarray, levels: int, shifts: np.ndarray, p: int, n: int) -> float:
    """Sum over the rows g of ||g||_{U^levels}^(2^levels)."""
    size = stack.shape[1]
    if levels == 1:
        return float(np.sum(np.abs(stack.mean(axis=1)) ** 2))
    if levels == 2:
        spectrum = np.fft.fftn(stack.reshape((-1,) + (p,) * n), axes=tuple(range(1, n + 1))) / size
        return float(np.sum(np.abs(spectrum) ** 4))

    total = 0.0
    rows = max(1, _BLOCK_ENTRIES // (size * size))
    for start in range(0, stack.shape[0], rows):
        part = stack[start : start + rows]
        derived = part[:, shifts] * np.conj(part)[:, None, :]
        total += _recursive_sum(derived.reshape(-1, size), levels - 1, shifts, p, n) / size
    return total


def gowers_norm(
    f: np.ndarray,
    p: int,
    d: int,
    method: str | None = None,
    tolerance: float | None = None,
) -> GowersResult:
    """Computes the Gowers U^d norm of a 1-bounded complex table.

    Uses ||f||_{U^d}^(2^d) = E_h ||d_h f||_{U^(d-1)}^(2^(d-1)), with the U^2 level read
    off the Fourier transform, unless the input is small enough for direct enumeration.

    Parameters
    ----------
    f : np.ndarray
        Flat complex table over F_p^n.
    p : int
        Field characteristic.
    d : int
        Order of the norm, at least 1.
    method : str | None, optional
        "direct_enumeration" or "recursive_table"; picked by cost when None.
    tolerance : float | None, optional
        Slack on the 1-boundedness check, by default the configured tolerance.

    Returns
    -------
    GowersResult
        Norm value, order, method used and the number of (x, h_1, ..., h_d) tuples.

    Raises
    ------
    GowersInputError
        If d < 1 or the table is not 1-bounded.
    EnumerationBudgetError
        If no method fits within the configured limits.
    """
    d = _check_order(d)
    n = validate_complex_table(f, p)
    tolerance = config_value("general_configs", "tolerance") if tolerance is None else tolerance
    _check_bounded(f, tolerance)
    count = p ** (n * (d + 1))

    if method is None:
        if count <= config_value("gowers_configs", "direct_enumeration_limit"):
            method = "direct_enumeration"
        else:
            method = "recursive_table"
    if method not in ("direct_enumeration", "recursive_table"):
        raise ValueError(
            f"Invalid method: {method}. Choose either 'direct_enumeration' or 'recursive_table'."
        )
    if method == "recursive_table":
        limit = config_value("gowers_configs", "recursive_table_limit")
        if p ** (n * d) > limit:
            raise EnumerationBudgetError(
                f"recursive table needs {p ** (n * d)} entries, limit is {limit}", count
            )

    logger.debug("U^%d norm over F_%d^%d via %s", d, p, n, method)
    if method == "direct_enumeration":
        value = _direct_enumeration(f, p, n, d)
    else:
        power = _recursive_sum(f.reshape(1, -1), d, shift_index_table(p, n), p, n)
        value = max(power, 0.0) ** (1.0 / 2**d)
    return GowersResult(float(value), d, method, count)


def _phase_histogram(
    stack: np.ndarray,
    levels: int,
    shifts: np.ndarray,
    modulus: int,
    base_point_only: bool,
    histogram: np.ndarray,
) -> None:
    """Adds to `histogram` the numerators of all remaining iterated derivatives."""
    size = stack.shape[1]
    if levels == 0:
        values = stack[:, 0] if base_point_only else stack.reshape(-1)
        histogram += np.bincount(values % modulus, minlength=modulus)
        return
    if levels == 1 and base_point_only:
        # at x = 0 the last shift h lands on index(h)
        values = (stack - stack[:, :1]) % modulus
        histogram += np.bincount(values.reshape(-1), minlength=modulus)
        return

    rows = max(1, _BLOCK_ENTRIES // (size * size))
    for start in range(0, stack.shape[0], rows):
        part = stack[start : start + rows]
        derived = (part[:, shifts] - part[:, None, :]) % modulus
        _phase_histogram(
            derived.reshape(-1, size), levels - 1, shifts, modulus, base_point_only, histogram
        )


def gowers_norm_phase(P: NonClassicalPoly, d: int, cap: int | None = None) -> GowersResult:
    """Gowers U^d norm of e(P) from an exact histogram of iterated derivative phases.

    When deg(P) <= d the d-th derivative does not depend on x, so only the shift tuples
    are enumerated at x = 0; otherwise every (x, h_1, ..., h_d) is enumerated.

    Parameters
    ----------
    P : NonClassicalPoly
        Polynomial phase.
    d : int
        Order of the norm.
    cap : int | None, optional
        Largest enumeration allowed, by default the configured enumeration cap.

    Returns
    -------
    GowersResult
        Norm value with method "phase_histogram".
    """
    d = _check_order(d)
    if not isinstance(P, NonClassicalPoly):
        raise TypeError("'P' must be a NonClassicalPoly object")
    cap = config_value("gowers_configs", "enumeration_cap") if cap is None else cap
    p, n = P.p, P.n

    base_point_only = P.degree <= d
    count = p ** (n * d) if base_point_only else p ** (n * (d + 1))
    if count > cap:
        raise EnumerationBudgetError(
            f"phase histogram needs {count} tuples, cap is {cap}", count
        )

    table = evaluate_table(P)
    modulus = table.modulus
    histogram = np.zeros(modulus, dtype=np.int64)
    _phase_histogram(
        table.numerators.reshape(1, -1),
        d,
        shift_index_table(p, n),
        modulus,
        base_point_only,
        histogram,
    )

    support = np.nonzero(histogram)[0]
    total = np.sum(histogram[support] * phases_to_complex(support, table.depth, p))
    if support.size == 1 and support[0] == 0:
        value = 1.0
    else:
        value = float(abs(total) / count) ** (1.0 / 2**d)
    logger.debug("phase histogram over %d tuples, support size %d", count, support.size)
    return GowersResult(value, d, "phase_histogram", count)


def fourier_array(f: np.ndarray, p: int) -> np.ndarray:
    """Dense Fourier transform: entry a is E_x f(x) e_p(-a.x), shape (p,)*n."""
    n = validate_complex_table(f, p)
    return np.fft.fftn(f.reshape((p,) * n)) / float(p**n)


def fourier_fp(f: np.ndarray, p: int) -> dict[tuple[int, ...], complex]:
    """Fourier coefficients keyed by frequency vector."""
    spectrum = fourier_array(f, p)
    return {
        tuple(int(a) for a in freq): complex(spectrum[tuple(freq)])
        for freq in np.ndindex(spectrum.shape)
    }


def correlation(f: np.ndarray, Q: ClassicalPoly) -> float:
    """|E_x f(x) e_p(-Q(x))|."""
    n = validate_complex_table(f, Q.p)
    if n != Q.n:
        raise DimensionError(f"table over F_{Q.p}^{n} against a polynomial in {Q.n} variables")
    return float(abs(np.mean(f * np.conj(Q.phase_function()))))


def phase_correlation(f: np.ndarray, P: NonClassicalPoly) -> float:
    """|E_x f(x) e(-P(x))| for a non-classical phase P."""
    n = validate_complex_table(f, P.p)
    if n != P.n:
        raise DimensionError(f"table over F_{P.p}^{n} against a polynomial in {P.n} variables")
    table = evaluate_table(P)
    return float(abs(np.mean(f * np.conj(table.to_complex()))))

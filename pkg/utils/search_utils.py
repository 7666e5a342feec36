"""
This module contains the correlation search over classical polynomials of bounded degree,
the vanishing-probability experiment for multiaffine functions and decay curves for the
counterexample family.

Candidates are the classical polynomials with zero constant term. The candidate with
index i has coefficient digit m of i (base p, least significant first) on monomial m,
where monomials are ordered by `poly_utils.monomial_exponents`: the linear monomials
x_1, ..., x_n come first, so the n least significant digits sweep the linear part.
"""

import functools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd
from tqdm import tqdm

from .fp_utils import DimensionError, phases_to_complex, validate_prime
from .gowers_utils import EnumerationBudgetError
from .io_utils import config_value
from .poly_utils import (
    ClassicalPoly,
    all_points,
    monomial_exponents,
    phase_function,
    random_classical,
    validate_complex_table,
)
from .quasisym_utils import (
    ZeroLeadingCoefficientError,
    is_boundary,
    make_counterexample,
    multiaffine_leading_coeff,
)

logger = logging.getLogger(__name__)

SEARCH_MODES = ("exhaustive", "sampled", "auto")
CURVE_COLUMNS = ["n", "p", "k", "d", "mode", "best_value", "candidates", "seed"]

# slack when comparing correlations for the smallest-index tie-break
_TIE_TOLERANCE = 1e-12

# the bit-packed path keeps a whole truth table in one uint64 word
_PACKED_MAX_N = 6


@dataclass(frozen=True, eq=False)
class SearchSpace:
    """Monomials of the candidate space and the values of the nonlinear ones."""

    p: int
    n: int
    d: int
    exponents: list
    values: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.exponents)

    @property
    def nonlinear_size(self) -> int:
        return self.size - min(self.n, self.size)

    @property
    def count(self) -> int:
        return self.p**self.size

    @property
    def nonlinear_count(self) -> int:
        return self.p**self.nonlinear_size


def search_space(p: int, n: int, d: int) -> SearchSpace:
    validate_prime(p)
    if d < 0:
        raise DimensionError(f"degree bound must be non-negative, got {d}")
    exponents = monomial_exponents(p, n, d)
    nonlinear = exponents[n:] if d >= 1 else []
    points = all_points(p, n)
    values = np.array(
        [np.prod(points ** np.array(exps), axis=1) % p for exps in nonlinear],
        dtype=np.int64,
    ).reshape(len(nonlinear), p**n)
    return SearchSpace(p, n, d, exponents, values)


def count_candidates(p: int, n: int, d: int) -> int:
    """p^M with M the number of non-constant monomials of degree at most d."""
    validate_prime(p)
    return p ** len(monomial_exponents(p, n, d))


def _digits(index: int, p: int, length: int) -> list[int]:
    digits = []
    for _ in range(length):
        index, digit = divmod(index, p)
        digits.append(digit)
    return digits


def candidate_from_index(p: int, n: int, d: int, index: int) -> ClassicalPoly:
    """The candidate with the given index."""
    exponents = monomial_exponents(p, n, d)
    if not 0 <= index < p ** len(exponents):
        raise DimensionError(f"candidate index {index} out of range")
    return ClassicalPoly(p, n, dict(zip(exponents, _digits(index, p, len(exponents)))))


def enumerate_classical(p: int, n: int, d: int, budget: int | None = None):
    """Yields every candidate of degree at most d exactly once, in index order.

    Raises
    ------
    EnumerationBudgetError
        If the candidate count exceeds the budget; the error carries the count.
    """
    budget = config_value("search_configs", "budget") if budget is None else budget
    count = count_candidates(p, n, d)
    if count > budget:
        raise EnumerationBudgetError(f"{count} candidates exceed the budget {budget}", count)
    for index in range(count):
        yield candidate_from_index(p, n, d, index)


@dataclass(frozen=True)
class SearchReport:
    p: int
    n: int
    d: int
    mode: str
    best_value: float
    best_poly: ClassicalPoly
    candidates: int
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "d": self.d,
            "mode": self.mode,
            "best_value": self.best_value,
            "best_poly": self.best_poly.to_dict(),
            "candidates": self.candidates,
            "seed": self.seed,
        }


def resolve_seed(seed: int | None) -> int:
    """Returns `seed`, or a fresh entropy seed that fits an int64 column."""
    if seed is not None:
        return int(seed)
    seed = int(np.random.SeedSequence().entropy) & (2**63 - 1)
    logger.info("no seed given, drawing seed %d", seed)
    return seed


# ---------------------------------------------------------------------------
# block workers
# ---------------------------------------------------------------------------
def _linear_sweep(f: np.ndarray, space: SearchSpace, coeff_rows: np.ndarray) -> np.ndarray:
    """|E f e_p(-Q - a.x)| for every row Q and every a, columns in linear-index order."""
    p, n = space.p, space.n
    Q = coeff_rows @ space.values % p
    twisted = f[None, :] * phases_to_complex((-Q) % p, 1, p)
    spectrum = np.fft.fftn(twisted.reshape((-1,) + (p,) * n), axes=tuple(range(1, n + 1)))
    # reverse the frequency axes so a_1 becomes the least significant digit
    magnitudes = np.abs(spectrum).transpose((0,) + tuple(range(n, 0, -1)))
    return magnitudes.reshape(coeff_rows.shape[0], -1) / float(p**n)


def _first_best(values: np.ndarray, indices: np.ndarray) -> tuple[float, int]:
    best = float(values.max())
    within = values >= best - _TIE_TOLERANCE
    return best, int(indices[within].min())


def _exhaustive_block(f: np.ndarray, space: SearchSpace, bounds: tuple[int, int]):
    start, stop = bounds
    rows = np.arange(start, stop, dtype=np.int64)
    coeff_rows = (rows[:, None] // space.p ** np.arange(space.nonlinear_size)) % space.p
    values = _linear_sweep(f, space, coeff_rows)
    indices = rows[:, None] * space.p**space.n + np.arange(space.p**space.n)
    return _first_best(values, indices)


def walsh_hadamard(rows: np.ndarray) -> np.ndarray:
    """Normalized Walsh-Hadamard transform of every row (length a power of two)."""
    out = np.array(rows, dtype=np.complex128, copy=True)
    size = out.shape[-1]
    step = 1
    while step < size:
        view = out.reshape(out.shape[0], -1, 2, step)
        first = view[:, :, 0, :].copy()
        second = view[:, :, 1, :].copy()
        view[:, :, 0, :] = first + second
        view[:, :, 1, :] = first - second
        step *= 2
    return out / size


def _bit_reversal(n: int) -> np.ndarray:
    return np.array(
        [int(format(k, f"0{n}b")[::-1], 2) if n else 0 for k in range(2**n)], dtype=np.int64
    )


def truth_table_words(space: SearchSpace) -> np.ndarray:
    """One uint64 per nonlinear monomial; bit x is the monomial's value at point index x."""
    words = []
    for row in space.values:
        word = 0
        for x, bit in enumerate(row):
            if bit:
                word |= 1 << x
        words.append(word)
    return np.array(words, dtype=np.uint64)


def _packed_block(f: np.ndarray, n: int, words: np.ndarray, bounds: tuple[int, int]):
    """Candidates in Gray-code order: consecutive rows differ in one nonlinear coefficient."""
    start, stop = bounds
    steps = np.arange(start, stop, dtype=np.int64)
    gray = steps ^ (steps >> 1)

    first = np.uint64(0)
    for m in range(words.size):
        if (int(gray[0]) >> m) & 1:
            first ^= words[m]
    if stop - start > 1:
        later = steps[1:]
        flipped = np.log2(later & -later).astype(np.int64)
        tables = np.bitwise_xor.accumulate(np.concatenate(([first], words[flipped])))
    else:
        tables = np.array([first], dtype=np.uint64)

    bits = (tables[:, None] >> np.arange(2**n, dtype=np.uint64)) & np.uint64(1)
    signed = f[None, :] * (1.0 - 2.0 * bits.astype(np.float64))
    values = np.abs(walsh_hadamard(signed))[:, _bit_reversal(n)]
    indices = (gray[:, None] << n) + np.arange(2**n)
    return _first_best(values, indices)


def _sampled_block(f: np.ndarray, space: SearchSpace, seed: int, task: tuple[int, int]):
    block, rows = task
    generator = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,)))
    )
    coeff_rows = generator.integers(0, space.p, size=(rows, space.nonlinear_size))
    values = _linear_sweep(f, space, coeff_rows)
    best, position = _first_best(values, np.arange(values.size).reshape(values.shape))
    row, lin = divmod(position, space.p**space.n)
    digits = _digits(lin, space.p, min(space.n, space.size)) + [int(c) for c in coeff_rows[row]]
    return best, (block, position), digits


def _run_blocks(worker, tasks: list, n_jobs: int, progress: bool, desc: str) -> list:
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            chunksize = max(1, len(tasks) // (8 * n_jobs))
            return list(
                tqdm(pool.map(worker, tasks, chunksize=chunksize), total=len(tasks), desc=desc, disable=not progress)
            )
    return [worker(task) for task in tqdm(tasks, desc=desc, disable=not progress)]


def _reduce(results: list) -> int:
    """Position of the result with the smallest key among those tied with the maximum."""
    best = max(result[0] for result in results)
    tied = [pos for pos, result in enumerate(results) if result[0] >= best - _TIE_TOLERANCE]
    return min(tied, key=lambda pos: results[pos][1])


def max_correlation(
    f: np.ndarray,
    p: int,
    d: int,
    mode: str = "exhaustive",
    budget: int | None = None,
    seed: int | None = None,
    n_jobs: int = 1,
    block_size: int | None = None,
    progress: bool = False,
) -> SearchReport:
    """Largest |E f e_p(-Q)| over classical Q of degree at most d.

    Every nonlinear part is swept against all p^n linear parts at once through the
    Fourier transform. For p = 2 and n <= 6 the exhaustive sweep walks the nonlinear
    parts in Gray-code order over bit-packed truth tables.

    Parameters
    ----------
    f : np.ndarray
        Flat complex table over F_p^n.
    p : int
        Field characteristic.
    d : int
        Degree bound.
    mode : str, optional
        "exhaustive", "sampled" or "auto" (exhaustive when the budget allows).
    budget : int | None, optional
        Exhaustive: largest candidate count allowed, by default the configured budget.
        Sampled: number of candidate evaluations, by default the configured sample size.
    seed : int | None, optional
        Seed of the sampled mode; a fresh entropy seed is drawn and reported when None.
    n_jobs : int, optional
        Worker processes, by default 1.
    block_size : int | None, optional
        Candidate evaluations per work item, by default the configured block size.
    progress : bool, optional
        Show a progress bar, by default False.

    Returns
    -------
    SearchReport
        Best value, the constant-free best polynomial and the candidate count.

    Raises
    ------
    EnumerationBudgetError
        If an exhaustive sweep needs more candidates than the budget.
    """
    if mode not in SEARCH_MODES:
        raise ValueError(f"Invalid mode: {mode}. Choose either 'exhaustive', 'sampled' or 'auto'.")
    n = validate_complex_table(f, p)
    space = search_space(p, n, d)
    block_size = config_value("search_configs", "block_size") if block_size is None else block_size
    rows_per_block = max(1, block_size // p**n)

    if space.size == 0:
        # only the zero polynomial is left once constants are quotiented out
        value = float(abs(np.mean(f)))
        return SearchReport(p, n, d, "exhaustive", value, ClassicalPoly.zero(p, n), 1, seed)

    if mode == "auto":
        limit = config_value("search_configs", "budget") if budget is None else budget
        mode = "exhaustive" if space.count <= limit else "sampled"
        logger.info("%d candidates against budget %d: using %s mode", space.count, limit, mode)
        budget = budget if mode == "exhaustive" else None

    if mode == "exhaustive":
        budget = config_value("search_configs", "budget") if budget is None else budget
        if space.count > budget:
            raise EnumerationBudgetError(
                f"{space.count} candidates exceed the budget {budget}; use sampled mode",
                space.count,
            )
        total = space.nonlinear_count
        tasks = [(start, min(start + rows_per_block, total)) for start in range(0, total, rows_per_block)]
        if p == 2 and n <= _PACKED_MAX_N and space.nonlinear_size:
            worker = functools.partial(_packed_block, f, n, truth_table_words(space))
        else:
            worker = functools.partial(_exhaustive_block, f, space)
        results = _run_blocks(worker, tasks, n_jobs, progress, "exhaustive search")
        best_value, best_index = results[_reduce(results)]
        best_poly = candidate_from_index(p, n, d, best_index)
        return SearchReport(p, n, d, "exhaustive", best_value, best_poly, space.count, seed)

    budget = config_value("search_configs", "sample_size") if budget is None else budget
    seed = resolve_seed(seed)
    rows_total = max(1, math.ceil(budget / p**n))
    tasks = [
        (block, min(rows_per_block, rows_total - start))
        for block, start in enumerate(range(0, rows_total, rows_per_block))
    ]
    worker = functools.partial(_sampled_block, f, space, seed)
    results = _run_blocks(worker, tasks, n_jobs, progress, "sampled search")
    best_value, _, digits = results[_reduce(results)]
    best_poly = ClassicalPoly(p, n, dict(zip(space.exponents, digits)))
    return SearchReport(p, n, d, "sampled", best_value, best_poly, rows_total * p**n, seed)


# ---------------------------------------------------------------------------
# vanishing probability of multiaffine functions
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ZeroProbReport:
    p: int
    r: int
    mode: str
    probability: Fraction | float
    bound: Fraction
    samples: int
    standard_error: float = 0.0
    seed: int | None = None

    def to_dict(self) -> dict:
        exact = isinstance(self.probability, Fraction)
        return {
            "p": self.p,
            "r": self.r,
            "mode": self.mode,
            "probability": float(self.probability),
            "exact": str(self.probability) if exact else None,
            "bound": float(self.bound),
            "bound_exact": str(self.bound),
            "samples": self.samples,
            "standard_error": self.standard_error,
            "seed": self.seed,
        }


def zero_bound(p: int, r: int) -> Fraction:
    """1 - (1 - 1/p)^r."""
    return 1 - (1 - Fraction(1, p)) ** r


def zero_prob_experiment(
    L,
    r: int,
    p: int,
    mode: str = "exhaustive",
    samples: int | None = None,
    seed: int | None = None,
) -> ZeroProbReport:
    """Probability that a multiaffine L with nonzero leading coefficient vanishes.

    Parameters
    ----------
    L : callable
        Oracle taking a tuple of r residues.
    r : int
        Number of variables.
    p : int
        Field characteristic.
    mode : str, optional
        "exhaustive" (exact Fraction) or "sampled" (Monte-Carlo with standard error).
    samples : int | None, optional
        Number of samples in sampled mode, by default the configured sample size.
    seed : int | None, optional
        Seed of the sampled mode.

    Raises
    ------
    ZeroLeadingCoefficientError
        If the coefficient of x_1 ... x_r is zero.
    """
    validate_prime(p)
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"Invalid mode: {mode}. Choose either 'exhaustive' or 'sampled'.")
    if mode == "sampled":
        rng_seed = resolve_seed(seed)
    else:
        rng_seed = config_value("general_configs", "seed") if seed is None else seed
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(rng_seed)))
    if multiaffine_leading_coeff(L, r, p, rng=rng) == 0:
        raise ZeroLeadingCoefficientError("leading coefficient is zero")

    bound = zero_bound(p, r)
    if mode == "exhaustive":
        zeros = sum(
            1 for point in np.ndindex(*(p,) * r) if int(L(tuple(point))) % p == 0
        )
        return ZeroProbReport(p, r, mode, Fraction(zeros, p**r), bound, p**r)

    samples = config_value("search_configs", "sample_size") if samples is None else samples
    draws = rng.integers(0, p, size=(samples, r))
    zeros = sum(1 for row in draws if int(L(tuple(int(v) for v in row))) % p == 0)
    estimate = zeros / samples
    error = math.sqrt(estimate * (1 - estimate) / samples)
    return ZeroProbReport(p, r, mode, estimate, bound, samples, error, rng_seed)


# ---------------------------------------------------------------------------
# decay curves
# ---------------------------------------------------------------------------
@dataclass
class DecayCurve:
    p: int
    k: int
    d: int
    boundary: bool
    seed: int | None = None
    rows: list = field(default_factory=list)
    controls: list = field(default_factory=list)

    def to_frame(self, include_controls: bool = False) -> pd.DataFrame:
        rows = self.rows + (self.controls if include_controls else [])
        return pd.DataFrame(rows, columns=CURVE_COLUMNS)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "d": self.d,
            "boundary": self.boundary,
            "seed": self.seed,
            "rows": self.rows,
            "controls": self.controls,
        }


def _curve_row(report: SearchReport, k: int, seed: int) -> dict:
    return {
        "n": report.n,
        "p": report.p,
        "k": k,
        "d": report.d,
        "mode": report.mode,
        "best_value": report.best_value,
        "candidates": report.candidates,
        "seed": seed,
    }


def decay_curve(
    p: int,
    k: int,
    n_values,
    d: int | None = None,
    budget: int | None = None,
    sample_size: int | None = None,
    seed: int | None = None,
    controls: bool = False,
    n_jobs: int = 1,
    progress: bool = False,
) -> DecayCurve:
    """Best classical correlation of e(f_n) for each n, exhaustive while the budget allows.

    Parameters
    ----------
    p : int
        Field characteristic.
    k : int
        Family parameter (k >= p+1); f_n has degree k-1.
    n_values : iterable of int
        Dimensions to sweep.
    d : int | None, optional
        Degree bound of the candidates, by default k-1.
    budget : int | None, optional
        Exhaustive budget per row, by default the configured budget.
    sample_size : int | None, optional
        Candidate evaluations of sampled rows, by default the configured sample size.
    seed : int | None, optional
        Seed shared by sampled rows and control instances; drawn from entropy and
        recorded on every row when None.
    controls : bool, optional
        Also add rows for f = e_p(random classical polynomial of degree at most k-1).
    """
    d = k - 1 if d is None else d
    budget = config_value("search_configs", "budget") if budget is None else budget
    seed = resolve_seed(seed)
    curve = DecayCurve(p, k, d, is_boundary(p, k), seed)
    if curve.boundary:
        logger.info("k=%d is the boundary case for p=%d; rows are a control", k, p)

    rng = np.random.default_rng(seed)
    for n in n_values:
        f = phase_function(make_counterexample(p, k, n))
        count = count_candidates(p, n, d)
        mode = "exhaustive" if count <= budget else "sampled"
        report = max_correlation(
            f,
            p,
            d,
            mode=mode,
            budget=budget if mode == "exhaustive" else sample_size,
            seed=seed if mode == "sampled" else None,
            n_jobs=n_jobs,
            progress=progress,
        )
        logger.info("n=%d: best correlation %.6f (%s)", n, report.best_value, mode)
        curve.rows.append(_curve_row(report, k, seed))

        if controls:
            planted = random_classical(p, n, k - 1, rng)
            control = max_correlation(
                planted.phase_function(),
                p,
                d,
                mode=mode,
                budget=budget if mode == "exhaustive" else sample_size,
                seed=seed if mode == "sampled" else None,
                n_jobs=n_jobs,
            )
            curve.controls.append(_curve_row(control, k, seed) | {"mode": f"{mode}-control"})
    return curve

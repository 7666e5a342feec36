"""
This module contains the invariant battery run by `phasekit verify`. Every suite draws its
random instances from a single seed and records one check per property instance.
"""

import functools
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import sympy

from .fp_utils import (
    PhaseKitError,
    PhaseValue,
    e_p,
    fp_to_phase,
    normalize,
    parse_phase,
    format_phase,
    phase_to_fp,
    wilson_holds,
)
from .gowers_utils import (
    correlation,
    fourier_array,
    fourier_fp,
    gowers_norm,
    gowers_norm_phase,
)
from .hyperplane_utils import extract_classical_correlate, hyperplane_restriction, inverse_mod
from .io_utils import config_value
from .poly_utils import (
    ClassicalPoly,
    NonClassicalPoly,
    PhaseTable,
    additive_derivative,
    canonicalize,
    compose_linear,
    evaluate_table,
    iterated_derivative,
    monomial_exponents,
    phase_function,
    random_classical,
    random_nonclassical,
)
from .quasisym_utils import (
    combined_coordinate,
    compositions,
    decompose_degree,
    decoupled_coordinate,
    enumerate_multiaffine,
    expected_leading_coeff,
    iota_form,
    make_counterexample,
    multiaffine_leading_coeff,
    tau_form,
    vector_form,
)
from .search_utils import (
    count_candidates,
    max_correlation,
    resolve_seed,
    zero_bound,
    zero_prob_experiment,
)
from .symmetrize_utils import (
    edge_color,
    find_monochromatic,
    planted_quasisymmetric,
    verify_decomposition,
)

logger = logging.getLogger(__name__)

SUITES = ("fp", "poly", "gowers", "quasisym", "symmetrize", "hyperplane", "search")

# candidate counts above this are left to the notebooks
_SEARCH_CHECK_LIMIT = 2**16

# largest shift enumeration for the norm-one check on random polynomials
_NORM_ONE_LIMIT = 2**16


@dataclass
class VerificationReport:
    checks: int = 0
    failures: list = field(default_factory=list)
    seed: int | None = None
    # instances run per "suite/check" name
    counts: Counter = field(default_factory=Counter)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, suite: str, name: str, ok: bool, detail: str | None = None) -> None:
        self.checks += 1
        self.counts[f"{suite}/{name}"] += 1
        if not ok:
            self.failures.append({"suite": suite, "check": name, "detail": detail})
            logger.warning("%s/%s failed: %s", suite, name, detail)

    def run(self, suite: str, name: str, check, *args) -> None:
        """Runs a check returning (ok, detail); domain errors count as failures."""
        try:
            ok, detail = check(*args)
        except PhaseKitError as err:
            ok, detail = False, f"{type(err).__name__}: {err}"
        self.record(suite, name, ok, detail)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": self.checks,
            "seed": self.seed,
            "failures": self.failures,
        }


@dataclass(frozen=True)
class BatterySettings:
    p: int
    k: int
    n: int
    trials: int
    shift_tuples: int
    prefixes: int
    planted_instances: int
    tolerance: float

    @classmethod
    def from_config(cls, p: int, k: int, n: int) -> "BatterySettings":
        return cls(
            p,
            k,
            n,
            config_value("verify_configs", "trials"),
            config_value("verify_configs", "shift_tuples"),
            config_value("verify_configs", "prefixes"),
            config_value("verify_configs", "planted_instances"),
            config_value("general_configs", "tolerance"),
        )


def _random_point(p: int, n: int, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(v) for v in rng.integers(0, p, size=n))


def random_invertible(p: int, n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        matrix = rng.integers(0, p, size=(n, n))
        if sympy.Matrix(matrix.tolist()).det() % p:
            return matrix


def _family_available(settings: BatterySettings) -> bool:
    return settings.k >= settings.p + 1


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------
def fp_suite(report: VerificationReport, settings: BatterySettings, rng) -> None:
    p, tol = settings.p, settings.tolerance
    zero = PhaseValue.zero(p)
    report.record("fp", "wilson", wilson_holds(p), f"(p-1)! != -1 mod {p}")
    for x in range(p):
        report.record("fp", "standard map", phase_to_fp(fp_to_phase(x, p)) == x, f"x={x}")
        for y in range(p):
            embedded = fp_to_phase((x + y) % p, p) == fp_to_phase(x, p) + fp_to_phase(y, p)
            report.record("fp", "embedding homomorphism", embedded, f"x={x}, y={y}")
            character = abs(e_p((x + y) % p, p) - e_p(x, p) * e_p(y, p)) <= tol
            report.record("fp", "character homomorphism", character, f"x={x}, y={y}")

    def random_phase():
        depth = int(rng.integers(0, 4))
        return PhaseValue.from_int(int(rng.integers(0, p**depth)), depth, p)

    for _ in range(settings.trials):
        a, b, c = random_phase(), random_phase(), random_phase()
        report.record("fp", "add-sub", (a + b) - b == a, f"{a} + {b} - {b}")
        report.record("fp", "associativity", (a + b) + c == a + (b + c), f"{a}, {b}, {c}")
        report.record("fp", "commutativity", a + b == b + a, f"{a}, {b}")
        report.record("fp", "identity", a + zero == normalize(a), str(a))
        report.record("fp", "inverse", a + (-a) == zero, str(a))
        report.record("fp", "normalize idempotent", normalize(normalize(a)) == normalize(a), str(a))
        report.record("fp", "format-parse", parse_phase(format_phase(a)) == a, str(a))


def poly_suite(report: VerificationReport, settings: BatterySettings, rng) -> None:
    p, n = settings.p, settings.n

    def round_trip():
        degree = int(rng.integers(1, 3 * (p - 1) + 1))
        P = random_nonclassical(p, n, degree, rng, depth=3)
        return canonicalize(evaluate_table(P)) == P, P.to_json()

    def degree_kill():
        degree = int(rng.integers(1, min(4, 2 * (p - 1)) + 1))
        P = random_nonclassical(p, n, degree, rng)
        for _ in range(degree + 1):
            P = additive_derivative(P, _random_point(p, n, rng))
        return P.is_zero(), P.to_json()

    def leibniz():
        P = random_classical(p, n, p - 1, rng)
        Q = random_classical(p, n, p - 1, rng)
        h = _random_point(p, n, rng)
        dP, dQ = P.derivative(h), Q.derivative(h)
        return (P * Q).derivative(h) == dP * Q + P * dQ + dP * dQ, f"h={h}"

    def classical_flag():
        Q = random_classical(p, n, 2 * (p - 1), rng)
        return Q.to_nonclassical().is_classical_plus_constant, Q.to_json()

    def linear_inverse():
        P = random_nonclassical(p, n, min(4, 2 * p), rng)
        M = random_invertible(p, n, rng)
        restored = compose_linear(compose_linear(P, M), inverse_mod(M, p))
        return restored == P and compose_linear(P, M).degree == P.degree, P.to_json()

    def documents():
        P = random_nonclassical(p, n, int(rng.integers(1, 3 * (p - 1) + 1)), rng, depth=3)
        Q = random_classical(p, n, 2 * (p - 1), rng)
        table = evaluate_table(P)
        reread_P = NonClassicalPoly.from_dict(json.loads(json.dumps(P.to_dict())))
        reread_Q = ClassicalPoly.from_dict(json.loads(json.dumps(Q.to_dict())))
        reread_table = PhaseTable.from_dict(json.loads(json.dumps(table.to_dict())))
        ok = reread_P == P and reread_Q == Q and reread_table.equals(table)
        return ok, P.to_json()

    for _ in range(settings.trials):
        report.run("poly", "round trip", round_trip)
        report.run("poly", "degree kill", degree_kill)
        report.run("poly", "leibniz", leibniz)
        report.run("poly", "classical iff j=0", classical_flag)
        report.run("poly", "linear inverse", linear_inverse)
        report.run("poly", "document round trip", documents)


def gowers_suite(report: VerificationReport, settings: BatterySettings, rng) -> None:
    p, tol = settings.p, settings.tolerance
    n = min(settings.n, 3 if p == 2 else 2)

    def norm_one():
        P = make_counterexample(p, settings.k, settings.n)
        result = gowers_norm_phase(P, settings.k)
        return result.norm == 1.0, f"norm={result.norm!r}"

    def monotone():
        f = np.exp(2j * np.pi * rng.random(p**n)) * rng.random(p**n)
        norms = [gowers_norm(f, p, d).norm for d in (1, 2, 3)]
        return all(a <= b + tol for a, b in zip(norms, norms[1:])), f"norms={norms}"

    def u2_identity():
        f = np.exp(2j * np.pi * rng.random(p**n)) * rng.random(p**n)
        lhs = gowers_norm(f, p, 2).norm ** 4
        rhs = float(np.sum(np.abs(fourier_array(f, p)) ** 4))
        return abs(lhs - rhs) <= tol, f"{lhs} vs {rhs}"

    def agreement():
        P = random_nonclassical(p, n, int(rng.integers(1, p + 2)), rng)
        f = phase_function(P)
        values = [
            gowers_norm(f, p, 2, method="direct_enumeration").norm,
            gowers_norm(f, p, 2, method="recursive_table").norm,
            gowers_norm_phase(P, 2).norm,
        ]
        return max(values) - min(values) <= tol, f"norms={values}"

    def phase_invariance():
        f = np.exp(2j * np.pi * rng.random(p**n))
        Q = random_classical(p, n, 2, rng)
        shifted = f * np.exp(2j * np.pi * rng.random())
        return abs(correlation(f, Q) - correlation(shifted, Q)) <= tol, Q.to_json()

    def parseval():
        f = np.exp(2j * np.pi * rng.random(p**n)) * rng.random(p**n)
        energy = sum(abs(value) ** 2 for value in fourier_fp(f, p).values())
        mean_square = float(np.mean(np.abs(f) ** 2))
        return abs(energy - mean_square) <= tol, f"{energy} vs {mean_square}"

    def random_norm_one(dims, top):
        P = random_nonclassical(p, dims, int(rng.integers(1, top + 1)), rng)
        d = max(P.degree, 1) + 1
        result = gowers_norm_phase(P, d)
        return result.norm == 1.0, f"U^{d} norm {result.norm!r} of {P.to_json()}"

    def gowers_phase_invariance(d):
        f = np.exp(2j * np.pi * rng.random(p**n)) * rng.random(p**n)
        rotated = f * np.exp(2j * np.pi * rng.random())
        before, after = gowers_norm(f, p, d).norm, gowers_norm(rotated, p, d).norm
        return abs(before - after) <= tol, f"U^{d}: {before} vs {after}"

    for norm_one_dims in (n, 1):
        norm_one_degree = 0
        while p ** (norm_one_dims * (norm_one_degree + 2)) <= _NORM_ONE_LIMIT:
            norm_one_degree += 1
        if norm_one_degree:
            break

    if _family_available(settings) and p ** (settings.n * settings.k) <= config_value(
        "gowers_configs", "enumeration_cap"
    ):
        report.run("gowers", "counterexample norm one", norm_one)
    for _ in range(settings.trials):
        report.run("gowers", "monotonicity", monotone)
        report.run("gowers", "U2 fourier identity", u2_identity)
        report.run("gowers", "method agreement", agreement)
        report.run("gowers", "correlation phase invariance", phase_invariance)
        report.run("gowers", "parseval", parseval)
        if norm_one_degree:
            report.run("gowers", "random norm one", random_norm_one, norm_one_dims, norm_one_degree)
        for d in (1, 2, 3):
            report.run("gowers", f"U{d} phase invariance", gowers_phase_invariance, d)


def quasisym_suite(report: VerificationReport, settings: BatterySettings, rng) -> None:
    p, n = settings.p, settings.n
    k = min(settings.k, 5)

    def random_shifts(count):
        return [_random_point(p, n, rng) for _ in range(count)]

    def oracle(weight):
        shifts = random_shifts(weight)
        if iota_form(shifts, p) != iota_form(shifts, p, mode="brute_force"):
            return False, f"iota on {shifts}"
        for alpha in compositions(weight, p):
            if tau_form(alpha, shifts, p) != tau_form(alpha, shifts, p, mode="brute_force"):
                return False, f"tau_{alpha} on {shifts}"
        return True, None

    def constancy(weight):
        P = make_counterexample(p, weight + 1, n) if weight >= p else random_nonclassical(p, n, weight, rng)
        shifts = random_shifts(weight)
        base = iterated_derivative(P, shifts, (0,) * n)
        moved = iterated_derivative(P, shifts, _random_point(p, n, rng))
        return base == moved, f"{shifts}"

    def leading(alpha, random_taus):
        shifts = random_shifts(alpha.weight - 1)
        i = int(rng.integers(0, n))
        tau_values = None
        if random_taus:
            table = {}

            def tau_values(beta, members):
                if (beta, members) not in table:
                    table[(beta, members)] = int(rng.integers(0, p))
                return table[(beta, members)]

        else:
            actual = functools.lru_cache(maxsize=None)(
                lambda beta, members: tau_form(beta, [shifts[m] for m in members], p)
            )
            tau_values = actual

        def oracle_fn(z):
            return decoupled_coordinate(alpha, shifts, i, p, tau_values=tau_values, z=z)

        value = multiaffine_leading_coeff(oracle_fn, alpha.weight - 1, p, rng=rng)
        expected = expected_leading_coeff(alpha, p)
        return value == expected, f"alpha={alpha}, got {value}, expected {expected}"

    def decoupled_matches(alpha):
        shifts = random_shifts(alpha.weight - 1)
        i = int(rng.integers(0, n))
        actual = vector_form(shifts, p, n, alpha)[i]
        return decoupled_coordinate(alpha, shifts, i, p) == actual, f"alpha={alpha}"

    def combined():
        shifts = random_shifts(k - 1)
        i = int(rng.integers(0, n))
        coeffs = {alpha: int(rng.integers(0, p)) for alpha in compositions(k, p)}

        def oracle_fn(z):
            return combined_coordinate(k, coeffs, shifts, i, p, z=z)

        split = decompose_degree(k, p)
        expected = (-1) ** split.ell * math.factorial(split.r) % p
        value = multiaffine_leading_coeff(oracle_fn, k - 1, p, rng=rng)
        return value == expected and value != 0, f"got {value}, expected {expected}"

    report.record("quasisym", "wilson", wilson_holds(p), f"p={p}")
    for weight in range(1, k + 1):
        for _ in range(settings.shift_tuples):
            report.run("quasisym", f"oracle equivalence k={weight}", oracle, weight)
        for _ in range(settings.trials):
            report.run("quasisym", f"constancy k={weight}", constancy, weight)
        if weight < 2:
            continue
        for alpha in compositions(weight, p):
            for _ in range(settings.prefixes):
                report.run("quasisym", "leading coefficient", leading, alpha, False)
                report.run("quasisym", "leading coefficient free taus", leading, alpha, True)
            report.run("quasisym", "decoupled matches T", decoupled_matches, alpha)
    if k >= p + 1:
        for _ in range(settings.prefixes):
            report.run("quasisym", "combined leading coefficient", combined)


def symmetrize_suite(report: VerificationReport, settings: BatterySettings, rng) -> None:
    p = settings.p
    n = max(settings.n, 3)

    def planted(d):
        target = d if p == 2 else 2 * d - 1
        size = int(rng.integers(target, n + 1))
        inside = sorted(int(v) for v in rng.choice(n, size=size, replace=False))
        P = planted_quasisymmetric(p, n, d, inside, rng)
        subset = find_monochromatic(P, d, target)
        if subset is None:
            return False, f"no monochromatic subset of size {target} in {P.to_json()}"
        checked = verify_decomposition(P, subset, d, rng)
        return checked > 0, f"I={subset}"

    def well_defined(d):
        P = random_classical(p, n, d, rng)
        lower = random_classical(p, n, d - 1, rng)
        edge = tuple(sorted(int(v) for v in rng.choice(n, size=d, replace=False)))
        return edge_color(P, edge, d) == edge_color(P + lower, edge, d), f"edge={edge}"

    def monotone(d):
        P = random_classical(p, n, d, rng)
        found = [find_monochromatic(P, d, m) is not None for m in range(d, n + 1)]
        ok = all(later <= earlier for earlier, later in zip(found, found[1:]))
        return ok and found[0], f"found={found}"

    def symmetric(d):
        coeffs = {}
        terms = {}
        for exps in monomial_exponents(p, n, d, min_weight=d):
            shape = tuple(sorted(exps))
            coeffs.setdefault(shape, int(rng.integers(0, p)))
            terms[exps] = coeffs[shape]
        P = ClassicalPoly(p, n, terms) + random_classical(p, n, d - 1, rng)
        subset = find_monochromatic(P, d, n)
        return subset is not None and list(subset) == list(range(n)), f"I={subset}"

    for d in (1, 2, 3):
        if (p > 2 and 2 * d - 1 > n) or d > n:
            continue
        for _ in range(settings.trials):
            report.run("symmetrize", f"planted decomposition d={d}", planted, d)
            report.run("symmetrize", f"color well-defined d={d}", well_defined, d)
            report.run("symmetrize", f"monotone target d={d}", monotone, d)
            report.run("symmetrize", f"symmetric full target d={d}", symmetric, d)


def hyperplane_suite(report: VerificationReport, settings: BatterySettings, rng) -> None:
    p, tol = settings.p, settings.tolerance
    n = min(settings.n, 4)

    def agreement():
        P = random_nonclassical(p, n, p, rng, depth=2)
        split = hyperplane_restriction(P)
        restored = split.Q.compose_linear(inverse_mod(split.matrix, p)).compose_linear(split.matrix)
        return restored == split.Q, P.to_json()

    def planted():
        P = random_nonclassical(p, n, p, rng, depth=2)
        extraction = extract_classical_correlate(phase_function(P), P)
        return extraction.corr >= 1 / math.sqrt(p) - tol, f"corr={extraction.corr}"

    def perturbed():
        P = random_nonclassical(p, n, p, rng, depth=2)
        noise = np.exp(0.5j * rng.standard_normal(p**n))
        extraction = extract_classical_correlate(phase_function(P) * noise, P)
        bound = extraction.epsilon / math.sqrt(p)
        return extraction.corr >= bound - tol, f"corr={extraction.corr}, bound={bound}"

    def boundary():
        P = make_counterexample(p, p + 1, n)
        extraction = extract_classical_correlate(phase_function(P), P)
        return extraction.corr >= 1 / math.sqrt(p) - tol, f"corr={extraction.corr}"

    report.run("hyperplane", "boundary control", boundary)
    for _ in range(settings.planted_instances):
        report.run("hyperplane", "split agreement", agreement)
        report.run("hyperplane", "planted recovery", planted)
        report.run("hyperplane", "extraction guarantee", perturbed)


def search_suite(report: VerificationReport, settings: BatterySettings, rng) -> None:
    p, k, tol = settings.p, settings.k, settings.tolerance
    d = k - 1

    def planted_classical(n):
        Q = random_classical(p, n, d, rng)
        result = max_correlation(Q.phase_function(), p, d)
        return abs(result.best_value - 1.0) <= tol, Q.to_json()

    def sampled_below(n, f, exhaustive):
        seed = int(rng.integers(0, 2**32))
        sampled = max_correlation(f, p, d, mode="sampled", budget=4 * p**n, seed=seed)
        return sampled.best_value <= exhaustive + tol, f"seed={seed}"

    def deterministic(n, f):
        first = max_correlation(f, p, d, mode="sampled", budget=4 * p**n, seed=7)
        second = max_correlation(f, p, d, mode="sampled", budget=4 * p**n, seed=7)
        return first == second, "sampled reports differ"

    def lemma_bound(r):
        for form in enumerate_multiaffine(p, r):
            result = zero_prob_experiment(form, r, p)
            if result.probability > result.bound:
                return False, f"{form.coeffs}: {result.probability} > {result.bound}"
        product = zero_prob_experiment(lambda x: math.prod(x), r, p)
        return product.probability == zero_bound(p, r), f"product gives {product.probability}"

    for r in (1, 2):
        report.run("search", f"vanishing bound r={r}", lemma_bound, r)

    if not _family_available(settings):
        logger.info("k=%d < p+1: family-based search checks skipped", k)
        return
    previous = None
    for n in range(1, settings.n + 1):
        if count_candidates(p, n, d) > _SEARCH_CHECK_LIMIT:
            break
        f = phase_function(make_counterexample(p, k, n))
        exhaustive = max_correlation(f, p, d).best_value
        if previous is not None:
            report.record(
                "search", "monotone decay", exhaustive <= previous + tol, f"n={n}: {exhaustive} > {previous}"
            )
        previous = exhaustive
        report.run("search", "planted classical", planted_classical, n)
        report.run("search", "sampled below exhaustive", sampled_below, n, f, exhaustive)
        report.run("search", "determinism", deterministic, n, f)


_SUITE_RUNNERS = {
    "fp": fp_suite,
    "poly": poly_suite,
    "gowers": gowers_suite,
    "quasisym": quasisym_suite,
    "symmetrize": symmetrize_suite,
    "hyperplane": hyperplane_suite,
    "search": search_suite,
}


def run_suite(suite: str, p: int, k: int, n: int, seed: int | None = None) -> VerificationReport:
    """Runs one suite (or "all") at the given parameters.

    Parameters
    ----------
    suite : str
        One of the suite names or "all".
    p, k, n : int
        Field characteristic, family parameter and dimension.
    seed : int | None, optional
        Seed of every random instance. When None a fresh entropy seed is drawn and
        recorded on the report.

    Returns
    -------
    VerificationReport
        Number of checks and the failures, if any.
    """
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"Invalid suite: {suite}. Choose either 'all' or one of {SUITES}.")
    seed = resolve_seed(seed)
    settings = BatterySettings.from_config(p, k, n)
    report = VerificationReport(seed=seed)
    for name in SUITES if suite == "all" else (suite,):
        rng = np.random.default_rng([seed, SUITES.index(name)])
        logger.info("running %s suite (p=%d, k=%d, n=%d, seed=%d)", name, p, k, n, seed)
        before = report.checks
        _SUITE_RUNNERS[name](report, settings, rng)
        logger.info("%s suite ran %d checks", name, report.checks - before)
    return report

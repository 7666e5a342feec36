"""
This module contains the `phasekit` command line interface. Every subcommand writes exactly
one JSON document (or CSV table) on standard output; diagnostics go to standard error.

Exit status is 0 on success, 1 on a domain error (or a failed verification) and 2 on a
usage error.
"""

import argparse
import json
import logging
import sys

import numpy as np
import yaml

from .fp_utils import DimensionError, PhaseKitError, format_phase, format_vector, parse_vector
from .gowers_utils import (
    correlation,
    fourier_fp,
    gowers_norm,
    gowers_norm_phase,
)
from .hyperplane_utils import extract_classical_correlate
from .io_utils import load_json_input, use_config, write_report
from .poly_utils import (
    ClassicalPoly,
    NonClassicalPoly,
    PhaseTable,
    PolynomialFormatError,
    additive_derivative,
    canonicalize,
    eval_nonclassical,
    load_polynomial,
    phase_function,
)
from .quasisym_utils import (
    Composition,
    MultiaffineForm,
    decompose_degree,
    is_boundary,
    make_counterexample,
    quasisym_poly,
)
from .search_utils import decay_curve, max_correlation, zero_prob_experiment
from .symmetrize_utils import find_monochromatic, largest_monochromatic, restrict_decompose
from .verify_utils import SUITES, run_suite

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------
def _read_poly(args) -> NonClassicalPoly:
    P = load_polynomial(load_json_input(args.poly))
    if getattr(args, "p", None) is not None and args.p != P.p:
        raise DimensionError(f"--p {args.p} does not match the polynomial (p={P.p})")
    if getattr(args, "n", None) is not None and args.n != P.n:
        raise DimensionError(f"--n {args.n} does not match the polynomial (n={P.n})")
    return P


def _read_classical(value) -> ClassicalPoly:
    return ClassicalPoly.from_nonclassical(load_polynomial(load_json_input(value)))


def _read_function(args) -> tuple[np.ndarray, int, int]:
    """The complex table f, given as e(P) by --poly or e(t) by an exact --table."""
    if getattr(args, "table", None):
        table = PhaseTable.from_dict(load_json_input(args.table))
        return table.to_complex(), table.p, table.n
    if getattr(args, "poly", None):
        P = _read_poly(args)
        return phase_function(P), P.p, P.n
    raise PolynomialFormatError("either --poly or --table is required")


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------
def _cmd_eval(args):
    P = _read_poly(args)
    x = parse_vector(args.x, P.p)
    return {"x": format_vector(x), "value": format_phase(eval_nonclassical(P, x))}


def _cmd_canonicalize(args):
    return canonicalize(PhaseTable.from_dict(load_json_input(args.table))).to_dict()


def _cmd_derive(args):
    P = _read_poly(args)
    for shift in args.h:
        P = additive_derivative(P, parse_vector(shift, P.p))
    return P.to_dict()


def _cmd_gowers(args):
    if args.poly and args.method in (None, "phase_histogram"):
        return gowers_norm_phase(_read_poly(args), args.d, cap=args.budget).to_dict()
    f, p, _ = _read_function(args)
    method = None if args.method in (None, "phase_histogram") else args.method
    return gowers_norm(f, p, args.d, method=method).to_dict()


def _cmd_correlate(args):
    f, _, _ = _read_function(args)
    return {"correlation": correlation(f, _read_classical(args.Q))}


def _cmd_fourier(args):
    f, p, _ = _read_function(args)
    return [
        {"a": format_vector(freq), "re": value.real, "im": value.imag, "abs": abs(value)}
        for freq, value in fourier_fp(f, p).items()
    ]


def _cmd_counterexample(args):
    P = make_counterexample(args.p, args.k, args.n)
    split = decompose_degree(args.k - 1, args.p)
    document = P.to_dict()
    document.update(
        {
            "degree": P.degree,
            "depth": P.depth,
            "r": split.r,
            "ell": split.ell,
            "boundary": is_boundary(args.p, args.k),
        }
    )
    return document


def _cmd_quasisym(args):
    return quasisym_poly(Composition.parse(args.alpha), args.n, args.p).to_dict()


def _cmd_symmetrize(args):
    P = _read_classical(args.poly)
    if args.target_m is None:
        search = largest_monochromatic(P, args.d, node_budget=args.budget)
        subset = search.subset
        logger.info("largest monochromatic subset %s (complete=%s)", subset, search.complete)
    else:
        subset = find_monochromatic(P, args.d, args.target_m, node_budget=args.budget)
    if subset is None:
        return {"I": None}

    y = {int(var): value for var, value in load_json_input(args.y).items()} if args.y else {}
    for var in range(P.n):
        if var not in subset:
            y.setdefault(var, 0)
    return restrict_decompose(P, subset, y, args.d).to_dict()


def _cmd_hyperplane_extract(args):
    P = _read_poly(args)
    f = _read_function(args)[0] if args.table else phase_function(P)
    extraction = extract_classical_correlate(f, P)
    return {
        "Q_total": extraction.Q_total.to_dict(),
        "corr": extraction.corr,
        "epsilon": extraction.epsilon,
        "split": extraction.split.to_dict(),
    }


def _cmd_search_max(args):
    f, p, _ = _read_function(args)
    report = max_correlation(
        f,
        p,
        args.d,
        mode=args.mode,
        budget=args.budget,
        seed=args.seed,
        n_jobs=args.jobs,
        progress=not args.quiet,
    )
    return report.to_dict()


def _cmd_zero_prob(args):
    raw = load_json_input(args.coeffs)
    coeffs = {tuple(json.loads(subset)): int(value) for subset, value in raw.items()}
    form = MultiaffineForm(args.p, args.r, coeffs)
    return zero_prob_experiment(
        form, args.r, args.p, mode=args.mode, samples=args.budget, seed=args.seed
    ).to_dict()


def _cmd_decay_curve(args):
    curve = decay_curve(
        args.p,
        args.k,
        range(args.n_min, args.n_max + 1),
        d=args.d,
        budget=args.budget,
        seed=args.seed,
        controls=args.controls,
        n_jobs=args.jobs,
        progress=not args.quiet,
    )
    if args.format == "csv":
        return curve.to_frame(include_controls=args.controls)
    return curve.to_dict()


def _cmd_verify(args):
    report = run_suite(args.suite, args.p, args.k, args.n, seed=args.seed)
    args.failed = not report.passed
    return report.to_dict()


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=None, help="seed of every random draw")
    common.add_argument("--budget", type=int, default=None, help="enumeration budget or sample count")
    common.add_argument("--quiet", action="store_true", help="only warnings on standard error")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--config", default=None, help="configuration file replacing the packaged one")

    parser = argparse.ArgumentParser(
        prog="phasekit",
        description="Exact toolkit for non-classical polynomial phases over F_p^n.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, handler, help_text):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.set_defaults(handler=handler)
        return cmd

    cmd = command("eval", _cmd_eval, "evaluate a polynomial at a point")
    cmd.add_argument("--poly", required=True)
    cmd.add_argument("--x", required=True, help='point such as "1,0,2"')

    cmd = command("canonicalize", _cmd_canonicalize, "canonical form of an exact table")
    cmd.add_argument("--table", required=True)

    cmd = command("derive", _cmd_derive, "additive derivative along one or more shifts")
    cmd.add_argument("--poly", required=True)
    cmd.add_argument("--h", action="append", required=True, help="shift, repeat to iterate")

    cmd = command("gowers", _cmd_gowers, "Gowers U^d norm")
    cmd.add_argument("--poly")
    cmd.add_argument("--table")
    cmd.add_argument("--p", type=int)
    cmd.add_argument("--n", type=int)
    cmd.add_argument("--d", type=int, required=True)
    cmd.add_argument(
        "--method", choices=("direct_enumeration", "recursive_table", "phase_histogram")
    )

    cmd = command("correlate", _cmd_correlate, "correlation with a classical polynomial")
    cmd.add_argument("--poly")
    cmd.add_argument("--table")
    cmd.add_argument("--Q", required=True)

    cmd = command("fourier", _cmd_fourier, "Fourier coefficients over F_p^n")
    cmd.add_argument("--poly")
    cmd.add_argument("--table")

    cmd = command("counterexample", _cmd_counterexample, "the degree k-1 family polynomial")
    cmd.add_argument("--p", type=int, required=True)
    cmd.add_argument("--k", type=int, required=True)
    cmd.add_argument("--n", type=int, required=True)

    cmd = command("quasisym", _cmd_quasisym, "elementary quasisymmetric polynomial")
    cmd.add_argument("--alpha", required=True, help='composition such as "[2,1]"')
    cmd.add_argument("--p", type=int, required=True)
    cmd.add_argument("--n", type=int, required=True)

    cmd = command("symmetrize", _cmd_symmetrize, "monochromatic restriction and decomposition")
    cmd.add_argument("--poly", required=True)
    cmd.add_argument("--d", type=int, required=True)
    cmd.add_argument("--target-m", dest="target_m", type=int)
    cmd.add_argument("--y", help='outside assignment such as {"0": 2}; missing variables are 0')

    cmd = command("hyperplane-extract", _cmd_hyperplane_extract, "classical correlate extraction")
    cmd.add_argument("--poly", required=True)
    cmd.add_argument("--table", help="exact table of f; f = e(P) when omitted")

    cmd = command("search-max", _cmd_search_max, "maximum classical correlation")
    cmd.add_argument("--poly")
    cmd.add_argument("--table")
    cmd.add_argument("--d", type=int, required=True)
    cmd.add_argument("--mode", choices=("exhaustive", "sampled", "auto"), default="auto")

    cmd = command("zero-prob", _cmd_zero_prob, "vanishing probability of a multiaffine form")
    cmd.add_argument("--p", type=int, required=True)
    cmd.add_argument("--r", type=int, required=True)
    cmd.add_argument("--coeffs", required=True, help='e.g. {"[0,1]": 1, "[0]": 2}')
    cmd.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")

    cmd = command("decay-curve", _cmd_decay_curve, "best correlation of the family against n")
    cmd.add_argument("--p", type=int, required=True)
    cmd.add_argument("--k", type=int, required=True)
    cmd.add_argument("--n-min", dest="n_min", type=int, default=1)
    cmd.add_argument("--n-max", dest="n_max", type=int, required=True)
    cmd.add_argument("--d", type=int)
    cmd.add_argument("--controls", action="store_true")

    cmd = command("verify", _cmd_verify, "run the invariant battery")
    cmd.add_argument("--suite", choices=SUITES + ("all",), default="all")
    cmd.add_argument("--p", type=int, required=True)
    cmd.add_argument("--k", type=int, required=True)
    cmd.add_argument("--n", type=int, required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    if args.config:
        try:
            use_config(args.config)
        except (ValueError, yaml.YAMLError, FileNotFoundError) as err:
            logger.error("invalid --config %s: %s", args.config, err)
            return 1
    try:
        args.failed = False
        report = args.handler(args)
        write_report(report, fmt=args.format)
    except (PhaseKitError, json.JSONDecodeError, FileNotFoundError) as err:
        logger.error("%s: %s", type(err).__name__, err)
        return 1
    finally:
        if args.config:
            use_config(None)
    return 1 if args.failed else 0


if __name__ == "__main__":
    sys.exit(main())

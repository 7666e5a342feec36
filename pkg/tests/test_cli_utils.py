import contextlib
import io
import json
import math
import pathlib
import tempfile
import unittest

import pandas as pd

from utils.cli_utils import main
from utils.fp_utils import format_phase
from utils.poly_utils import eval_nonclassical, load_polynomial
from utils.quasisym_utils import make_counterexample

EIGHTH = '{"p":2,"n":1,"alpha":"0/2^0","terms":[{"exps":[1],"j":2,"coeff":1}]}'


def run(*argv):
    """Runs the CLI and returns (exit code, captured standard output)."""
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
        code = main(list(argv))
    return code, stdout.getvalue()


def run_json(*argv):
    code, out = run(*argv)
    return code, json.loads(out)


class TestPolynomialCommands(unittest.TestCase):
    def test_eval(self):
        code, report = run_json("eval", "--poly", EIGHTH, "--x", "1", "--quiet")
        self.assertEqual(code, 0)
        self.assertEqual(report, {"x": "1", "value": "1/2^3"})

    def test_derive(self):
        code, report = run_json("derive", "--poly", EIGHTH, "--h", "1", "--quiet")
        self.assertEqual(code, 0)
        derived = load_polynomial(report)
        self.assertLessEqual(derived.degree, 2)
        self.assertEqual(format_phase(eval_nonclassical(derived, (0,))), "1/2^3")
        self.assertEqual(format_phase(eval_nonclassical(derived, (1,))), "7/2^3")

    def test_canonicalize(self):
        table = '{"p":2,"n":1,"values":["0/2^0","1/2^2"]}'
        code, report = run_json("canonicalize", "--table", table, "--quiet")
        self.assertEqual(code, 0)
        P = load_polynomial(report)
        self.assertEqual(P.degree, 2)

    def test_counterexample_document_reparses(self):
        code, report = run_json("counterexample", "--p", "2", "--k", "4", "--n", "3", "--quiet")
        self.assertEqual(code, 0)
        self.assertEqual(load_polynomial(report), make_counterexample(2, 4, 3))
        self.assertEqual(report["degree"], 3)
        self.assertEqual(report["depth"], 3)
        self.assertFalse(report["boundary"])

    def test_quasisym(self):
        code, report = run_json("quasisym", "--alpha", "[1,1]", "--p", "2", "--n", "2", "--quiet")
        self.assertEqual(code, 0)
        self.assertEqual(report["terms"], [{"exps": [1, 1], "j": 0, "coeff": 1}])


class TestAnalysisCommands(unittest.TestCase):
    def test_gowers(self):
        code, report = run_json("gowers", "--poly", EIGHTH, "--d", "3", "--quiet")
        self.assertEqual(code, 0)
        self.assertAlmostEqual(report["norm"], 0.75 ** (1 / 8), places=5)
        self.assertAlmostEqual(report["norm"], 0.96459, places=5)

    def test_gowers_methods_agree(self):
        _, histogram = run_json("gowers", "--poly", EIGHTH, "--d", "3", "--quiet")
        _, direct = run_json(
            "gowers", "--poly", EIGHTH, "--d", "3", "--method", "direct_enumeration", "--quiet"
        )
        self.assertAlmostEqual(histogram["norm"], direct["norm"], places=9)

    def test_correlate(self):
        zero = '{"p":2,"n":1,"terms":[]}'
        code, report = run_json("correlate", "--poly", EIGHTH, "--Q", zero, "--quiet")
        self.assertEqual(code, 0)
        self.assertAlmostEqual(report["correlation"], math.cos(math.pi / 8), places=9)

    def test_fourier(self):
        code, report = run_json("fourier", "--poly", EIGHTH, "--quiet")
        self.assertEqual(code, 0)
        self.assertEqual([row["a"] for row in report], ["0", "1"])
        self.assertAlmostEqual(report[0]["abs"], math.cos(math.pi / 8), places=9)

    def test_search_max(self):
        code, report = run_json("search-max", "--poly", EIGHTH, "--d", "3", "--quiet")
        self.assertEqual(code, 0)
        self.assertAlmostEqual(report["best_value"], math.cos(math.pi / 8), places=9)
        self.assertEqual(report["candidates"], 2)

    def test_symmetrize(self):
        triangle = json.dumps(
            {
                "p": 2,
                "n": 3,
                "terms": [
                    {"exps": [1, 1, 0], "j": 0, "coeff": 1},
                    {"exps": [0, 1, 1], "j": 0, "coeff": 1},
                    {"exps": [1, 0, 1], "j": 0, "coeff": 1},
                ],
            }
        )
        code, report = run_json("symmetrize", "--poly", triangle, "--d", "2", "--quiet")
        self.assertEqual(code, 0)
        self.assertEqual(report["I"], [0, 1, 2])

    def test_hyperplane_extract(self):
        quarter = '{"p":2,"n":2,"terms":[{"exps":[1,0],"j":1,"coeff":1}]}'
        code, report = run_json("hyperplane-extract", "--poly", quarter, "--quiet")
        self.assertEqual(code, 0)
        self.assertAlmostEqual(report["corr"], math.sqrt(2) / 2, places=9)
        self.assertAlmostEqual(report["epsilon"], 1.0, places=9)

    def test_zero_prob(self):
        code, report = run_json(
            "zero-prob", "--p", "2", "--r", "2", "--coeffs", '{"[0,1]": 1}', "--quiet"
        )
        self.assertEqual(code, 0)
        self.assertEqual(report["exact"], "3/4")
        self.assertEqual(report["bound_exact"], "3/4")

    def test_decay_curve_csv(self):
        code, out = run(
            "decay-curve", "--p", "2", "--k", "4", "--n-max", "2", "--format", "csv", "--quiet"
        )
        self.assertEqual(code, 0)
        frame = pd.read_csv(io.StringIO(out))
        self.assertEqual(frame["n"].tolist(), [1, 2])
        self.assertAlmostEqual(frame["best_value"][1], math.cos(math.pi / 8) ** 2, places=9)


class TestVerify(unittest.TestCase):
    def test_light_suites(self):
        for suite in ("fp", "search"):
            code, report = run_json(
                "verify", "--suite", suite, "--p", "2", "--k", "4", "--n", "3", "--seed", "7",
                "--quiet",
            )
            self.assertEqual(code, 0)
            self.assertTrue(report["passed"])
            self.assertEqual(report["failures"], [])
            self.assertEqual(report["seed"], 7)

    def test_seed_drawn_when_omitted(self):
        code, report = run_json(
            "verify", "--suite", "fp", "--p", "3", "--k", "4", "--n", "2", "--quiet"
        )
        self.assertEqual(code, 0)
        self.assertIsInstance(report["seed"], int)
        _, curve = run_json("decay-curve", "--p", "2", "--k", "4", "--n-max", "2", "--quiet")
        self.assertIsInstance(curve["seed"], int)
        self.assertEqual([row["seed"] for row in curve["rows"]], [curve["seed"]] * 2)


class TestErrors(unittest.TestCase):
    def test_invalid_polynomial(self):
        code, out = run("eval", "--poly", '{"p":4,"n":1,"terms":[]}', "--x", "0", "--quiet")
        self.assertEqual(code, 1)
        self.assertEqual(out, "")

    def test_non_integer_depth_index(self):
        document = '{"p":3,"n":2,"terms":[{"exps":[1,0],"j":"x","coeff":1}]}'
        code, out = run("eval", "--poly", document, "--x", "1,0", "--quiet")
        self.assertEqual(code, 1)
        self.assertEqual(out, "")
        bad_Q = '{"p":2,"n":1,"terms":[{"exps":[1],"j":"x","coeff":1}]}'
        code, _ = run("correlate", "--poly", EIGHTH, "--Q", bad_Q, "--quiet")
        self.assertEqual(code, 1)

    def test_invalid_config_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = pathlib.Path(tmpdir) / "config.yaml"
            path.write_text("search_configs:\n  budget: 10\n")
            code, out = run("eval", "--poly", EIGHTH, "--x", "1", "--config", str(path), "--quiet")
        self.assertEqual(code, 1)
        self.assertEqual(out, "")

    def test_bad_json(self):
        code, _ = run("eval", "--poly", "{oops", "--x", "0", "--quiet")
        self.assertEqual(code, 1)

    def test_dimension_mismatch(self):
        code, _ = run("gowers", "--poly", EIGHTH, "--d", "2", "--n", "3", "--quiet")
        self.assertEqual(code, 1)

    def test_usage_error(self):
        with self.assertRaises(SystemExit) as ctx:
            run("not-a-command")
        self.assertEqual(ctx.exception.code, 2)

    def test_budget_refusal(self):
        code, _ = run(
            "search-max", "--poly", EIGHTH, "--d", "3", "--mode", "exhaustive", "--budget", "1",
            "--quiet",
        )
        self.assertEqual(code, 1)


if __name__ == "__main__":
    unittest.main()

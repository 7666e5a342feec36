#!/usr/bin/env python

# # 2. Derivative forms of the counterexample family
#
# The k-th derivative of the counterexample family is a constant that only depends on the shifts.
# It splits into the form iota_k (the contribution of the |x_i|^r part) and the forms tau_alpha indexed by compositions.
# In this notebook we check three things:
#
# - the symbolic formulas of iota_k and tau_alpha agree with brute force iterated derivatives
# - the leading coefficient of the multiaffine coordinate T_alpha(h_1, ..., h_(k-1))_i is (-1)^(s-1) alpha_1 (k-1)! mod p, and vanishes once k >= p + 1
# - multiaffine forms with a nonzero leading coefficient vanish with probability at most 1 - (1 - 1/p)^r, with equality for x_1 ... x_r
#
# **what is outputted**
# - `oracle_equivalence.csv`: mismatch counts per (p, k, n)
# - `leading_coefficients.csv`: extracted and expected leading coefficients per composition
# - `vanishing_probabilities.csv`: exact vanishing probability of every enumerated multiaffine form

# In[1]:


import functools
import itertools
import math
import pathlib
import sys

import numpy as np
import pandas as pd

sys.path.append("../../")
from utils import io_utils
from utils.quasisym_utils import (
    compositions,
    decoupled_coordinate,
    enumerate_multiaffine,
    expected_leading_coeff,
    iota_form,
    multiaffine_leading_coeff,
    tau_form,
)
from utils.search_utils import zero_bound, zero_prob_experiment


# Helper functions

# In[2]:


def random_shifts(p: int, n: int, count: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    """Draws `count` random shifts of F_p^n.

    Parameters
    ----------
    p : int
        Field characteristic.
    n : int
        Dimension.
    count : int
        Number of shifts.
    rng : np.random.Generator
        Source of randomness.

    Returns
    -------
    list[tuple[int, ...]]
        The shifts h_1, ..., h_count.
    """
    return [tuple(int(v) for v in rng.integers(0, p, size=n)) for _ in range(count)]


# Setting up paths and loading the experiment configurations

# In[3]:


config_path = pathlib.Path("../config.yaml").resolve(strict=True)

results_dir = pathlib.Path("./results").resolve()
results_dir.mkdir(exist_ok=True, parents=True)

configs = io_utils.load_config(
    config_path, sections=("general_configs", "derivative_forms_configs")
)
general_configs = configs["general_configs"]
form_configs = configs["derivative_forms_configs"]

rng = np.random.default_rng(general_configs["seed"])


# ## Symbolic and brute force derivative forms
#
# For every configuration we draw random shift tuples and compare the closed forms to the iterated derivatives of the family, computed point by point.

# In[4]:


oracle_rows = []
for p, k, n in itertools.product(
    form_configs["primes"], range(1, form_configs["max_k"] + 1), range(1, form_configs["max_n"] + 1)
):
    iota_mismatches = tau_mismatches = 0
    for _ in range(form_configs["shift_tuples"]):
        shifts = random_shifts(p, n, k, rng)
        iota_mismatches += iota_form(shifts, p) != iota_form(shifts, p, mode="brute_force")
        for alpha in compositions(k, p):
            tau_mismatches += tau_form(alpha, shifts, p) != tau_form(
                alpha, shifts, p, mode="brute_force"
            )
    oracle_rows.append(
        {
            "p": p,
            "k": k,
            "n": n,
            "shift_tuples": form_configs["shift_tuples"],
            "compositions": len(compositions(k, p)),
            "iota_mismatches": iota_mismatches,
            "tau_mismatches": tau_mismatches,
        }
    )
oracle_df = pd.DataFrame(oracle_rows)
oracle_df.to_csv(results_dir / "oracle_equivalence.csv", index=False)

assert (oracle_df[["iota_mismatches", "tau_mismatches"]] == 0).all().all()
oracle_df


# ## Leading coefficient of the multiaffine coordinate
#
# Each coordinate of T_alpha is multiaffine in the last shift once the first k - 2 shifts are fixed.
# The leading coefficient is read off by iterated unit differencing of the coordinate, evaluated with the actual values of tau on every block.

# In[5]:


leading_rows = []
n = form_configs["max_n"]
for p, k in itertools.product(form_configs["primes"], range(2, form_configs["max_k"] + 1)):
    for alpha in compositions(k, p):
        expected = expected_leading_coeff(alpha, p)
        mismatches = 0
        for _ in range(form_configs["prefixes"]):
            shifts = random_shifts(p, n, k - 1, rng)
            i = int(rng.integers(0, n))
            actual_tau = functools.lru_cache(maxsize=None)(
                lambda beta, members, shifts=shifts: tau_form(beta, [shifts[m] for m in members], p)
            )
            value = multiaffine_leading_coeff(
                lambda z: decoupled_coordinate(alpha, shifts, i, p, tau_values=actual_tau, z=z),
                k - 1,
                p,
                rng=rng,
            )
            mismatches += value != expected
        leading_rows.append(
            {
                "p": p,
                "k": k,
                "alpha": str(alpha),
                "expected": expected,
                "vanishes": k >= p + 1,
                "prefixes": form_configs["prefixes"],
                "mismatches": mismatches,
            }
        )
leading_df = pd.DataFrame(leading_rows)
leading_df.to_csv(results_dir / "leading_coefficients.csv", index=False)

assert (leading_df["mismatches"] == 0).all()
assert (leading_df.loc[leading_df["vanishes"], "expected"] == 0).all()
leading_df


# ## Vanishing probability of multiaffine forms
#
# Every multiaffine form in r <= 2 variables with a nonzero leading coefficient is enumerated and its exact probability of vanishing is compared with the bound.

# In[6]:


vanishing_rows = []
for p, r in itertools.product(form_configs["primes"], (1, 2)):
    bound = zero_bound(p, r)
    for form in enumerate_multiaffine(p, r):
        result = zero_prob_experiment(form, r, p)
        vanishing_rows.append(
            {
                "p": p,
                "r": r,
                "coeffs": str(sorted(form.coeffs.items())),
                "probability": float(result.probability),
                "exact": str(result.probability),
                "bound": float(bound),
                "within_bound": result.probability <= bound,
            }
        )
    product = zero_prob_experiment(lambda x: math.prod(x) % p, r, p)
    assert product.probability == bound, f"x_1...x_r does not attain the bound for p={p}, r={r}"

vanishing_df = pd.DataFrame(vanishing_rows)
vanishing_df.to_csv(results_dir / "vanishing_probabilities.csv", index=False)

assert vanishing_df["within_bound"].all()
vanishing_df.groupby(["p", "r"])["probability"].agg(["count", "max", "min"])

#!/usr/bin/env python

# # 1. Canonical forms and Gowers norms
#
# In this notebook we check the exact building blocks every other experiment relies on.
# We compute the Gowers norms of the counterexample family with the exact phase histogram, push random canonical polynomials through evaluation and canonicalization, and test the monotonicity of the Gowers norms together with the Fourier identity of the U^2 norm on random 1-bounded tables.
#
# **what is outputted**
# - `norm_one_family.csv`: U^k norm of e(f_n) for every configured (p, k, n)
# - `canonical_round_trip.csv`: one row per random polynomial, flagging bit-exact round trips
# - `norm_monotonicity.csv`: U^1 ... U^4 norms and the U^2 Fourier identity per random table

# In[1]:


import pathlib
import sys
import time

import numpy as np
import pandas as pd

sys.path.append("../../")
from utils import io_utils
from utils.gowers_utils import fourier_array, gowers_norm, gowers_norm_phase
from utils.poly_utils import canonicalize, evaluate_table, random_nonclassical
from utils.quasisym_utils import make_counterexample


# Setting up paths and loading the experiment configurations

# In[2]:


# path to the configuration file shared by all experiment notebooks
config_path = pathlib.Path("../config.yaml").resolve(strict=True)

# setting the results directory, creating it if it doesn't already exist
results_dir = pathlib.Path("./results").resolve()
results_dir.mkdir(exist_ok=True, parents=True)

# loading configs
configs = io_utils.load_config(
    config_path, sections=("general_configs", "derivative_forms_configs")
)
general_configs = configs["general_configs"]
form_configs = configs["derivative_forms_configs"]

rng = np.random.default_rng(general_configs["seed"])
tolerance = general_configs["tolerance"]


# ## Norm one counterexample family
#
# Every member of the family has degree k - 1, so its k-th derivatives vanish and the U^k norm is exactly one.
# The phase histogram path enumerates only the shift tuples at x = 0, therefore the result is exact.

# In[3]:


norm_rows = []
start = time.perf_counter()
for p, k, n in form_configs["norm_one_instances"]:
    P = make_counterexample(p, k, n)
    result = gowers_norm_phase(P, k)
    norm_rows.append(
        {
            "p": p,
            "k": k,
            "n": n,
            "degree": P.degree,
            "depth": P.depth,
            "norm": result.norm,
            "tuples": result.count,
            "exact_one": result.norm == 1.0,
        }
    )
norm_one_df = pd.DataFrame(norm_rows)
print(f"norm one family computed in {time.perf_counter() - start:.2f}s")

norm_one_df.to_csv(results_dir / "norm_one_family.csv", index=False)
norm_one_df


# In[4]:


assert norm_one_df["exact_one"].all(), "a family member does not have U^k norm one"


# ## Canonical form round trip
#
# A random canonical polynomial is evaluated into an exact phase table and read back by `canonicalize`.
# The canonical form is unique, so the polynomial we get back must be the one we started from.

# In[5]:


round_trip_rows = []
primes = form_configs["round_trip_primes"]
for idx in range(form_configs["round_trip_polynomials"]):
    p = primes[idx % len(primes)]
    n = int(rng.integers(1, 4))
    degree = int(rng.integers(1, 3 * (p - 1) + 1))
    P = random_nonclassical(p, n, degree, rng, depth=3)
    round_trip_rows.append(
        {
            "p": p,
            "n": n,
            "degree": P.degree,
            "depth": P.depth,
            "terms": len(P.terms),
            "round_trip": canonicalize(evaluate_table(P)) == P,
        }
    )
round_trip_df = pd.DataFrame(round_trip_rows)
round_trip_df.to_csv(results_dir / "canonical_round_trip.csv", index=False)

print(round_trip_df.groupby("p")["round_trip"].agg(["count", "sum"]))
assert round_trip_df["round_trip"].all(), "canonicalize did not reproduce a polynomial"


# ## Gowers norm monotonicity and the U^2 Fourier identity
#
# On random 1-bounded tables over F_2^n the norms must satisfy U^1 <= U^2 <= U^3 <= U^4, and the fourth power of the U^2 norm must equal the sum of the fourth powers of the Fourier coefficients.

# In[6]:


norm_rows = []
for idx in range(form_configs["random_tables"]):
    n = int(rng.integers(1, 5))
    f = np.exp(2j * np.pi * rng.random(2**n)) * rng.random(2**n)
    norms = [gowers_norm(f, 2, d).norm for d in (1, 2, 3, 4)]
    fourier_side = float(np.sum(np.abs(fourier_array(f, 2)) ** 4))
    norm_rows.append(
        {
            "table": idx,
            "n": n,
            "U1": norms[0],
            "U2": norms[1],
            "U3": norms[2],
            "U4": norms[3],
            "U2_fourth_power": norms[1] ** 4,
            "fourier_fourth_moment": fourier_side,
            "monotone": all(a <= b + tolerance for a, b in zip(norms, norms[1:])),
            "fourier_identity": abs(norms[1] ** 4 - fourier_side) <= tolerance,
        }
    )
monotone_df = pd.DataFrame(norm_rows)
monotone_df.to_csv(results_dir / "norm_monotonicity.csv", index=False)

assert monotone_df["monotone"].all(), "Gowers norms are not monotone on a random table"
assert monotone_df["fourier_identity"].all(), "U^2 norm disagrees with the Fourier side"
monotone_df.head()

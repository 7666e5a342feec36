#!/usr/bin/env python

# # 2. Quasisymmetric restriction
#
# Coloring every d-subset of variables by the coefficients of the degree-d monomials it supports turns a classical polynomial into a colored hypergraph.
# On a monochromatic set of variables, and after fixing the remaining variables to any values y, the polynomial is a combination of elementary quasisymmetric polynomials plus a part of degree at most d - 1.
#
# In this notebook we search for monochromatic sets in random and planted polynomials, then rebuild every restriction from its quasisymmetric coefficients and remainder.
#
# **what is outputted**
# - `restriction_decomposition.csv`: one row per instance with the set found and the number of outside assignments checked

# In[1]:


import pathlib
import sys

import numpy as np
import pandas as pd

sys.path.append("../../")
from utils import io_utils
from utils.poly_utils import random_classical
from utils.symmetrize_utils import (
    find_monochromatic,
    planted_quasisymmetric,
    verify_decomposition,
)


# Setting up paths and loading the experiment configurations

# In[2]:


config_path = pathlib.Path("../config.yaml").resolve(strict=True)

results_dir = pathlib.Path("./results").resolve()
results_dir.mkdir(exist_ok=True, parents=True)

configs = io_utils.load_config(
    config_path, sections=("general_configs", "inverse_extraction_configs")
)
general_configs = configs["general_configs"]
extraction_configs = configs["inverse_extraction_configs"]

rng = np.random.default_rng(general_configs["seed"])


# ## Restriction and decomposition
#
# In characteristic 2 every monochromatic set of size d decomposes, so random polynomials are used directly.
# In odd characteristic the coefficient reading is only guaranteed on sets of size at least 2d - 1, therefore such a set is planted first.

# In[3]:


decomposition_rows = []
settings = extraction_configs["decomposition_settings"]
for idx in range(extraction_configs["planted_instances"]):
    p, d, n = settings[idx % len(settings)]
    target = d if p == 2 else 2 * d - 1
    if p == 2:
        P = random_classical(p, n, d, rng)
        kind = "random"
    else:
        inside = sorted(int(v) for v in rng.choice(n, size=target, replace=False))
        P = planted_quasisymmetric(p, n, d, inside, rng)
        kind = "planted"

    subset = find_monochromatic(P, d, target)
    checked = (
        0
        if subset is None
        else verify_decomposition(P, subset, d, rng, limit=extraction_configs["outside_assignments"])
    )
    decomposition_rows.append(
        {
            "instance": idx,
            "kind": kind,
            "p": p,
            "d": d,
            "n": n,
            "target_m": target,
            "I": None if subset is None else ",".join(str(v) for v in subset),
            "assignments_checked": checked,
        }
    )
decomposition_df = pd.DataFrame(decomposition_rows)
decomposition_df.to_csv(results_dir / "restriction_decomposition.csv", index=False)

assert decomposition_df["I"].notna().all(), "no monochromatic set was found"
assert (decomposition_df["assignments_checked"] > 0).all()
decomposition_df.groupby(["p", "d", "n", "kind"])["assignments_checked"].agg(["count", "min"])

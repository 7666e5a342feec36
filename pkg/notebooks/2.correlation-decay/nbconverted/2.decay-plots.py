#!/usr/bin/env python

# ## 2. Decay plots
#
# In this notebook we plot the decay curve generated in the previous step shown [here](./1.correlation-search.ipynb), next to the control phases.

# In[1]:


import pathlib

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

# Setting up paths

# In[2]:


results_dir = pathlib.Path("./results").resolve(strict=True)
decay_path = (results_dir / "decay_curve.csv").resolve(strict=True)
controls_path = (results_dir / "decay_controls.csv").resolve(strict=True)

fig_dir_path = pathlib.Path("./figures").resolve()
fig_dir_path.mkdir(exist_ok=True, parents=True)


# Loading the curves

# In[3]:


decay_df = pd.read_csv(decay_path)
decay_df["phase"] = "counterexample family"

try:
    controls_df = pd.read_csv(controls_path)
    controls_df["phase"] = "random classical (control)"
except pd.errors.EmptyDataError:
    controls_df = pd.DataFrame(columns=decay_df.columns)

plot_df = pd.concat([decay_df, controls_df], ignore_index=True)
p, k = decay_df["p"].iloc[0], decay_df["k"].iloc[0]


# In[4]:


plt.figure(figsize=(8, 5))
sns.lineplot(data=plot_df, x="n", y="best_value", hue="phase", style="phase", markers=True, dashes=False)
plt.title(f"Best correlation with classical polynomials of degree <= {k - 1} (p={p})", fontsize=14)
plt.xlabel("n", fontsize=12)
plt.ylabel("max |E f(x) e(-Q(x))|", fontsize=12)
plt.ylim(0, 1.05)
plt.xticks(sorted(plot_df["n"].unique()))
plt.tight_layout()

plt.savefig(fig_dir_path / "correlation_decay.png", dpi=300, bbox_inches="tight")
plt.show()

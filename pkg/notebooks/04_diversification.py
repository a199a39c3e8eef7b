# %% [markdown]
# # Diversification curves
#
# Random equally weighted portfolios of growing size show how each total
# risk measure falls. For independent securities with equal volatility the
# expected reduction at size k is 1 - 1/sqrt(k).

# %%
from __future__ import annotations

import numpy as np

from entrorisk.data import generate_synthetic
from entrorisk.portfolio import diversification_curve

d = generate_synthetic(150, 2000, np.zeros(150), 0.01, np.full(150, 0.01), seed=3)
curves = diversification_curve(d, [2, 5, 10, 20, 50], 2000, seed=0)

# %%
print("size  oracle  " + "  ".join(f"{n:>15s}" for n in curves))
sizes = next(iter(curves.values())).sizes
for i, k in enumerate(sizes):
    row = "  ".join(f"{c.reduction[i]:15.4f}" for c in curves.values())
    print(f"{k:4d}  {1 - 1 / np.sqrt(k):6.4f}  {row}")

# %% [markdown]
# With a common factor the curves flatten toward the systematic floor.

# %%
betas = np.random.default_rng(4).uniform(0.5, 1.5, 150)
d2 = generate_synthetic(150, 2000, betas, 0.01, np.full(150, 0.015), seed=5)
c2 = diversification_curve(d2, [2, 5, 10, 20, 50], 2000, seed=0)["stddev"]
print(np.round(c2.reduction, 4))

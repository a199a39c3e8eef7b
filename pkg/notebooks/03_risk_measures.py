# %% [markdown]
# # Risk measures
#
# Standard deviation, CAPM beta and the entropy risk kappa_H = exp(H) are
# computed per security and collected in a table.

# %%
from __future__ import annotations

import numpy as np

from entrorisk.data import generate_synthetic
from entrorisk.risk import risk_beta, risk_entropy, risk_stddev, risk_table

betas = np.linspace(0.5, 1.5, 10)
d = generate_synthetic(10, 2000, betas, 0.01, np.full(10, 0.01), 0.0004, seed=2)
p, m = d.premium_matrix[0], d.market_premium

# %%
print("stddev      ", risk_stddev(p).value)
print("beta        ", risk_beta(p, m).value, "(true", betas[0], ")")
print("kappa Shannon", risk_entropy(p, 1).value)
print("kappa Renyi  ", risk_entropy(p, 2).value)

# %% [markdown]
# kappa_H scales with the premiums and ignores shifts, like a dispersion.

# %%
print(risk_entropy(3 * p, 1).value / risk_entropy(p, 1).value)
print(risk_entropy(p + 0.01, 1).value - risk_entropy(p, 1).value)

# %% [markdown]
# The table holds one vector per measure, in security order.

# %%
table = risk_table(d)
for name, values in table.items():
    print(f"{name:16s}", np.round(values[:4], 5))

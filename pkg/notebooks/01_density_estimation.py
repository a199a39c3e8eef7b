# %% [markdown]
# # Density estimation
#
# Four estimators turn a premium series into a density. Besides the
# equal-width histogram there is an Epanechnikov kernel estimate, plus two
# estimates built from sample spacings. Each returns a `DensityEstimate` that can be evaluated anywhere.

# %%
from __future__ import annotations

import numpy as np

from entrorisk.density import (
    bin_count,
    histogram_density,
    kernel_density,
    silverman_bandwidth,
    spacing_density_correa,
    spacing_density_simple,
    spacing_order,
)

x = np.random.default_rng(0).normal(0.0, 0.01, 5000)

# %% [markdown]
# Bin counts can be fixed or chosen by a rule.

# %%
for rule in (175, "sqrt", "scott", "fd"):
    print(rule, bin_count(x, rule))

# %% [markdown]
# Every estimate integrates to one over the sample range.

# %%
grid = np.linspace(x.min(), x.max(), 20001)
m = spacing_order(x.size, 50)
estimates = {
    "histogram": histogram_density(x, 175),
    "kernel": kernel_density(x),
    "spacing_simple": spacing_density_simple(x, m),
    "spacing_correa": spacing_density_correa(x, m),
}
for name, f in estimates.items():
    print(f"{name:15s} integral={np.trapezoid(f(grid), grid):.4f} f(0)={f(0.0):.2f}")

# %% [markdown]
# The Gaussian density at zero is 1 / (0.01 sqrt(2 pi)), about 39.9.
# Silverman's bandwidth sets the kernel width.

# %%
print("Gaussian f(0):", 1 / (0.01 * np.sqrt(2 * np.pi)))
print("Silverman bandwidth:", silverman_bandwidth(x))

# %% [markdown]
# # Differential entropy
#
# Shannon (order 1) and Renyi (order 2) entropies come either from closed
# forms over a histogram or from quadrature over any density estimate.

# %%
from __future__ import annotations

import math

import numpy as np

from entrorisk.density import histogram_density, kernel_density
from entrorisk.entropy import (
    discrete_entropy,
    entropy_plugin,
    histogram_entropy_renyi,
    histogram_entropy_shannon,
)

x = np.random.default_rng(1).normal(0.0, 0.01, 100_000)

# %% [markdown]
# For N(0, s^2) the Shannon entropy is ln(s sqrt(2 pi e)) and the order-2
# entropy is ln(2 s sqrt(pi)).

# %%
print("Shannon exact    ", math.log(0.01 * math.sqrt(2 * math.pi * math.e)))
print("Shannon histogram", histogram_entropy_shannon(x, 175).value)
print("Shannon kernel   ", entropy_plugin(kernel_density(x), 1).value)
print("Renyi exact      ", math.log(0.01 * 2 * math.sqrt(math.pi)))
print("Renyi histogram  ", histogram_entropy_renyi(x, 50).value)

# %% [markdown]
# The closed forms agree with quadrature over the histogram density.

# %%
f = histogram_density(x, 175)
print(histogram_entropy_shannon(x, 175).value - entropy_plugin(f, 1).value)

# %% [markdown]
# Differential entropy is negative for narrow densities; discrete entropy of
# a probability vector never increases with the order.

# %%
p = np.array([0.5, 0.25, 0.125, 0.125])
for alpha in (0.5, 1, 2, 5):
    print(alpha, discrete_entropy(p, alpha).value)

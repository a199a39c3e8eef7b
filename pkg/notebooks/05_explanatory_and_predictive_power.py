# %% [markdown]
# # Explanatory and predictive power
#
# Mean premiums are regressed on each measure across securities. The R^2 is
# the explanatory power in-sample and the predictive power when risks come
# from an earlier period than the mean premiums.

# %%
from __future__ import annotations

import numpy as np

from entrorisk.data import generate_synthetic, rolling_windows, split_in_out
from entrorisk.evaluation import explanatory_power, predictive_power, rolling_evaluation

n_days = int(np.busday_count("1985-01-01", "2012-01-01"))
betas = np.random.default_rng(6).uniform(0.5, 1.5, 150)
idio = np.random.default_rng(7).uniform(0.01, 0.02, 150)
d = generate_synthetic(150, n_days, betas, 0.01, idio, 0.0004, seed=8)
print(d.dates[0], d.dates[-1])

# %%
for name, fit in explanatory_power(d).fits.items():
    print(f"{name:16s} R2={fit.r_squared:.3f} a1={fit.a1:+.2e} p={fit.p_a1:.1e}")

# %%
d_in, d_out = split_in_out(d, n_days // 2)
print(predictive_power(d_in, d_out).eta)

# %% [markdown]
# Rolling ten-year windows: five years in-sample, five out.

# %%
windows = rolling_windows(d)
rep = rolling_evaluation(d, windows)
print(len(windows), "windows")
for direction, stats in rep.summary().items():
    print(direction, {m: round(s["mean"], 3) for m, s in stats.items()})

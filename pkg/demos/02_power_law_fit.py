"""
H = T^alpha
===========

The relation between the two ratios is close to a power law through the
origin in log-log space. The least-squares slope is

    alpha = sum(ln T * ln H) / sum((ln T)^2)
"""

import numpy as np

from multicite.fields import PUBLISHED_PAIRS
from multicite.lawfit import fit_alpha, predict_two_thirds, residual_report

fit = fit_alpha(PUBLISHED_PAIRS)
print(f"alpha = {fit.alpha:.4f} over {len(fit.pairs_used)} pairs")

# Same number straight from numpy.
logs = np.log(np.asarray(PUBLISHED_PAIRS, dtype=float))
print("check:", logs[:, 0] @ logs[:, 1] / (logs[:, 0] @ logs[:, 0]))

# %%
# Residuals of the rounded exponent 0.82.
for row in residual_report(fit, "power"):
    print(f"T={row.T:4.0f}  H={row.H:4.0f}  T^a={row.predicted:7.3f}  resid={row.residual:+.3f}")

# %%
# A simpler rule, H = 2T/3, is good for small T and breaks down at T = 78.
for t, h in PUBLISHED_PAIRS:
    pred = predict_two_thirds(t)
    print(f"T={t:3d}  2T/3={float(pred):6.2f}  H={h:3d}  |diff|={abs(float(pred) - h):5.2f}")

"""
Sensitivity to profile imbalance
================================

Best hybrid DoF relative to the uniform benchmark K*gamma + alpha, for
sorted length vectors of 100 users over 4 profiles.
"""

import numpy as np

from dyncc import SystemParams
from dyncc.experiments import generate_lengths, sweep_sigma

params = SystemParams(alpha=50, P=4, t_bar=1)

dists = generate_lengths(100, 4, 25, 25)  # every vector with sigma <= 50
rows = sweep_sigma(dists, params)

sigma = np.array([r["sigma"] for r in rows])
ratio = np.array([float(r["ratio"]) for r in rows])
print(len(rows), "distributions")
print("unicast only:", rows[0]["uc_only_ratio"])

# mean ratio per sigma bucket falls as imbalance grows
edges = np.arange(0, 45, 5)
for lo, hi in zip(edges, edges[1:]):
    sel = (sigma >= lo) & (sigma < hi)
    if sel.any():
        print(f"sigma {lo:>2}-{hi:<2}  n={sel.sum():>4}  mean ratio {ratio[sel].mean():.4f}")

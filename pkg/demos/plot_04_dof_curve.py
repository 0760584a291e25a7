"""
DoF as a function of eta_hat
============================

Counting a full schedule against the closed form, then sweeping eta_hat for
a uniform and a skewed network with 100 users and 50 antennas.
"""

from dyncc import NetworkSnapshot, SystemParams
from dyncc.dof_analytics import optimize_eta_hat, verify_against_schedule
from dyncc.experiments import SWEEP_ETA_COLUMNS, sweep_eta, write_csv

small = SystemParams(alpha=4, P=3, t_bar=1)
snapshot = NetworkSnapshot.from_lengths([2, 3, 3])
print(verify_against_schedule(snapshot, 3, small).render())

# the curve is not monotonic: 4, 80/19, 4, 56/9
curve = optimize_eta_hat((2, 3, 3), small)
print([str(d) for _, d in curve.points])

params = SystemParams(alpha=50, P=4, t_bar=1)
for lengths in [(25, 25, 25, 25), (40, 30, 20, 10)]:
    rows = sweep_eta(lengths, params, verify=False)
    best = max(rows, key=lambda r: r["dof"])
    print(lengths, "best eta_hat", best["eta_hat"], "DoF", float(best["dof"]))

print(write_csv(rows[::5], SWEEP_ETA_COLUMNS))

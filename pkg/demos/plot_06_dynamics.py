"""
Users joining and leaving
=========================

Two users leave and three join between intervals.  New users go to the
least loaded profile and eta_hat is re-optimized each interval.
"""

from dyncc import NetworkSnapshot, SystemParams
from dyncc.experiments import DYNAMICS_COLUMNS, simulate_dynamics, write_csv
from dyncc.system_model import ChurnEvent

params = SystemParams(alpha=4, P=3, t_bar=1)
snapshot = NetworkSnapshot.from_groups([[2, 4], [1, 5], [3, 6]])

trace = [
    [ChurnEvent(1, "leave", 5), ChurnEvent(1, "leave", 6),
     ChurnEvent(1, "join", 7), ChurnEvent(1, "join", 8), ChurnEvent(1, "join", 9)],
    [ChurnEvent(2, "join", 10)],
]
rows = simulate_dynamics(snapshot, trace, params)
print(write_csv(rows, DYNAMICS_COLUMNS))

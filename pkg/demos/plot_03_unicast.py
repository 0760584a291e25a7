"""
Unicast step for excluded users
===============================
"""

from dyncc import NetworkSnapshot, SystemParams
from dyncc.cc_elevation import make_serving_plan
from dyncc.uc_scheduler import format_uc_schedule, run_uc_step, uc_dof

params = SystemParams(alpha=4, P=3, t_bar=1)
snapshot = NetworkSnapshot.from_groups([[1, 2], [3, 4, 5], [6, 7, 8]])

plan = make_serving_plan(snapshot, 2, "highest-ids")
uc = run_uc_step(plan, params)

print(format_uc_schedule(uc.schedule[:4]), "...")
print("J_U =", uc.J_U, " T_U =", uc.T_U, " DoF =", uc_dof(uc.J_U, uc.T_U))

# every excluded user ends with (P - t_bar) * rho subpackets
for u in sorted(uc.ledger.users()):
    print(u, {q: len(uc.ledger.delivered(u, q)) for q in range(params.P)})

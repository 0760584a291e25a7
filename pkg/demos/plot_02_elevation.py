"""
Elevating a virtual transmission
================================

Three profiles with 2, 3 and 3 users and four antennas.  With eta_hat = 3
the short profile gets one phantom user, whose stream shapes the codeword
but is never sent.
"""

from dyncc import NetworkSnapshot, SystemParams
from dyncc.cc_elevation import format_schedule, run_cc_step

params = SystemParams(alpha=4, P=3, t_bar=1)
snapshot = NetworkSnapshot.from_groups([[1, 2], [3, 4, 5], [6, 7, 8]])

cc = run_cc_step(snapshot, 3, params)
first = cc.schedule[0]

# (target, packet, subpacket, [suppressed users]); ~1.1 is the phantom
print(format_schedule([first], raw=True))
print(format_schedule([first]))

print("J_M =", cc.J_M, " T_M =", cc.T_M)

# with eta_hat = 2 nobody is padded, but users 5 and 8 are left out
cc2 = run_cc_step(snapshot, 2, params)
print("excluded:", cc2.plan.excluded)
print(format_schedule(cc2.schedule[:3]))

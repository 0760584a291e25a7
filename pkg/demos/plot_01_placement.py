"""
Cache placement and virtual index sets
======================================

Four caching profiles, each storing one of the four packets of every file,
and the index sets that drive the coded-caching step.
"""

from dyncc import SystemParams
from dyncc.system_model import build_placement_matrix
from dyncc.virtual_scheduler import dump_index_sets, generate_index_sets, lemma1_census

params = SystemParams(alpha=4, P=4, t_bar=1)

# row = packet, column = profile
V = build_placement_matrix(params.P, params.t_bar)
print(V)
print("gamma =", params.gamma)

# eta_hat = 2 gives two antennas per virtual user
derived = params.derived(2)
print(derived)

sets = generate_index_sets(params, derived.alpha_bar)
print(dump_index_sets(sets[:6]))

# every profile sits at every position P - t_bar times
print(lemma1_census(sets, params.P))

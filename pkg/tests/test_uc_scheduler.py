import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dyncc.cc_elevation import ServingPlan, make_serving_plan
from dyncc.system_model import NetworkSnapshot, SystemParams
from dyncc.uc_scheduler import format_uc_schedule, run_uc_step, uc_dof


def excluded_plan(P, eta, groups):
    """Plan with no CC users and the given excluded users per profile."""
    return ServingPlan(eta, ((),) * P, tuple(tuple(g) for g in groups), (eta,) * P)


def test_example1_eta2(example1_snapshot, example1_params):
    plan = make_serving_plan(example1_snapshot, 2)
    uc = run_uc_step(plan, example1_params)
    assert (uc.T_U, uc.J_U) == (12, 24)
    assert all(len(tx.streams) == 2 for tx in uc.schedule)
    assert uc_dof(uc.J_U, uc.T_U) == 2


def test_no_excluded_users(example1_snapshot, example1_params):
    uc = run_uc_step(make_serving_plan(example1_snapshot, 3), example1_params)
    assert (uc.schedule, uc.J_U, uc.T_U) == ([], 0, 0)
    with pytest.raises(ZeroDivisionError):
        uc_dof(0, 0)


def test_unicast_only_figure_config():
    params = SystemParams(50, 4, 1)
    plan = make_serving_plan(NetworkSnapshot.from_lengths([25] * 4), 0)
    uc = run_uc_step(plan, params)
    assert plan.K_U == 100
    assert (uc.J_U, uc.T_U) == (15000, 300)
    assert all(len(tx.streams) == 50 for tx in uc.schedule)
    assert uc_dof(uc.J_U, uc.T_U) == Fraction(50)


def test_greedy_serves_largest_backlog_first():
    params = SystemParams(2, 3, 1)
    uc = run_uc_step(excluded_plan(3, 1, [[1], [2], [3]]), params)
    # equal backlogs: ties go to the lowest id, then rotate as backlogs diverge
    assert [tuple(s.user for s in tx.streams) for tx in uc.schedule[:3]] == [(1, 2), (3, 1), (2, 3)]


def test_format(example1_snapshot, example1_params):
    uc = run_uc_step(make_serving_plan(example1_snapshot, 2), example1_params)
    assert format_uc_schedule(uc.schedule[:1]) == "UC n=1: (5,1,1,[]) (8,1,1,[])\n"


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 200), st.integers(1, 64), st.integers(2, 6), st.integers(0, 4),
       st.data())
def test_greedy_matches_closed_form(K_U, alpha, P, eta, data):
    t = data.draw(st.sampled_from([t for t in range(1, P) if math.gcd(t, P) == 1]))
    params = SystemParams(alpha, P, t)
    # spread excluded users over profiles arbitrarily
    owners = data.draw(st.lists(st.integers(0, P - 1), min_size=K_U, max_size=K_U))
    groups = [[u for u, p in enumerate(owners) if p == q] for q in range(P)]
    uc = run_uc_step(excluded_plan(P, eta, groups), params)
    rho = params.derived(eta).rho
    J = K_U * (P - t) * rho
    T = math.ceil(Fraction(J, min(K_U, alpha))) if K_U else 0
    assert (uc.J_U, uc.T_U) == (J, T)
    assert all(v == 0 for v in uc.backlog.values())
    if K_U >= alpha:
        assert all(len(tx.streams) == alpha for tx in uc.schedule[:-1])
    for tx in uc.schedule:
        assert len({s.user for s in tx.streams}) == len(tx.streams) <= alpha
    for u in range(K_U):
        got = [(q, s) for (user, q), subs in uc.ledger.items() if user == u for s in subs]
        assert len(got) == len(set(got)) == (P - t) * rho

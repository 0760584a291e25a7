import math
import random
from collections import defaultdict
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from dyncc.cc_elevation import (
    DeliveryLedger,
    Phantom,
    ServingPlan,
    Slot,
    check_real_decodability,
    count_cc,
    elevate,
    format_transmission,
    make_serving_plan,
    realize,
    run_cc_step,
    slot_schedule,
)
from dyncc.errors import InfeasibleAssignmentError, SuppressionBudgetError
from dyncc.system_model import NetworkSnapshot, SystemParams, caches
from dyncc.virtual_scheduler import assign_packets, base_round_assignment, generate_index_sets

GOLDEN = Path(__file__).parent / "golden"


def golden(name):
    return (GOLDEN / name).read_text()


@pytest.mark.parametrize("eta, K_M, K_U, phantoms, excluded", [
    (2, 6, 2, (0, 0, 0), ((), (5,), (8,))),
    (3, 8, 0, (1, 0, 0), ((), (), ())),
])
def test_serving_plan_example1(example1_snapshot, eta, K_M, K_U, phantoms, excluded):
    plan = make_serving_plan(example1_snapshot, eta)
    assert (plan.K_M, plan.K_U, plan.phantoms, plan.excluded) == (K_M, K_U, phantoms, excluded)


def test_serving_plan_uniform():
    plan = make_serving_plan(NetworkSnapshot.from_lengths([5, 5]), 5)
    assert (plan.K_M, plan.K_U, plan.phantoms) == (10, 0, (0, 0))


def test_serving_plan_seeded_random_partitions():
    snap = NetworkSnapshot.from_lengths([6, 1, 4])
    plan = make_serving_plan(snap, 2, "seeded-random", random.Random(3))
    for p in range(3):
        users = set(snap.users_of(p))
        assert set(plan.served[p]) | set(plan.excluded[p]) == users
        assert not set(plan.served[p]) & set(plan.excluded[p])
        assert len(plan.slots(p)) == 2
    assert plan.K_M + plan.K_U == snap.K


def test_example1_eta3_golden(example1_snapshot, example1_params):
    tx = run_cc_step(example1_snapshot, 3, example1_params).schedule[0]
    assert format_transmission(tx, raw=True) + "\n" == golden("example1_eta3_first_raw.txt")
    assert format_transmission(tx) + "\n" == golden("example1_eta3_first.txt")
    assert [s.packet + 1 for s in tx.raw_streams] == [2, 2, 2, 1, 1, 1, 1]


def test_example1_eta2_golden(example1_snapshot, example1_params):
    tx = run_cc_step(example1_snapshot, 2, example1_params).schedule[0]
    assert format_transmission(tx) + "\n" == golden("example1_eta2_first.txt")
    assert not any(s.phantom for s in tx.raw_streams)


def test_elevate_matches_realize(example1_snapshot, example1_params):
    """Direct elevation with users equals relabelling the cached slot schedule."""
    for eta in (2, 3):
        plan = make_serving_plan(example1_snapshot, eta)
        direct = []
        ledger = DeliveryLedger(example1_params.derived(eta).rho)
        for s in generate_index_sets(example1_params, 2):
            direct.extend(elevate(assign_packets(s, example1_params), plan, example1_params, ledger))
        via_slots, _ = realize(slot_schedule(example1_params, eta), plan)
        assert [t.streams for t in direct] == [t.streams for t in via_slots]


def test_eta_one_is_relabelling():
    params = SystemParams(2, 3, 1)
    cc = run_cc_step(NetworkSnapshot.from_lengths([1, 1, 1]), 1, params)
    assert params.derived(1).b == 1
    assert (cc.T_M, cc.J_M) == (6, 18)
    for tx in cc.schedule:
        assert len({s.target for s in tx.streams}) == len(tx.streams) == 3


@pytest.mark.parametrize("eta, T_M, J_M", [(3, 18, 112), (2, 12, 72)])
def test_run_cc_step_counts(example1_snapshot, example1_params, eta, T_M, J_M):
    cc = run_cc_step(example1_snapshot, eta, example1_params)
    assert (cc.T_M, cc.J_M) == (T_M, J_M)
    assert cc.J_M == cc.plan.K_M * (3 - 1) * example1_params.derived(eta).rho


def test_budget_violation_detected():
    # alpha_bar = 1 with eta_hat > alpha: holders must be nulled at eta_hat - 1 peers
    params = SystemParams(1, 3, 1)
    snap = NetworkSnapshot.from_lengths([2, 2, 2])
    with pytest.raises(SuppressionBudgetError):
        run_cc_step(snap, 2, params)
    cc = run_cc_step(snap, 2, params, enforce_budget=False)
    assert cc.max_suppression == 1


def _ledger_complete(cc, params):
    rho = params.derived(cc.plan.eta_hat).rho
    P, t = params.P, params.t_bar
    served = {u: p for p in range(P) for u in cc.plan.served[p]}
    assert cc.ledger.users() == set(served)
    for u, p in served.items():
        for q in range(P):
            got = cc.ledger.delivered(u, q)
            if caches(q, p, P, t):
                assert got == []
            else:
                assert sorted(got) == list(range(rho))


def feasible(P, t, a):
    try:
        base_round_assignment(P, t, a)
        return True
    except InfeasibleAssignmentError:
        return False


@st.composite
def configs(draw):
    P = draw(st.integers(2, 6))
    t = draw(st.sampled_from([t for t in range(1, P) if math.gcd(t, P) == 1]))
    eta = draw(st.integers(1, 6))
    alpha = draw(st.integers(1, 12))
    a = -(-alpha // eta)
    if t + a > P or not feasible(P, t, a):
        alpha = eta  # alpha_bar = 1
        a = 1
    if t + a > P or not feasible(P, t, a):
        t = 1
    lengths = draw(st.lists(st.integers(0, 8), min_size=P, max_size=P))
    return SystemParams(alpha, P, t), eta, lengths


@settings(max_examples=150, deadline=None)
@given(configs())
def test_counted_jm_matches_closed_form(cfg):
    params, eta, lengths = cfg
    snap = NetworkSnapshot.from_lengths(lengths)
    cc = run_cc_step(snap, eta, params, enforce_budget=False)
    rho = params.derived(eta).rho
    assert cc.J_M == cc.plan.K_M * (params.P - params.t_bar) * rho
    assert cc.T_M == params.P * (params.P - params.t_bar) * eta
    assert count_cc(slot_schedule(params, eta), cc.plan.served_counts) == (cc.J_M, cc.T_M)
    profile_of = cc.plan.profile_of()
    phantoms_by_tx = []
    for tx in cc.schedule:
        assert len(tx.raw_streams) == rho
        n_ph = sum(s.phantom for s in tx.raw_streams)
        phantoms_by_tx.append(n_ph)
        assert len(tx.streams) == rho - n_ph
        assert all(not isinstance(u, Phantom) for s in tx.streams for u in s.suppression)
        assert all(s.target not in s.suppression for s in tx.raw_streams)
        assert check_real_decodability(tx, params, profile_of) == []
    _ledger_complete(cc, params)


@settings(max_examples=60, deadline=None)
@given(configs())
def test_last_position_rotation(cfg):
    params, eta, _ = cfg
    sched = slot_schedule(params, eta)
    b = sched.derived.b
    last_members = {}
    for s in generate_index_sets(params, sched.derived.alpha_bar):
        last_members[(s.round, s.index)] = s.members[-1]
    seen = defaultdict(int)
    for tx in sched.transmissions:
        last = last_members[(tx.round, tx.index)]
        for s in tx.raw_streams:
            if s.target.profile == last:
                seen[(tx.round, tx.index, s.target.index)] += 1
    for (r, j), last in last_members.items():
        for i in range(eta):
            assert seen[(r, j, i)] == b


def test_budget_holds_when_eta_at_most_alpha():
    """t_bar = 1 and eta_hat <= alpha: every stream fits alpha - 1 nulls."""
    for P in range(2, 7):
        for alpha in range(1, 13):
            for eta in range(1, alpha + 1):
                params = SystemParams(alpha, P, 1)
                if 1 + -(-alpha // eta) > P:
                    continue
                sched = slot_schedule(params, eta)
                widest = max(len(s.suppression) for tx in sched.transmissions for s in tx.streams)
                assert widest <= alpha - 1


def test_slot_plan_has_no_phantoms():
    plan = ServingPlan.full(3, 2)
    assert plan.slots(1) == (Slot(1, 0), Slot(1, 1)) and plan.K_U == 0

import math
from collections import Counter

import pytest

from dyncc.errors import InfeasibleAssignmentError, UnsupportedRegimeError
from dyncc.system_model import SystemParams, caches
from dyncc.virtual_scheduler import (
    assign_packets,
    base_round_assignment,
    dump_index_sets,
    generate_index_sets,
    lemma1_census,
)


def labels(s):
    return tuple(m + 1 for m in s.members)


def regimes(max_P):
    for P in range(2, max_P + 1):
        for t in range(1, P):
            if math.gcd(t, P) == 1:
                for a in range(1, P - t + 1):
                    yield P, t, a


def test_first_index_set_example1(example1_params):
    sets = generate_index_sets(example1_params, 2)
    assert labels(sets[0]) == (1, 2, 3)


def test_all_index_sets_example1(example1_params):
    sets = generate_index_sets(example1_params, 2)
    assert [labels(s) for s in sets] == [
        (1, 2, 3), (1, 3, 2), (2, 3, 1), (2, 1, 3), (3, 1, 2), (3, 2, 1),
    ]


def test_two_profile_sets():
    sets = generate_index_sets(SystemParams(1, 2, 1), 1)
    assert [labels(s) for s in sets] == [(1, 2), (2, 1)]


def test_regime_refused():
    with pytest.raises(UnsupportedRegimeError):
        generate_index_sets(SystemParams(4, 3, 1), 3)


def test_dump_format(example1_params):
    text = dump_index_sets(generate_index_sets(example1_params, 2)[:2])
    assert text == "r=1 j=1: (1,2,3)\nr=1 j=2: (1,3,2)\n"


@pytest.mark.parametrize("P, t, a, expected", [(3, 1, 2, 2), (2, 1, 1, 1), (6, 1, 3, 5)])
def test_census_examples(P, t, a, expected):
    census = lemma1_census(generate_index_sets(SystemParams(a, P, t), a))
    assert census.shape == (P, t + a)
    assert (census == expected).all()


def test_census_exhaustive():
    for P, t, a in regimes(8):
        sets = generate_index_sets(SystemParams(a, P, t), a)
        assert len(sets) == P * (P - t)
        # brute-force tally, independent of lemma1_census
        tally = Counter((p, pos) for s in sets for pos, p in enumerate(s.members))
        assert set(tally.values()) == {P - t} and len(tally) == P * (t + a)
        assert (lemma1_census(sets, P) == P - t).all()


def test_index_set_structure():
    for P, t, a in regimes(8):
        sets = generate_index_sets(SystemParams(a, P, t), a)
        by_key = {(s.round, s.index): s.members for s in sets}
        for s in sets:
            assert len(set(s.members)) == t + a
            assert s.members[:t] == tuple((s.round + i) % P for i in range(t))
            if s.round + 1 < P:
                nxt = by_key[(s.round + 1, s.index)]
                assert nxt == tuple((m + 1) % P for m in s.members)


def test_assign_packets_example1(example1_params):
    sets = generate_index_sets(example1_params, 2)
    vt = assign_packets(sets[0], example1_params)
    got = [(s.target + 1, s.packet + 1, {m + 1 for m in s.suppression}) for s in vt.streams]
    assert got == [(1, 2, {3}), (2, 1, {3}), (3, 1, {2})]


def test_assign_packets_two_profiles():
    params = SystemParams(1, 2, 1)
    vt = assign_packets(generate_index_sets(params, 1)[0], params)
    assert [(s.target, s.packet, s.suppression) for s in vt.streams] == [
        (0, 1, frozenset()), (1, 0, frozenset()),
    ]


def test_assign_packets_shifted_round(example1_params):
    sets = generate_index_sets(example1_params, 2)
    s = next(s for s in sets if labels(s) == (2, 3, 1))
    vt = assign_packets(s, example1_params)
    got = [(x.target + 1, x.packet + 1, {m + 1 for m in x.suppression}) for x in vt.streams]
    assert got == [(2, 3, {1}), (3, 2, {1}), (1, 2, {3})]


def virtual_ok(vt, P, t, a):
    for s in vt.streams:
        if caches(s.packet, s.target, P, t):
            return False
        if len(s.suppression) > a - 1:
            return False
        for m in vt.index_set.members:
            if m != s.target and not caches(s.packet, m, P, t) and m not in s.suppression:
                return False
    return True


def feasible_regimes(max_P):
    for P, t, a in regimes(max_P):
        try:
            base_round_assignment(P, t, a)
        except InfeasibleAssignmentError:
            continue
        yield P, t, a


def test_virtual_decodability_all_streams():
    for P, t, a in feasible_regimes(8):
        params = SystemParams(a, P, t)
        for s in generate_index_sets(params, a):
            assert virtual_ok(assign_packets(s, params), P, t, a), (P, t, a, s)


def test_infeasible_regimes_are_reported():
    # members {0,1,3}: target 0 has no two consecutive cachers among the others
    with pytest.raises(InfeasibleAssignmentError):
        base_round_assignment(5, 2, 1)
    base_round_assignment(5, 2, 2)


def test_weighted_completeness_brute_force():
    """Each (profile, missing packet) pair accrues rho weighted slots."""
    for P, t, a in feasible_regimes(7):
        params = SystemParams(a, P, t)
        for eta in range(1, 5):
            alpha = None
            for cand in range(1, 30):
                if -(-cand // eta) == a:
                    alpha = cand
                    break
            full = SystemParams(alpha, P, t)
            d = full.derived(eta)
            weight = Counter()
            for s in generate_index_sets(params, a):
                vt = assign_packets(s, params)
                for pos, stream in enumerate(vt.streams):
                    w = d.b if pos == len(vt.streams) - 1 else eta
                    weight[(stream.target, stream.packet)] += w
            for p in range(P):
                for q in range(P):
                    want = 0 if caches(q, p, P, t) else d.rho
                    assert weight[(p, q)] == want, (P, t, a, eta, p, q)

"""Cyclic index sets and packet assignment for the virtual network.

In the virtual network every caching profile acts as one user, the
coded-caching gain is ``t_bar`` and the spatial gain is ``alpha_bar``.
Each transmission serves ``t_bar + alpha_bar`` profiles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleAssignmentError, ParameterError, UnsupportedRegimeError
from .system_model import SystemParams, caches

__all__ = [
    "VirtualIndexSet",
    "VirtualStream",
    "VirtualTransmission",
    "generate_index_sets",
    "lemma1_census",
    "assign_packets",
    "base_round_assignment",
    "dump_index_sets",
]


@dataclass(frozen=True)
class VirtualIndexSet:
    round: int
    index: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class VirtualStream:
    target: int
    packet: int
    suppression: frozenset[int]


@dataclass(frozen=True)
class VirtualTransmission:
    index_set: VirtualIndexSet
    streams: tuple[VirtualStream, ...]  # aligned with index_set.members


def _check_regime(params: SystemParams, alpha_bar: int) -> None:
    if alpha_bar < 1:
        raise ParameterError(f"alpha_bar must be positive, got {alpha_bar}")
    if params.t_bar + alpha_bar > params.P:
        raise UnsupportedRegimeError(
            f"t_bar + alpha_bar = {params.t_bar + alpha_bar} exceeds P = {params.P}"
        )


def generate_index_sets(params: SystemParams, alpha_bar: int) -> list[VirtualIndexSet]:
    """All ``P * (P - t_bar)`` index sets, ordered by round then index.

    Round 0 is built from the window rule; round ``r`` adds ``r`` (mod P)
    to every member of the corresponding round-0 set.
    """
    _check_regime(params, alpha_bar)
    P, t = params.P, params.t_bar
    base = [
        tuple(range(t)) + tuple((i + j) % (P - t) + t for i in range(alpha_bar))
        for j in range(P - t)
    ]
    return [
        VirtualIndexSet(r, j, tuple((m + r) % P for m in members))
        for r in range(P)
        for j, members in enumerate(base)
    ]


def lemma1_census(sets: Sequence[VirtualIndexSet], P: int | None = None) -> np.ndarray:
    """Count how often each profile occupies each position.

    Returns an array ``count[profile, position]``.
    """
    if not sets:
        raise ParameterError("no index sets given")
    width = len(sets[0].members)
    if P is None:
        P = 1 + max(m for s in sets for m in s.members)
    count = np.zeros((P, width), dtype=int)
    for s in sets:
        for pos, profile in enumerate(s.members):
            count[profile, pos] += 1
    return count


def _virtual_suppression(members, target_pos, packet, P, t):
    return frozenset(
        m for pos, m in enumerate(members) if pos != target_pos and not caches(packet, m, P, t)
    )


@lru_cache(maxsize=None)
def base_round_assignment(P: int, t_bar: int, alpha_bar: int) -> tuple[tuple[int, ...], ...]:
    """Packet for every position of every round-0 index set.

    With ``t_bar == 1`` the closed rule is used: the profile in front gets
    the packet cached by the second member, everybody else gets the packet
    cached by the front profile.  For ``t_bar > 1`` the positions of the
    leading block are filled by exhaustive search so that each stream's
    packet is cached by every non-suppressed member and, over the round,
    each missing-packet offset is delivered ``t_bar`` times to the leading
    block.  Solutions that do not rely on the last member as a cacher are
    preferred, since that member is served in only ``b`` of the elevated
    vectors.
    """
    params = SystemParams(alpha=alpha_bar, P=P, t_bar=t_bar)
    sets = generate_index_sets(params, alpha_bar)[: P - t_bar]
    if t_bar == 1:
        return tuple((s.members[1],) + (s.members[0],) * alpha_bar for s in sets)

    # Trailing block: packet 0 is cached by exactly the leading block.
    for avoid_last in (True, False):
        solution = _search_leading_block(P, t_bar, [s.members for s in sets], avoid_last)
        if solution is not None:
            return tuple(tuple(solution[j]) + (0,) * alpha_bar for j in range(len(sets)))
    raise InfeasibleAssignmentError(
        f"no decodable packet assignment for P={P}, t_bar={t_bar}, alpha_bar={alpha_bar}"
    )


def _search_leading_block(P, t, base_members, avoid_last):
    slots = []
    for j, members in enumerate(base_members):
        others_by_pos = []
        for pos in range(t):
            target = members[pos]
            others = set(members) - {target}
            options = []
            for offset in range(1, P - t + 1):
                q = (target + offset) % P
                holders = {(q + i) % P for i in range(t)}
                if not holders <= others:
                    continue
                if avoid_last and members[-1] in holders:
                    continue
                options.append(offset)
            if not options:
                return None
            others_by_pos.append(options)
        slots.extend((j, pos, opts) for pos, opts in enumerate(others_by_pos))

    # Most constrained slots first keeps the backtracking shallow.
    order = sorted(range(len(slots)), key=lambda i: (len(slots[i][2]), i))
    used = [0] * (P - t + 1)
    chosen = {}

    def backtrack(k):
        if k == len(order):
            return True
        j, pos, opts = slots[order[k]]
        for offset in opts:
            if used[offset] < t:
                used[offset] += 1
                chosen[(j, pos)] = offset
                if backtrack(k + 1):
                    return True
                used[offset] -= 1
        return False

    if not backtrack(0):
        return None
    return [
        [(base_members[j][pos] + chosen[(j, pos)]) % P for pos in range(t)]
        for j in range(len(base_members))
    ]


def assign_packets(index_set: VirtualIndexSet, params: SystemParams) -> VirtualTransmission:
    """Attach packet indices and suppression sets to one index set."""
    P, t = params.P, params.t_bar
    alpha_bar = len(index_set.members) - t
    base = base_round_assignment(P, t, alpha_bar)[index_set.index]
    members = index_set.members
    streams = []
    for pos, target in enumerate(members):
        packet = (base[pos] + index_set.round) % P
        streams.append(
            VirtualStream(target, packet, _virtual_suppression(members, pos, packet, P, t))
        )
    return VirtualTransmission(index_set, tuple(streams))


def dump_index_sets(sets: Iterable[VirtualIndexSet]) -> str:
    lines = [
        f"r={s.round + 1} j={s.index + 1}: ({','.join(str(m + 1) for m in s.members)})"
        for s in sets
    ]
    return "\n".join(lines) + "\n"

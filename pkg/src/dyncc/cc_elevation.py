"""Elevation of virtual transmissions into real multicast transmissions.

Each profile contributes ``eta_hat`` slots to the coded-caching step: its
served users first, then phantom users when the profile is short.  Every
virtual transmission is elevated into ``eta_hat`` real transmissions;
phantom-targeted streams are built like any other and deleted afterwards.

The slot-level schedule depends only on ``(params, eta_hat)``, so it is
built once and cached.  A concrete network is handled by relabelling
slots with users and dropping phantoms (:func:`realize`).
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Sequence

from .errors import ParameterError, SnapshotError, SuppressionBudgetError, UnsupportedRegimeError
from .system_model import DerivedParams, NetworkSnapshot, SystemParams, caches
from .virtual_scheduler import VirtualTransmission, assign_packets, generate_index_sets

__all__ = [
    "Phantom",
    "Slot",
    "ServingPlan",
    "Stream",
    "ElevatedTransmission",
    "DeliveryLedger",
    "CcResult",
    "make_serving_plan",
    "elevate",
    "slot_schedule",
    "realize",
    "run_cc_step",
    "count_cc",
    "check_real_decodability",
    "format_transmission",
    "format_schedule",
]


@dataclass(frozen=True, order=True)
class Phantom:
    """Placeholder user padding a short profile."""

    profile: int
    index: int

    def __str__(self):
        return f"~{self.profile + 1}.{self.index + 1}"


@dataclass(frozen=True, order=True)
class Slot:
    """Position ``index`` inside profile ``profile``'s group of eta_hat users."""

    profile: int
    index: int


@dataclass(frozen=True)
class ServingPlan:
    eta_hat: int
    served: tuple[tuple[Hashable, ...], ...]
    excluded: tuple[tuple[int, ...], ...]
    phantoms: tuple[int, ...]

    @property
    def P(self) -> int:
        return len(self.served)

    @property
    def K_M(self) -> int:
        return sum(1 for users in self.served for u in users if not isinstance(u, Phantom))

    @property
    def K_U(self) -> int:
        return sum(len(users) for users in self.excluded)

    @property
    def served_counts(self) -> tuple[int, ...]:
        return tuple(len(users) for users in self.served)

    def slots(self, profile: int) -> tuple:
        return self.served[profile] + tuple(
            Phantom(profile, i) for i in range(self.phantoms[profile])
        )

    def profile_of(self) -> dict:
        out = {}
        for p in range(self.P):
            for u in self.slots(p):
                out[u] = p
        for p, users in enumerate(self.excluded):
            for u in users:
                out[u] = p
        return out

    @classmethod
    def full(cls, P: int, eta_hat: int) -> "ServingPlan":
        """Plan whose users are the abstract slots themselves."""
        served = tuple(tuple(Slot(p, i) for i in range(eta_hat)) for p in range(P))
        return cls(eta_hat, served, ((),) * P, (0,) * P)


@dataclass(frozen=True)
class Stream:
    target: Hashable
    packet: int
    subpacket: int
    suppression: frozenset

    @property
    def phantom(self) -> bool:
        return isinstance(self.target, Phantom)


@dataclass(frozen=True)
class ElevatedTransmission:
    round: int
    index: int
    delta: int
    raw_streams: tuple[Stream, ...]  # before phantom removal
    streams: tuple[Stream, ...]


class DeliveryLedger:
    """Subpacket indices handed out per (user, packet)."""

    def __init__(self, rho: int):
        self.rho = rho
        self._given: dict[tuple, list[int]] = defaultdict(list)

    def reserve(self, user, packet: int) -> int:
        given = self._given[(user, packet)]
        nxt = len(given)
        if nxt >= self.rho:
            raise ParameterError(f"user {user} already holds all subpackets of packet {packet}")
        given.append(nxt)
        return nxt

    def record(self, user, packet: int, subpacket: int) -> None:
        given = self._given[(user, packet)]
        if subpacket in given:
            raise ParameterError(f"subpacket {subpacket} of packet {packet} sent twice to {user}")
        given.append(subpacket)

    def delivered(self, user, packet: int) -> list[int]:
        return list(self._given.get((user, packet), ()))

    def items(self):
        return ((key, list(v)) for key, v in self._given.items())

    def users(self) -> set:
        return {user for user, _ in self._given}


def make_serving_plan(
    snapshot: NetworkSnapshot,
    eta_hat: int,
    selection: str = "highest-ids",
    rng: random.Random | None = None,
) -> ServingPlan:
    """Split each profile into served and excluded users, padding with phantoms.

    ``highest-ids`` excludes the users with the largest ids; ``seeded-random``
    draws the excluded users from ``rng``.
    """
    if eta_hat < 0:
        raise ParameterError(f"eta_hat must be non-negative, got {eta_hat}")
    served, excluded, phantoms = [], [], []
    for p in range(snapshot.P):
        users = snapshot.users_of(p)
        extra = max(len(users) - eta_hat, 0)
        if selection == "highest-ids":
            out = users[len(users) - extra:] if extra else []
        elif selection == "seeded-random":
            if rng is None:
                raise ParameterError("seeded-random selection needs an rng")
            out = sorted(rng.sample(users, extra))
        else:
            raise ParameterError(f"unknown selection rule {selection!r}")
        keep = [u for u in users if u not in set(out)]
        served.append(tuple(keep))
        excluded.append(tuple(out))
        phantoms.append(max(eta_hat - len(users), 0))
    return ServingPlan(eta_hat, tuple(served), tuple(excluded), tuple(phantoms))


def _last_slot_active(slot: int, delta: int, eta_hat: int, b: int) -> bool:
    return (delta + slot) % eta_hat < b


def _check_budget(streams: Iterable[Stream], alpha: int, where: str) -> None:
    for s in streams:
        if len(s.suppression) > alpha - 1:
            raise SuppressionBudgetError(
                f"{where}: stream to {s.target} needs nulling at {len(s.suppression)} users, "
                f"alpha - 1 = {alpha - 1}"
            )


def _remove_phantoms(streams: Sequence[Stream]) -> tuple[Stream, ...]:
    return tuple(
        Stream(s.target, s.packet, s.subpacket,
               frozenset(u for u in s.suppression if not isinstance(u, Phantom)))
        for s in streams
        if not s.phantom
    )


def elevate(
    vt: VirtualTransmission,
    plan: ServingPlan,
    params: SystemParams,
    ledger: DeliveryLedger | None = None,
    enforce_budget: bool = True,
) -> list[ElevatedTransmission]:
    """Elevate one virtual transmission into ``eta_hat`` real ones."""
    derived = params.derived(plan.eta_hat)
    if derived.eta_hat == 0:
        raise ParameterError("elevation needs eta_hat >= 1")
    members = vt.index_set.members
    if len(members) != params.t_bar + derived.alpha_bar:
        raise ParameterError("virtual transmission does not match eta_hat")
    if ledger is None:
        ledger = DeliveryLedger(derived.rho)
    eta_hat, b, P, t = derived.eta_hat, derived.b, params.P, params.t_bar
    last = len(members) - 1
    out = []
    for delta in range(eta_hat):
        active = []  # (user, packet)
        for pos, (profile, vstream) in enumerate(zip(members, vt.streams)):
            for i, user in enumerate(plan.slots(profile)):
                if pos == last and not _last_slot_active(i, delta, eta_hat, b):
                    continue
                active.append((user, profile, vstream.packet))
        raw = []
        for user, profile, packet in active:
            suppression = frozenset(
                other for other, other_profile, _ in active
                if other != user and not caches(packet, other_profile, P, t)
            )
            raw.append(Stream(user, packet, ledger.reserve(user, packet), suppression))
        streams = _remove_phantoms(raw)
        tx = ElevatedTransmission(vt.index_set.round, vt.index_set.index, delta,
                                  tuple(raw), streams)
        if enforce_budget:
            _check_budget(streams, params.alpha, _where(tx))
        out.append(tx)
    return out


def _where(tx: ElevatedTransmission) -> str:
    return f"r={tx.round + 1} j={tx.index + 1} d={tx.delta + 1}"


@dataclass(frozen=True)
class SlotSchedule:
    params: SystemParams
    derived: DerivedParams
    transmissions: tuple[ElevatedTransmission, ...]
    stream_counts: tuple[tuple[int, ...], ...]  # streams targeting slot (p, i)


@lru_cache(maxsize=256)
def slot_schedule(params: SystemParams, eta_hat: int) -> SlotSchedule:
    """CC schedule over abstract slots, shared by every network with this eta_hat."""
    derived = params.derived(eta_hat)
    if eta_hat < 1:
        raise ParameterError("the coded-caching step needs eta_hat >= 1")
    if params.t_bar + derived.alpha_bar > params.P:
        raise UnsupportedRegimeError(
            f"t_bar + alpha_bar = {params.t_bar + derived.alpha_bar} exceeds P = {params.P}"
        )
    plan = ServingPlan.full(params.P, eta_hat)
    ledger = DeliveryLedger(derived.rho)
    txs = []
    for index_set in generate_index_sets(params, derived.alpha_bar):
        vt = assign_packets(index_set, params)
        txs.extend(elevate(vt, plan, params, ledger, enforce_budget=False))
    counts = [[0] * eta_hat for _ in range(params.P)]
    for tx in txs:
        for s in tx.streams:
            counts[s.target.profile][s.target.index] += 1
    return SlotSchedule(params, derived, tuple(txs), tuple(tuple(c) for c in counts))


def count_cc(schedule: SlotSchedule, served_counts: Sequence[int]) -> tuple[int, int]:
    """(J_M, T_M) of the realized schedule when profile p has served_counts[p] real users."""
    J = sum(sum(row[:n]) for row, n in zip(schedule.stream_counts, served_counts))
    return J, len(schedule.transmissions)


def realize(
    schedule: SlotSchedule,
    plan: ServingPlan,
    enforce_budget: bool = True,
) -> tuple[list[ElevatedTransmission], DeliveryLedger]:
    """Replace slots by the plan's users, then strip phantom streams."""
    if plan.eta_hat != schedule.derived.eta_hat or plan.P != schedule.params.P:
        raise ParameterError("plan does not match the slot schedule")
    who = {Slot(p, i): u for p in range(plan.P) for i, u in enumerate(plan.slots(p))}
    ledger = DeliveryLedger(schedule.derived.rho)
    out = []
    for tx in schedule.transmissions:
        raw = tuple(
            Stream(who[s.target], s.packet, s.subpacket, frozenset(who[u] for u in s.suppression))
            for s in tx.streams
        )
        streams = _remove_phantoms(raw)
        real = ElevatedTransmission(tx.round, tx.index, tx.delta, raw, streams)
        if enforce_budget:
            _check_budget(streams, schedule.params.alpha, _where(real))
        for s in streams:
            ledger.record(s.target, s.packet, s.subpacket)
        out.append(real)
    return out, ledger


@dataclass
class CcResult:
    plan: ServingPlan
    schedule: list[ElevatedTransmission]
    ledger: DeliveryLedger
    J_M: int
    T_M: int
    max_suppression: int = field(default=0)


def run_cc_step(
    snapshot: NetworkSnapshot,
    eta_hat: int,
    params: SystemParams,
    selection: str = "highest-ids",
    rng: random.Random | None = None,
    enforce_budget: bool = True,
) -> CcResult:
    if snapshot.P != params.P:
        raise SnapshotError("snapshot and params disagree on P")
    plan = make_serving_plan(snapshot, eta_hat, selection, rng)
    txs, ledger = realize(slot_schedule(params, eta_hat), plan, enforce_budget)
    J = sum(len(tx.streams) for tx in txs)
    widest = max((len(s.suppression) for tx in txs for s in tx.streams), default=0)
    return CcResult(plan, txs, ledger, J, len(txs), widest)


def check_real_decodability(tx: ElevatedTransmission, params: SystemParams, profile_of) -> list[str]:
    """Return a description of every interference term a target cannot remove."""
    problems = []
    for s in tx.streams:
        p = profile_of[s.target]
        for other in tx.streams:
            if other is s:
                continue
            if not caches(other.packet, p, params.P, params.t_bar) and s.target not in other.suppression:
                problems.append(
                    f"{_where(tx)}: user {s.target} hears packet {other.packet + 1} "
                    f"meant for {other.target}"
                )
    return problems


def _label(u) -> str:
    return str(u)


def _sort_key(u):
    return (1, u.profile, u.index) if isinstance(u, Phantom) else (0, u, 0)


def format_transmission(tx: ElevatedTransmission, raw: bool = False) -> str:
    streams = tx.raw_streams if raw else tx.streams
    parts = []
    for s in streams:
        supp = ",".join(_label(u) for u in sorted(s.suppression, key=_sort_key))
        parts.append(f"({_label(s.target)},{s.packet + 1},{s.subpacket + 1},[{supp}])")
    return f"CC r={tx.round + 1} j={tx.index + 1} d={tx.delta + 1}: " + " ".join(parts)


def format_schedule(txs: Iterable[ElevatedTransmission], raw: bool = False) -> str:
    return "".join(format_transmission(tx, raw) + "\n" for tx in txs)

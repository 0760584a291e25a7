"""Greedy multi-user unicast delivery for users left out of coded caching."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cc_elevation import DeliveryLedger, ServingPlan
from .system_model import SystemParams, caches

__all__ = ["UcStream", "UcTransmission", "UcResult", "run_uc_step", "uc_dof", "format_uc_schedule"]


@dataclass(frozen=True)
class UcStream:
    user: int
    packet: int
    subpacket: int


@dataclass(frozen=True)
class UcTransmission:
    streams: tuple[UcStream, ...]


@dataclass
class UcResult:
    schedule: list[UcTransmission]
    ledger: DeliveryLedger
    J_U: int
    T_U: int
    backlog: dict


def run_uc_step(plan: ServingPlan, params: SystemParams) -> UcResult:
    """Drain every excluded user's backlog, one subpacket per user per transmission.

    Each round sorts users by remaining backlog (largest first, then by id)
    and serves the first ``min(alpha, remaining users)`` of them.
    """
    rho = params.derived(plan.eta_hat).rho
    P, t = params.P, params.t_bar
    pending = {}
    for profile, users in enumerate(plan.excluded):
        missing = [q for q in range(P) if not caches(q, profile, P, t)]
        for u in users:
            pending[u] = [(q, s) for q in missing for s in range(rho)]
    backlog = {u: len(v) for u, v in pending.items()}
    ledger = DeliveryLedger(rho)
    cursor = dict.fromkeys(pending, 0)
    schedule = []
    active = [u for u in pending if backlog[u] > 0]
    while active:
        active.sort(key=lambda u: (-backlog[u], u))
        streams = []
        for u in active[: params.alpha]:
            q, s = pending[u][cursor[u]]
            cursor[u] += 1
            backlog[u] -= 1
            ledger.record(u, q, s)
            streams.append(UcStream(u, q, s))
        schedule.append(UcTransmission(tuple(streams)))
        active = [u for u in active if backlog[u] > 0]
    J = sum(len(tx.streams) for tx in schedule)
    return UcResult(schedule, ledger, J, len(schedule), backlog)


def uc_dof(J_U: int, T_U: int) -> Fraction:
    if T_U == 0:
        raise ZeroDivisionError("no unicast transmissions")
    return Fraction(J_U, T_U)


def format_uc_schedule(schedule: Iterable[UcTransmission]) -> str:
    lines = []
    for n, tx in enumerate(schedule, 1):
        parts = " ".join(f"({s.user},{s.packet + 1},{s.subpacket + 1},[])" for s in tx.streams)
        lines.append(f"UC n={n}: {parts}")
    return "".join(line + "\n" for line in lines)

"""Degrees of freedom: counted from schedules and in closed form.

All values are exact :class:`fractions.Fraction` objects.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .cc_elevation import make_serving_plan, realize, slot_schedule
from .errors import (
    DynCCError,
    InfeasibleAssignmentError,
    ParameterError,
    SuppressionBudgetError,
    UnsupportedRegimeError,
)
from .system_model import NetworkSnapshot, SystemParams
from .uc_scheduler import run_uc_step

__all__ = [
    "DofReport",
    "DofCurve",
    "split_counts",
    "closed_form_counts",
    "closed_form_dof",
    "remark_dof",
    "verify_against_schedule",
    "optimize_eta_hat",
    "ScheduleMismatch",
]


class ScheduleMismatch(DynCCError, AssertionError):
    """Counted and closed-form DoF disagree."""


def split_counts(lengths: Sequence[int], eta_hat: int) -> tuple[int, int]:
    """(K_M, K_U) for a given unifying profile length."""
    K_M = sum(min(eta_hat, n) for n in lengths)
    K_U = sum(max(n - eta_hat, 0) for n in lengths)
    return K_M, K_U


def closed_form_counts(lengths: Sequence[int], eta_hat: int, params: SystemParams) -> dict:
    """J_M, T_M, J_U and T_U as predicted for the two-step scheme."""
    K_M, K_U = split_counts(lengths, eta_hat)
    P, t, alpha = params.P, params.t_bar, params.alpha
    rho = params.derived(eta_hat).rho
    J_M = K_M * (P - t) * rho if eta_hat else 0
    T_M = P * (P - t) * eta_hat
    J_U = K_U * (P - t) * rho
    T_U = -(-J_U // min(K_U, alpha)) if K_U else 0
    return dict(K_M=K_M, K_U=K_U, J_M=J_M, T_M=T_M, J_U=J_U, T_U=T_U)


@lru_cache(maxsize=65536)
def _theorem_dof(K_M: int, K_U: int, eta_hat: int, params: SystemParams) -> Fraction:
    P, t, alpha, gamma = params.P, params.t_bar, params.alpha, params.gamma
    if eta_hat == 0:
        # Unicast only: no multicast terms, subpackets of size 1/alpha.
        if K_U == 0:
            raise ParameterError("DoF undefined for an empty network")
        J_U = K_U * (P - P * gamma) * alpha
        return Fraction(J_U) / math.ceil(J_U / min(K_U, alpha))
    rho = eta_hat * t + alpha
    if K_U == 0:
        return K_M * gamma + Fraction(K_M * alpha, P * eta_hat)
    numerator = K_M * (P - t) * rho + K_U * (P - P * gamma) * rho
    if K_U < alpha:
        return Fraction(numerator) / (P * (P - t) * eta_hat + (P - P * gamma) * rho)
    return Fraction(numerator) / (
        P * (P - t) * eta_hat + math.ceil(K_U * (P - P * gamma) * rho / alpha)
    )


def closed_form_dof(lengths: Sequence[int], eta_hat: int, params: SystemParams) -> Fraction:
    """Achievable DoF of the hybrid scheme for the given profile lengths.

    ``eta_hat == 0`` means every user is served by unicast.
    """
    if len(lengths) != params.P:
        raise ParameterError(f"expected {params.P} profile lengths, got {len(lengths)}")
    if eta_hat < 0 or any(n < 0 for n in lengths):
        raise ParameterError("eta_hat and lengths must be non-negative")
    if sum(lengths) == 0:
        raise ParameterError("DoF undefined for an empty network")
    K_M, K_U = split_counts(lengths, eta_hat)
    return _theorem_dof(K_M, K_U, eta_hat, params)


def remark_dof(K: int, gamma, alpha: int, eta_avg, eta_hat: int) -> Fraction:
    """DoF under full multicasting, ``K*gamma + alpha*eta_avg/eta_hat``."""
    eta_avg = Fraction(eta_avg)
    if K < 1 or eta_hat < 1:
        raise ParameterError("full multicasting needs K >= 1 and eta_hat >= 1")
    if eta_hat < eta_avg:
        raise ParameterError("full multicasting needs eta_hat >= max length >= eta_avg")
    return K * Fraction(gamma) + alpha * eta_avg / eta_hat


@dataclass
class DofReport:
    eta_hat: int
    K_M: int
    K_U: int
    J_M: int
    T_M: int
    J_U: int
    T_U: int
    dof_closed_form: Fraction
    dof_counted: Fraction | None = None
    verified: bool = False
    max_suppression: int | None = None
    note: str = ""

    def render(self) -> str:
        lines = [f"eta_hat={self.eta_hat}"]
        for key in ("K_M", "K_U", "J_M", "T_M", "J_U", "T_U"):
            lines.append(f"{key}={getattr(self, key)}")
        for key in ("dof_counted", "dof_closed_form"):
            value = getattr(self, key)
            lines.append(f"{key}={_fmt(value)}")
        lines.append(f"verified={str(self.verified).lower()}")
        if self.max_suppression is not None:
            lines.append(f"max_suppression={self.max_suppression}")
        if self.note:
            lines.append(f"note={self.note}")
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    return f"{value.numerator}/{value.denominator} ({float(value):.12g})"


def verify_against_schedule(
    snapshot: NetworkSnapshot,
    eta_hat: int,
    params: SystemParams,
    *,
    selection: str = "highest-ids",
    rng: random.Random | None = None,
    enforce_budget: bool = True,
) -> DofReport:
    """Build the full CC + UC schedule, count it and compare with the closed form.

    Schedules that cannot be built (regime or assignment limits, or a
    nulling requirement above ``alpha - 1`` while ``enforce_budget`` is set)
    yield a report carrying the closed-form value only, with
    ``verified=False``.  A disagreement between counting and the closed
    form raises :class:`ScheduleMismatch`.
    """
    lengths = snapshot.lengths
    closed = closed_form_dof(lengths, eta_hat, params)
    plan = make_serving_plan(snapshot, eta_hat, selection, rng)
    J_M = T_M = 0
    widest = None
    if eta_hat > 0:
        try:
            txs, _ = realize(slot_schedule(params, eta_hat), plan, enforce_budget)
        except (UnsupportedRegimeError, InfeasibleAssignmentError, SuppressionBudgetError) as exc:
            expected = closed_form_counts(lengths, eta_hat, params)
            return DofReport(eta_hat, expected["K_M"], expected["K_U"], expected["J_M"],
                             expected["T_M"], expected["J_U"], expected["T_U"], closed,
                             note=f"schedule-unverified: {exc}")
        J_M = sum(len(tx.streams) for tx in txs)
        T_M = len(txs)
        widest = max((len(s.suppression) for tx in txs for s in tx.streams), default=0)
    uc = run_uc_step(plan, params)
    counted = Fraction(J_M + uc.J_U, T_M + uc.T_U)
    report = DofReport(eta_hat, plan.K_M, plan.K_U, J_M, T_M, uc.J_U, uc.T_U, closed,
                       counted, True, widest)
    if counted != closed:
        raise ScheduleMismatch(
            f"counted DoF {counted} != closed form {closed} for lengths {lengths}, eta_hat={eta_hat}"
        )
    return report


@dataclass
class DofCurve:
    points: list[tuple[int, Fraction]] = field(default_factory=list)
    eta_star: int = 0
    dof_max: Fraction = Fraction(0)


def optimize_eta_hat(lengths: Sequence[int], params: SystemParams) -> DofCurve:
    """Line search over eta_hat in {0, ..., max length}; smallest maximizer wins."""
    if sum(lengths) < 1:
        raise ParameterError("need at least one user")
    points = [(e, closed_form_dof(lengths, e, params)) for e in range(max(lengths) + 1)]
    best = max(d for _, d in points)
    eta_star = next(e for e, d in points if d == best)
    return DofCurve(points, eta_star, best)

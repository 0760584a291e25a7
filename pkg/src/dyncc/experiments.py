"""Scenario configs, profile-length generation and the parameter sweeps.

Sweeps return rows of exact values; :func:`write_csv` renders them with
12 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .dof_analytics import (
    closed_form_dof,
    optimize_eta_hat,
    verify_against_schedule,
)
from .errors import NoFeasibleDistributionError, ParameterError
from .system_model import (
    POLICIES,
    ChurnEvent,
    NetworkSnapshot,
    SystemParams,
    apply_churn,
)

__all__ = [
    "ScenarioConfig",
    "LengthDistribution",
    "sigma_squared",
    "compositions",
    "generate_lengths",
    "sweep_eta",
    "sweep_sigma",
    "simulate_dynamics",
    "write_csv",
    "format_cell",
    "uniform_benchmark",
    "SWEEP_ETA_COLUMNS",
    "SWEEP_SIGMA_COLUMNS",
    "DYNAMICS_COLUMNS",
]

SWEEP_ETA_COLUMNS = ("eta_hat", "eta_ratio", "dof", "dof_norm", "verified")
SWEEP_SIGMA_COLUMNS = ("sigma", "dof_M", "dof_opt", "ratio", "uc_only_ratio")
DYNAMICS_COLUMNS = ("interval", "K", "lengths", "eta_hat", "dof", "verified")


def _exact(x) -> Fraction:
    # str() keeps 0.1 as 1/10 instead of the binary expansion
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class LengthDistribution:
    lengths: tuple[int, ...]
    sigma_sq: Fraction

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_sq)

    @property
    def eta_avg(self) -> Fraction:
        return Fraction(sum(self.lengths), len(self.lengths))


def sigma_squared(lengths: Sequence[int]) -> Fraction:
    """Population variance of the profile lengths, exactly."""
    P = len(lengths)
    avg = Fraction(sum(lengths), P)
    return sum((n - avg) ** 2 for n in lengths) / P


def compositions(K: int, P: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """Non-increasing P-tuples of non-negative integers summing to K."""
    cap = K if cap is None else cap
    if P == 1:
        if K <= cap:
            yield (K,)
        return
    for first in range(min(K, cap), -1, -1):
        if first * P < K:
            break
        for rest in compositions(K - first, P - 1, first):
            yield (first,) + rest


def generate_lengths(
    K: int,
    P: int,
    sigma_target,
    tolerance=0,
    mode: str = "enumerate",
    seed: int | None = None,
    samples: int | None = None,
) -> list[LengthDistribution]:
    """Sorted length vectors whose spread is within ``tolerance`` of ``sigma_target``.

    The window test is done on squares with exact rationals, so
    ``tolerance=0`` selects exact matches only.  ``mode="sample"`` returns
    ``samples`` members drawn with ``seed`` (all of them if fewer exist).
    """
    if K < 0 or P < 1:
        raise ParameterError("need K >= 0 and P >= 1")
    target, tol = _exact(sigma_target), _exact(tolerance)
    if target < 0 or tol < 0:
        raise ParameterError("sigma_target and tolerance must be non-negative")
    lo, hi = max(target - tol, Fraction(0)), target + tol
    found = []
    for lengths in compositions(K, P):
        s2 = sigma_squared(lengths)
        if lo * lo <= s2 <= hi * hi:
            found.append(LengthDistribution(lengths, s2))
    if not found:
        raise NoFeasibleDistributionError(
            f"no length vector with K={K}, P={P} has sigma within {tolerance} of {sigma_target}"
        )
    if mode == "enumerate":
        return found
    if mode == "sample":
        if samples is None or samples >= len(found):
            return found
        picks = sorted(random.Random(seed).sample(range(len(found)), samples))
        return [found[i] for i in picks]
    raise ParameterError(f"unknown generation mode {mode!r}")


def sweep_eta(lengths: Sequence[int], params: SystemParams, verify: bool = True) -> list[dict]:
    """One row per eta_hat in {0, ..., max length}.

    When ``verify`` is set every row whose schedule can be built is checked
    against the counted DoF.
    """
    curve = optimize_eta_hat(lengths, params)
    top = max(lengths)
    snapshot = NetworkSnapshot.from_lengths(lengths) if verify else None
    rows = []
    for eta_hat, dof in curve.points:
        verified = False
        if verify:
            report = verify_against_schedule(snapshot, eta_hat, params)
            verified = report.verified
        rows.append({
            "eta_hat": eta_hat,
            "eta_ratio": Fraction(eta_hat, top),
            "dof": dof,
            "dof_norm": dof / curve.dof_max,
            "verified": verified,
        })
    return rows


def uniform_benchmark(K: int, params: SystemParams) -> Fraction:
    """DoF of the multicast-only uniform case, K*gamma + alpha."""
    return K * params.gamma + params.alpha


def sweep_sigma(distributions: Sequence[LengthDistribution], params: SystemParams) -> list[dict]:
    """Best hybrid DoF and unicast-only DoF relative to the uniform benchmark."""
    rows = []
    for dist in distributions:
        K = sum(dist.lengths)
        opt = uniform_benchmark(K, params)
        best = optimize_eta_hat(dist.lengths, params).dof_max
        uc_only = closed_form_dof(dist.lengths, 0, params)
        rows.append({
            "sigma": dist.sigma,
            "dof_M": best,
            "dof_opt": opt,
            "ratio": best / opt,
            "uc_only_ratio": uc_only / opt,
        })
    return rows


def simulate_dynamics(
    snapshot: NetworkSnapshot,
    trace: Sequence[Sequence[ChurnEvent]],
    params: SystemParams,
    eta_policy: str = "optimize",
    eta_hat: int | None = None,
    join_policy: str = "least-loaded",
    seed: int = 0,
    verify: bool = True,
) -> list[dict]:
    """Replay churn interval by interval and report the DoF of each interval.

    Interval 0 is the initial snapshot; interval ``i`` applies ``trace[i-1]``.
    """
    if eta_policy not in ("fixed", "optimize"):
        raise ParameterError(f"unknown eta policy {eta_policy!r}")
    if eta_policy == "fixed" and eta_hat is None:
        raise ParameterError("fixed eta policy needs eta_hat")
    if join_policy not in POLICIES:
        raise ParameterError(f"unknown join policy {join_policy!r}")
    rng = random.Random(seed)
    rows = []
    for interval in range(len(trace) + 1):
        if interval:
            snapshot = apply_churn(snapshot, trace[interval - 1], join_policy, rng)
        lengths = snapshot.lengths
        if snapshot.K == 0:
            rows.append({"interval": interval, "K": 0, "lengths": lengths,
                         "eta_hat": None, "dof": None, "verified": False})
            continue
        e = optimize_eta_hat(lengths, params).eta_star if eta_policy == "optimize" else eta_hat
        if verify:
            report = verify_against_schedule(snapshot, e, params)
            dof, ok = report.dof_closed_form, report.verified
        else:
            dof, ok = closed_form_dof(lengths, e, params), False
        rows.append({"interval": interval, "K": snapshot.K, "lengths": lengths,
                     "eta_hat": e, "dof": dof, "verified": ok})
    return rows


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Fraction, float)):
        return format(float(value), ".12g")
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def write_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row[c]) for c in columns])
    return buf.getvalue()


@dataclass
class ScenarioConfig:
    """Scenario description loaded from a JSON document.

    Exactly one of ``lengths``, ``K`` + ``sigma_target`` or an explicit
    ``initial_users`` list (id and 1-based profile) must be given.
    ``sigma_target`` may be a list for sigma sweeps, or ``"all"`` to take
    every sorted length vector of ``K`` users.
    """

    P: int
    t_bar: int
    alpha: int
    lengths: tuple[int, ...] | None = None
    K: int | None = None
    sigma_target: float | list | str | None = None
    sigma_tolerance: float = 0.5
    samples: int | None = None
    seed: int = 0
    eta_hat: int | str = "sweep"
    join_policy: str = "least-loaded"
    selection: str = "highest-ids"
    eta_policy: str = "optimize"
    trace: list = field(default_factory=list)
    initial_users: list | None = None
    verify: bool = True
    output: str | None = None

    def __post_init__(self):
        has_lengths = self.lengths is not None
        has_sigma = self.K is not None or self.sigma_target is not None
        has_users = self.initial_users is not None
        if has_lengths + has_sigma + has_users != 1:
            raise ParameterError(
                "give exactly one of 'lengths', 'K' with 'sigma_target', or 'initial_users'"
            )
        if has_sigma and (self.K is None or self.sigma_target is None):
            raise ParameterError("'K' and 'sigma_target' must be given together")
        if has_lengths:
            self.lengths = tuple(int(n) for n in self.lengths)
            if len(self.lengths) != self.P:
                raise ParameterError(f"'lengths' must have P = {self.P} entries")
        if not (self.eta_hat == "sweep" or isinstance(self.eta_hat, int)):
            raise ParameterError("'eta_hat' must be an integer or \"sweep\"")
        self.params  # validates P, t_bar, alpha

    @property
    def params(self) -> SystemParams:
        return SystemParams(alpha=self.alpha, P=self.P, t_bar=self.t_bar)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        doc = json.loads(text)
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**doc)

    def targets(self) -> list:
        if self.sigma_target is None:
            return []
        return list(self.sigma_target) if isinstance(self.sigma_target, list) else [self.sigma_target]

    def distributions(self) -> list[LengthDistribution]:
        """Length vectors selected by this config, in deterministic order."""
        if self.initial_users is not None:
            lengths = self.snapshot().lengths
            return [LengthDistribution(lengths, sigma_squared(lengths))]
        if self.lengths is not None:
            return [LengthDistribution(self.lengths, sigma_squared(self.lengths))]
        if self.sigma_target == "all":
            return [LengthDistribution(c, sigma_squared(c)) for c in compositions(self.K, self.P)]
        mode = "sample" if self.samples else "enumerate"
        out = []
        for n, target in enumerate(self.targets()):
            out.extend(generate_lengths(self.K, self.P, target, self.sigma_tolerance, mode,
                                        seed=self.seed + n, samples=self.samples))
        return out

    def snapshot(self) -> NetworkSnapshot:
        if self.initial_users is not None:
            pairs = tuple((int(u["id"]), int(u["profile"]) - 1) for u in self.initial_users)
            return NetworkSnapshot(P=self.P, assignment=pairs)
        return NetworkSnapshot.from_lengths(self.distributions()[0].lengths)

    def churn_trace(self) -> list[list[ChurnEvent]]:
        """``trace`` is a list of intervals, each a list of {kind, user} events."""
        return [
            [ChurnEvent(time=i, kind=e["kind"], user=int(e["user"])) for e in events]
            for i, events in enumerate(self.trace, 1)
        ]

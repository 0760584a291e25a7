"""System parameters, cyclic placement and the user/profile assignment.

Profiles and packets are indexed from 0 internally.  User ids are opaque
integers chosen by the caller (the worked examples use 1, 2, ...).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParameterError, SnapshotError

__all__ = [
    "SystemParams",
    "DerivedParams",
    "NetworkSnapshot",
    "ChurnEvent",
    "POLICIES",
    "build_placement_matrix",
    "cache_contents",
    "caches",
    "assign_profile",
    "apply_churn",
    "dump_snapshot",
    "load_snapshot",
]

POLICIES = ("least-loaded", "round-robin", "seeded-random")


@dataclass(frozen=True)
class DerivedParams:
    """Quantities fixed by the unifying profile length ``eta_hat``.

    ``eta_hat == 0`` is the unicast-only mode: there is no virtual network,
    so ``alpha_bar`` and ``b`` are ``None`` and ``rho`` falls back to alpha.
    """

    eta_hat: int
    alpha_bar: int | None
    b: int | None
    rho: int


@dataclass(frozen=True)
class SystemParams:
    """Spatial multiplexing gain ``alpha`` and cache ratio ``t_bar / P``."""

    alpha: int
    P: int
    t_bar: int

    def __post_init__(self):
        for name in ("alpha", "P", "t_bar"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
        if self.alpha < 1:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if not 0 < self.t_bar < self.P:
            raise ParameterError(f"need 0 < t_bar < P, got t_bar={self.t_bar}, P={self.P}")
        if math.gcd(self.t_bar, self.P) != 1:
            raise ParameterError(f"gcd(t_bar, P) must be 1, got t_bar={self.t_bar}, P={self.P}")

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.t_bar, self.P)

    @classmethod
    def from_gamma(cls, alpha: int, gamma) -> "SystemParams":
        g = Fraction(gamma)
        return cls(alpha=alpha, P=g.denominator, t_bar=g.numerator)

    def derived(self, eta_hat: int) -> DerivedParams:
        if eta_hat < 0:
            raise ParameterError(f"eta_hat must be non-negative, got {eta_hat}")
        if eta_hat == 0:
            return DerivedParams(0, None, None, self.alpha)
        alpha_bar = -(-self.alpha // eta_hat)
        b = (self.alpha - 1) % eta_hat + 1
        return DerivedParams(eta_hat, alpha_bar, b, eta_hat * self.t_bar + self.alpha)


def build_placement_matrix(P: int, t_bar: int) -> np.ndarray:
    """Return the P x P binary placement matrix.

    Row 0 starts with ``t_bar`` ones; each following row is the previous
    one shifted circularly to the right, so ``V[p, c] == 1`` exactly when
    ``(c - p) mod P < t_bar``.
    """
    if not (isinstance(P, (int, np.integer)) and isinstance(t_bar, (int, np.integer))):
        raise ParameterError("P and t_bar must be integers")
    if not 0 < t_bar < P:
        raise ParameterError(f"need 0 < t_bar < P, got t_bar={t_bar}, P={P}")
    first = np.zeros(P, dtype=np.int8)
    first[:t_bar] = 1
    return np.stack([np.roll(first, p) for p in range(P)])


def caches(packet: int, profile: int, P: int, t_bar: int) -> bool:
    """Scalar form of the placement rule, used on hot paths."""
    return (profile - packet) % P < t_bar


def cache_contents(V: np.ndarray, profile: int) -> frozenset[int]:
    """Packet indices stored by every user of ``profile``."""
    P = V.shape[0]
    if not 0 <= profile < P:
        raise ParameterError(f"profile {profile} out of range [0, {P})")
    return frozenset(int(p) for p in np.flatnonzero(V[:, profile]))


@dataclass(frozen=True)
class ChurnEvent:
    time: int
    kind: str  # "join" | "leave"
    user: int

    def __post_init__(self):
        if self.kind not in ("join", "leave"):
            raise ParameterError(f"unknown churn event kind {self.kind!r}")


@dataclass(frozen=True)
class NetworkSnapshot:
    """Users present in one interval and the profile each one follows.

    ``last_profile`` remembers the most recent assignment so that the
    round-robin policy can continue its cycle.
    """

    P: int
    assignment: tuple[tuple[int, int], ...] = ()
    last_profile: int | None = field(default=None, compare=False)
    _by_user: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        by_user = {}
        for user, profile in self.assignment:
            if user in by_user:
                raise SnapshotError(f"user {user} assigned twice")
            if not 0 <= profile < self.P:
                raise SnapshotError(f"profile {profile} out of range for user {user}")
            by_user[user] = profile
        object.__setattr__(self, "assignment", tuple(sorted(by_user.items())))
        object.__setattr__(self, "_by_user", by_user)

    @classmethod
    def from_groups(cls, groups: Sequence[Iterable[int]]) -> "NetworkSnapshot":
        """Build from one list of user ids per profile (profile 0 first)."""
        pairs = [(u, p) for p, users in enumerate(groups) for u in users]
        return cls(P=len(groups), assignment=tuple(pairs))

    @classmethod
    def from_lengths(cls, lengths: Sequence[int], first_id: int = 1) -> "NetworkSnapshot":
        """Consecutive ids, filling profile 0 first."""
        groups, next_id = [], first_id
        for n in lengths:
            if n < 0:
                raise SnapshotError(f"negative profile length {n}")
            groups.append(range(next_id, next_id + n))
            next_id += n
        return cls.from_groups(groups)

    @property
    def profile_of(self) -> Mapping[int, int]:
        return dict(self._by_user)

    @property
    def K(self) -> int:
        return len(self._by_user)

    @property
    def lengths(self) -> tuple[int, ...]:
        counts = [0] * self.P
        for p in self._by_user.values():
            counts[p] += 1
        return tuple(counts)

    def users_of(self, profile: int) -> list[int]:
        return sorted(u for u, p in self._by_user.items() if p == profile)

    def __contains__(self, user) -> bool:
        return user in self._by_user

    def with_user(self, user: int, profile: int) -> "NetworkSnapshot":
        if user in self._by_user:
            raise SnapshotError(f"user {user} already present")
        return NetworkSnapshot(self.P, self.assignment + ((user, profile),), profile)

    def without_user(self, user: int) -> "NetworkSnapshot":
        if user not in self._by_user:
            raise SnapshotError(f"user {user} is not present")
        pairs = tuple(pair for pair in self.assignment if pair[0] != user)
        return NetworkSnapshot(self.P, pairs, self.last_profile)


def assign_profile(
    snapshot: NetworkSnapshot,
    user: int,
    policy: str = "least-loaded",
    rng: random.Random | None = None,
) -> NetworkSnapshot:
    """Add ``user`` to the profile chosen by ``policy``.

    least-loaded picks the shortest profile (lowest index on ties),
    round-robin continues after ``snapshot.last_profile``, and
    seeded-random draws uniformly from ``rng``.
    """
    if user in snapshot:
        raise SnapshotError(f"user {user} already present")
    if policy == "least-loaded":
        lengths = snapshot.lengths
        profile = lengths.index(min(lengths))
    elif policy == "round-robin":
        last = snapshot.last_profile
        profile = 0 if last is None else (last + 1) % snapshot.P
    elif policy == "seeded-random":
        if rng is None:
            raise ParameterError("seeded-random policy needs an rng")
        profile = rng.randrange(snapshot.P)
    else:
        raise ParameterError(f"unknown assignment policy {policy!r}")
    return snapshot.with_user(user, profile)


def apply_churn(
    snapshot: NetworkSnapshot,
    events: Sequence[ChurnEvent],
    policy: str = "least-loaded",
    rng: random.Random | None = None,
) -> NetworkSnapshot:
    times = [e.time for e in events]
    if times != sorted(times):
        raise ParameterError("churn events must be time-ordered")
    for event in events:
        if event.kind == "join":
            snapshot = assign_profile(snapshot, event.user, policy, rng)
        else:
            snapshot = snapshot.without_user(event.user)
    return snapshot


def dump_snapshot(snapshot: NetworkSnapshot, params: SystemParams) -> str:
    """Serialize to JSON; profiles are written with 1-based labels."""
    if snapshot.P != params.P:
        raise ParameterError("snapshot and params disagree on P")
    doc = {
        "P": params.P,
        "t_bar": params.t_bar,
        "alpha": params.alpha,
        "lengths": list(snapshot.lengths),
        "users": [{"id": u, "profile": p + 1} for u, p in snapshot.assignment],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_snapshot(text: str) -> tuple[NetworkSnapshot, SystemParams]:
    doc = json.loads(text)
    params = SystemParams(alpha=doc["alpha"], P=doc["P"], t_bar=doc["t_bar"])
    pairs = tuple((int(u["id"]), int(u["profile"]) - 1) for u in doc["users"])
    snapshot = NetworkSnapshot(P=params.P, assignment=pairs)
    if "lengths" in doc and tuple(doc["lengths"]) != snapshot.lengths:
        raise SnapshotError("lengths field does not match the user list")
    return snapshot, params

"""Per-timeslot rate allocation for the seven scheduling policies.

Every allocator is demand-capped: within a slot of length ``slot_length`` a
flow can use at most ``remaining / slot_length``, so capacity a finishing flow
does not need passes down the priority list in the same slot.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError, InvariantError


class PolicyKind(enum.Enum):
    FCFS = "fcfs"
    SRPT = "srpt"
    FAIR = "fair"
    EDF_FCFS_DF = "edf-fcfs-df"
    EDF_SRPT_DF = "edf-srpt-df"
    EDF_FCFS_DL = "edf-fcfs-dl"
    EDF_SRPT_DL = "edf-srpt-dl"

    @classmethod
    def parse(cls, text: "str | PolicyKind") -> "PolicyKind":
        if isinstance(text, cls):
            return text
        try:
            return cls(text)
        except ValueError:
            names = ", ".join(p.value for p in cls)
            raise ConfigError(f"unknown policy {text!r} (expected one of: {names})") from None

    @property
    def is_edf(self) -> bool:
        return self.value.startswith("edf-")

    @property
    def deadline_first(self) -> bool:
        return self.value.endswith("-df")

    @property
    def regular_policy(self) -> "PolicyKind":
        """Policy applied to regular traffic (FCFS or SRPT) in an EDF combination."""
        if not self.is_edf:
            return self
        return PolicyKind.SRPT if "srpt" in self.value else PolicyKind.FCFS


#: integer codes used by the compiled engine
POLICY_CODES = {p: i for i, p in enumerate(PolicyKind)}


@dataclass
class ActiveFlow:
    id: int
    arrival: float
    remaining: float
    deadline: float | None = None

    @property
    def is_deadline(self) -> bool:
        return self.deadline is not None


Allocation = dict  # flow id -> rate


def order_fcfs(active: Iterable[ActiveFlow]) -> list[ActiveFlow]:
    return sorted(active, key=lambda f: (f.arrival, f.id))


def order_srpt(active: Iterable[ActiveFlow]) -> list[ActiveFlow]:
    return sorted(active, key=lambda f: (f.remaining, f.arrival, f.id))


def order_edf(active: Iterable[ActiveFlow]) -> list[ActiveFlow]:
    active = list(active)
    for f in active:
        if not f.is_deadline:
            raise InvariantError(f"order_edf got regular flow {f.id}")
    return sorted(active, key=lambda f: (f.deadline, f.arrival, f.id))


def priority_order(policy: PolicyKind, active: Iterable[ActiveFlow]) -> list[ActiveFlow]:
    """Strict priority list for a serial policy.

    For FAIR this is ascending remaining volume, the order in which flows
    finish under equal sharing.
    """
    policy = PolicyKind.parse(policy)
    if policy is PolicyKind.FCFS:
        return order_fcfs(active)
    if policy in (PolicyKind.SRPT, PolicyKind.FAIR):
        return order_srpt(active)
    deadline, regular = [], []
    for f in active:
        (deadline if f.is_deadline else regular).append(f)
    ordered_regular = order_srpt(regular) if policy.regular_policy is PolicyKind.SRPT else order_fcfs(regular)
    ordered_deadline = order_edf(deadline)
    if policy.deadline_first:
        return ordered_deadline + ordered_regular
    return ordered_regular + ordered_deadline


def allocate_by_priority(ordered: Sequence[ActiveFlow], capacity: float, slot_length: float) -> Allocation:
    residual = capacity
    alloc = {}
    for f in ordered:
        rate = min(residual, f.remaining / slot_length) if residual > 0 else 0.0
        alloc[f.id] = rate
        residual -= rate
    return alloc


def allocate_fair(active: Iterable[ActiveFlow], capacity: float, slot_length: float) -> Allocation:
    """Max-min fair (water-filling) split of ``capacity`` over per-slot demands."""
    flows = order_srpt(active)
    alloc = {}
    residual = capacity
    for i, f in enumerate(flows):
        share = residual / (len(flows) - i)
        demand = f.remaining / slot_length
        if demand <= share:
            alloc[f.id] = demand
            residual -= demand
        else:
            for g in flows[i:]:
                alloc[g.id] = share
            break
    return alloc


def allocate_edf_combo(
    active: Iterable[ActiveFlow],
    capacity: float,
    slot_length: float,
    regular_policy: PolicyKind,
    deadline_first: bool,
) -> Allocation:
    regular_policy = PolicyKind.parse(regular_policy)
    if regular_policy not in (PolicyKind.FCFS, PolicyKind.SRPT):
        raise ConfigError(f"EDF combinations pair with fcfs or srpt, not {regular_policy.value}")
    name = f"edf-{regular_policy.value}-{'df' if deadline_first else 'dl'}"
    return allocate_by_priority(priority_order(PolicyKind(name), active), capacity, slot_length)


def allocate(policy, active: Iterable[ActiveFlow], capacity: float, slot_length: float) -> Allocation:
    policy = PolicyKind.parse(policy)
    if not capacity > 0:
        raise ConfigError(f"capacity must be > 0, got {capacity}")
    if not slot_length > 0:
        raise ConfigError(f"slot_length must be > 0, got {slot_length}")
    active = list(active)
    if policy is PolicyKind.FAIR:
        return allocate_fair(active, capacity, slot_length)
    if policy.is_edf:
        return allocate_edf_combo(active, capacity, slot_length, policy.regular_policy, policy.deadline_first)
    return allocate_by_priority(priority_order(policy, active), capacity, slot_length)

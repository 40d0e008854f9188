"""Slotted single-link simulation.

Time advances in slots of length ``delta``. At each slot boundary the flows
that arrived since the previous boundary become visible, the policy computes
one rate per flow, and the rates hold for the whole slot. A flow finishing
inside a slot is timestamped at the instant it would finish if the slot's
work were carried out in policy order (serially for priority policies,
equal-share for fair sharing), not at the slot end.

:func:`simulate` is the compiled fast path. :func:`step` and
``run(..., backend="python")`` are the readable reference built directly on
:mod:`mixsched.policy`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import policy as pol
from .errors import ConfigError, InvariantError
from .traffic import FlowSpec, Softness, Workload

ZERO_GUARD = 1e-12


@dataclass(frozen=True)
class SimConfig:
    policy: pol.PolicyKind = pol.PolicyKind.FCFS
    capacity: float = 1.0
    slot_length: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "policy", pol.PolicyKind.parse(self.policy))
        if not self.capacity > 0:
            raise ConfigError(f"capacity must be > 0, got {self.capacity}")
        if not self.slot_length > 0:
            raise ConfigError(f"slot_length must be > 0, got {self.slot_length}")


@dataclass(frozen=True)
class CompletionRecord:
    id: int
    arrival: float
    volume: float
    deadline: float | None
    softness: Softness | None
    completion: float

    @property
    def fct(self) -> float:
        return self.completion - self.arrival

    @property
    def is_deadline(self) -> bool:
        return self.deadline is not None


def visible_slots(arrival: np.ndarray, delta: float) -> np.ndarray:
    """Index of the first slot boundary ``k * delta`` at or after each arrival."""
    arrival = np.asarray(arrival, dtype=float)
    k = np.ceil(arrival / delta)
    k[k * delta < arrival] += 1
    back = (k > 0) & ((k - 1) * delta >= arrival)
    k[back] -= 1
    return k.astype(np.int64)


def _as_workload(workload) -> Workload:
    if isinstance(workload, Workload):
        return workload
    return Workload.from_flows(workload)


def simulate(workload: Workload | Sequence[FlowSpec], config: SimConfig) -> np.ndarray:
    """Completion time of every flow, indexed by flow id."""
    from ._kernel import simulate_slotted

    wl = _as_workload(workload)
    if len(wl) == 0:
        return np.empty(0)
    completion = simulate_slotted(
        wl.arrival,
        wl.volume,
        wl.deadline,
        visible_slots(wl.arrival, config.slot_length),
        pol.POLICY_CODES[config.policy],
        float(config.capacity),
        float(config.slot_length),
    )
    if np.isnan(completion).any():
        raise InvariantError("simulation ended with unfinished flows")
    return completion


def records(workload: Workload | Sequence[FlowSpec], completion: np.ndarray) -> list[CompletionRecord]:
    flows = workload.flows() if isinstance(workload, Workload) else list(workload)
    return [
        CompletionRecord(f.id, f.arrival, f.volume, f.deadline, f.softness, float(c))
        for f, c in zip(flows, completion)
    ]


# Reference implementation


@dataclass
class SimState:
    slot: int = 0
    pending: deque = field(default_factory=deque)
    active: list = field(default_factory=list)
    completed: list = field(default_factory=list)
    specs: dict = field(default_factory=dict)
    delivered: float = 0.0

    @classmethod
    def from_flows(cls, flows: Sequence[FlowSpec]) -> "SimState":
        flows = sorted(flows, key=lambda f: (f.arrival, f.id))
        return cls(pending=deque(flows), specs={f.id: f for f in flows})

    def slot_start(self, config: SimConfig) -> float:
        return self.slot * config.slot_length

    @property
    def finished(self) -> bool:
        return not self.pending and not self.active


def step(state: SimState, config: SimConfig) -> tuple[pol.Allocation, list[CompletionRecord]]:
    """Advance one slot; returns the slot's allocation and the flows that finished in it."""
    delta, cap = config.slot_length, config.capacity
    start = state.slot_start(config)
    while state.pending and state.pending[0].arrival <= start:
        f = state.pending.popleft()
        state.active.append(pol.ActiveFlow(f.id, f.arrival, f.volume, f.deadline))

    alloc = pol.allocate(config.policy, state.active, cap, delta)
    total = sum(alloc.values())
    if total > cap + 1e-9 or any(r < 0 for r in alloc.values()):
        raise InvariantError(f"slot {state.slot}: infeasible allocation {alloc}")

    order = pol.priority_order(config.policy, state.active)
    n = len(order)
    done = []
    cum = 0.0
    for i, f in enumerate(order):
        rate = alloc.get(f.id, 0.0)
        if rate == 0.0:
            continue
        r = f.remaining
        left = r - rate * delta
        if left < -1e-9:
            raise InvariantError(f"flow {f.id} overserved by {-left}")
        if rate >= r / delta or left <= ZERO_GUARD:
            if config.policy is pol.PolicyKind.FAIR:
                t = start + (cum + (n - i) * r) / cap
            else:
                t = start + (cum + r) / cap
            cum += r
            f.remaining = 0.0
            spec = state.specs[f.id]
            done.append(CompletionRecord(f.id, f.arrival, spec.volume, spec.deadline, spec.softness, t))
        else:
            f.remaining = left
        state.delivered += r - f.remaining

    if done:
        finished = {rec.id for rec in done}
        state.active = [f for f in state.active if f.id not in finished]
        state.completed.extend(done)
    state.slot += 1
    return alloc, done


def run(workload: Workload | Sequence[FlowSpec], config: SimConfig, backend: str = "compiled") -> list[CompletionRecord]:
    """Simulate until every flow completes; one record per flow, ordered by id."""
    if backend == "compiled":
        return records(workload, simulate(workload, config))
    if backend != "python":
        raise ConfigError(f"unknown backend {backend!r}")
    flows = workload.flows() if isinstance(workload, Workload) else list(workload)
    state = SimState.from_flows(flows)
    while not state.finished:
        if not state.active:
            first = state.pending[0].arrival
            state.slot = max(state.slot, int(visible_slots(np.array([first]), config.slot_length)[0]))
        step(state, config)
    return sorted(state.completed, key=lambda r: r.id)


def makespan(workload: Workload, completion: np.ndarray) -> float:
    """Time the link goes permanently idle."""
    return float(np.max(completion)) if len(completion) else math.nan

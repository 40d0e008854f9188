"""Exact continuous-time reference scheduler for checking the slotted engine.

Rates change only at arrivals and completions, so the schedule is advanced
event to event in closed form. Priority policies give the whole link to the
head of :func:`mixsched.policy.priority_order`; fair sharing splits it equally
among all active flows. Arithmetic is generic: pass ``fractions.Fraction``
arrivals, volumes and capacity to get exact rational completion times.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from . import policy as pol
from .engine import CompletionRecord
from .traffic import FlowSpec, Workload


def simulate_exact(workload: Workload | Sequence[FlowSpec], policy, capacity=1.0) -> list[CompletionRecord]:
    policy = pol.PolicyKind.parse(policy)
    flows = workload.flows() if isinstance(workload, Workload) else list(workload)
    flows.sort(key=lambda f: (f.arrival, f.id))
    specs = {f.id: f for f in flows}
    pending = deque(flows)
    active: list[pol.ActiveFlow] = []
    out = []
    now = flows[0].arrival * 0 if flows else 0

    while pending or active:
        if not active and pending[0].arrival > now:
            now = pending[0].arrival
        while pending and pending[0].arrival <= now:
            f = pending.popleft()
            active.append(pol.ActiveFlow(f.id, f.arrival, f.volume, f.deadline))

        n = len(active)
        if policy is pol.PolicyKind.FAIR:
            rate = capacity / n
            shortest = min(f.remaining for f in active)
            to_finish = shortest / rate
        else:
            head = pol.priority_order(policy, active)[0]
            to_finish = head.remaining / capacity

        if pending and pending[0].arrival - now < to_finish:
            dt = pending[0].arrival - now
            finishing = []
        else:
            dt = to_finish
            if policy is pol.PolicyKind.FAIR:
                finishing = [f for f in active if f.remaining == shortest]
            else:
                finishing = [head]

        if policy is pol.PolicyKind.FAIR:
            for f in active:
                f.remaining -= rate * dt
        else:
            head.remaining -= capacity * dt
        now += dt

        if finishing:
            gone = {f.id for f in finishing}
            for f in sorted(finishing, key=lambda f: f.id):
                s = specs[f.id]
                out.append(CompletionRecord(f.id, s.arrival, s.volume, s.deadline, s.softness, now))
            active = [f for f in active if f.id not in gone]

    return sorted(out, key=lambda r: r.id)

"""
The slotted engine against the exact event-driven schedule
==========================================================

Arrivals are only noticed at the next slot boundary. When every arrival falls
on a boundary the slotted schedule is exact; otherwise preemptive policies can
reorder flows, and the error for a single flow is not bounded by the slot length.
"""

import numpy as np

from mixsched import FlowSpec, SimConfig, Softness, Workload, simulate, simulate_exact

# A deadline flow arrives at 0.45, just before a regular flow would finish.
# Deadline-first policies preempt the regular flow at once, so it has 0.05
# left and waits behind the whole deadline flow. The slotted engine sees the
# deadline flow only at 0.5, by which time the regular flow is done.
flows = [FlowSpec(0, 0.0, 0.5), FlowSpec(1, 0.45, 2.0, 6.0, Softness.HARD)]
wl = Workload.from_flows(flows)
for delta in (0.1, 0.01):
    print("delta", delta, simulate(wl, SimConfig("edf-fcfs-df", 1.0, delta)))
print("exact", [r.completion for r in simulate_exact(flows, "edf-fcfs-df")])
# At delta=0.01 the boundary falls on 0.45 itself and the two agree.

# Continuous arrivals: compare every flow of a random workload.
from mixsched import Exponential, WorkloadConfig, generate_workload

wl = generate_workload(WorkloadConfig(1.0, 20, Exponential(), 0.5, seed=4))
for policy in ("fcfs", "srpt", "fair", "edf-srpt-dl"):
    exact = np.array([r.completion for r in simulate_exact(wl, policy)])
    for delta in (0.1, 0.01):
        err = np.abs(simulate(wl, SimConfig(policy, 1.0, delta)) - exact)
        print(f"{policy:12s} delta={delta:<5g} max err {err.max():.4f}  mean err {err.mean():.4f}")

# Snap the arrivals to the slot grid and the two agree to rounding.
snapped = [FlowSpec(f.id, round(f.arrival, 1), f.volume, None if f.deadline is None else max(f.deadline, round(f.arrival, 1) + f.volume), f.softness) for f in wl.flows()]
exact = np.array([r.completion for r in simulate_exact(snapped, "srpt")])
print("snapped srpt max err:", np.abs(simulate(Workload.from_flows(snapped), SimConfig("srpt")) - exact).max())

"""
One slot of each policy
=======================

Four flows are backlogged at the start of a 0.1-long slot on a unit link.
Flows 2 and 3 carry deadlines.
"""

from mixsched import ActiveFlow, PolicyKind, allocate

active = [
    ActiveFlow(0, arrival=0.0, remaining=3.0),
    ActiveFlow(1, arrival=1.0, remaining=0.04),
    ActiveFlow(2, arrival=2.0, remaining=1.0, deadline=9.0),
    ActiveFlow(3, arrival=3.0, remaining=2.0, deadline=5.0),
]

for policy in PolicyKind:
    rates = allocate(policy, active, capacity=1.0, slot_length=0.1)
    shown = "  ".join(f"{fid}:{r:.2f}" for fid, r in sorted(rates.items()))
    print(f"{policy.value:12s} {shown}")

# Flow 1 only needs 0.04 units, so its rate is capped at 0.4 and the leftover
# goes to the next flow in line. Fair sharing caps it too and splits the rest.

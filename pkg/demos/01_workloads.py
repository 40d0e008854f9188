"""
Mixed workloads: Poisson arrivals, two size laws, deadline and regular flows
============================================================================
"""

import numpy as np

from mixsched import Exponential, Pareto, WorkloadConfig, generate_workload

# Two size laws with the same mean of 1 unit. The Pareto minimum of 0.1 pins
# the shape at 10/9, so most flows are tiny and a few are huge.
light = Exponential(1.0)
heavy = Pareto(1.0, 0.1)
print("pareto shape:", heavy.shape)

cfg = WorkloadConfig(arrival_rate=1.0, flow_count=10000, size_distribution=heavy, regular_fraction=0.5, seed=0)
wl = generate_workload(cfg)

# Half the flows (in expectation) are regular; the rest carry a deadline of
# arrival + U[1, 4] times their ideal transfer time.
print("flows:", len(wl), "regular:", wl.regular.sum(), "deadline:", wl.is_deadline.sum())
print("median size:", np.median(wl.volume), "largest:", wl.volume.max())

# share of total volume carried by the 1% largest flows
top = np.sort(wl.volume)[-100:].sum() / wl.volume.sum()
print(f"top 1% of flows carry {top:.0%} of the bytes")

# A deadline flow is soft when it is more than twice the mean size.
dl = wl.is_deadline
print("soft deadline flows:", wl.soft.sum(), "of", dl.sum())
slack = (wl.deadline[dl] - wl.arrival[dl]) / wl.volume[dl]
print("slack range:", slack.min().round(3), slack.max().round(3))

# Same seed and fraction-only changes keep arrivals and sizes fixed, which is
# what makes the policy comparisons paired.
other = generate_workload(WorkloadConfig(1.0, 10000, heavy, 0.9, seed=0))
print("same arrivals:", np.array_equal(wl.arrival, other.arrival))
print("digest:", wl.digest())

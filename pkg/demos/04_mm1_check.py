"""
Sanity check against M/M/1
==========================

With only regular flows, exponential sizes of mean 1 and a unit link, FCFS is
an M/M/1 queue and fair sharing an M/M/1-PS queue. Both have mean sojourn
time 1 / (1 - rho).
"""

from mixsched import ExperimentConfig, run_experiment

for rate in (0.1, 0.5):
    cfg = ExperimentConfig(policies=["fcfs", "fair", "srpt"], regular_fractions=[1.0], distributions=["exponential"],
                           arrival_rates=[rate], flow_count=10000, repetitions=5)
    target = 1 / (1 - rate)
    for cell in run_experiment(cfg):
        print(f"rho={rate}  {cell.policy.value:5s} AFCT={cell.mean['afct']:.4f}  M/M/1={target:.4f}")

# The slotted engine holds each arrival until the next boundary, about
# delta/2 = 0.05 on average, so the simulated values run a few percent high.
# SRPT comes in under both, as it should.

"""
A small sweep and its CSV
=========================

The full grid (7 policies x 9 fractions x 2 laws x 2 loads x 20 replications)
takes a few minutes; this one runs in seconds. The CLI equivalent is

    mixsched sweep --config grid.json --out results/
"""

import sys

from mixsched import ExperimentConfig, emit_csv, run_experiment
from mixsched.experiment import parse_csv

cfg = ExperimentConfig(
    policies=["fcfs", "srpt", "fair", "edf-srpt-df", "edf-srpt-dl"],
    regular_fractions=[0.2, 0.5, 0.8],
    distributions=["pareto"],
    arrival_rates=[1.0],
    flow_count=2000,
    repetitions=3,
)
results = run_experiment(cfg)
text = emit_csv(results)
sys.stdout.write(text)

# afct_norm is relative to the best policy at the same regular fraction.
for row in parse_csv(text):
    if row["afct_norm"] == 1.0:
        print("best AFCT at fraction", row["regular_fraction"], "->", row["policy"])

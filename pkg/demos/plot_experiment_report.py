"""
A seeded multi-case experiment
==============================

Runs the randomized protocol (random evidence sets, many samples per case)
on a synthetic network and prints the CSV report.
"""

from bnhardness import ExperimentConfig, run_experiment, write_report
from bnhardness.generate import random_network

net = random_network(7, 40, max_parents=3, cardinalities=(2, 3), zero_density=0.15)
config = ExperimentConfig(cases=10, evidence_min=10, evidence_max=20,
                          samples_per_case=20_000, seed=42)
report = run_experiment(net, config, name="synthetic40", threads=4)
print(write_report(report, "csv"))
print("mean rejection rate:", report.mean_rejection_rate)
print("pooled rejection rate:", report.pooled_rejection_rate)

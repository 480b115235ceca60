"""
Likelihood weighting against exact enumeration
==============================================

Draws weighted samples from a random network with deterministic entries and
compares the observed rejection rate and Pr(e) estimate with exact values.
"""

import math

import numpy as np

from bnhardness import estimate_rejection_rate, exact_enumerate, select_evidence
from bnhardness.generate import random_network

rng = np.random.default_rng(9)
net = random_network(rng, 10, max_parents=3, cardinalities=(2, 3), zero_density=0.3)

for mode in ("forward", "uniform"):
    ev = select_evidence(net, (3, 5), mode, rng)
    exact = exact_enumerate(net, ev)
    for n in (1_000, 10_000, 100_000):
        st = estimate_rejection_rate(net, ev, n, seed=1)
        sigma = math.sqrt(exact.rejection * (1 - exact.rejection) / n)
        print(f"{mode:8s} N={n:6d} rejection {st.rejection_rate:.4f} "
              f"(exact {exact.rejection:.4f}, sigma {sigma:.4f})  "
              f"Pr(e) {st.pe_estimate:.5f} (exact {exact.pe:.5f})")

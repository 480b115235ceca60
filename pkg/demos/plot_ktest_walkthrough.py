"""
The k-test on two tiny networks
===============================

Builds a two-node network with one deterministic CPT entry, computes its
k-test statistics, and prints the k-CNF encoding in DIMACS form.
"""

from bnhardness import BayesianNetwork, Evidence, classify, encode, k_test, write_dimacs
from bnhardness.generate import tiny_network

# A is a fair coin; B never takes state 1 when A = 0.
net = tiny_network()
evidence = Evidence({1: 1})

res = k_test(net, evidence)
print(f"n={res.n} m={res.m} k={res.k} r={res.r} ratio={res.ratio} -> {res.hardness_class}")

# One CPT clause (not (A=0 and B=1)) plus a unit clause for the evidence B=1
cnf, mapping = encode(net, evidence)
print(write_dimacs(cnf, mapping))

# A five-state variable needs three bits; values 5, 6 and 7 are excluded by
# two "variable clauses" instead of three naive ones.
five = BayesianNetwork.from_tables([5], [[]], [[0.2] * 5])
cnf, mapping = encode(five)
for clause in cnf.clauses:
    print(clause.literals)
print(k_test(five))

# Thresholds on the ratio
for ratio in (0.0, 0.018, 0.112, 0.173, 0.46):
    print(ratio, classify(ratio))

import itertools

import numpy as np
import pytest

from bnhardness import BayesianNetwork, Evidence, joint_probability
from bnhardness.generate import random_network, tiny_network

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def tiny():
    return tiny_network()


@pytest.fixture
def card5():
    return BayesianNetwork.from_tables([5], [[]], [[0.2] * 5])


def small_random_network(seed):
    """<= 6 variables, cardinalities 2-5, 0-40% zeros, 0-2 evidence variables
    with uniformly drawn (possibly impossible) states."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    net = random_network(rng, n, max_parents=3, cardinalities=(2, 3, 4, 5),
                         zero_density=float(rng.uniform(0, 0.4)))
    size = int(rng.integers(0, min(2, n) + 1))
    chosen = rng.choice(n, size=size, replace=False)
    ev = Evidence({int(v): int(rng.integers(net.variables[v].cardinality)) for v in chosen})
    return net, ev


def all_configs(net):
    return itertools.product(*(range(c) for c in net.cardinalities))


def brute_force_models(cnf, mapping, net, evidence):
    """Compare every Boolean assignment against enumerated joint probabilities.

    Returns (satisfies, consistent) boolean vectors over all 2^n assignments,
    ordered so assignment a sets Boolean variable x to bit x-1 of a.
    """
    n = mapping.n_bool
    a = np.arange(2 ** n, dtype=np.int64)
    bits = np.zeros((a.size, n + 1), dtype=bool)
    for x in range(1, n + 1):
        bits[:, x] = (a >> (x - 1)) & 1
    sat = np.ones(a.size, dtype=bool)
    for clause in cnf.clauses:
        c = np.zeros(a.size, dtype=bool)
        for lit in clause.literals:
            c |= bits[:, abs(lit)] if lit > 0 else ~bits[:, abs(lit)]
        sat &= c

    positive = {cfg: joint_probability(net, cfg) > 0 and evidence.consistent_with(cfg)
                for cfg in all_configs(net)}
    values = []
    valid = np.ones(a.size, dtype=bool)
    for var, vbits in enumerate(mapping.bits):
        val = np.zeros(a.size, dtype=np.int64)
        for j, x in enumerate(vbits):
            val |= bits[:, x].astype(np.int64) << j
        valid &= val < net.variables[var].cardinality
        values.append(val)
    consistent = np.zeros(a.size, dtype=bool)
    for i in np.flatnonzero(valid):
        consistent[i] = positive[tuple(int(v[i]) for v in values)]
    return sat, consistent


def disjoint_copies(net, copies=2):
    """Union of independent copies of ``net`` (ids shifted per copy)."""
    cards, parents, tables = [], [], []
    for c in range(copies):
        off = c * net.n_variables
        cards += net.cardinalities
        parents += [[p + off for p in cpt.parents] for cpt in net.cpts]
        tables += [cpt.table for cpt in net.cpts]
    return BayesianNetwork.from_tables(cards, parents, tables)

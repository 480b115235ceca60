"""Random network generators for tests, benchmarks and demos."""
from __future__ import annotations

import numpy as np

from .model import BayesianNetwork


def random_cpt_rows(rng, n_rows: int, card: int, zero_density: float = 0.0) -> np.ndarray:
    """``n_rows`` random distributions over ``card`` states.

    Each entry is zeroed independently with probability ``zero_density``;
    a row that would lose every entry keeps one at random.
    """
    rows = rng.dirichlet(np.ones(card), size=n_rows)
    if zero_density > 0:
        mask = rng.random((n_rows, card)) < zero_density
        full = mask.all(axis=1)
        if full.any():
            keep = rng.integers(card, size=int(full.sum()))
            mask[np.flatnonzero(full), keep] = False
        rows = np.where(mask, 0.0, rows)
        rows /= rows.sum(axis=1, keepdims=True)
    return rows


def random_network(rng, n_variables: int, max_parents: int = 2,
                   cardinalities=(2,), zero_density: float = 0.0,
                   n_arcs: int | None = None) -> BayesianNetwork:
    """Random DAG whose edges point from lower to higher ids.

    ``cardinalities`` is the pool each variable's state count is drawn from.
    If ``n_arcs`` is given, arcs are spread so the total comes close to it
    while respecting ``max_parents``.
    """
    rng = np.random.default_rng(rng)
    cards = [int(rng.choice(cardinalities)) for _ in range(n_variables)]
    parents = []
    per_var = None if n_arcs is None else n_arcs / max(n_variables - 1, 1)
    for i in range(n_variables):
        limit = min(i, max_parents)
        if per_var is None:
            count = int(rng.integers(0, limit + 1))
        else:
            lo = int(per_var)
            count = min(limit, lo + int(rng.random() < per_var - lo))
        ps = sorted(int(p) for p in rng.choice(i, size=count, replace=False)) if count else []
        parents.append(ps)
    tables = []
    for i in range(n_variables):
        n_rows = int(np.prod([cards[p] for p in parents[i]], dtype=np.int64))
        tables.append(random_cpt_rows(rng, n_rows, cards[i], zero_density).ravel())
    return BayesianNetwork.from_tables(cards, parents, tables)


def tiny_network(zero: bool = True) -> BayesianNetwork:
    """Fair root A with child B; Pr(B=1 | A=0) = 0 when ``zero``."""
    b_given_a0 = [1.0, 0.0] if zero else [0.5, 0.5]
    return BayesianNetwork.from_tables(
        [2, 2], [[], [0]], [[0.5, 0.5], b_given_a0 + [0.5, 0.5]], names=["A", "B"])

"""Discrete Bayesian network data model.

A network is a list of variables plus one CPT per variable.  CPT tables are
stored flat with the parent configuration as the major index and the child
state varying fastest; parents are ordered as declared.  This is the layout
used by UAI files, so tables can be moved in and out without reshuffling.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

ROW_SUM_TOL = 1e-4
ENTRY_MAX_TOL = 1e-9


class ModelError(ValueError):
    """Base class for network construction and evaluation errors."""


class CycleError(ModelError):
    def __init__(self, edge: tuple[int, int]):
        self.edge = edge
        super().__init__(f"cycle detected through edge {edge[0]} -> {edge[1]}")


class StateError(ModelError):
    """A state index lies outside the cardinality of its variable."""


class CardinalityError(ModelError):
    pass


@dataclass(frozen=True)
class Variable:
    id: int
    cardinality: int
    name: str | None = None


@dataclass(frozen=True, eq=False)
class Cpt:
    child: int
    parents: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        table = np.array(self.table, dtype=np.float64).ravel()
        table.flags.writeable = False
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))

    def rows(self, child_card: int) -> np.ndarray:
        """Table viewed as (parent configurations, child states)."""
        return self.table.reshape(-1, child_card)

    def __eq__(self, other):
        if not isinstance(other, Cpt):
            return NotImplemented
        return (self.child == other.child and self.parents == other.parents
                and np.array_equal(self.table, other.table))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BayesianNetwork:
    """Variables and their CPTs; ``cpts[i]`` is the CPT of variable ``i``.

    Construction does not validate; call :func:`validate` (or
    :meth:`check`) before using a network read from an untrusted source.
    """

    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]
    _order: list = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))

    @classmethod
    def from_tables(cls, cardinalities: Sequence[int],
                    parents: Sequence[Sequence[int]],
                    tables: Sequence[Sequence[float]],
                    names: Sequence[str] | None = None) -> "BayesianNetwork":
        variables = [Variable(i, int(c), names[i] if names else None)
                     for i, c in enumerate(cardinalities)]
        cpts = [Cpt(i, tuple(parents[i]), tables[i])
                for i in range(len(cardinalities))]
        return cls(tuple(variables), tuple(cpts))

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def cardinalities(self) -> list[int]:
        return [v.cardinality for v in self.variables]

    def parents(self, var: int) -> tuple[int, ...]:
        return self.cpts[var].parents

    def parent_config_index(self, var: int, config) -> int:
        """Row index of ``var``'s CPT selected by the parent states in ``config``."""
        idx = 0
        for p in self.cpts[var].parents:
            idx = idx * self.variables[p].cardinality + int(config[p])
        return idx

    def check(self) -> "BayesianNetwork":
        problems = validate(self)
        if problems:
            raise ModelError("; ".join(problems))
        return self

    @property
    def n_arcs(self) -> int:
        return sum(len(c.parents) for c in self.cpts)

    @property
    def total_cpt_entries(self) -> int:
        return sum(c.table.size for c in self.cpts)


@dataclass(frozen=True)
class Evidence:
    """Observed states keyed by variable id."""

    assignments: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "assignments",
                           {int(k): int(v) for k, v in dict(self.assignments).items()})

    def __len__(self):
        return len(self.assignments)

    def __contains__(self, var):
        return var in self.assignments

    def __getitem__(self, var):
        return self.assignments[var]

    def items(self):
        return sorted(self.assignments.items())

    def variables(self) -> list[int]:
        return sorted(self.assignments)

    def check(self, net: BayesianNetwork) -> "Evidence":
        """Raise :class:`StateError` unless every observation fits ``net``."""
        for var, state in self.items():
            if not 0 <= var < net.n_variables:
                raise StateError(f"evidence variable {var} does not exist")
            card = net.variables[var].cardinality
            if not 0 <= state < card:
                raise StateError(
                    f"evidence state {state} out of range for variable {var} "
                    f"(cardinality {card})")
        return self

    def consistent_with(self, config) -> bool:
        return all(int(config[v]) == s for v, s in self.assignments.items())


def bit_width(cardinality: int) -> int:
    """Number of bits needed to log-encode ``cardinality`` states."""
    if cardinality < 1:
        raise CardinalityError(f"cardinality must be >= 1, got {cardinality}")
    return (int(cardinality) - 1).bit_length()


def validate(net: BayesianNetwork) -> list[str]:
    problems = []
    n = net.n_variables
    for i, v in enumerate(net.variables):
        if v.id != i:
            problems.append(f"variable at position {i} has id {v.id}")
        if v.cardinality < 1:
            problems.append(f"variable {i}: cardinality {v.cardinality} < 1")
    if len(net.cpts) != n:
        problems.append(f"{len(net.cpts)} CPTs for {n} variables")
        return problems
    if problems:
        return problems

    for i, cpt in enumerate(net.cpts):
        if cpt.child != i:
            problems.append(f"CPT at position {i} is for child {cpt.child}")
            continue
        bad = [p for p in cpt.parents if not 0 <= p < n]
        if bad:
            problems.append(f"CPT {i}: dangling parent ids {bad}")
            continue
        if len(set(cpt.parents)) != len(cpt.parents) or i in cpt.parents:
            problems.append(f"CPT {i}: repeated parent or self-loop {list(cpt.parents)}")
            continue
        card = net.variables[i].cardinality
        expected = card * int(np.prod([net.variables[p].cardinality
                                       for p in cpt.parents], dtype=np.int64))
        if cpt.table.size != expected:
            problems.append(f"CPT {i}: table has {cpt.table.size} entries, "
                            f"expected {expected}")
            continue
        t = cpt.table
        if not np.all(np.isfinite(t)):
            problems.append(f"CPT {i}: non-finite entries")
            continue
        if np.any(t < 0):
            problems.append(f"CPT {i}: negative entry at index {int(np.argmax(t < 0))}")
        if np.any(t > 1 + ENTRY_MAX_TOL):
            problems.append(f"CPT {i}: entry exceeds 1 at index "
                            f"{int(np.argmax(t > 1 + ENTRY_MAX_TOL))}")
        sums = cpt.rows(card).sum(axis=1)
        for row in np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL):
            problems.append(f"CPT {i} row {int(row)}: sums to {sums[row]:.6g}")

    if not problems:
        try:
            topological_order(net)
        except CycleError as exc:
            problems.append(str(exc))
    return problems


def topological_order(net: BayesianNetwork) -> list[int]:
    """Kahn's algorithm with ties broken by ascending id."""
    if net._order is not None:
        return list(net._order)
    n = net.n_variables
    children = [[] for _ in range(n)]
    indegree = [0] * n
    for cpt in net.cpts:
        for p in cpt.parents:
            children[p].append(cpt.child)
            indegree[cpt.child] += 1
    heap = [i for i in range(n) if indegree[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in children[v]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(heap, c)
    if len(order) < n:
        raise CycleError(_cycle_edge(net, set(range(n)) - set(order)))
    object.__setattr__(net, "_order", tuple(order))
    return order


def _cycle_edge(net, remaining):
    # every remaining node has a remaining parent; walk parents until a repeat
    v = min(remaining)
    seen = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = next(p for p in net.cpts[v].parents if p in remaining)
    # path[-1] has parent v, i.e. edge v -> path[-1]
    return v, path[-1]


def joint_probability(net: BayesianNetwork, config: Sequence[int]) -> float:
    """Product of the CPT entries selected by a full assignment."""
    if len(config) != net.n_variables:
        raise StateError(f"configuration has {len(config)} states for "
                         f"{net.n_variables} variables")
    for i, v in enumerate(net.variables):
        if not 0 <= int(config[i]) < v.cardinality:
            raise StateError(f"state {config[i]} out of range for variable {i} "
                             f"(cardinality {v.cardinality})")
    p = 1.0
    for i, cpt in enumerate(net.cpts):
        card = net.variables[i].cardinality
        f = cpt.table[net.parent_config_index(i, config) * card + int(config[i])]
        if f == 0.0:
            return 0.0
        p *= f
    return float(p)

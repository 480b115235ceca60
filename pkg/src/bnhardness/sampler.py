"""Likelihood weighting, rejection statistics and the experiment harness.

Samples are drawn in batches: each variable is visited once in topological
order and filled in for the whole batch with numpy, so cost is
``O(samples * variables)`` array work rather than Python loops.

Random streams come from :class:`numpy.random.SeedSequence`.  Case ``i`` of
an experiment seeded with ``s`` gets the 64-bit seed
``SeedSequence(s, spawn_key=(i,)).generate_state(1, uint64)[0]``; the row
records that value, so a single case can be re-run on its own.
"""
from __future__ import annotations

import math
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .ktest import KTestResult, k_test
from .model import BayesianNetwork, Evidence, ModelError, topological_order

DEFAULT_ENUM_CAP = 2 ** 24
_CHUNK_CELLS = 1 << 21  # samples * variables held in memory at once


class StateSpaceTooLarge(ModelError):
    def __init__(self, size: int, cap: int):
        self.size, self.cap = size, cap
        super().__init__(f"state space of {size} configurations exceeds cap {cap}")


class ExperimentError(RuntimeError):
    def __init__(self, case: int, cause: Exception):
        self.case = case
        super().__init__(f"case {case}: {cause}")


@dataclass(frozen=True)
class SampleOutcome:
    config: tuple[int, ...]
    weight: float

    @property
    def rejected(self) -> bool:
        return self.weight == 0.0


@dataclass(frozen=True)
class RejectionStats:
    total: int
    rejected: int
    rejection_rate: float
    pe_estimate: float
    weight_variance: float

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> "RejectionStats":
        total = int(weights.size)
        rejected = int(np.count_nonzero(weights == 0.0))
        var = float(np.var(weights, ddof=1)) if total > 1 else 0.0
        return cls(total, rejected, rejected / total, float(np.mean(weights)), var)


class ExactResult(NamedTuple):
    pe: float
    rejection: float
    weight_variance: float


class _Plan:
    """Per-network lookup tables for batch sampling."""

    def __init__(self, net: BayesianNetwork):
        self.order = topological_order(net)
        self.parents, self.strides, self.rows, self.cum, self.last_nz = [], [], [], [], []
        cards = net.cardinalities
        for i, cpt in enumerate(net.cpts):
            par = np.array(cpt.parents, dtype=np.intp)
            stride = np.ones(len(par), dtype=np.int64)
            for j in range(len(par) - 2, -1, -1):
                stride[j] = stride[j + 1] * cards[par[j + 1]]
            rows = cpt.rows(cards[i])
            self.parents.append(par)
            self.strides.append(stride)
            self.rows.append(rows)
            self.cum.append(np.cumsum(rows, axis=1))
            nz = rows > 0
            self.last_nz.append(rows.shape[1] - 1 - np.argmax(nz[:, ::-1], axis=1))

    def row_index(self, var, configs):
        par = self.parents[var]
        if par.size == 0:
            return np.zeros(configs.shape[0], dtype=np.int64)
        return configs[:, par].astype(np.int64) @ self.strides[var]


_plans: "weakref.WeakKeyDictionary[BayesianNetwork, _Plan]" = weakref.WeakKeyDictionary()


def _plan(net):
    plan = _plans.get(net)
    if plan is None:
        plan = _plans[net] = _Plan(net)
    return plan


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_batch(net: BayesianNetwork, evidence: Evidence, size: int, rng
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``size`` likelihood-weighted samples.

    Returns the configurations as a ``(size, n_variables)`` int32 array and
    their weights.  Rows are drawn by inverse CDF; a uniform draw is scaled
    by the row total and clipped to the last non-zero state, so slightly
    unnormalized rows can never select a zero-probability state.
    """
    rng = _as_rng(rng)
    plan = _plan(net)
    configs = np.zeros((size, net.n_variables), dtype=np.int32)
    weights = np.ones(size)
    for var in plan.order:
        idx = plan.row_index(var, configs)
        if var in evidence:
            state = evidence[var]
            configs[:, var] = state
            weights *= plan.rows[var][idx, state]
            continue
        cum = plan.cum[var][idx]
        u = rng.random(size) * cum[:, -1]
        state = np.count_nonzero(u[:, None] >= cum[:, :-1], axis=1)
        configs[:, var] = np.minimum(state, plan.last_nz[var][idx])
    return configs, weights


def likelihood_sample(net: BayesianNetwork, evidence: Evidence, rng) -> SampleOutcome:
    configs, weights = sample_batch(net, evidence, 1, rng)
    return SampleOutcome(tuple(int(s) for s in configs[0]), float(weights[0]))


def batch_joint_probability(net: BayesianNetwork, configs: np.ndarray) -> np.ndarray:
    plan = _plan(net)
    p = np.ones(configs.shape[0])
    for var in range(net.n_variables):
        p *= plan.rows[var][plan.row_index(var, configs), configs[:, var]]
    return p


def estimate_rejection_rate(net: BayesianNetwork, evidence: Evidence | None,
                            n_samples: int, seed=None,
                            check_support: bool = False) -> RejectionStats:
    """Rejection rate and Pr(e) estimate from ``n_samples`` weighted samples.

    With ``check_support`` every accepted sample is re-scored with the full
    joint probability and must be positive.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    evidence = (evidence or Evidence()).check(net)
    rng = _as_rng(seed)
    chunk = max(1, _CHUNK_CELLS // max(net.n_variables, 1))
    parts = []
    for start in range(0, n_samples, chunk):
        configs, w = sample_batch(net, evidence, min(chunk, n_samples - start), rng)
        if check_support:
            accepted = configs[w > 0]
            if np.any(batch_joint_probability(net, accepted) <= 0):
                raise AssertionError("accepted sample with zero joint probability")
            if not all(np.all(accepted[:, v] == s) for v, s in evidence.items()):
                raise AssertionError("accepted sample disagrees with evidence")
        parts.append(w)
    return RejectionStats.from_weights(np.concatenate(parts))


def exact_enumerate(net: BayesianNetwork, evidence: Evidence | None = None,
                    cap: int = DEFAULT_ENUM_CAP) -> ExactResult:
    """Exact Pr(e), rejection probability and weight variance by enumeration.

    Sums over every completion of the evidence.  The proposal probability of
    a completion is the product of the non-evidence CPT entries, its weight
    the product of the evidence entries.
    """
    evidence = (evidence or Evidence()).check(net)
    free = [v for v in range(net.n_variables) if v not in evidence]
    cards = net.cardinalities
    size = math.prod(cards[v] for v in free)
    if size > cap:
        raise StateSpaceTooLarge(size, cap)

    pe = rejection = second = 0.0
    chunk = max(1, _CHUNK_CELLS // max(net.n_variables, 1))
    for start in range(0, size, chunk):
        idx = np.arange(start, min(size, start + chunk), dtype=np.int64)
        configs = np.zeros((idx.size, net.n_variables), dtype=np.int32)
        for v, s in evidence.items():
            configs[:, v] = s
        for v in reversed(free):
            idx, configs[:, v] = np.divmod(idx, cards[v])
        proposal = np.ones(configs.shape[0])
        weight = np.ones(configs.shape[0])
        for v, cpt in enumerate(net.cpts):
            row = np.zeros(configs.shape[0], dtype=np.int64)
            for p in cpt.parents:
                row = row * cards[p] + configs[:, p]
            f = cpt.table[row * cards[v] + configs[:, v]]
            if v in evidence:
                weight *= f
            else:
                proposal *= f
        pe += float(np.sum(proposal * weight))
        rejection += float(np.sum(proposal[weight == 0.0]))
        second += float(np.sum(proposal * weight * weight))
    return ExactResult(pe, min(rejection, 1.0), max(second - pe * pe, 0.0))


def select_evidence(net: BayesianNetwork, count_range: tuple[int, int],
                    mode: str = "forward", rng=None) -> Evidence:
    """Pick a random evidence set.

    ``forward`` projects one prior sample onto the chosen variables, so the
    evidence always has positive probability; ``uniform`` draws each observed
    state uniformly and may produce impossible evidence.
    """
    lo, hi = count_range
    if not 0 <= lo <= hi <= net.n_variables:
        raise ValueError(f"evidence count range {count_range} infeasible for "
                         f"{net.n_variables} variables")
    if mode not in ("forward", "uniform"):
        raise ValueError(f"unknown evidence mode {mode!r}")
    rng = _as_rng(rng)
    count = int(rng.integers(lo, hi + 1))
    chosen = sorted(int(v) for v in rng.choice(net.n_variables, size=count, replace=False))
    if mode == "forward":
        sample = likelihood_sample(net, Evidence(), rng).config
        return Evidence({v: sample[v] for v in chosen})
    return Evidence({v: int(rng.integers(net.variables[v].cardinality)) for v in chosen})


@dataclass(frozen=True)
class ExperimentConfig:
    cases: int = 50
    evidence_min: int = 10
    evidence_max: int = 20
    samples_per_case: int = 60_000
    seed: int = 0
    evidence_mode: str = "forward"
    evidence: Evidence | None = None  # fixed evidence for every case
    zero_epsilon: float = 0.0

    def check(self, net: BayesianNetwork) -> "ExperimentConfig":
        if self.cases < 1:
            raise ValueError("cases must be >= 1")
        if self.samples_per_case < 1:
            raise ValueError("samples_per_case must be >= 1")
        if self.evidence is None and not (
                1 <= self.evidence_min <= self.evidence_max <= net.n_variables):
            raise ValueError(
                f"evidence range {self.evidence_min}..{self.evidence_max} infeasible "
                f"for {net.n_variables} variables")
        if self.evidence_mode not in ("forward", "uniform"):
            raise ValueError(f"unknown evidence mode {self.evidence_mode!r}")
        return self


@dataclass(frozen=True)
class CaseRow:
    case: int
    evidence: Evidence
    ktest: KTestResult
    stats: RejectionStats
    seed: int


@dataclass
class ExperimentReport:
    network: str
    seed: int
    rows: list[CaseRow] = field(default_factory=list)

    @property
    def mean_rejection_rate(self) -> float:
        return math.fsum(r.stats.rejection_rate for r in self.rows) / len(self.rows)

    @property
    def pooled_rejection_rate(self) -> float:
        return (sum(r.stats.rejected for r in self.rows)
                / sum(r.stats.total for r in self.rows))

    @property
    def mean_ratio(self) -> float:
        return math.fsum(r.ktest.ratio for r in self.rows) / len(self.rows)

    def rows_as_dicts(self) -> list[dict]:
        out = []
        for r in self.rows:
            out.append({
                "network": self.network, "case": r.case,
                "evidence_size": len(r.evidence),
                "n": r.ktest.n, "m": r.ktest.m, "k": r.ktest.k,
                "r": r.ktest.r, "ratio": r.ktest.ratio,
                "class": str(r.ktest.hardness_class),
                "samples": r.stats.total, "rejected": r.stats.rejected,
                "rejection_rate": r.stats.rejection_rate,
                "pe_estimate": r.stats.pe_estimate, "seed": r.seed})
        return out


def case_seed(seed: int, case: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(case,))
    return int(ss.generate_state(1, np.uint64)[0])


def _run_case(net, config, case):
    cs = case_seed(config.seed, case)
    if config.evidence is not None:
        evidence = config.evidence.check(net)
    else:
        ev_rng = np.random.default_rng(np.random.SeedSequence(cs, spawn_key=(0,)))
        evidence = select_evidence(net, (config.evidence_min, config.evidence_max),
                                   config.evidence_mode, ev_rng)
    kt = k_test(net, evidence, config.zero_epsilon)
    stats = estimate_rejection_rate(net, evidence, config.samples_per_case, cs)
    return CaseRow(case, evidence, kt, stats, cs)


def run_experiment(net: BayesianNetwork, config: ExperimentConfig,
                   name: str = "network", threads: int | None = 1) -> ExperimentReport:
    """Run ``config.cases`` independent cases; the result does not depend on
    ``threads``."""
    config.check(net)
    _plan(net)

    def run(case):
        try:
            return _run_case(net, config, case)
        except Exception as exc:
            raise ExperimentError(case, exc) from exc

    if threads == 1:
        rows = [run(i) for i in range(config.cases)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, range(config.cases)))
    return ExperimentReport(name, config.seed, rows)

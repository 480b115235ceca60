"""k-test hardness statistics and the log-encoded k-CNF of a network.

Every variable with ``d >= 2`` states becomes ``ceil(log2 d)`` Boolean
variables holding the binary digits of its value, least significant first.
Three clause families then carve out exactly the consistent configurations:

* CPT clauses, one per zero CPT entry, forbidding that child/parent assignment;
* variable clauses, forbidding bit patterns that decode to ``>= d``;
* evidence clauses, unit clauses pinning the observed bits.

:func:`k_test` counts the same quantities without materializing clauses.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .model import BayesianNetwork, Evidence, ModelError, bit_width

CPT, VARIABLE, EVIDENCE = "cpt", "variable", "evidence"


class DegenerateNetworkError(ModelError):
    """All variables have a single state, so there is nothing to encode."""


class HardnessClass(str, enum.Enum):
    EASY = "easy"
    MODERATE = "moderate"
    HARD = "hard"
    INTRACTABLE = "intractable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class KTestResult:
    n: int
    m: int
    k: int
    r: float
    ratio: float
    hardness_class: HardnessClass
    evidence_clauses: int = 0
    variable_clauses: int = 0
    cpt_clauses: int = 0

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "k": self.k, "r": self.r,
                "ratio": self.ratio, "class": str(self.hardness_class),
                "clauses": {"evidence": self.evidence_clauses,
                            "variable": self.variable_clauses,
                            "cpt": self.cpt_clauses}}


@dataclass(frozen=True)
class BitMapping:
    """Boolean indices per network variable, least significant bit first."""

    bits: tuple[tuple[int, ...], ...]
    n_bool: int

    @classmethod
    def for_network(cls, net: BayesianNetwork) -> "BitMapping":
        bits, nxt = [], 1
        for v in net.variables:
            w = bit_width(v.cardinality)
            bits.append(tuple(range(nxt, nxt + w)))
            nxt += w
        return cls(tuple(bits), nxt - 1)

    def __getitem__(self, var: int) -> tuple[int, ...]:
        return self.bits[var]

    def literals(self, var: int, state: int) -> list[int]:
        """Signed literals true exactly when ``var`` takes ``state``."""
        return [x if (state >> j) & 1 else -x for j, x in enumerate(self.bits[var])]


@dataclass(frozen=True)
class Clause:
    """Disjunction of signed DIMACS literals, sorted by variable index."""

    literals: tuple[int, ...]

    def __post_init__(self):
        lits = tuple(sorted((int(x) for x in self.literals), key=abs))
        if not lits:
            raise ValueError("empty clause")
        if len({abs(x) for x in lits}) != len(lits):
            raise ValueError(f"variable repeated in clause {lits}")
        object.__setattr__(self, "literals", lits)

    def __len__(self):
        return len(self.literals)

    def satisfied_by(self, assignment) -> bool:
        return any(bool(assignment[abs(x)]) == (x > 0) for x in self.literals)


@dataclass
class CnfFormula:
    n_bool: int
    clauses: list[Clause] = field(default_factory=list)
    families: list[str] = field(default_factory=list)

    def add(self, literals, family: str):
        self.clauses.append(Clause(tuple(literals)))
        self.families.append(family)

    def count(self, family: str) -> int:
        return self.families.count(family)

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def satisfied_by(self, assignment) -> bool:
        """``assignment`` is indexable by Boolean variable index (1-based)."""
        return all(c.satisfied_by(assignment) for c in self.clauses)


def classify(ratio: float) -> HardnessClass:
    if not ratio >= 0:
        raise ValueError(f"k-test ratio must be non-negative, got {ratio}")
    if ratio < 0.005:
        return HardnessClass.EASY
    if ratio < 0.1:
        return HardnessClass.MODERATE
    if ratio <= 0.2:
        return HardnessClass.HARD
    return HardnessClass.INTRACTABLE


def variable_clause_widths(cardinality: int) -> list[int]:
    """Widths of the clauses excluding values ``>= cardinality``.

    Scans the binary digits of ``cardinality - 1`` from the least significant
    end; each zero digit yields one clause whose width is the number of bits
    from that digit up to the most significant one.
    """
    widths = []
    k_i = bit_width(cardinality)
    b = cardinality - 1
    while b > 0:
        if b % 2 == 0:
            widths.append(k_i)
        b //= 2
        k_i -= 1
    return widths


def _is_zero(table, zero_epsilon):
    return table <= zero_epsilon


def _require_bits(net):
    if all(v.cardinality == 1 for v in net.variables):
        raise DegenerateNetworkError("every variable has cardinality 1")


def k_test(net: BayesianNetwork, evidence: Evidence | None = None,
           zero_epsilon: float = 0.0) -> KTestResult:
    evidence = (evidence or Evidence()).check(net)
    _require_bits(net)
    cards = net.cardinalities
    widths = [bit_width(c) for c in cards]

    n = sum(widths)
    m = len(evidence)
    k = max((widths[v] for v in evidence.variables()), default=0)
    n_var = n_cpt = 0
    for i, cpt in enumerate(net.cpts):
        if cards[i] == 1:
            continue
        for k_i in variable_clause_widths(cards[i]):
            m += 1
            n_var += 1
            k = max(k, k_i)
        zeros = int(np.count_nonzero(_is_zero(cpt.table, zero_epsilon)))
        if zeros:
            k_max = widths[i] + sum(widths[p] for p in cpt.parents)
            m += zeros
            n_cpt += zeros
            k = max(k, k_max)

    r = m / n
    ratio = r * k / 2.0 ** k if m else 0.0
    return KTestResult(n=n, m=m, k=k, r=r, ratio=ratio,
                       hardness_class=classify(ratio),
                       evidence_clauses=len(evidence),
                       variable_clauses=n_var, cpt_clauses=n_cpt)


def encode(net: BayesianNetwork, evidence: Evidence | None = None,
           zero_epsilon: float = 0.0) -> tuple[CnfFormula, BitMapping]:
    """Build the k-CNF whose models are the configurations consistent with
    ``evidence`` and of non-zero joint probability."""
    evidence = (evidence or Evidence()).check(net)
    _require_bits(net)
    mapping = BitMapping.for_network(net)
    cnf = CnfFormula(mapping.n_bool)
    cards = net.cardinalities

    for i, cpt in enumerate(net.cpts):
        card = cards[i]
        if card == 1:
            continue
        pcards = [cards[p] for p in cpt.parents]
        for flat in np.flatnonzero(_is_zero(cpt.table, zero_epsilon)):
            row, state = divmod(int(flat), card)
            lits = mapping.literals(i, state)
            for p, pc in zip(reversed(cpt.parents), reversed(pcards)):
                row, pstate = divmod(row, pc)
                lits += mapping.literals(p, pstate)
            cnf.add((-x for x in lits), CPT)

    for i, card in enumerate(cards):
        if card == 1:
            continue
        bits = mapping[i]
        top = card - 1
        for j in range(len(bits) - 1):  # the top digit of card-1 is always 1
            if (top >> j) & 1:
                continue
            # higher digits equal to those of card-1 imply this digit is 0
            lits = [-bits[j]]
            for h in range(j + 1, len(bits)):
                lits.append(-bits[h] if (top >> h) & 1 else bits[h])
            cnf.add(lits, VARIABLE)

    for var, state in evidence.items():
        for lit in mapping.literals(var, state):
            cnf.add((lit,), EVIDENCE)
    return cnf, mapping


class DecodeError(ValueError):
    pass


class MissingBitError(DecodeError):
    pass


class InvalidAssignment(DecodeError):
    """The bits of ``variable`` spell a value outside its state space."""

    def __init__(self, variable: int, value: int, cardinality: int):
        self.variable, self.value, self.cardinality = variable, value, cardinality
        super().__init__(f"variable {variable} decodes to {value}, "
                         f"cardinality is {cardinality}")


def decode(assignment, mapping: BitMapping, net: BayesianNetwork) -> list[int]:
    """Read each variable's bits back into a state index.

    ``assignment`` maps Boolean indices (1-based) to truth values; a dict or
    any sequence with a dummy slot at position 0 will do.
    """
    config = []
    for var, bits in enumerate(mapping.bits):
        value = 0
        for j, x in enumerate(bits):
            try:
                bit = assignment[x]
            except (KeyError, IndexError):
                raise MissingBitError(f"no value for Boolean variable {x}") from None
            if bit:
                value |= 1 << j
        card = net.variables[var].cardinality
        if value >= card:
            raise InvalidAssignment(var, value, card)
        config.append(value)
    return config

"""Text formats: UAI Bayes networks, evidence pairs, DIMACS CNF and reports.

UAI convention used here: every factor scope lists the child last, and the
table enumerates the scope with the rightmost (child) variable fastest.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .ktest import BitMapping, CnfFormula
from .model import BayesianNetwork, Cpt, Evidence, Variable, validate


class ParseError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        where = f" (token {offset})" if offset is not None else ""
        super().__init__(message + where)


class NetworkValidationError(ParseError):
    """The document is well-formed but the network it describes is not."""


_COMMENT = re.compile(r"^\s*(#|c(\s|$)).*$", re.MULTILINE)


def _tokens(text: str) -> list[str]:
    return _COMMENT.sub("", text).split()


class _Stream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def _next(self, what):
        if self.pos >= len(self.tokens):
            raise ParseError(f"unexpected end of input, expected {what}", self.pos)
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def int(self, what, minimum=None):
        tok = self._next(what)
        try:
            value = int(tok)
        except ValueError:
            raise ParseError(f"expected integer {what}, got {tok!r}", self.pos - 1) from None
        if minimum is not None and value < minimum:
            raise ParseError(f"{what} must be >= {minimum}, got {value}", self.pos - 1)
        return value

    def float(self, what):
        tok = self._next(what)
        try:
            value = float(tok)
        except ValueError:
            raise ParseError(f"expected number {what}, got {tok!r}", self.pos - 1) from None
        if not math.isfinite(value):
            raise ParseError(f"non-finite {what} {tok!r}", self.pos - 1)
        return value

    def done(self):
        if self.pos != len(self.tokens):
            raise ParseError(f"{len(self.tokens) - self.pos} trailing tokens", self.pos)


@dataclass(frozen=True)
class NetworkDocument:
    text: str
    network: BayesianNetwork
    factor_offsets: tuple[int, ...]  # token offset of each factor's scope line


def read_uai(text: str, strict: bool = True) -> NetworkDocument:
    """Parse a UAI ``BAYES`` document.

    With ``strict=False`` a factor count different from the variable count is
    tolerated as long as every variable still ends up with exactly one CPT.
    """
    s = _Stream(_tokens(text))
    head = s._next("header")
    if head != "BAYES":
        raise ParseError(f"expected 'BAYES' header, got {head!r}", 0)
    n = s.int("variable count", 1)
    cards = [s.int(f"cardinality of variable {i}", 1) for i in range(n)]
    f_pos = s.pos
    f = s.int("factor count", 0)
    if strict and f != n:
        raise ParseError(f"factor count {f} != variable count {n}", f_pos)

    scopes, offsets, owner = [], [], {}
    for j in range(f):
        offsets.append(s.pos)
        size = s.int(f"scope size of factor {j}", 1)
        scope = []
        for _ in range(size):
            pos = s.pos
            v = s.int(f"scope variable of factor {j}")
            if not 0 <= v < n:
                raise ParseError(f"factor {j} references dangling variable {v}", pos)
            scope.append(v)
        child = scope[-1]
        if child in owner:
            raise ParseError(f"variable {child} is the child of factors "
                             f"{owner[child]} and {j}", offsets[-1])
        owner[child] = j
        scopes.append(scope)
    if len(owner) != n:
        missing = sorted(set(range(n)) - set(owner))
        raise ParseError(f"variables without a CPT: {missing}", f_pos)

    tables = []
    for j, scope in enumerate(scopes):
        pos = s.pos
        size = s.int(f"table size of factor {j}", 0)
        expected = math.prod(cards[v] for v in scope)
        if size != expected:
            raise ParseError(f"factor {j} table has {size} entries, scope needs "
                             f"{expected}", pos)
        tables.append(np.array([s.float(f"entry of factor {j}") for _ in range(size)]))
    s.done()

    cpts = [None] * n
    for scope, table in zip(scopes, tables):
        cpts[scope[-1]] = Cpt(scope[-1], tuple(scope[:-1]), table)
    net = BayesianNetwork(tuple(Variable(i, c) for i, c in enumerate(cards)), tuple(cpts))
    problems = validate(net)
    if problems:
        child = _first_child(problems)
        off = offsets[owner[child]] if child is not None else None
        raise NetworkValidationError("; ".join(problems), off)
    return NetworkDocument(text, net, tuple(offsets[owner[i]] for i in range(n)))


def _first_child(problems):
    m = re.match(r"CPT (\d+)", problems[0])
    return int(m.group(1)) if m else None


def parse_uai(text: str, strict: bool = True) -> BayesianNetwork:
    return read_uai(text, strict).network


def write_uai(net: BayesianNetwork) -> str:
    lines = ["BAYES", str(net.n_variables),
             " ".join(str(c) for c in net.cardinalities), str(net.n_variables)]
    for cpt in net.cpts:
        scope = (*cpt.parents, cpt.child)
        lines.append(" ".join(map(str, (len(scope), *scope))))
    lines.append("")
    for cpt in net.cpts:
        lines.append(str(cpt.table.size))
        lines.append(" ".join(repr(float(x)) for x in cpt.table))
        lines.append("")
    return "\n".join(lines)


def parse_evidence(text: str) -> Evidence:
    """Parse ``k v1 s1 ... vk sk``; an empty document means no evidence."""
    s = _Stream(_tokens(text))
    if not s.tokens:
        return Evidence()
    count = s.int("evidence count", 0)
    remaining = len(s.tokens) - 1
    if remaining != 2 * count:
        raise ParseError(f"evidence count {count} needs {2 * count} tokens, "
                         f"found {remaining}", 1)
    obs = {}
    for _ in range(count):
        pos = s.pos
        var = s.int("evidence variable", 0)
        state = s.int("evidence state", 0)
        if var in obs:
            raise ParseError(f"duplicate evidence variable {var}", pos)
        obs[var] = state
    s.done()
    return Evidence(obs)


def write_evidence(evidence: Evidence) -> str:
    toks = [str(len(evidence))]
    for v, st in evidence.items():
        toks += [str(v), str(st)]
    return " ".join(toks) + "\n"


def write_dimacs(cnf: CnfFormula, mapping: BitMapping) -> str:
    mapped = {x for bits in mapping.bits for x in bits}
    for clause in cnf.clauses:
        for lit in clause.literals:
            if abs(lit) not in mapped:
                raise ValueError(f"Boolean variable {abs(lit)} is not mapped")
    out = []
    for var, bits in enumerate(mapping.bits):
        for j, x in enumerate(bits, start=1):
            out.append(f"c bnvar {var} bit {j} -> {x}")
    out.append(f"p cnf {mapping.n_bool} {len(cnf.clauses)}")
    for clause in cnf.clauses:
        out.append(" ".join(map(str, clause.literals)) + " 0")
    return "\n".join(out) + "\n"


REPORT_COLUMNS = ("network", "case", "evidence_size", "n", "m", "k", "r", "ratio",
                  "class", "samples", "rejected", "rejection_rate", "pe_estimate",
                  "seed")
_FLOAT_COLUMNS = {"r", "ratio", "rejection_rate", "pe_estimate"}


def _fmt(value) -> str:
    """Six significant digits, fixed notation when that stays readable."""
    if value == 0:
        return "0.000000"
    exp = math.floor(math.log10(abs(value)))
    if -5 <= exp < 6:
        return f"{value:.{max(5 - exp, 0)}f}"
    return f"{value:.5e}"


def write_report(report, fmt: str = "csv") -> str:
    rows = report.rows_as_dicts()
    if fmt == "json":
        doc = {"network": report.network, "seed": report.seed,
               "cases": [{k: r[k] for k in REPORT_COLUMNS} for r in rows]}
        doc["cases"] = [{k: (float(_fmt(v)) if k in _FLOAT_COLUMNS else v)
                         for k, v in r.items()} for r in doc["cases"]]
        for r, row in zip(doc["cases"], report.rows):
            r["evidence"] = {str(v): s for v, s in row.evidence.items()}
            r["weight_variance"] = float(_fmt(row.stats.weight_variance))
        if rows:
            doc["aggregate"] = {
                "mean_rejection_rate": float(_fmt(report.mean_rejection_rate)),
                "pooled_rejection_rate": float(_fmt(report.pooled_rejection_rate)),
                "mean_ratio": float(_fmt(report.mean_ratio))}
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[k]) if k in _FLOAT_COLUMNS else r[k] for k in REPORT_COLUMNS])
    if rows:
        agg = {k: "" for k in REPORT_COLUMNS}
        agg.update(network=report.network, case="ALL",
                   samples=sum(r["samples"] for r in rows),
                   rejected=sum(r["rejected"] for r in rows),
                   ratio=_fmt(report.mean_ratio),
                   rejection_rate=_fmt(report.mean_rejection_rate),
                   seed=report.seed)
        w.writerow([agg[k] for k in REPORT_COLUMNS])
    return buf.getvalue()

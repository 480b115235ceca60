"""Approximation hardness of sampling Bayesian networks with zero probabilities."""
from .ingest import (NetworkDocument, ParseError, parse_evidence, parse_uai,
                     read_uai, write_dimacs, write_evidence, write_report, write_uai)
from .ktest import (BitMapping, Clause, CnfFormula, HardnessClass, KTestResult,
                    classify, decode, encode, k_test)
from .model import (BayesianNetwork, Cpt, Evidence, Variable, bit_width,
                    joint_probability, topological_order, validate)
from .sampler import (ExperimentConfig, ExperimentReport, RejectionStats,
                      SampleOutcome, estimate_rejection_rate, exact_enumerate,
                      likelihood_sample, run_experiment, select_evidence)

__version__ = "0.1.0"

__all__ = [
    "NetworkDocument",
    "ParseError",
    "parse_evidence",
    "parse_uai",
    "read_uai",
    "write_dimacs",
    "write_evidence",
    "write_report",
    "write_uai",
    "BitMapping",
    "Clause",
    "CnfFormula",
    "HardnessClass",
    "KTestResult",
    "classify",
    "decode",
    "encode",
    "k_test",
    "BayesianNetwork",
    "Cpt",
    "Evidence",
    "Variable",
    "bit_width",
    "joint_probability",
    "topological_order",
    "validate",
    "ExperimentConfig",
    "ExperimentReport",
    "RejectionStats",
    "SampleOutcome",
    "estimate_rejection_rate",
    "exact_enumerate",
    "likelihood_sample",
    "run_experiment",
    "select_evidence",
]

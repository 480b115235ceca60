"""``bnhardness`` command-line interface.

Exit codes: 0 ok, 1 usage, 2 parse, 3 validation, 4 resource cap.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import ingest, ktest, sampler
from .ingest import NetworkValidationError, ParseError
from .model import Evidence, ModelError

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VALIDATION, EXIT_RESOURCE = 0, 1, 2, 3, 4
U64_MAX = 2 ** 64 - 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_at_least(lo):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v
    return conv


def _seed(text):
    v = _int_at_least(0)(text)
    if v > U64_MAX:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _default_seed():
    env = os.environ.get("BNHARDNESS_SEED")
    if env is None:
        return 0
    try:
        return _seed(env)
    except argparse.ArgumentTypeError:
        return None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False,
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common.add_argument("network", help="network file in UAI BAYES format")
    common.add_argument("--evidence", metavar="FILE", default=None,
                        help="evidence file of variable/state pairs")
    common.add_argument("--out", metavar="FILE", default=None,
                        help="write output here instead of standard output")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text",
                        help="output format")
    common.add_argument("--zero-epsilon", type=_nonneg_float, default=0.0,
                        help="CPT entries <= this count as zeros in the k-test")
    common.add_argument("--lenient", action="store_true",
                        help="accept UAI files whose factor count differs from "
                             "the variable count")
    common.add_argument("--seed", type=_seed, default=_default_seed(),
                        help="random seed (default from BNHARDNESS_SEED, else 0)")
    common.add_argument("--samples", type=_int_at_least(1), default=60_000,
                        help="samples per run or per case")
    common.add_argument("--cases", type=_int_at_least(1), default=50,
                        help="experiment cases")
    common.add_argument("--evidence-min", type=_int_at_least(1), default=None,
                        help="smallest random evidence set (default 10, capped at "
                             "the variable count)")
    common.add_argument("--evidence-max", type=_int_at_least(1), default=None,
                        help="largest random evidence set (default 20, capped at "
                             "the variable count)")
    common.add_argument("--evidence-mode", choices=("forward", "uniform"),
                        default="forward", help="how random evidence states are drawn")
    common.add_argument("--enum-cap", type=_int_at_least(1),
                        default=sampler.DEFAULT_ENUM_CAP,
                        help="largest state space exact enumeration may visit")
    common.add_argument("--threads", type=_int_at_least(1), default=os.cpu_count() or 1,
                        help="worker threads for experiments")

    parser = _Parser(prog="bnhardness",
                     description="k-test hardness analysis of Bayesian networks "
                                 "with deterministic CPT entries")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    kw = dict(parents=[common], formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub.add_parser("ktest", help="k-test statistics and hardness class", **kw)
    sub.add_parser("tocnf", help="write the k-CNF encoding as DIMACS", **kw)
    sub.add_parser("sample", help="likelihood-weighting rejection statistics", **kw)
    sub.add_parser("experiment", help="randomized multi-case rejection experiment", **kw)
    sub.add_parser("exact", help="exact Pr(e) and rejection probability", **kw)
    return parser


def _load(args):
    try:
        text = Path(args.network).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read network {args.network}: {exc.strerror}") from None
    net = ingest.parse_uai(text, strict=not args.lenient)
    evidence = Evidence()
    if args.evidence:
        try:
            etext = Path(args.evidence).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read evidence {args.evidence}: {exc.strerror}") from None
        evidence = ingest.parse_evidence(etext).check(net)
    return net, evidence


def _f6(x):
    return f"{x:.6f}"


def cmd_ktest(args):
    net, evidence = _load(args)
    res = ktest.k_test(net, evidence, args.zero_epsilon)
    if args.format == "json":
        return json.dumps(res.as_dict(), indent=2) + "\n"
    if args.format == "csv":
        return ("n,m,k,r,ratio,class\n"
                f"{res.n},{res.m},{res.k},{_f6(res.r)},{_f6(res.ratio)},{res.hardness_class}\n")
    return (f"n={res.n} m={res.m} k={res.k} r={_f6(res.r)} ratio={_f6(res.ratio)} "
            f"class={res.hardness_class}\n")


def cmd_tocnf(args):
    net, evidence = _load(args)
    cnf, mapping = ktest.encode(net, evidence, args.zero_epsilon)
    return ingest.write_dimacs(cnf, mapping)


def cmd_sample(args):
    net, evidence = _load(args)
    st = sampler.estimate_rejection_rate(net, evidence, args.samples, args.seed)
    fields = {"samples": st.total, "rejected": st.rejected,
              "rejection_rate": st.rejection_rate, "pe_estimate": st.pe_estimate,
              "weight_variance": st.weight_variance, "seed": args.seed}
    if args.format == "json":
        return json.dumps(fields, indent=2) + "\n"
    if args.format == "csv":
        return ",".join(fields) + "\n" + ",".join(
            _f6(v) if isinstance(v, float) else str(v) for v in fields.values()) + "\n"
    return " ".join(f"{k}={_f6(v) if isinstance(v, float) else v}"
                    for k, v in fields.items()) + "\n"


def cmd_experiment(args):
    net, evidence = _load(args)
    n = net.n_variables
    lo = min(10, n) if args.evidence_min is None else args.evidence_min
    hi = min(20, n) if args.evidence_max is None else args.evidence_max
    if not args.evidence and hi > n:
        raise UsageError(f"--evidence-max {hi} exceeds the {n} network variables")
    if lo > hi:
        raise UsageError(f"evidence range {lo}..{hi} is empty")
    config = sampler.ExperimentConfig(
        cases=args.cases, evidence_min=lo, evidence_max=hi, samples_per_case=args.samples,
        seed=args.seed, evidence_mode=args.evidence_mode,
        evidence=evidence if args.evidence else None, zero_epsilon=args.zero_epsilon)
    report = sampler.run_experiment(net, config, name=Path(args.network).stem,
                                    threads=args.threads)
    return ingest.write_report(report, "json" if args.format == "json" else "csv")


def cmd_exact(args):
    net, evidence = _load(args)
    res = sampler.exact_enumerate(net, evidence, args.enum_cap)
    if args.format == "json":
        return json.dumps(res._asdict(), indent=2) + "\n"
    if args.format == "csv":
        return f"pe,rejection\n{res.pe:.6g},{res.rejection:.6g}\n"
    return f"Pr(e)={res.pe:.6g} rejection={res.rejection:.6g}\n"


COMMANDS = {"ktest": cmd_ktest, "tocnf": cmd_tocnf, "sample": cmd_sample,
            "experiment": cmd_experiment, "exact": cmd_exact}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed is None:
            parser.error("BNHARDNESS_SEED is not an unsigned 64-bit integer")
    except SystemExit as exc:
        return exc.code
    try:
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bnhardness: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except sampler.StateSpaceTooLarge as exc:
        print(f"bnhardness: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NetworkValidationError as exc:
        print(f"bnhardness: invalid network: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ParseError as exc:
        print(f"bnhardness: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ModelError, sampler.ExperimentError) as exc:
        print(f"bnhardness: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

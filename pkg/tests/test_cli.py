import csv
import io
import json
import subprocess
import sys
import time

import pytest

from bnhardness import write_uai
from bnhardness.cli import build_parser, main
from bnhardness.generate import random_network, tiny_network


@pytest.fixture
def files(tmp_path):
    net = tmp_path / "tiny.uai"
    net.write_text(write_uai(tiny_network()))
    ev = tmp_path / "ev.txt"
    ev.write_text("1 1 1\n")
    return net, ev, tmp_path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_ktest_text(files, capsys):
    net, ev, _ = files
    code, out, _ = run(["ktest", net, "--evidence", ev], capsys)
    assert code == 0
    assert out == "n=2 m=2 k=2 r=1.000000 ratio=0.500000 class=intractable\n"


def test_ktest_json(files, capsys):
    net, ev, _ = files
    code, out, _ = run(["ktest", net, "--evidence", ev, "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["clauses"] == {"evidence": 1, "variable": 0, "cpt": 1}
    assert doc["class"] == "intractable"


def test_ktest_zero_free(tmp_path, capsys):
    p = tmp_path / "free.uai"
    p.write_text(write_uai(random_network(1, 6, cardinalities=(2, 4))))
    code, out, _ = run(["ktest", p], capsys)
    assert code == 0 and "ratio=0.000000 class=easy" in out


def test_missing_file(capsys):
    code, _, err = run(["ktest", "/nonexistent/net.uai"], capsys)
    assert code == 2 and "cannot read" in err


def test_parse_and_validation_errors(tmp_path, capsys):
    bad = tmp_path / "bad.uai"
    bad.write_text("BAYES 1 2 2")
    assert run(["ktest", bad], capsys)[0] == 2
    unnorm = tmp_path / "unnorm.uai"
    unnorm.write_text("BAYES 1 2 1 1 0 2 0.5 0.4")
    assert run(["ktest", unnorm], capsys)[0] == 3


def test_tocnf(files, capsys):
    net, ev, tmp = files
    code, out, _ = run(["tocnf", net, "--evidence", ev], capsys)
    assert code == 0
    assert out == ("c bnvar 0 bit 1 -> 1\nc bnvar 1 bit 1 -> 2\n"
                   "p cnf 2 2\n1 -2 0\n2 0\n")
    target = tmp / "out.cnf"
    run(["tocnf", net, "--evidence", ev, "--out", target], capsys)
    assert target.read_bytes() == out.encode()


def test_tocnf_no_clauses(tmp_path, capsys):
    p = tmp_path / "free.uai"
    p.write_text(write_uai(random_network(1, 3, cardinalities=(2,))))
    _, out, _ = run(["tocnf", p], capsys)
    assert "p cnf 3 0\n" in out


def test_tocnf_bad_evidence_state(files, capsys):
    net, _, tmp = files
    ev = tmp / "bad.txt"
    ev.write_text("1 1 2")
    assert run(["tocnf", net, "--evidence", ev], capsys)[0] == 3


def test_sample(files, capsys):
    net, ev, _ = files
    args = ["sample", net, "--evidence", ev, "--samples", 100000, "--seed", 4,
            "--format", "json"]
    code, out, _ = run(args, capsys)
    assert code == 0
    assert abs(json.loads(out)["rejection_rate"] - 0.5) <= 0.01
    assert run(args, capsys)[1] == out


def test_sample_zero(files, capsys):
    net, ev, _ = files
    assert run(["sample", net, "--samples", 0], capsys)[0] == 1


def test_seed_from_env(files, capsys, monkeypatch):
    net, ev, _ = files
    monkeypatch.setenv("BNHARDNESS_SEED", "123")
    out = run(["sample", net, "--evidence", ev, "--samples", 50], capsys)[1]
    monkeypatch.delenv("BNHARDNESS_SEED")
    assert out == run(["sample", net, "--evidence", ev, "--samples", 50, "--seed", 123],
                      capsys)[1]
    assert "seed=123" in out


def test_experiment_defaults(tmp_path, capsys):
    p = tmp_path / "small.uai"
    p.write_text(write_uai(random_network(2, 8, cardinalities=(2, 3), zero_density=0.2)))
    code, out, _ = run(["experiment", p, "--samples", 200], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 51 and rows[-1]["case"] == "ALL"
    assert list(rows[0]) == ["network", "case", "evidence_size", "n", "m", "k", "r",
                             "ratio", "class", "samples", "rejected", "rejection_rate",
                             "pe_estimate", "seed"]
    assert all(int(r["evidence_size"]) == 8 for r in rows[:-1])


def test_experiment_smoke_budget(tmp_path, capsys):
    p = tmp_path / "ten.uai"
    p.write_text(write_uai(random_network(3, 10, cardinalities=(2, 3), zero_density=0.2)))
    t = time.perf_counter()
    code, out, _ = run(["experiment", p, "--cases", 1, "--samples", 1000], capsys)
    assert code == 0 and time.perf_counter() - t < 1.0


def test_experiment_range_too_large(files, capsys):
    net, _, _ = files
    assert run(["experiment", net, "--evidence-max", 3], capsys)[0] == 1
    assert run(["experiment", net, "--evidence-min", 2, "--evidence-max", 1], capsys)[0] == 1


def test_experiment_deterministic(tmp_path, capsys):
    p = tmp_path / "n.uai"
    p.write_text(write_uai(random_network(4, 12, cardinalities=(2,), zero_density=0.3)))
    args = ["experiment", p, "--cases", 5, "--samples", 500, "--evidence-min", 2,
            "--evidence-max", 4, "--format", "json"]
    a = run(args + ["--threads", 1], capsys)[1]
    b = run(args + ["--threads", 3], capsys)[1]
    assert a == b and len(json.loads(a)["cases"]) == 5


def test_exact(files, capsys):
    net, ev, _ = files
    assert run(["exact", net, "--evidence", ev], capsys)[1] == "Pr(e)=0.25 rejection=0.5\n"
    assert run(["exact", net], capsys)[1] == "Pr(e)=1 rejection=0\n"


def test_exact_cap(tmp_path, capsys):
    p = tmp_path / "big.uai"
    p.write_text(write_uai(random_network(0, 30, cardinalities=(2,))))
    code, _, err = run(["exact", p], capsys)
    assert code == 4 and str(2 ** 30) in err


def test_help_lists_flags_with_defaults():
    text = build_parser()._subparsers._group_actions[0].choices["experiment"].format_help()
    for flag in ["--evidence", "--out", "--samples", "--cases", "--evidence-min",
                 "--evidence-max", "--evidence-mode", "--seed", "--zero-epsilon",
                 "--enum-cap", "--threads", "--format"]:
        assert flag in text
    assert "default: 60000" in text


def test_entry_point(files):
    net, ev, _ = files
    out = subprocess.run([sys.executable, "-m", "bnhardness.cli", "ktest", str(net),
                          "--evidence", str(ev)], capture_output=True, text=True)
    assert out.returncode == 0 and "class=intractable" in out.stdout

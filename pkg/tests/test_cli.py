import json

import pytest

from tribes.cli import main
from tribes.documents import dumps, serialize, serialize_functor, serialize_problem
from tribes.fibration import product, terminal_fibration
from tribes.groupoid import identity_functor, inclusion, interval, to_terminal, two, z2
from tribes.oracle import enumerate_functors
from tribes.wfs import LiftingProblem, factorize


@pytest.fixture
def files(tmp_path):
    f = inclusion(two(), interval())
    fact = factorize(f)
    q = product(fact.mid, z2()).proj0
    top = enumerate_functors(two(), q.dom, over=(q, fact.lambda_))[-1]
    prob = fact.lifting_problem(q, top)
    neg = LiftingProblem(f, terminal_fibration(two()), identity_functor(two()), to_terminal(interval()))
    docs = {
        "z2.json": serialize(z2()),
        "f.json": serialize(f),
        "p.json": serialize(terminal_fibration(z2())),
        "prob.json": dumps(serialize_problem(prob, factorization_of=f)),
        "oracle.json": dumps(serialize_problem(prob)),
        "neg.json": serialize(neg),
        "auto.json": dumps({**serialize_functor(f), "kind": "fibration", "cleavage": "auto"}),
        "broken.json": '{"kind": "groupoid",',
    }
    for name, text in docs.items():
        (tmp_path / name).write_text(text)
    return tmp_path


def run(*args):
    return main([str(a) for a in args])


def load(path):
    return json.loads(path.read_text())


def test_factorize_writes_verified_document(files):
    out = files / "fact.json"
    assert run("factorize", "--in", files / "f.json", "--out", out) == 0
    doc = load(out)
    assert doc["verified"] is True and len(doc["mid"]["objects"]) == 4
    assert {"lambda", "rho", "mid", "f"} <= set(doc)


def test_validate_reports_violations(files, capsys):
    assert run("validate", "--in", files / "z2.json", "--in", files / "f.json") == 0
    assert run("validate", "--in", files / "auto.json") == 1
    doc = json.loads(capsys.readouterr().out.split("\n}\n")[1] + "\n}")
    assert doc["results"][0]["violations"][0] == {"kind": "NotAFibration", "witness": [0, "u"], "detail": ""}


def test_path_and_pullback(files):
    assert run("path", "--in", files / "p.json", "--out", files / "path.json") == 0
    doc = load(files / "path.json")
    assert (doc["objects"], doc["arrows"]) == (2, 8)
    # f lands in I while p lives over 1: a semantic mismatch, not a usage error
    assert run("pullback", "--in", files / "f.json", "--in", files / "p.json", "--out", files / "e.json") == 1
    assert load(files / "e.json")["error"] == "CodomainMismatch"


def test_pullback_success(files):
    (files / "t.json").write_text(serialize(terminal_fibration(z2())))
    (files / "g.json").write_text(serialize(to_terminal(interval())))
    assert run("pullback", "--in", files / "g.json", "--in", files / "t.json", "--out", files / "pb.json") == 0
    doc = load(files / "pb.json")
    assert len(doc["apex"]["objects"]) == 2 and len(doc["apex"]["arrows"]) == 8


def test_lift_constructive_and_oracle(files):
    assert run("lift", "--in", files / "prob.json", "--out", files / "a.json") == 0
    a = load(files / "a.json")
    assert a["method"] == "constructive" and a["verified"]
    assert run("lift", "--in", files / "oracle.json", "--out", files / "b.json") == 0
    b = load(files / "b.json")
    assert b["method"] == "oracle" and a["filler"] in b["fillers"]
    assert run("lift", "--in", files / "neg.json", "--out", files / "c.json") == 1
    assert load(files / "c.json")["count"] == 0


def test_export_dot(files, capsys):
    assert run("export-dot", "--in", files / "z2.json") == 0
    out = capsys.readouterr().out
    assert out.startswith('digraph "Z2"')
    assert out.count("->") == 2 and out.count("[label=") == 2
    assert '"*" -> "*" [style=dotted];' in out and '"*" -> "*" [label="s"];' in out


def test_verify_wfs_exit_zero(files):
    out = files / "rep.json"
    assert run("verify-wfs", "--seed", 42, "--max-objects", 4, "--instances", 3, "--out", out) == 0
    doc = load(out)
    assert doc["kind"] == "report" and doc["ok"] and doc["seed"] == 42 and "version" in doc


def test_failures_leave_error_documents(files):
    err = files / "err.json"
    assert run("validate", "--in", files / "broken.json", "--out", err) == 2
    doc = load(err)
    assert doc["error"] == "DocumentSyntaxError" and doc["line"] == 1
    assert run("verify-wfs", "--max-objects", 100, "--max-arrows", 1000, "--out", err) == 2
    assert load(err)["error"] == "BudgetExceeded"
    assert run("path", "--in", files / "missing.json", "--out", err) == 2
    assert run("frobnicate", "--out", err) == 2
    assert load(err)["exit_code"] == 2
    assert run("path", "--in", files / "auto.json", "--out", err) == 1
    assert load(err)["violations"][0]["kind"] == "NotAFibration"


def test_dot_format_is_rejected_where_meaningless(files):
    assert run("validate", "--in", files / "z2.json", "--format", "dot") == 2

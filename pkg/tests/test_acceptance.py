"""The seven acceptance criteria, each printed as one PASS/FAIL line."""

import json
import random
import time
from contextlib import contextmanager

import pytest

from conftest import ACCEPTANCE
from tribes.cli import main
from tribes.documents import parse, serialize, serialize_problem, dumps, loads, parse_problem
from tribes.fibration import identity_fibration, terminal_fibration, validate_fibration
from tribes.groupoid import compose_functors, functor_equal, inclusion, interval, two, z2
from tribes.oracle import find_fillers, has_llp, llp_counterexample, random_functor
from tribes.paths import is_bijective, is_isomorphism, path_object
from tribes.verify import random_fibration, random_groupoid
from tribes.wfs import factorize

from test_paths import squares_oracle


@contextmanager
def criterion(n, name, limit=None, already=0.0):
    """Record one PASS/FAIL line; ``already`` is time spent in a shared fixture."""
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - start + already
        assert limit is None or elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start + already
        bound = f" (limit {limit} s)" if limit else ""
        ACCEPTANCE[n] = f"criterion {n} {status}: {name} [{elapsed:.2f} s{bound}]"
        print(ACCEPTANCE[n])


@pytest.fixture(scope="module")
def suite(tmp_path_factory):
    """The default verify-wfs run, through the command line, with its wall time."""
    out = tmp_path_factory.mktemp("suite") / "report.json"
    start = time.perf_counter()
    code = main(["verify-wfs", "--seed", "0", "--max-objects", "4", "--max-arrows", "12", "--out", str(out)])
    return code, json.loads(out.read_text()), out.read_bytes(), time.perf_counter() - start


def _law(report, name):
    return report["laws"][name]


def test_1_path_object_counts():
    with criterion(1, "path-object counts and Path(id) = E", limit=1.0):
        for E, counts in ((z2(), (2, 8)), (interval(), (4, 16))):
            p = terminal_fibration(E)
            P = path_object(p).path_groupoid
            assert (len(P.objects), len(P.arrows)) == counts == squares_oracle(p)
        for E in (z2(), interval(), two()):
            po = path_object(identity_fibration(E))
            r = po.unit
            assert is_bijective(r)
            assert is_isomorphism(r, po.boundary0) and is_isomorphism(r, po.boundary1)
            assert squares_oracle(identity_fibration(E)) == (len(E.objects), len(E.arrows))


def test_2_factorization_axiom():
    with criterion(2, "100 seeded functors: rho lambda = f, rho a fibration", limit=60.0):
        rng = random.Random(2024)
        done = 0
        while done < 100:
            X, Y = random_groupoid(rng, 4, 12), random_groupoid(rng, 4, 12)
            assert len(X.objects) <= 4 and len(X.arrows) <= 12
            f = random_functor(rng, X, Y)
            if f is None:
                continue
            fact = factorize(f)
            assert functor_equal(compose_functors(fact.rho, fact.lambda_), f)
            assert validate_fibration(fact.rho) == []
            done += 1


def test_3_lifting_soundness(suite):
    code, report, _, elapsed = suite
    with criterion(3, "lifting soundness and oracle membership", limit=300.0, already=elapsed):
        assert code == 0 and report["ok"]
        for law in ("lifting soundness", "filler membership"):
            assert _law(report, law)["fail"] == 0
            assert _law(report, law)["pass"] > 0
        assert report["counts"]["lifting problems"] >= _law(report, "filler membership")["pass"]


def test_4_stability(suite):
    _, report, _, _ = suite
    with criterion(4, "stability square commutes and i is bijective"):
        t = _law(report, "stability square")
        # two checks per generated (p, f) pair
        assert t["fail"] == 0 and t["pass"] == 2 * report["instances"]


def test_5_transport(suite):
    _, report, _, _ = suite
    with criterion(5, "transport contracts (i) and (ii)"):
        for law in ("transport (i)", "transport (ii)"):
            t = _law(report, law)
            assert t["fail"] == 0 and t["pass"] > 0
        assert _law(report, "transport (i)")["pass"] == report["counts"]["transport instances"]
        assert _law(report, "transport (ii)")["pass"] == report["counts"]["transport squares"]


def test_6_negative_control():
    with criterion(6, "inclusion 2 -> I does not lift against 2 -> 1", limit=1.0):
        f = inclusion(two(), interval())
        g = terminal_fibration(two())
        assert has_llp(f, g) is False
        square = llp_counterexample(f, g)
        assert square is not None and square.commutes()
        assert find_fillers(square) == []


def test_7_determinism_and_formats(suite, tmp_path):
    _, _, first, _ = suite
    with criterion(7, "byte-identical reports and byte-stable round trips"):
        again = tmp_path / "again.json"
        assert main(["verify-wfs", "--seed", "0", "--out", str(again)]) == 0
        assert again.read_bytes() == first
        f = inclusion(two(), interval())
        fact = factorize(f)
        values = [z2(), interval(), f, fact.rho, terminal_fibration(z2()), fact.lambda_]
        for value in values:
            text = serialize(value)
            assert serialize(parse(text)) == text
        rng = random.Random(7)
        for _ in range(20):
            Y = random_groupoid(rng, 4, 12)
            p = random_fibration(rng, Y, max_arrows=120).fibration
            text = serialize(p)
            assert serialize(parse(text)) == text
        prob = fact.lifting_problem(identity_fibration(fact.mid), fact.lambda_)
        text = dumps(serialize_problem(prob, factorization_of=f))
        back, g = parse_problem(loads(text))
        assert dumps(serialize_problem(back, factorization_of=g)) == text

import random

import pytest

from tribes.documents import dumps
from tribes.errors import BudgetExceeded
from tribes.fibration import validate_fibration
from tribes.groupoid import validate_groupoid
from tribes.oracle import SearchBudget
from tribes.verify import LAWS, random_fibration, random_groupoid, verify_wfs


def test_trivial_universe_passes():
    report = verify_wfs(seed=3, max_objects=1, max_arrows=2, instances=6)
    assert report.ok
    for law in ("groupoid", "factorization", "stability square", "lifting soundness"):
        assert report.tallies[law]["pass"] > 0


def test_trivial_universe_contains_only_the_point_and_z2():
    rng = random.Random(0)
    shapes = {(len(G.objects), len(G.arrows)) for G in (random_groupoid(rng, 1, 2) for _ in range(50))}
    assert shapes == {(1, 1), (1, 2)}


def test_absurd_bounds_fail_before_generation():
    with pytest.raises(BudgetExceeded):
        verify_wfs(seed=0, max_objects=100, max_arrows=1000)
    with pytest.raises(BudgetExceeded):
        verify_wfs(seed=0, max_objects=4, max_arrows=12, budget=SearchBudget(max_candidates=100))


def test_report_document_shape():
    doc = verify_wfs(seed=9, instances=2).to_document()
    assert set(doc["laws"]) == set(LAWS)
    assert doc["seed"] == 9 and doc["ok"] is True and doc["counterexamples"] == []


def test_generated_fibrations_are_valid_and_capped():
    rng = random.Random(11)
    for _ in range(30):
        base = random_groupoid(rng, 3, 8)
        gen = random_fibration(rng, base, max_arrows=40)
        assert len(gen.fibration.dom.arrows) <= 40 or gen.recipe == "identity"
        assert validate_fibration(gen.fibration) == []
        assert validate_groupoid(gen.fibration.dom) == []


def test_failures_carry_replayable_counterexamples(monkeypatch):
    import tribes.verify as V

    def broken(run, f):
        run.check("factorization", False, "injected", f=f)

    monkeypatch.setattr(V, "_factorization_laws", broken)
    report = V.verify_wfs(seed=1, instances=2)
    assert not report.ok and report.failures() == {"factorization": 2}
    cex = report.counterexamples[0]
    assert cex["law"] == "factorization" and cex["instance"] == 0
    assert cex["data"]["f"]["kind"] == "functor"
    dumps(report.to_document())

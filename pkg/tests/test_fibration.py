import random

import pytest
from hypothesis import given, strategies as st

from tribes.errors import CodomainMismatch, DomainMismatch, InvalidFibration, NotACone, NotAFibration, Violation
from tribes.fibration import (
    NormalClovenFibration,
    base_change_fibration,
    compose_fibrations,
    derive_canonical_cleavage,
    fibration,
    identity_fibration,
    mediating_arrow,
    product,
    pullback,
    terminal_fibration,
    validate_fibration,
)
from tribes.groupoid import (
    Functor,
    compose_functors,
    from_terminal,
    functor_equal,
    identity_functor,
    inclusion,
    interval,
    terminal,
    to_terminal,
    two,
    validate_groupoid,
    z2,
)
from tribes.oracle import enumerate_functors, random_functor
from tribes.paths import path_object
from tribes.verify import random_fibration, random_groupoid

seeds = st.integers(0, 10**6)


def test_pullback_of_identities_on_z2():
    Z = z2()
    sq = pullback(identity_functor(Z), identity_fibration(Z))
    assert sq.apex.objects == (("*", "*"),)
    assert set(sq.apex.arrows) == {("1", "1"), ("s", "s")}


def test_product_z2_z2():
    sq = product(z2(), z2())
    assert len(sq.apex.objects) == 1 and len(sq.apex.arrows) == 4
    assert validate_fibration(sq.proj0) == [] and validate_fibration(sq.proj1) == []


def test_pullback_along_a_point_of_the_identity():
    I = interval()
    sq = pullback(from_terminal(I, 0), identity_fibration(I))
    assert sq.apex.objects == (("pt", 0),) and list(sq.apex.arrows) == [("1_pt", "1_0")]


def test_pullback_requires_shared_codomain():
    with pytest.raises(CodomainMismatch):
        pullback(identity_functor(z2()), identity_fibration(interval()))


def _pairs_oracle(f, p):
    A, B = f.dom, p.dom
    objects = {(a, b) for a in A.objects for b in B.objects if f.on_objects[a] == p.on_objects[b]}
    arrows = {(x, y) for x in A.arrows for y in B.arrows if f.on_arrows[x] == p.on_arrows[y]}
    return objects, arrows


@given(seeds)
def test_pullback_apex_is_the_pair_groupoid(seed):
    rng = random.Random(seed)
    Y = random_groupoid(rng, 3, 8)
    p = random_fibration(rng, Y, max_arrows=80).fibration
    f = random_functor(rng, random_groupoid(rng, 3, 8), Y)
    sq = pullback(f, p)
    objects, arrows = _pairs_oracle(f, p)
    assert set(sq.apex.objects) == objects and set(sq.apex.arrows) == arrows
    assert validate_groupoid(sq.apex) == []
    assert functor_equal(compose_functors(f, sq.proj0), compose_functors(p, sq.proj1))
    assert validate_fibration(sq.proj0) == []


def test_diagonal_of_z2():
    Z = z2()
    sq = pullback(identity_functor(Z), identity_fibration(Z))
    d = mediating_arrow(sq, identity_functor(Z), identity_functor(Z))
    assert d.on_objects == {"*": ("*", "*")} and d.on_arrows["s"] == ("s", "s")


def test_not_a_cone():
    Z = z2()
    sq = product(Z, Z)
    flip = Functor(Z, Z, {"*": "*"}, {"1": "1", "s": "1"})
    sq2 = pullback(identity_functor(Z), identity_fibration(Z))
    with pytest.raises(NotACone):
        mediating_arrow(sq2, identity_functor(Z), flip)
    assert mediating_arrow(sq, identity_functor(Z), flip).on_arrows["s"] == ("s", "1")


@given(seeds)
def test_universal_property_by_enumeration(seed):
    rng = random.Random(seed)
    Y = random_groupoid(rng, 2, 4)
    p = random_fibration(rng, Y, depth=1, max_arrows=24).fibration
    f = random_functor(rng, random_groupoid(rng, 2, 4), Y)
    sq = pullback(f, p)
    W = random_groupoid(rng, 2, 3)
    for u in enumerate_functors(W, f.dom)[:4]:
        for v in enumerate_functors(W, p.dom, over=(p, compose_functors(f, u)))[:4]:
            m = mediating_arrow(sq, u, v)
            hits = [
                k for k in enumerate_functors(W, sq.apex)
                if functor_equal(compose_functors(sq.proj0, k), u)
                and functor_equal(compose_functors(sq.proj1, k), v)
            ]
            assert len(hits) == 1 and functor_equal(hits[0], m)


def test_validate_fibration_examples():
    assert validate_fibration(identity_fibration(z2())) == []
    assert validate_fibration(terminal_fibration(z2())) == []
    inc = inclusion(two(), interval())
    q = NormalClovenFibration(inc.dom, inc.cod, inc.on_objects, inc.on_arrows,
                              cleavage={(0, "1_0"): "1_0", (1, "1_1"): "1_1"})
    v = validate_fibration(q)
    assert Violation("NotAFibration", (0, "u")) in v and Violation("NotAFibration", (1, "u_inv")) in v
    with pytest.raises(NotAFibration) as exc:
        derive_canonical_cleavage(inc)
    assert (exc.value.obj, exc.value.arrow) == (0, "u")


def test_not_normal_and_bad_lift():
    Z = z2()
    idZ = identity_functor(Z)
    not_normal = NormalClovenFibration(Z, Z, idZ.on_objects, idZ.on_arrows,
                                       cleavage={("*", "1"): "s", ("*", "s"): "s"})
    assert validate_fibration(not_normal)[0].kind == "BadLift"
    p = to_terminal(Z)
    q = NormalClovenFibration(Z, p.cod, p.on_objects, p.on_arrows, cleavage={("*", "1_pt"): "s"})
    assert validate_fibration(q) == [Violation("NotNormal", ("*", "1_pt"))]
    with pytest.raises(InvalidFibration):
        fibration(p, {("*", "1_pt"): "s"})


def test_canonical_cleavage_examples():
    Z = z2()
    assert derive_canonical_cleavage(identity_functor(Z)) == {("*", "1"): "1", ("*", "s"): "s"}
    I = interval()
    assert derive_canonical_cleavage(to_terminal(I)) == {(0, "1_pt"): "1_0", (1, "1_pt"): "1_1"}
    pr0 = product(Z, Z).proj0.as_functor()
    table = derive_canonical_cleavage(pr0)
    assert table[("*", "*"), "s"] == ("s", "1")
    assert validate_fibration(fibration(pr0)) == []


def test_compose_with_identity_and_terminal():
    Z = z2()
    pr0 = product(Z, Z).proj0
    for c in (compose_fibrations(identity_fibration(Z), pr0), compose_fibrations(pr0, identity_fibration(pr0.dom))):
        assert functor_equal(c, pr0) and c.cleavage == pr0.cleavage
    t = compose_fibrations(terminal_fibration(Z), pr0)
    assert all(t.dom.is_identity(a) for a in t.cleavage.values())
    with pytest.raises(DomainMismatch):
        compose_fibrations(pr0, pr0)


def test_two_stage_lift_on_boundary_is_a_valid_lift():
    Z = z2()
    po = path_object(terminal_fibration(Z))
    c = compose_fibrations(po.square.proj0, po.boundary)
    for (o, g), lifted in c.cleavage.items():
        valid = [a for a in c.dom.out_arrows(o) if c.on_arrows[a] == g]
        assert lifted in valid


def test_base_change_examples():
    Z = z2()
    b = base_change_fibration(identity_functor(terminal()), terminal_fibration(Z))
    assert len(b.dom.objects) == 1 and len(b.dom.arrows) == 2
    I = interval()
    bc = base_change_fibration(identity_functor(I), identity_fibration(I))
    assert {k: v for k, v in bc.cleavage.items()} == {((x, x), g): (g, g) for x in I.objects for g in I.out_arrows(x)}
    po = path_object(terminal_fibration(Z))
    point = mediating_arrow(po.square, from_terminal(Z, "*"), from_terminal(Z, "*"))
    fiber = base_change_fibration(point, po.boundary)
    assert len(fiber.dom.objects) == 2
    assert validate_fibration(fiber) == []


@given(seeds)
def test_derived_cleavages_are_stable(seed):
    rng = random.Random(seed)
    Y = random_groupoid(rng, 3, 8)
    p = random_fibration(rng, Y, depth=1, max_arrows=80).fibration
    q = random_fibration(rng, p.dom, depth=1, max_arrows=80).fibration
    c = compose_fibrations(p, q)
    assert validate_fibration(c) == []
    for (e, g), a in c.cleavage.items():
        assert a == q.lift(e, p.lift(q.on_objects[e], g))
    f = random_functor(rng, random_groupoid(rng, 3, 8), Y)
    b = base_change_fibration(f, p)
    assert validate_fibration(b) == []
    for ((x, e), g), a in b.cleavage.items():
        assert a == (g, p.lift(e, f.on_arrows[g]))


@given(seeds)
def test_product_projections_are_fibrations(seed):
    rng = random.Random(seed)
    A, B = random_groupoid(rng, 3, 8), random_groupoid(rng, 3, 8)
    sq = product(A, B)
    assert validate_fibration(sq.proj0) == [] and validate_fibration(sq.proj1) == []

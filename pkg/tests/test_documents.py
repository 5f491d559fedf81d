import json
import os
import random

import pytest
from hypothesis import given, strategies as st

from tribes.documents import (
    dumps,
    loads,
    parse,
    parse_fibration,
    parse_problem,
    serialize,
    serialize_functor,
    serialize_problem,
    write_atomic,
)
from tribes.errors import DocumentSyntaxError, SchemaError, ValidationError, Violation
from tribes.fibration import identity_fibration, product, terminal_fibration
from tribes.groupoid import functor_equal, inclusion, interval, two, z2
from tribes.oracle import enumerate_functors, random_functor
from tribes.verify import random_fibration, random_groupoid
from tribes.wfs import factorize

seeds = st.integers(0, 10**6)

Z2_TEXT = """{
  "arrows": [
    [
      "1",
      "*",
      "*"
    ],
    [
      "s",
      "*",
      "*"
    ]
  ],
  "compose": [
    [
      "1",
      "1",
      "1"
    ],
    [
      "1",
      "s",
      "s"
    ],
    [
      "s",
      "1",
      "s"
    ],
    [
      "s",
      "s",
      "1"
    ]
  ],
  "identities": [
    [
      "*",
      "1"
    ]
  ],
  "inverses": [
    [
      "1",
      "1"
    ],
    [
      "s",
      "s"
    ]
  ],
  "kind": "groupoid",
  "name": "Z2",
  "objects": [
    "*"
  ]
}
"""


def test_z2_document_round_trips_byte_for_byte():
    G = parse(Z2_TEXT)
    assert G == z2()
    assert serialize(G) == Z2_TEXT


def test_key_order_and_list_order_do_not_matter():
    doc = json.loads(Z2_TEXT)
    doc["compose"].reverse()
    scrambled = json.dumps(doc, indent=1)
    assert serialize(parse(scrambled)) == Z2_TEXT


def test_composition_triples_are_f_g_then_g_after_f():
    doc = json.loads(serialize(interval()))
    assert ["u", "u_inv", "1_0"] in doc["compose"]


def test_missing_composition_entry():
    doc = json.loads(Z2_TEXT)
    del doc["compose"]
    with pytest.raises(SchemaError) as exc:
        parse(json.dumps(doc))
    assert exc.value.field == "compose"


def test_incomplete_composition_is_a_validation_error():
    doc = json.loads(Z2_TEXT)
    doc["compose"].pop()
    with pytest.raises(ValidationError) as exc:
        parse(json.dumps(doc))
    assert exc.value.violations[0].kind == "BadEndpoints"


def test_unknown_field_is_rejected():
    doc = json.loads(Z2_TEXT)
    doc["colour"] = "blue"
    with pytest.raises(SchemaError) as exc:
        parse(json.dumps(doc))
    assert exc.value.field == "colour"


def test_syntax_error_has_position():
    with pytest.raises(DocumentSyntaxError) as exc:
        loads('{\n  "kind": "groupoid",\n  "objects": [1, 2,,]\n}')
    assert (exc.value.line, exc.value.column) == (3, 20)


def test_bad_identifier_type():
    doc = json.loads(Z2_TEXT)
    doc["objects"] = [1.5]
    with pytest.raises(SchemaError) as exc:
        parse(json.dumps(doc))
    assert exc.value.field == "objects"


def test_auto_cleavage_on_the_inclusion_fails():
    f = inclusion(two(), interval())
    doc = {**serialize_functor(f), "kind": "fibration", "cleavage": "auto"}
    with pytest.raises(ValidationError) as exc:
        parse_fibration(doc)
    assert exc.value.violations == [Violation("NotAFibration", (0, "u"))]


def test_auto_cleavage_is_resolved_at_load_time():
    sq = product(z2(), z2())
    doc = {**serialize_functor(sq.proj0), "kind": "fibration", "cleavage": "auto"}
    p = parse_fibration(doc)
    assert p.cleavage[("*", "*"), "s"] == ("s", "1")


def test_explicit_bad_cleavage_is_a_validation_error():
    p = terminal_fibration(z2())
    doc = json.loads(serialize(p))
    doc["cleavage"] = [["*", "1_pt", "s"]]
    with pytest.raises(ValidationError):
        parse(json.dumps(doc))


@given(seeds)
def test_round_trips(seed):
    rng = random.Random(seed)
    X, Y = random_groupoid(rng, 4, 12), random_groupoid(rng, 4, 12)
    f = random_functor(rng, X, Y)
    p = random_fibration(rng, Y, max_arrows=60).fibration
    for value in (X, f, p):
        text = serialize(value)
        back = parse(text)
        assert serialize(back) == text
    assert parse(serialize(X)) == X
    assert functor_equal(parse(serialize(f)), f)
    q = parse(serialize(p))
    assert functor_equal(q, p) and q.cleavage == p.cleavage


def test_problem_round_trip_with_factorization_field():
    f = inclusion(two(), interval())
    fact = factorize(f)
    prob = fact.lifting_problem(identity_fibration(fact.mid), fact.lambda_)
    text = dumps(serialize_problem(prob, factorization_of=f))
    back, g = parse_problem(loads(text))
    assert functor_equal(g, f) and functor_equal(back.left, prob.left)
    assert dumps(serialize_problem(back, factorization_of=g)) == text
    assert back.left.cod == back.right.dom


def test_non_commuting_problem_is_rejected():
    T, I = two(), interval()
    f = inclusion(T, I)
    g = terminal_fibration(z2())
    tops = enumerate_functors(T, z2())
    bad = {"kind": "problem", "left": serialize_functor(f), "right": json.loads(serialize(g)),
           "top": serialize_functor(tops[0]), "bottom": serialize_functor(enumerate_functors(I, I)[1])}
    with pytest.raises((ValidationError, SchemaError)):
        parse_problem(bad)


def test_tuple_identifiers_survive():
    sq = product(interval(), z2())
    back = parse(serialize(sq.apex))
    assert back == sq.apex and all(isinstance(o, tuple) for o in back.objects)


def test_write_atomic_replaces_and_leaves_no_temp(tmp_path):
    target = tmp_path / "out.json"
    target.write_text("old")
    write_atomic(target, "new\n")
    assert target.read_text() == "new\n"
    assert os.listdir(tmp_path) == ["out.json"]

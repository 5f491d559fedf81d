"""JSON documents for groupoids, functors, fibrations and lifting problems.

Identifiers map to JSON directly (strings, integers) or as nested arrays
(tuples).  Every list in a document is sorted by the canonical identifier
order and keys are sorted, so :func:`dumps` is byte-stable.  Composition is
stored as triples ``[f, g, g_after_f]``.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import DocumentSyntaxError, SchemaError, ValidationError
from .fibration import NormalClovenFibration, derive_canonical_cleavage, validate_fibration
from .groupoid import Functor, Groupoid, sort_key, validate_functor, validate_groupoid
from .errors import NotAFibration
from .wfs import LiftingProblem

FORMAT_VERSION = 1


# -- identifiers ---------------------------------------------------------------


def encode_id(x):
    if isinstance(x, tuple):
        return [encode_id(y) for y in x]
    return x


def decode_id(x, field):
    if isinstance(x, list):
        return tuple(decode_id(y, field) for y in x)
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise SchemaError(field, f"identifier {x!r} is not a string, integer or array")
    return x


def _rows(pairs):
    rows = sorted(pairs, key=lambda row: tuple(sort_key(x) for x in row))
    return [[encode_id(x) for x in row] for row in rows]


# -- text ----------------------------------------------------------------------


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise SchemaError("kind", "document must be a JSON object")
    return doc


def write_atomic(path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- schema helpers ------------------------------------------------------------


def _fields(doc, kind, required, optional=()):
    if not isinstance(doc, dict):
        raise SchemaError(kind, "expected a JSON object")
    if doc.get("kind") != kind:
        raise SchemaError("kind", f"expected {kind!r}, got {doc.get('kind')!r}")
    allowed = set(required) | set(optional) | {"kind"}
    for key in sorted(doc):
        if key not in allowed:
            raise SchemaError(key, "unknown field")
    for key in required:
        if key not in doc:
            raise SchemaError(key, "missing field")


def _table(doc, field, width):
    rows = doc[field]
    if not isinstance(rows, list):
        raise SchemaError(field, "expected an array")
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != width:
            raise SchemaError(field, f"expected rows of length {width}")
        out.append(tuple(decode_id(x, field) for x in row))
    return out


class _Context:
    """Interns groupoids so repeated embeddings decode to one object."""

    def __init__(self, validate):
        self.validate = validate
        self.groupoids = {}


# -- groupoids -----------------------------------------------------------------


def serialize_groupoid(G: Groupoid) -> dict:
    return {
        "kind": "groupoid",
        "name": G.name,
        "objects": [encode_id(x) for x in G.objects],
        "arrows": _rows((a, s, t) for a, (s, t) in G.arrows.items()),
        "identities": _rows(G.identities.items()),
        "inverses": _rows(G.inverses.items()),
        "compose": _rows((f, g, h) for (g, f), h in G.composition.items()),
    }


def parse_groupoid(doc: dict, validate: bool = True, _ctx=None) -> Groupoid:
    ctx = _ctx or _Context(validate)
    key = json.dumps(doc, sort_keys=True)
    if key in ctx.groupoids:
        return ctx.groupoids[key]
    _fields(doc, "groupoid", ["objects", "arrows", "identities", "inverses", "compose"], ["name"])
    if not isinstance(doc["objects"], list):
        raise SchemaError("objects", "expected an array")
    objects = [decode_id(x, "objects") for x in doc["objects"]]
    arrows = {a: (s, t) for a, s, t in _table(doc, "arrows", 3)}
    identities = dict(_table(doc, "identities", 2))
    inverses = dict(_table(doc, "inverses", 2))
    composition = {(g, f): h for f, g, h in _table(doc, "compose", 3)}
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("name", "expected a string")
    G = Groupoid(objects, arrows, identities, inverses, composition=composition, name=name)
    if ctx.validate:
        violations = validate_groupoid(G)
        if violations:
            raise ValidationError(violations)
    ctx.groupoids[key] = G
    return G


# -- functors and fibrations ---------------------------------------------------


def _functor_body(F: Functor) -> dict:
    return {
        "name": F.name,
        "dom": serialize_groupoid(F.dom),
        "cod": serialize_groupoid(F.cod),
        "objects": _rows(F.on_objects.items()),
        "arrows": _rows(F.on_arrows.items()),
    }


def serialize_functor(F: Functor) -> dict:
    return {"kind": "functor", **_functor_body(F)}


def serialize_fibration(p: NormalClovenFibration) -> dict:
    cleavage = _rows((e, g, a) for (e, g), a in p.cleavage.items())
    return {"kind": "fibration", **_functor_body(p), "cleavage": cleavage}


def _parse_functor_parts(doc, ctx):
    dom = parse_groupoid(doc["dom"], _ctx=ctx)
    cod = parse_groupoid(doc["cod"], _ctx=ctx)
    on_objects = dict(_table(doc, "objects", 2))
    on_arrows = dict(_table(doc, "arrows", 2))
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("name", "expected a string")
    return dom, cod, on_objects, on_arrows, name


def parse_functor(doc: dict, validate: bool = True, _ctx=None) -> Functor:
    ctx = _ctx or _Context(validate)
    _fields(doc, "functor", ["dom", "cod", "objects", "arrows"], ["name"])
    F = Functor(*_parse_functor_parts(doc, ctx))
    if ctx.validate:
        violations = validate_functor(F)
        if violations:
            raise ValidationError(violations)
    return F


def parse_fibration(doc: dict, validate: bool = True, _ctx=None) -> NormalClovenFibration:
    """Parse a fibration; the cleavage ``"auto"`` is resolved canonically at load time."""
    ctx = _ctx or _Context(validate)
    _fields(doc, "fibration", ["dom", "cod", "objects", "arrows", "cleavage"], ["name"])
    dom, cod, on_objects, on_arrows, name = _parse_functor_parts(doc, ctx)
    F = Functor(dom, cod, on_objects, on_arrows, name)
    if ctx.validate:
        violations = validate_functor(F)
        if violations:
            raise ValidationError(violations)
    raw = doc["cleavage"]
    if raw == "auto":
        try:
            cleavage = derive_canonical_cleavage(F)
        except NotAFibration as exc:
            raise ValidationError([exc.violation()]) from None
    elif isinstance(raw, list):
        cleavage = {(e, g): a for e, g, a in _table(doc, "cleavage", 3)}
    else:
        raise SchemaError("cleavage", 'expected "auto" or an array of [object, arrow, lift]')
    p = NormalClovenFibration(dom, cod, on_objects, on_arrows, cleavage=cleavage, name=name)
    if ctx.validate:
        violations = validate_fibration(p)
        if violations:
            raise ValidationError(violations)
        p.__dict__.setdefault("_memo", {})["validation"] = []
    return p


# -- lifting problems ----------------------------------------------------------


def serialize_problem(prob: LiftingProblem, factorization_of: Functor | None = None) -> dict:
    doc = {
        "kind": "problem",
        "left": serialize_functor(prob.left),
        "right": serialize_fibration(prob.right),
        "top": serialize_functor(prob.top),
        "bottom": serialize_functor(prob.bottom),
    }
    if factorization_of is not None:
        doc["factorization_of"] = serialize_functor(factorization_of)
    return doc


def parse_problem(doc: dict, validate: bool = True):
    """Parse a lifting problem.

    Returns ``(problem, f)`` where ``f`` is the functor named by the
    optional ``factorization_of`` field (the left side is then claimed to
    be the unit of its factorization) or ``None``.
    """
    ctx = _Context(validate)
    _fields(doc, "problem", ["left", "right", "top", "bottom"], ["factorization_of"])
    prob = LiftingProblem(
        parse_functor(doc["left"], _ctx=ctx),
        parse_fibration(doc["right"], _ctx=ctx),
        parse_functor(doc["top"], _ctx=ctx),
        parse_functor(doc["bottom"], _ctx=ctx),
    )
    if validate and not prob.commutes():
        raise ValidationError([], "the lifting square does not commute")
    f = parse_functor(doc["factorization_of"], _ctx=ctx) if "factorization_of" in doc else None
    return prob, f


# -- dispatch ------------------------------------------------------------------


_PARSERS = {
    "groupoid": parse_groupoid,
    "functor": parse_functor,
    "fibration": parse_fibration,
    "problem": parse_problem,
}


def parse(text: str, validate: bool = True):
    """Parse any interchange document by its ``kind``."""
    doc = loads(text)
    kind = doc.get("kind")
    if kind not in _PARSERS:
        raise SchemaError("kind", f"unknown document kind {kind!r}")
    return _PARSERS[kind](doc, validate=validate)


def serialize(value) -> str:
    if isinstance(value, Groupoid):
        return dumps(serialize_groupoid(value))
    if isinstance(value, NormalClovenFibration):
        return dumps(serialize_fibration(value))
    if isinstance(value, Functor):
        return dumps(serialize_functor(value))
    if isinstance(value, LiftingProblem):
        return dumps(serialize_problem(value))
    raise TypeError(f"cannot serialize {type(value).__name__}")

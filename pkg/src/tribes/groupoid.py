"""Finite groupoids and functors with on-the-nose structural equality.

Identifiers are hashable tokens: strings, integers, or (nested) tuples of
those.  Derived constructions name their objects and arrows by tuples of the
names they were built from, so repeated runs produce identical structures.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import product
from typing import Any, Callable, Hashable, Iterable, Mapping

from .errors import DomainMismatch, ValidationError, Violation

ObjId = Hashable
ArrId = Hashable


@lru_cache(maxsize=1 << 20)
def sort_key(x: Any):
    """Total order on identifiers: ints < strings < tuples (componentwise)."""
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    raise TypeError(f"unsupported identifier {x!r}")


def canonical(items: Iterable) -> list:
    return sorted(items, key=sort_key)


def memo(owner, key, factory):
    """Cache ``factory()`` on ``owner`` under ``key``.

    Values are kept alive by the owner, so keys built from ``id()`` of
    other objects must keep those objects reachable from the value.
    """
    store = owner.__dict__.setdefault("_memo", {})
    try:
        return store[key]
    except KeyError:
        value = store[key] = factory()
        return value


class Groupoid:
    """A finite groupoid.

    ``compose(g, f)`` is ``g`` after ``f`` and is defined exactly when
    ``tgt(f) == src(g)``.  The composition is either an explicit table
    (documents, builtins) or a function for derived groupoids; the full
    table is always available as :attr:`composition`.
    """

    def __init__(
        self,
        objects: Iterable[ObjId],
        arrows: Mapping[ArrId, tuple[ObjId, ObjId]],
        identities: Mapping[ObjId, ArrId],
        inverses: Mapping[ArrId, ArrId],
        composition: Mapping[tuple[ArrId, ArrId], ArrId] | None = None,
        compose_fn: Callable[[ArrId, ArrId], ArrId] | None = None,
        name: str = "",
    ):
        if (composition is None) == (compose_fn is None):
            raise ValueError("give exactly one of composition or compose_fn")
        self.objects = tuple(canonical(objects))
        self.arrows = {a: tuple(arrows[a]) for a in canonical(arrows)}
        self.identities = dict(identities)
        self.inverses = dict(inverses)
        self.name = name
        if composition is not None:
            self._table = dict(composition)
            self._compose_fn = None
        else:
            self._table = None
            self._compose_fn = compose_fn
            self._cache = {}

    # -- structure ---------------------------------------------------------

    def src(self, a: ArrId) -> ObjId:
        return self.arrows[a][0]

    def tgt(self, a: ArrId) -> ObjId:
        return self.arrows[a][1]

    def identity(self, x: ObjId) -> ArrId:
        return self.identities[x]

    def inverse(self, a: ArrId) -> ArrId:
        return self.inverses[a]

    def compose(self, g: ArrId, f: ArrId) -> ArrId:
        if self._table is not None:
            return self._table[g, f]
        try:
            return self._cache[g, f]
        except KeyError:
            pass
        if self.arrows[f][1] != self.arrows[g][0]:
            raise KeyError((g, f))
        h = self._cache[g, f] = self._compose_fn(g, f)
        return h

    def chain(self, *arrows: ArrId) -> ArrId:
        """Compose right to left: ``chain(h, g, f) == h after g after f``."""
        result = arrows[-1]
        for a in reversed(arrows[:-1]):
            result = self.compose(a, result)
        return result

    @property
    def has_table(self) -> bool:
        return self._table is not None

    @cached_property
    def composition(self) -> dict[tuple[ArrId, ArrId], ArrId]:
        if self._table is not None:
            return self._table
        for f in self.arrows:
            for g in self._out[self.tgt(f)]:
                self.compose(g, f)
        return self._cache

    @cached_property
    def _out(self) -> dict[ObjId, list[ArrId]]:
        out = {x: [] for x in self.objects}
        for a, (s, _) in self.arrows.items():
            if s in out:
                out[s].append(a)
        return out

    @cached_property
    def _hom(self) -> dict[tuple[ObjId, ObjId], list[ArrId]]:
        hom = {}
        for a, st in self.arrows.items():
            hom.setdefault(st, []).append(a)
        return hom

    def out_arrows(self, x: ObjId) -> list[ArrId]:
        """Arrows with source ``x``, ordered by (tgt, id)."""
        return self._out_sorted[x]

    @cached_property
    def _out_sorted(self):
        return {
            x: sorted(arrs, key=lambda a: (sort_key(self.tgt(a)), sort_key(a)))
            for x, arrs in self._out.items()
        }

    def hom(self, x: ObjId, y: ObjId) -> list[ArrId]:
        return self._hom.get((x, y), [])

    @cached_property
    def components(self) -> list[tuple[ObjId, ...]]:
        """Connected components in canonical order, each sorted."""
        seen = set()
        comps = []
        for x in self.objects:
            if x in seen:
                continue
            comp = [x]
            seen.add(x)
            stack = [x]
            while stack:
                y = stack.pop()
                for a in self._out[y]:
                    z = self.tgt(a)
                    if z not in seen:
                        seen.add(z)
                        comp.append(z)
                        stack.append(z)
            comps.append(tuple(canonical(comp)))
        return comps

    def composable_pairs(self):
        for f in self.arrows:
            for g in self._out[self.tgt(f)]:
                yield g, f

    def is_identity(self, a: ArrId) -> bool:
        s, t = self.arrows[a]
        return s == t and self.identities.get(s) == a

    # -- equality ----------------------------------------------------------

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.arrows == other.arrows
            and self.identities == other.identities
            and self.inverses == other.inverses
            and self.composition == other.composition
        )

    def __hash__(self):
        return hash((len(self.objects), len(self.arrows)))

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Groupoid({label}{len(self.objects)} objects, {len(self.arrows)} arrows)"


class Functor:
    """A map of groupoids given by its object and arrow assignments."""

    def __init__(self, dom: Groupoid, cod: Groupoid, on_objects, on_arrows, name: str = ""):
        self.dom = dom
        self.cod = cod
        self.on_objects = dict(on_objects)
        self.on_arrows = dict(on_arrows)
        self.name = name

    def obj(self, x: ObjId) -> ObjId:
        return self.on_objects[x]

    def arr(self, a: ArrId) -> ArrId:
        return self.on_arrows[a]

    def as_functor(self) -> "Functor":
        """The bare functor, dropping any extra structure a subclass carries."""
        return Functor(self.dom, self.cod, self.on_objects, self.on_arrows, self.name)

    def __repr__(self):
        label = f"{self.name!r}: " if self.name else ""
        return f"{type(self).__name__}({label}{self.dom!r} -> {self.cod!r})"


def functor_equal(F: Functor, G: Functor) -> bool:
    return (
        F.on_objects == G.on_objects
        and F.on_arrows == G.on_arrows
        and F.dom == G.dom
        and F.cod == G.cod
    )


def compose_functors(G: Functor, F: Functor) -> Functor:
    """``G`` after ``F``."""
    if F.cod != G.dom:
        raise DomainMismatch(f"cannot compose {G!r} after {F!r}: codomain of F is not domain of G")
    return Functor(
        F.dom,
        G.cod,
        {x: G.on_objects[y] for x, y in F.on_objects.items()},
        {a: G.on_arrows[b] for a, b in F.on_arrows.items()},
    )


def compose_all(*functors: Functor) -> Functor:
    """Right-to-left composite of a chain of functors."""
    result = functors[-1]
    for F in reversed(functors[:-1]):
        result = compose_functors(F, result)
    return result


def identity_functor(G: Groupoid) -> Functor:
    return Functor(G, G, {x: x for x in G.objects}, {a: a for a in G.arrows}, name="id")


def is_identity_functor(F: Functor) -> bool:
    return F.dom == F.cod and all(k == v for k, v in F.on_objects.items()) and all(
        k == v for k, v in F.on_arrows.items()
    )


# -- validation -------------------------------------------------------------


def validate_groupoid(G: Groupoid) -> list[Violation]:
    """Check every groupoid law; an empty list means the groupoid is valid."""
    out: list[Violation] = []
    objs = set(G.objects)
    for a, (s, t) in G.arrows.items():
        if s not in objs or t not in objs:
            out.append(Violation("BadEndpoints", (a,), "endpoint is not an object"))
    if out:
        return out

    for x in G.objects:
        i = G.identities.get(x)
        if i is None or i not in G.arrows or G.arrows[i] != (x, x):
            out.append(Violation("MissingIdentity", (x,)))
    bad_ids = {v.witness[0] for v in out}

    table = G.composition
    for (g, f), h in table.items():
        if f not in G.arrows or g not in G.arrows or G.tgt(f) != G.src(g):
            out.append(Violation("BadEndpoints", (g, f), "composite defined on a non-composable pair"))
        elif h not in G.arrows or G.arrows[h] != (G.src(f), G.tgt(g)):
            out.append(Violation("BadEndpoints", (g, f), "composite has wrong endpoints"))
    for g, f in G.composable_pairs():
        if (g, f) not in table:
            out.append(Violation("BadEndpoints", (g, f), "missing composite"))
    if out and any(v.kind == "BadEndpoints" for v in out):
        return out

    for a, (s, t) in G.arrows.items():
        if s not in bad_ids and table[a, G.identities[s]] != a:
            out.append(Violation("MissingIdentity", (s, a), "right identity law fails"))
        if t not in bad_ids and table[G.identities[t], a] != a:
            out.append(Violation("MissingIdentity", (t, a), "left identity law fails"))

    for a, (s, t) in G.arrows.items():
        b = G.inverses.get(a)
        if b is None or b not in G.arrows or G.arrows[b] != (t, s):
            out.append(Violation("MissingInverse", (a,)))
            continue
        if s in bad_ids or t in bad_ids:
            continue
        if table[b, a] != G.identities[s] or table[a, b] != G.identities[t]:
            out.append(Violation("MissingInverse", (a,), f"stored inverse {b!r} fails the inverse laws"))

    for f in G.arrows:
        for g in G.out_arrows(G.tgt(f)):
            gf = table[g, f]
            for h in G.out_arrows(G.tgt(g)):
                if table[h, gf] != table[table[h, g], f]:
                    out.append(Violation("NonAssociative", (h, g, f)))
    return out


def check_groupoid(G: Groupoid) -> Groupoid:
    violations = validate_groupoid(G)
    if violations:
        raise ValidationError(violations)
    return G


def validate_functor(F: Functor) -> list[Violation]:
    """Check that ``F`` preserves endpoints, identities and all composites."""
    X, Y = F.dom, F.cod
    out: list[Violation] = []
    for x in X.objects:
        if F.on_objects.get(x) not in Y.objects:
            out.append(Violation("BadEndpointImage", (x,), "object not mapped into the codomain"))
    for a, (s, t) in X.arrows.items():
        b = F.on_arrows.get(a)
        if b not in Y.arrows:
            out.append(Violation("BadEndpointImage", (a,), "arrow not mapped into the codomain"))
        elif Y.arrows[b] != (F.on_objects.get(s), F.on_objects.get(t)):
            out.append(Violation("BadEndpointImage", (a,)))
    extra = (set(F.on_objects) - set(X.objects)) | (set(F.on_arrows) - set(X.arrows))
    for k in canonical(extra):
        out.append(Violation("BadEndpointImage", (k,), "assignment for an element outside the domain"))
    if out:
        return out
    for x in X.objects:
        if F.on_arrows[X.identities[x]] != Y.identities[F.on_objects[x]]:
            out.append(Violation("IdentityNotPreserved", (X.identities[x],)))
    for (g, f), h in X.composition.items():
        if F.on_arrows[h] != Y.compose(F.on_arrows[g], F.on_arrows[f]):
            out.append(Violation("CompositionNotPreserved", (g, f)))
    return out


def check_functor(F: Functor) -> Functor:
    violations = validate_functor(F)
    if violations:
        raise ValidationError(violations)
    return F


# -- builders ---------------------------------------------------------------


def from_group(obj: ObjId, elements: Iterable, mul: Callable, unit, inv: Callable | None = None,
               name: str = "") -> Groupoid:
    """One-object groupoid of a finite group given by its multiplication."""
    elements = list(elements)
    table = {(g, h): mul(g, h) for g in elements for h in elements}
    if inv is None:
        inv = lambda g: next(h for h in elements if mul(g, h) == unit)
    return Groupoid(
        [obj],
        {g: (obj, obj) for g in elements},
        {obj: unit},
        {g: inv(g) for g in elements},
        composition=table,
        name=name,
    )


def connected(objects: Iterable[ObjId], order: int = 1, name: str = "") -> Groupoid:
    """Indiscrete groupoid on ``objects`` times the cyclic group of ``order``.

    Arrows are triples ``(x, y, k)`` with ``k`` in Z/order; composition adds
    the group labels.
    """
    objects = canonical(objects)
    arrows = {(x, y, k): (x, y) for x in objects for y in objects for k in range(order)}
    return Groupoid(
        objects,
        arrows,
        {x: (x, x, 0) for x in objects},
        {(x, y, k): (y, x, (-k) % order) for (x, y, k) in arrows},
        compose_fn=lambda g, f: (f[0], g[1], (f[2] + g[2]) % order),
        name=name,
    )


def disjoint_union(parts: Iterable[Groupoid], name: str = "") -> Groupoid:
    """Union of groupoids whose identifiers are already disjoint."""
    parts = list(parts)
    objects, arrows, ids, invs, table = [], {}, {}, {}, {}
    for P in parts:
        objects.extend(P.objects)
        arrows.update(P.arrows)
        ids.update(P.identities)
        invs.update(P.inverses)
        table.update(P.composition)
    return Groupoid(objects, arrows, ids, invs, composition=table, name=name)


def with_table(G: Groupoid) -> Groupoid:
    """Copy of ``G`` whose composition is stored as an explicit table."""
    if G.has_table:
        return G
    return Groupoid(G.objects, G.arrows, G.identities, G.inverses, composition=G.composition, name=G.name)


def terminal() -> Groupoid:
    """The terminal groupoid; its names ``pt`` and ``1_pt`` are reserved."""
    return TERMINAL


TERMINAL = Groupoid(["pt"], {"1_pt": ("pt", "pt")}, {"pt": "1_pt"}, {"1_pt": "1_pt"},
                    composition={("1_pt", "1_pt"): "1_pt"}, name="1")


def z2() -> Groupoid:
    """Z/2 as a one-object groupoid: object ``*``, arrows ``1`` and ``s``."""
    mul = lambda g, h: "1" if g == h else "s"
    return from_group("*", ["1", "s"], mul, "1", name="Z2")


def cyclic(n: int, obj: ObjId = "*") -> Groupoid:
    return from_group(obj, range(n), lambda g, h: (g + h) % n, 0, lambda g: (-g) % n, name=f"Z{n}")


def interval() -> Groupoid:
    """The free-standing isomorphism ``u: 0 -> 1``."""
    arrows = {"1_0": (0, 0), "1_1": (1, 1), "u": (0, 1), "u_inv": (1, 0)}
    table = {
        ("1_0", "1_0"): "1_0", ("1_1", "1_1"): "1_1",
        ("u", "1_0"): "u", ("1_1", "u"): "u",
        ("u_inv", "1_1"): "u_inv", ("1_0", "u_inv"): "u_inv",
        ("u_inv", "u"): "1_0", ("u", "u_inv"): "1_1",
    }
    return Groupoid([0, 1], arrows, {0: "1_0", 1: "1_1"},
                    {"1_0": "1_0", "1_1": "1_1", "u": "u_inv", "u_inv": "u"},
                    composition=table, name="I")


def discrete(objects: Iterable[ObjId], name: str = "") -> Groupoid:
    objects = list(objects)
    ident = {x: f"1_{x}" for x in objects}
    return Groupoid(objects, {i: (x, x) for x, i in ident.items()}, ident,
                    {i: i for i in ident.values()},
                    composition={(i, i): i for i in ident.values()}, name=name)


def two() -> Groupoid:
    """Discrete groupoid on the objects 0 and 1."""
    return discrete([0, 1], name="2")


def to_terminal(G: Groupoid) -> Functor:
    return Functor(G, TERMINAL, {x: "pt" for x in G.objects}, {a: "1_pt" for a in G.arrows}, name="!")


def from_terminal(G: Groupoid, x: ObjId) -> Functor:
    """The functor picking the object ``x``."""
    return Functor(TERMINAL, G, {"pt": x}, {"1_pt": G.identities[x]}, name=f"pick {x!r}")


def inclusion(sub: Groupoid, G: Groupoid) -> Functor:
    return Functor(sub, G, {x: x for x in sub.objects}, {a: a for a in sub.arrows})


def vertical_arrows(p: Functor) -> list[ArrId]:
    """Arrows of the domain sent to identities."""
    Y = p.cod
    return [a for a in p.dom.arrows if Y.is_identity(p.on_arrows[a])]


def all_object_maps(X: Groupoid, Y: Groupoid):
    for images in product(Y.objects, repeat=len(X.objects)):
        yield dict(zip(X.objects, images))

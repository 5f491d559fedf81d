"""Normal cloven fibrations of groupoids, chosen pullbacks and base change.

Composites and base changes never recompute a cleavage: they derive it
from the cleavages of their inputs, which makes the stability laws

    (p q)^-1 g     = q^-1 p^-1 g
    (f* p)^-1 g    = (g, p^-1 f(g))

hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping

from .errors import (
    CodomainMismatch,
    DomainMismatch,
    InvalidFibration,
    NotACone,
    NotAFibration,
    Violation,
)
from .groupoid import (
    ArrId,
    Functor,
    Groupoid,
    ObjId,
    TERMINAL,
    compose_functors,
    memo,
    validate_functor,
)


class NormalClovenFibration(Functor):
    """A functor ``E -> X`` together with a chosen lift for every ``(e, gamma)``.

    The cleavage is either an explicit table keyed by ``(e, gamma)`` or a
    function computing lifts on demand (derived fibrations).  Fibrations
    built by this package are marked ``trusted``; user-supplied ones are
    validated the first time a construction consumes them.
    """

    def __init__(self, dom, cod, on_objects, on_arrows, cleavage: Mapping | None = None,
                 lift_fn: Callable[[ObjId, ArrId], ArrId] | None = None, name: str = "",
                 trusted: bool = False):
        super().__init__(dom, cod, on_objects, on_arrows, name)
        if (cleavage is None) == (lift_fn is None):
            raise ValueError("give exactly one of cleavage or lift_fn")
        self._table = dict(cleavage) if cleavage is not None else None
        self._lift_fn = lift_fn
        self._lifts = {}
        self.trusted = trusted

    def lift(self, e: ObjId, gamma: ArrId) -> ArrId:
        """The chosen lift of ``gamma`` starting at ``e``."""
        if self._table is not None:
            return self._table[e, gamma]
        try:
            return self._lifts[e, gamma]
        except KeyError:
            a = self._lifts[e, gamma] = self._lift_fn(e, gamma)
            return a

    @cached_property
    def cleavage(self) -> dict[tuple[ObjId, ArrId], ArrId]:
        """The full cleavage table over every ``(e, gamma)`` with ``src(gamma) = p(e)``."""
        if self._table is not None:
            return self._table
        X = self.cod
        return {
            (e, g): self.lift(e, g)
            for e in self.dom.objects
            for g in X.out_arrows(self.on_objects[e])
        }

    def with_cleavage(self, cleavage: Mapping) -> "NormalClovenFibration":
        return NormalClovenFibration(self.dom, self.cod, self.on_objects, self.on_arrows,
                                     cleavage=cleavage, name=self.name)


@dataclass(eq=False)
class PullbackSquare:
    """The chosen pullback of ``f: A -> X`` along a fibration ``p: B -> X``.

    ``proj0: A x_X B -> A`` is the base change of ``p`` along ``f`` and is
    always a fibration.  ``proj1`` is a fibration as well when ``f`` is one.
    """

    apex: Groupoid
    proj0: NormalClovenFibration
    proj1: Functor
    f: Functor
    p: NormalClovenFibration

    @property
    def cospan(self):
        return self.f, self.p


def fibration(F: Functor, cleavage="auto", check: bool = True) -> NormalClovenFibration:
    """Attach a cleavage to a functor.

    ``cleavage`` is a table keyed by ``(e, gamma)`` or ``"auto"`` for
    :func:`derive_canonical_cleavage`.  With ``check`` the result is
    validated and :class:`InvalidFibration` raised on any violation.
    """
    if isinstance(cleavage, str):
        if cleavage != "auto":
            raise ValueError(f"unknown cleavage token {cleavage!r}")
        cleavage = derive_canonical_cleavage(F)
    q = NormalClovenFibration(F.dom, F.cod, F.on_objects, F.on_arrows, cleavage=cleavage, name=F.name)
    if check:
        ensure_fibration(q)
    return q


def ensure_fibration(q: NormalClovenFibration) -> NormalClovenFibration:
    """Validate an untrusted fibration once; derived fibrations pass through."""
    if q.trusted:
        return q
    violations = memo(q, "validation", lambda: validate_fibration(q))
    if violations:
        raise InvalidFibration(violations)
    return q


def validate_fibration(q: NormalClovenFibration) -> list[Violation]:
    """Check the functor laws, then the endpoint and normality laws of every lift."""
    out = validate_functor(q)
    if out:
        return out
    E, X = q.dom, q.cod
    for e in E.objects:
        base = q.on_objects[e]
        for g in X.out_arrows(base):
            try:
                a = q.lift(e, g)
            except KeyError:
                if any(q.on_arrows[c] == g for c in E.out_arrows(e)):
                    out.append(Violation("BadLift", (e, g), "cleavage has no entry"))
                else:
                    out.append(Violation("NotAFibration", (e, g)))
                continue
            if a not in E.arrows or E.src(a) != e or q.on_arrows[a] != g:
                out.append(Violation("BadLift", (e, g)))
            elif X.is_identity(g) and a != E.identities[e]:
                out.append(Violation("NotNormal", (e, g)))
    if q._table is not None:
        for (e, g) in q._table:
            if e not in q.on_objects or g not in X.arrows or X.src(g) != q.on_objects[e]:
                out.append(Violation("BadLift", (e, g), "cleavage entry outside the domain of lifting"))
    return out


def derive_canonical_cleavage(p: Functor) -> dict[tuple[ObjId, ArrId], ArrId]:
    """First valid lift in the (src, tgt, id) order; identities lift to identities."""
    E, X = p.dom, p.cod
    table = {}
    for e in E.objects:
        first = {}
        for a in E.out_arrows(e):
            first.setdefault(p.on_arrows[a], a)
        for g in X.out_arrows(p.on_objects[e]):
            if X.is_identity(g):
                table[e, g] = E.identities[e]
            elif g in first:
                table[e, g] = first[g]
            else:
                raise NotAFibration(e, g)
    return table


def identity_fibration(G: Groupoid) -> NormalClovenFibration:
    def build():
        return NormalClovenFibration(G, G, {x: x for x in G.objects}, {a: a for a in G.arrows},
                                     lift_fn=lambda e, g: g, name="id", trusted=True)
    return memo(G, "identity_fibration", build)


def terminal_fibration(G: Groupoid) -> NormalClovenFibration:
    def build():
        return NormalClovenFibration(G, TERMINAL, {x: "pt" for x in G.objects},
                                     {a: "1_pt" for a in G.arrows},
                                     lift_fn=lambda e, g: G.identities[e], name="!", trusted=True)
    return memo(G, "terminal_fibration", build)


def compose_fibrations(p: NormalClovenFibration, q: NormalClovenFibration) -> NormalClovenFibration:
    """``p`` after ``q``, lifting first along ``p`` and then along ``q``."""
    if q.cod != p.dom:
        raise DomainMismatch(f"cannot compose {p!r} after {q!r}")
    ensure_fibration(p)
    ensure_fibration(q)

    def lift(e, g):
        return q.lift(e, p.lift(q.on_objects[e], g))

    F = compose_functors(p, q)
    return NormalClovenFibration(F.dom, F.cod, F.on_objects, F.on_arrows, lift_fn=lift, trusted=True)


def pullback(f: Functor, p: NormalClovenFibration) -> PullbackSquare:
    """The chosen pullback square of ``f`` along the fibration ``p``.

    Objects of the apex are pairs ``(a, b)`` with ``f(a) = p(b)``, arrows
    pairs ``(alpha, beta)`` with ``f(alpha) = p(beta)``; structure is
    componentwise.  The square is memoised on ``p`` so the choice is unique.
    """
    if f.cod != p.cod:
        raise CodomainMismatch(f"{f!r} and {p!r} do not share a codomain")
    ensure_fibration(p)
    if isinstance(f, NormalClovenFibration):
        ensure_fibration(f)
    return memo(p, ("pullback", id(f)), lambda: _build_pullback(f, p))


def _build_pullback(f: Functor, p: NormalClovenFibration) -> PullbackSquare:
    A, B = f.dom, p.dom
    fo, fa, po, pa = f.on_objects, f.on_arrows, p.on_objects, p.on_arrows
    obj_fiber, arr_fiber = {}, {}
    for b in B.objects:
        obj_fiber.setdefault(po[b], []).append(b)
    for be in B.arrows:
        arr_fiber.setdefault(pa[be], []).append(be)

    objects = [(a, b) for a in A.objects for b in obj_fiber.get(fo[a], ())]
    arrows = {}
    for al, (s, t) in A.arrows.items():
        for be in arr_fiber.get(fa[al], ()):
            bs, bt = B.arrows[be]
            arrows[al, be] = ((s, bs), (t, bt))
    apex = Groupoid(
        objects,
        arrows,
        {(a, b): (A.identities[a], B.identities[b]) for a, b in objects},
        {(al, be): (A.inverses[al], B.inverses[be]) for al, be in arrows},
        compose_fn=lambda g, h: (A.compose(g[0], h[0]), B.compose(g[1], h[1])),
    )

    proj0 = NormalClovenFibration(
        apex, A,
        {x: x[0] for x in objects}, {a: a[0] for a in arrows},
        lift_fn=lambda ab, g: (g, p.lift(ab[1], fa[g])),
        trusted=True,
    )
    if isinstance(f, NormalClovenFibration):
        proj1 = NormalClovenFibration(
            apex, B,
            {x: x[1] for x in objects}, {a: a[1] for a in arrows},
            lift_fn=lambda ab, d: (f.lift(ab[0], pa[d]), d),
            trusted=True,
        )
    else:
        proj1 = Functor(apex, B, {x: x[1] for x in objects}, {a: a[1] for a in arrows})
    return PullbackSquare(apex, proj0, proj1, f, p)


def base_change_fibration(f: Functor, p: NormalClovenFibration) -> NormalClovenFibration:
    """``f* p``: the projection of the chosen pullback onto the domain of ``f``."""
    return pullback(f, p).proj0


def mediating_arrow(sq: PullbackSquare, u: Functor, v: Functor) -> Functor:
    """The pairing ``<u, v>`` into the apex; requires ``f u = p v``."""
    f, p = sq.f, sq.p
    if u.cod != f.dom or v.cod != p.dom or u.dom != v.dom:
        raise NotACone("legs do not match the cospan")
    Z = u.dom
    for x in Z.objects:
        if f.on_objects[u.on_objects[x]] != p.on_objects[v.on_objects[x]]:
            raise NotACone(f"f u and p v disagree on object {x!r}")
    for a in Z.arrows:
        if f.on_arrows[u.on_arrows[a]] != p.on_arrows[v.on_arrows[a]]:
            raise NotACone(f"f u and p v disagree on arrow {a!r}")
    return Functor(
        Z, sq.apex,
        {x: (u.on_objects[x], v.on_objects[x]) for x in Z.objects},
        {a: (u.on_arrows[a], v.on_arrows[a]) for a in Z.arrows},
    )


def product(A: Groupoid, B: Groupoid) -> PullbackSquare:
    """``A x B`` as the pullback over the terminal groupoid; both legs are fibrations."""
    return pullback(terminal_fibration(A), terminal_fibration(B))

"""Path objects of groupoid fibrations and their stability comparison.

For a fibration ``p: E -> X`` the path groupoid has the p-vertical arrows
``alpha: a -> b`` of ``E`` as objects, written ``(a, b, alpha)``, and as
arrows the commuting squares ``(abar, bbar)`` out of them.  An arrow is
named ``(abar, bbar, alpha)``: the pair alone does not fix its source.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import CodomainMismatch
from .fibration import (
    NormalClovenFibration,
    PullbackSquare,
    compose_fibrations,
    ensure_fibration,
    mediating_arrow,
    pullback,
)
from .groupoid import (
    Functor,
    Groupoid,
    canonical,
    compose_functors,
    functor_equal,
    identity_functor,
    memo,
    validate_functor,
)


@dataclass(eq=False)
class PathObject:
    base: NormalClovenFibration
    path_groupoid: Groupoid
    unit: Functor
    boundary: NormalClovenFibration
    square: PullbackSquare  # E x_p E with both projections

    @cached_property
    def boundary0(self) -> NormalClovenFibration:
        return compose_fibrations(self.square.proj0, self.boundary)

    @cached_property
    def boundary1(self) -> NormalClovenFibration:
        return compose_fibrations(self.square.proj1, self.boundary)

    @cached_property
    def diagonal(self) -> Functor:
        E = self.base.dom
        return mediating_arrow(self.square, identity_functor(E), identity_functor(E))


def path_object(p: NormalClovenFibration) -> PathObject:
    """Factor the diagonal of ``p`` as ``E -> Path(p) -> E x_p E``."""
    ensure_fibration(p)
    return memo(p, "path_object", lambda: _build_path_object(p))


def _build_path_object(p: NormalClovenFibration) -> PathObject:
    E, X = p.dom, p.cod
    pa = p.on_arrows
    vertical = [al for al in E.arrows if X.is_identity(pa[al])]
    objects = [(E.src(al), E.tgt(al), al) for al in vertical]

    by_image = {}
    for b in E.objects:
        groups = {}
        for bb in E.out_arrows(b):
            groups.setdefault(pa[bb], []).append(bb)
        by_image[b] = groups

    arrows = {}
    inverses = {}
    for a, b, al in objects:
        source = (a, b, al)
        for ab in E.out_arrows(a):
            ab_inv = E.inverses[ab]
            for bb in by_image[b].get(pa[ab], ()):
                al2 = E.compose(bb, E.compose(al, ab_inv))
                target = (E.tgt(ab), E.tgt(bb), al2)
                arrows[ab, bb, al] = (source, target)
                inverses[ab, bb, al] = (ab_inv, E.inverses[bb], al2)

    P = Groupoid(
        objects,
        arrows,
        {(a, b, al): (E.identities[a], E.identities[b], al) for a, b, al in objects},
        inverses,
        compose_fn=lambda g, h: (E.compose(g[0], h[0]), E.compose(g[1], h[1]), h[2]),
    )

    unit = Functor(
        E, P,
        {a: (a, a, E.identities[a]) for a in E.objects},
        {al: (al, al, E.identities[E.src(al)]) for al in E.arrows},
        name="r",
    )
    square = pullback(p, p)
    boundary = NormalClovenFibration(
        P, square.apex,
        {o: (o[0], o[1]) for o in objects},
        {g: (g[0], g[1]) for g in arrows},
        lift_fn=lambda o, g: (g[0], g[1], o[2]),
        name="d",
        trusted=True,
    )
    return PathObject(p, P, unit, boundary, square)


def diagonal(p: NormalClovenFibration) -> Functor:
    """``<id_E, id_E>: E -> E x_p E``."""
    return path_object(p).diagonal


def mapping_path_object(p: NormalClovenFibration, g: Functor) -> PullbackSquare:
    """``Map_p(g)``: the chosen pullback of ``g: Z -> E`` along the source boundary of ``Path(p)``.

    Objects are pairs ``(z, (a, b, alpha))`` with ``g(z) = a``.  ``proj0``
    (``pm0``) is a fibration; ``proj1`` (``pm1``) is one whenever ``g`` is.
    """
    if g.cod != p.dom:
        raise CodomainMismatch(f"{g!r} does not land in the domain of {p!r}")
    return pullback(g, path_object(p).boundary0)


@dataclass(eq=False)
class Stability:
    """All the pieces of the stability square for a fibration ``p`` and a functor ``f``."""

    p: NormalClovenFibration
    f: Functor
    fiber: PullbackSquare          # F = X x_Y E
    mapping: PullbackSquare        # Map_p(p* f)
    path: PathObject               # Path(f* p)
    iso: Functor                   # i
    inverse: Functor

    @cached_property
    def unit_pairing(self) -> Functor:
        """``<id_F, r_p (p* f)>: F -> Map_p(p* f)``."""
        F = self.fiber.apex
        return mediating_arrow(
            self.mapping,
            identity_functor(F),
            compose_functors(path_object(self.p).unit, self.fiber.proj1),
        )

    @cached_property
    def boundary_pairing(self) -> Functor:
        """``<pm0, <(f* p) pm0, d1_p pm1>>: Map_p(p* f) -> F x F``."""
        pm0, pm1 = self.mapping.proj0, self.mapping.proj1
        inner = mediating_arrow(
            self.fiber,
            compose_functors(self.fiber.proj0, pm0),
            compose_functors(path_object(self.p).boundary1, pm1),
        )
        return mediating_arrow(self.path.square, pm0, inner)

    def failures(self) -> list[str]:
        """Names of the equations of the stability square that fail."""
        bad = []
        if not functor_equal(compose_functors(self.iso, self.unit_pairing), self.path.unit):
            bad.append("upper square")
        if not functor_equal(compose_functors(self.path.boundary, self.iso), self.boundary_pairing):
            bad.append("lower square")
        if validate_functor(self.iso):
            bad.append("i is not a functor")
        if not is_isomorphism(self.iso, self.inverse):
            bad.append("i is not invertible")
        return bad


def is_isomorphism(F: Functor, G: Functor) -> bool:
    if F.dom != G.cod or F.cod != G.dom:
        return False
    return functor_equal(compose_functors(G, F), identity_functor(F.dom)) and functor_equal(
        compose_functors(F, G), identity_functor(F.cod)
    )


def is_bijective(F: Functor) -> bool:
    return canonical(F.on_objects.values()) == list(F.cod.objects) and canonical(
        F.on_arrows.values()
    ) == list(F.cod.arrows)


def stability(p: NormalClovenFibration, f: Functor) -> Stability:
    if f.cod != p.cod:
        raise CodomainMismatch(f"{f!r} and {p!r} do not share a codomain")
    return memo(p, ("stability", id(f)), lambda: _build_stability(p, f))


def _build_stability(p: NormalClovenFibration, f: Functor) -> Stability:
    fiber = pullback(f, p)
    mapping = mapping_path_object(p, fiber.proj1)
    path = path_object(fiber.proj0)
    M, P, X = mapping.apex, path.path_groupoid, f.dom
    idx = X.identities

    def obj(o):
        (x, e), (_, e2, eps) = o
        return ((x, e), (x, e2), (idx[x], eps))

    def arr(a):
        (zeta, eta), (_, eta2, eps) = a
        return ((zeta, eta), (zeta, eta2), (idx[X.src(zeta)], eps))

    iso = Functor(M, P, {o: obj(o) for o in M.objects}, {a: arr(a) for a in M.arrows}, name="i")

    def obj_back(o):
        (x, e), (_, e2), (_, eps) = o
        return ((x, e), (e, e2, eps))

    def arr_back(a):
        (zeta, eta), (_, eta2), (_, eps) = a
        return ((zeta, eta), (eta, eta2, eps))

    inverse = Functor(P, M, {o: obj_back(o) for o in P.objects}, {a: arr_back(a) for a in P.arrows})
    return Stability(p, f, fiber, mapping, path, iso, inverse)


def stability_iso(p: NormalClovenFibration, f: Functor) -> Functor:
    """The comparison ``i: Map_p(p* f) -> Path(f* p)``; for groupoids it is an isomorphism."""
    return stability(p, f).iso

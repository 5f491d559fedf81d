"""Weak factorization machinery: factorization, transport and filler synthesis.

Every filler here is constructed, never searched for.  Left maps are solved
against fibrations only when they carry a :class:`LeftWitness` saying why
they have the left lifting property:

* :class:`UnitPullback` -- the map is (isomorphic to) the base change of a
  unit ``r_p`` along a fibration into ``Path(p)``; solved by
  :func:`fill_unit_square`.
* :class:`FactorizationUnit` -- the map is the ``lambda`` of
  :func:`factorize`; solved by the transport pipeline in
  :func:`solve_lifting`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

from .errors import NoWitness, PreconditionViolated
from .fibration import (
    NormalClovenFibration,
    PullbackSquare,
    compose_fibrations,
    ensure_fibration,
    identity_fibration,
    mediating_arrow,
    pullback,
    terminal_fibration,
)
from .groupoid import (
    Functor,
    Groupoid,
    compose_functors,
    functor_equal,
    identity_functor,
    memo,
    validate_functor,
)
from .paths import is_bijective, mapping_path_object, path_object, stability

__all__ = [
    "Factorization",
    "FactorizationUnit",
    "Filler",
    "LiftingProblem",
    "UnitPullback",
    "factorize",
    "fill_unit_square",
    "filler_failures",
    "mapping_path_object",
    "reduce_lifting_problem",
    "solve_lifting",
    "transport",
]


@dataclass(eq=False)
class UnitPullback:
    """``left`` is the base change of ``r_p`` along the fibration ``q: B -> Path(p)``.

    ``from_canonical`` is an isomorphism from the chosen pullback
    ``A x_Path(p) B`` onto the domain of ``left`` with
    ``left . from_canonical`` equal to the projection onto ``B``.
    """

    p: NormalClovenFibration
    q: NormalClovenFibration
    from_canonical: Functor


@dataclass(eq=False)
class FactorizationUnit:
    factorization: "Factorization"


LeftWitness = Union[UnitPullback, FactorizationUnit]


@dataclass(eq=False)
class LiftingProblem:
    """The square ``right . top = bottom . left``."""

    left: Functor
    right: NormalClovenFibration
    top: Functor
    bottom: Functor
    witness: LeftWitness | None = None

    def commutes(self) -> bool:
        L, R, T, B = self.left, self.right, self.top, self.bottom
        if L.dom != T.dom or L.cod != B.dom or T.cod != R.dom or B.cod != R.cod:
            return False
        for x in L.dom.objects:
            if R.on_objects[T.on_objects[x]] != B.on_objects[L.on_objects[x]]:
                return False
        for a in L.dom.arrows:
            if R.on_arrows[T.on_arrows[a]] != B.on_arrows[L.on_arrows[a]]:
                return False
        return True


@dataclass(eq=False)
class Filler:
    j: Functor


def filler_failures(prob: LiftingProblem, j: Functor) -> list[str]:
    """Empty when ``j`` is a functor making both triangles commute."""
    if j.dom != prob.left.cod or j.cod != prob.right.dom:
        return ["wrong domain or codomain"]
    bad = []
    if validate_functor(j):
        bad.append("not a functor")
    if not functor_equal(compose_functors(j, prob.left), prob.top):
        bad.append("upper triangle")
    if not functor_equal(compose_functors(prob.right, j), prob.bottom):
        bad.append("lower triangle")
    return bad


@dataclass(eq=False)
class Factorization:
    """``f = rho . lambda_`` through the mapping path object ``Map(f)``."""

    f: Functor
    mapping: PullbackSquare
    lambda_: Functor
    rho: NormalClovenFibration

    @property
    def mid(self) -> Groupoid:
        return self.mapping.apex

    @cached_property
    def witness(self) -> FactorizationUnit:
        return FactorizationUnit(self)

    def lifting_problem(self, q: NormalClovenFibration, top: Functor) -> LiftingProblem:
        """The identity-bottom problem of ``lambda_`` against ``q: E -> Map(f)``."""
        return LiftingProblem(self.lambda_, q, top, identity_functor(self.mid), self.witness)


def factorize(f: Functor) -> Factorization:
    """Factor ``f: X -> Y`` as ``X -> Map(f) -> Y``.

    ``Map(f)`` has objects ``(x, (a, b, gamma))`` with ``a = f(x)`` and
    ``gamma: a -> b``; ``lambda_(x) = (x, (f x, f x, 1))`` and ``rho``
    projects onto ``b``, lifting ``beta`` to ``(1_x, (1_a, beta, gamma))``.
    """
    violations = validate_functor(f)
    if violations:
        raise PreconditionViolated(f"not a functor: {violations[:3]}")
    X, Y = f.dom, f.cod
    pY = path_object(terminal_fibration(Y))
    mapping = mapping_path_object(terminal_fibration(Y), f)
    lam = mediating_arrow(mapping, identity_functor(X), compose_functors(pY.unit, f))
    lam.name = "lambda"
    r = compose_functors(pY.boundary1, mapping.proj1)
    ix, iy = X.identities, Y.identities

    def lift(o, beta):
        x, (a, _, gamma) = o
        return (ix[x], (iy[a], beta, gamma))

    rho = NormalClovenFibration(mapping.apex, Y, r.on_objects, r.on_arrows, lift_fn=lift,
                                name="rho", trusted=True)
    return Factorization(f, mapping, lam, rho)


def reduce_lifting_problem(prob: LiftingProblem):
    """Pull the problem back along its bottom map.

    Returns the identity-bottom problem and a function turning its fillers
    into fillers of ``prob``.
    """
    if not prob.commutes():
        raise PreconditionViolated("the lifting square does not commute")
    sq = pullback(prob.bottom, prob.right)
    top = mediating_arrow(sq, prob.left, prob.top)
    reduced = LiftingProblem(prob.left, sq.proj0, top, identity_functor(prob.left.cod), prob.witness)

    def recompose(filler: Filler) -> Filler:
        return Filler(compose_functors(sq.proj1, filler.j))

    return reduced, recompose


def fill_unit_square(p: NormalClovenFibration, q: NormalClovenFibration,
                     qbar: NormalClovenFibration, f: Functor) -> Filler:
    """Fill the square with left side ``C -> B`` (base change of ``r_p`` along ``q``).

    ``C = A x_Path(p) B`` is the chosen pullback of ``r_p`` along ``q``,
    ``f: C -> E`` is the top, ``qbar: E -> B`` the right side and the bottom
    is the identity of ``B``.  An object ``b`` over ``(a, a', alpha)`` is
    first moved to ``b0`` over ``r_p(a)`` by the lift of ``(1_a, alpha^-1)``,
    then ``f(a, b0)`` is carried back over ``b`` by lifting along ``qbar``.
    """
    po = path_object(p)
    ensure_fibration(q)
    ensure_fibration(qbar)
    if q.cod != po.path_groupoid:
        raise PreconditionViolated("q must land in Path(p)")
    sq = pullback(po.unit, q)
    B, E = q.dom, qbar.dom
    if f.dom != sq.apex or f.cod != E or qbar.cod != B:
        raise PreconditionViolated("the maps do not form the unit square")
    pi = sq.proj1
    for c in sq.apex.objects:
        if qbar.on_objects[f.on_objects[c]] != pi.on_objects[c]:
            raise PreconditionViolated(f"square does not commute at {c!r}")
    for c in sq.apex.arrows:
        if qbar.on_arrows[f.on_arrows[c]] != pi.on_arrows[c]:
            raise PreconditionViolated(f"square does not commute at {c!r}")

    A = p.dom

    def back_to_unit(b):
        a, _, alpha = q.on_objects[b]
        return a, q.lift(b, (A.identities[a], A.inverses[alpha], alpha))

    on_objects, correction = {}, {}
    for b in B.objects:
        a, gamma = back_to_unit(b)
        c = f.on_objects[(a, B.tgt(gamma))]
        eta = qbar.lift(c, B.inverses[gamma])
        on_objects[b] = E.tgt(eta)
        correction[b] = (a, gamma, eta)

    on_arrows = {}
    for beta, (b, b2) in B.arrows.items():
        a0, g0, eta0 = correction[b]
        _, g1, eta1 = correction[b2]
        alpha0 = q.on_arrows[beta][0]
        middle = (alpha0, B.chain(g1, beta, B.inverses[g0]))
        on_arrows[beta] = E.chain(eta1, f.on_arrows[middle], E.inverses[eta0])
    return Filler(Functor(B, E, on_objects, on_arrows, name="j"))


def _check_unit_witness(prob: LiftingProblem, w: UnitPullback):
    def check():
        po = path_object(w.p)
        if w.q.cod != po.path_groupoid:
            return "witness fibration does not land in Path(p)"
        sq = pullback(po.unit, w.q)
        fc = w.from_canonical
        if fc.dom != sq.apex or fc.cod != prob.left.dom or prob.left.cod != w.q.dom:
            return "witness does not match the left map"
        if not functor_equal(compose_functors(prob.left, fc), sq.proj1):
            return "left map is not the base change of the unit"
        if not is_bijective(fc):
            return "comparison with the chosen pullback is not an isomorphism"
        return None

    error = memo(prob.left, ("unit-witness", id(w)), lambda: (w, check()))[1]
    if error:
        raise PreconditionViolated(error)


def solve_lifting(prob: LiftingProblem) -> Filler:
    """Construct a filler for a square whose left side carries a witness."""
    w = prob.witness
    if w is None:
        raise NoWitness("left map carries no witness; use the oracle for arbitrary maps")
    if isinstance(w, UnitPullback):
        _check_unit_witness(prob, w)
    elif isinstance(w, FactorizationUnit):
        lam = w.factorization.lambda_
        if lam is not prob.left and not functor_equal(lam, prob.left):
            raise PreconditionViolated("witness does not describe the left map")
    else:
        raise NoWitness(f"unknown witness {w!r}")
    ensure_fibration(prob.right)
    reduced, recompose = reduce_lifting_problem(prob)
    if isinstance(w, UnitPullback):
        top = compose_functors(reduced.top, w.from_canonical)
        filler = fill_unit_square(w.p, w.q, reduced.right, top)
    else:
        filler = Filler(_fill_against_lambda(w.factorization, reduced.right, reduced.top))
    return recompose(filler)


def _fill_against_lambda(fact: Factorization, q: NormalClovenFibration, g: Functor) -> Functor:
    """Filler ``Map(f) -> E`` of ``q g = lambda`` with identity bottom.

    A first guess ``k`` satisfies the upper triangle but lies in the wrong
    fibre; a path ``psi`` from ``q k`` to the identity, built from the
    stability comparison, transports it into the right one.
    """
    Y = fact.f.cod
    tY = terminal_fibration(Y)
    p, m = fact.mapping.proj0, fact.mapping.proj1

    Ms, h = _first_guess_filler(fact, q)
    k = compose_functors(h, mediating_arrow(Ms, compose_functors(g, p), m))

    phi = _connection(Y)
    d0 = path_object(tY).boundary0
    st = stability(d0, fact.f)
    pair = mediating_arrow(st.mapping, compose_functors(q, k), compose_functors(phi, m))
    psi = compose_functors(st.iso, pair)
    return transport(p, q, k, psi)


def _first_guess_filler(fact: Factorization, q: NormalClovenFibration):
    """``h: Map(s) -> E`` with ``h l = id_E`` and ``q h = q pm0`` where ``s = rho q``."""

    def build():
        Y = fact.f.cod
        tY = terminal_fibration(Y)
        pY = path_object(tY)
        E = q.dom
        s = compose_fibrations(fact.rho, q)
        Ms = mapping_path_object(tY, s)
        left = mediating_arrow(Ms, identity_functor(E), compose_functors(pY.unit, s))
        C = pullback(pY.unit, Ms.proj1)
        witness = UnitPullback(tY, Ms.proj1, compose_functors(Ms.proj0, C.proj1))
        prob = LiftingProblem(left, q, identity_functor(E), compose_functors(q, Ms.proj0), witness)
        return fact, Ms, solve_lifting(prob).j

    _, Ms, h = memo(q, ("first-guess", id(fact)), build)
    return Ms, h


def _connection(Y: Groupoid) -> Functor:
    """``phi: Path(Y) -> Path(d0_Y)`` filling ``r_Y`` against ``d_{d0_Y}``."""

    def build():
        tY = terminal_fibration(Y)
        pY = path_object(tY)
        d0 = pY.boundary0
        p2 = path_object(d0)
        PY = pY.path_groupoid
        top = compose_functors(p2.unit, pY.unit)
        bottom = mediating_arrow(p2.square, compose_functors(pY.unit, d0), identity_functor(PY))
        idP = identity_fibration(PY)
        C = pullback(pY.unit, idP)
        witness = UnitPullback(tY, idP, C.proj0)
        prob = LiftingProblem(pY.unit, p2.boundary, top, bottom, witness)
        return solve_lifting(prob).j

    return memo(terminal_fibration(Y), "connection", build)


def transport(p: NormalClovenFibration, q: NormalClovenFibration, e: Functor, u: Functor) -> Functor:
    """Move ``e: Z -> E`` along the path ``u: Z -> Path(p)``.

    Requires ``q e = d0_p u``.  The result ``t`` satisfies ``q t = d1_p u``
    and agrees with ``e`` wherever ``u`` is a unit path.
    """
    po = path_object(p)
    ensure_fibration(q)
    if q.cod != p.dom or e.cod != q.dom or u.cod != po.path_groupoid or e.dom != u.dom:
        raise PreconditionViolated("transport data do not fit together")
    d0 = po.boundary0
    Z = e.dom
    for x in Z.objects:
        if q.on_objects[e.on_objects[x]] != d0.on_objects[u.on_objects[x]]:
            raise PreconditionViolated(f"q e and d0 u disagree on {x!r}")
    for a in Z.arrows:
        if q.on_arrows[e.on_arrows[a]] != d0.on_arrows[u.on_arrows[a]]:
            raise PreconditionViolated(f"q e and d0 u disagree on {a!r}")
    Mq, j = _transport_filler(p, q)
    return compose_functors(j, mediating_arrow(Mq, e, u))


def _transport_filler(p: NormalClovenFibration, q: NormalClovenFibration):
    """Filler ``j: Map_p(q) -> E`` of ``<id, r_p q>`` against ``q`` over ``d1_p pm1``."""

    def build():
        po = path_object(p)
        E = q.dom
        Mq = mapping_path_object(p, q)
        left = mediating_arrow(Mq, identity_functor(E), compose_functors(po.unit, q))
        C = pullback(po.unit, Mq.proj1)
        witness = UnitPullback(p, Mq.proj1, compose_functors(Mq.proj0, C.proj1))
        bottom = compose_functors(po.boundary1, Mq.proj1)
        prob = LiftingProblem(left, q, identity_functor(E), bottom, witness)
        return p, Mq, solve_lifting(prob).j

    _, Mq, j = memo(q, ("transport", id(p)), build)
    return Mq, j

"""Random finite instances and the seeded WFS verification suite.

Random groupoids are disjoint unions of components ``connected(k, order)``
with vertex group trivial, Z2 or Z3.  Random fibrations are built only from
constructions that carry a derived cleavage (identities, product
projections, base changes of path boundaries, composites), so every
generated cleavage is well formed by construction and the suite checks it
anyway.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import __version__
from .documents import serialize_fibration, serialize_functor, serialize_groupoid
from .errors import BudgetExceeded
from .fibration import (
    NormalClovenFibration,
    compose_fibrations,
    identity_fibration,
    mediating_arrow,
    product,
    pullback,
    terminal_fibration,
    validate_fibration,
)
from .groupoid import (
    Functor,
    Groupoid,
    compose_functors,
    connected,
    disjoint_union,
    functor_equal,
    identity_functor,
    interval,
    terminal,
    two,
    validate_functor,
    validate_groupoid,
    z2,
)
from .oracle import (
    DEFAULT_BUDGET,
    SearchBudget,
    _functor_key,
    enumerate_functors,
    enumerate_functors_naive,
    filler_search_space,
    find_fillers,
    has_llp_direct,
    llp_counterexample,
    random_functor,
)
from .paths import is_bijective, mapping_path_object, path_object, stability
from .wfs import factorize, filler_failures, solve_lifting, transport

LAWS = (
    "groupoid",
    "functor",
    "fibration",
    "cleavage stability",
    "pullback",
    "path object",
    "stability square",
    "factorization",
    "transport (i)",
    "transport (ii)",
    "lifting soundness",
    "filler membership",
    "has_llp",
    "llp reduction",
    "enumeration",
)

# Derived groupoids above this many arrows are too slow for the cubic
# associativity check; their laws hold by construction and are still
# exercised through every functor built on them.
_VALIDATE_LIMIT = 160
_MAX_DOMAIN_ARROWS = 120
_LIFT_DOMAIN_ARROWS = 120
_MAX_COUNTEREXAMPLES = 5
_TEST_SHAPES = ("1", "Z2", "2", "I")


# -- random instances ----------------------------------------------------------


def random_groupoid(rng: random.Random, max_objects: int = 4, max_arrows: int = 12,
                    prefix: str = "") -> Groupoid:
    """A disjoint union of indiscrete components with cyclic vertex groups of order 1, 2 or 3."""
    if max_objects < 1 or max_arrows < 1:
        raise ValueError("bounds must allow at least one object and one arrow")
    remaining = rng.randint(1, max_objects)
    arrows_left = max_arrows
    parts = []
    while remaining:
        k = rng.randint(1, remaining)
        while k * k > arrows_left:
            k -= 1
        if k == 0:
            break
        order = rng.choice([o for o in (1, 2, 3) if k * k * o <= arrows_left])
        tag = chr(ord("a") + len(parts))
        parts.append(connected([f"{prefix}{tag}{i}" for i in range(k)], order))
        arrows_left -= k * k * order
        remaining -= k
    return disjoint_union(parts, name=f"{prefix}G")


@dataclass(eq=False)
class GeneratedFibration:
    """A random fibration with a description of how it was built."""

    recipe: str
    fibration: NormalClovenFibration
    parts: tuple = ()


def _small_fibre(rng):
    return rng.choice([z2, two, interval])()


def random_fibration(rng: random.Random, base: Groupoid, depth: int = 2,
                     max_arrows: int | None = None) -> GeneratedFibration:
    """A fibration into ``base`` built from projections, boundaries, base changes and composites.

    With ``max_arrows`` a candidate whose domain is larger is replaced by
    the identity fibration, so callers never see an oversized instance.
    """
    gen = _random_fibration(rng, base, depth)
    if max_arrows is not None and len(gen.fibration.dom.arrows) > max_arrows:
        return GeneratedFibration("identity", identity_fibration(base))
    return gen


def _random_fibration(rng, base, depth):
    kinds = ["identity", "projection", "mapping", "boundary"]
    if depth > 1:
        kinds.append("composite")
    kind = rng.choice(kinds)
    if kind == "identity":
        return GeneratedFibration("identity", identity_fibration(base))
    if kind == "projection":
        K = _small_fibre(rng)
        return GeneratedFibration(f"projection {K.name}", product(base, K).proj0)
    if kind == "mapping":
        Z = random_groupoid(rng, 2, 3, prefix="m")
        g = random_functor(rng, base, Z)
        return GeneratedFibration("mapping", mapping_path_object(terminal_fibration(Z), g).proj0)
    if kind == "boundary":
        Z = random_groupoid(rng, 2, 3, prefix="d")
        po = path_object(terminal_fibration(Z))
        g = random_functor(rng, base, po.square.apex)
        return GeneratedFibration("boundary", pullback(g, po.boundary).proj0)
    outer = _random_fibration(rng, base, 1)
    if len(outer.fibration.dom.arrows) > _MAX_DOMAIN_ARROWS:
        return outer
    inner = _random_fibration(rng, outer.fibration.dom, 1)
    if len(inner.fibration.dom.arrows) > _MAX_DOMAIN_ARROWS:
        return outer
    return GeneratedFibration(
        f"({outer.recipe}) . ({inner.recipe})",
        compose_fibrations(outer.fibration, inner.fibration),
        (outer.fibration, inner.fibration),
    )


def _shape(name):
    return {"1": terminal, "Z2": z2, "2": two, "I": interval}[name]()


# -- report --------------------------------------------------------------------


@dataclass
class VerificationReport:
    seed: int
    bounds: dict
    instances: int
    counts: dict = field(default_factory=dict)
    tallies: dict = field(default_factory=lambda: {law: {"pass": 0, "fail": 0} for law in LAWS})
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(t["fail"] == 0 for t in self.tallies.values())

    def failures(self) -> dict:
        return {law: t["fail"] for law, t in self.tallies.items() if t["fail"]}

    def to_document(self) -> dict:
        return {
            "kind": "report",
            "tool": "tribes",
            "version": __version__,
            "seed": self.seed,
            "bounds": dict(self.bounds),
            "instances": self.instances,
            "counts": dict(sorted(self.counts.items())),
            "laws": {law: dict(t) for law, t in sorted(self.tallies.items())},
            "counterexamples": self.counterexamples,
            "ok": self.ok,
        }


class _Run:
    def __init__(self, report: VerificationReport):
        self.report = report
        self.instance = 0

    def count(self, what, n=1):
        self.report.counts[what] = self.report.counts.get(what, 0) + n

    def check(self, law, ok, detail="", **data):
        tally = self.report.tallies[law]
        if ok:
            tally["pass"] += 1
            return True
        tally["fail"] += 1
        shown = sum(1 for c in self.report.counterexamples if c["law"] == law)
        if shown < _MAX_COUNTEREXAMPLES:
            self.report.counterexamples.append({
                "law": law,
                "instance": self.instance,
                "detail": detail,
                "data": {k: _document(v) for k, v in sorted(data.items())},
            })
        return False

    def guarded(self, law, fn, **data):
        """Run a law check; an exception counts as a failure, an over-budget search as skipped."""
        try:
            fn()
        except BudgetExceeded:
            self.count("skipped (over budget)")
        except Exception as exc:  # a crash is a failed law, reported with its instance
            self.check(law, False, f"{type(exc).__name__}: {exc}", **data)


def _document(value):
    if isinstance(value, NormalClovenFibration):
        return serialize_fibration(value)
    if isinstance(value, Functor):
        return serialize_functor(value)
    if isinstance(value, Groupoid):
        return serialize_groupoid(value)
    return value


# -- the suite -----------------------------------------------------------------


def preflight_cost(max_objects: int, max_arrows: int) -> int:
    """Rough size of the largest search the suite starts: ``max_arrows^3 * max_objects``."""
    return max_arrows ** 3 * max_objects


def verify_wfs(seed: int = 0, max_objects: int = 4, max_arrows: int = 12,
               budget: SearchBudget | None = None, instances: int = 20) -> VerificationReport:
    """Run every law suite on ``instances`` seeded random instances.

    Searches above ``budget.max_candidates`` are skipped and counted, never
    truncated.  Raises :class:`BudgetExceeded` before generating anything
    when the bounds are too large for the budget.
    """
    budget = budget or DEFAULT_BUDGET
    cost = preflight_cost(max_objects, max_arrows)
    if cost > budget.max_candidates:
        raise BudgetExceeded(
            f"bounds ({max_objects} objects, {max_arrows} arrows) cost {cost} > "
            f"{budget.max_candidates} candidates", bound=cost,
        )
    rng = random.Random(seed)
    report = VerificationReport(seed, {"max_objects": max_objects, "max_arrows": max_arrows,
                                       "max_candidates": budget.max_candidates}, instances)
    run = _Run(report)
    for i in range(instances):
        run.instance = i
        _instance(run, rng, max_objects, max_arrows, budget)
    return report


def _instance(run: _Run, rng, max_objects, max_arrows, budget):
    X = random_groupoid(rng, max_objects, max_arrows, prefix="x")
    Y = random_groupoid(rng, max_objects, max_arrows, prefix="y")
    run.count("groupoids", 2)
    for G in (X, Y):
        v = validate_groupoid(G)
        run.check("groupoid", not v, repr(v[:3]), groupoid=G)

    f = random_functor(rng, X, Y)
    run.count("functors")
    v = validate_functor(f)
    run.check("functor", not v, repr(v[:3]), f=f)

    gen = random_fibration(rng, Y)
    p = gen.fibration
    run.count("fibrations")
    data = {"f": f, "p": p, "recipe": gen.recipe}

    run.guarded("fibration", lambda: _fibration_laws(run, gen, f), **data)
    run.guarded("pullback", lambda: _pullback_laws(run, rng, f, p), **data)
    run.guarded("path object", lambda: _path_laws(run, p), **data)
    run.guarded("stability square", lambda: _stability_laws(run, p, f), **data)
    run.guarded("factorization", lambda: _factorization_laws(run, f), **data)
    run.guarded("transport (i)", lambda: _transport_laws(run, rng, p), **data)
    run.guarded("lifting soundness", lambda: _lifting_laws(run, rng, f, budget), **data)

    Xs = random_groupoid(rng, 2, 4, prefix="s")
    Ys = random_groupoid(rng, 2, 4, prefix="t")
    fs = random_functor(rng, Xs, Ys)
    run.guarded("has_llp", lambda: _llp_laws(run, rng, fs, budget), f=fs)
    run.guarded("enumeration", lambda: _enumeration_laws(run, Xs, Ys, budget), X=Xs, B=Ys)


def _fibration_laws(run, gen, f):
    p = gen.fibration
    v = validate_fibration(p)
    run.check("fibration", not v, repr(v[:3]), p=p, recipe=gen.recipe)
    if gen.parts:
        outer, inner = gen.parts
        ok = all(
            p.lift(e, g) == inner.lift(e, outer.lift(inner.on_objects[e], g))
            for e, g in p.cleavage
        )
        run.check("cleavage stability", ok, "composite", p=p, recipe=gen.recipe)
    sq = pullback(f, p)
    fa = f.on_arrows
    ok = all(
        sq.proj0.lift(ab, g) == (g, p.lift(ab[1], fa[g]))
        for ab in sq.apex.objects
        for g in f.dom.out_arrows(ab[0])
    )
    run.check("cleavage stability", ok, "base change", f=f, p=p)


def _pullback_laws(run, rng, f, p):
    sq = pullback(f, p)
    ok = functor_equal(compose_functors(f, sq.proj0), compose_functors(p, sq.proj1))
    run.check("pullback", ok, "square does not commute", f=f, p=p)
    if len(sq.apex.arrows) <= _VALIDATE_LIMIT:
        v = validate_groupoid(sq.apex)
        run.check("pullback", not v, f"apex: {v[:3]!r}", f=f, p=p)
    m = mediating_arrow(sq, sq.proj0, sq.proj1)
    run.check("pullback", functor_equal(m, identity_functor(sq.apex)), "<proj0, proj1> is not id",
              f=f, p=p)
    W = random_groupoid(rng, 2, 4, prefix="w")
    u = random_functor(rng, W, f.dom)
    v_ = random_functor(rng, W, p.dom, over=(p, compose_functors(f, u)))
    if v_ is not None:
        m = mediating_arrow(sq, u, v_)
        ok = (functor_equal(compose_functors(sq.proj0, m), u)
              and functor_equal(compose_functors(sq.proj1, m), v_)
              and not validate_functor(m))
        run.check("pullback", ok, "mediating arrow", f=f, p=p, u=u, v=v_)


def _path_laws(run, p):
    po = path_object(p)
    E = p.dom
    r, d = po.unit, po.boundary
    checks = [
        ("d r = diagonal", functor_equal(compose_functors(d, r), po.diagonal)),
        ("d0 r = id", functor_equal(compose_functors(po.boundary0, r), identity_functor(E))),
        ("d1 r = id", functor_equal(compose_functors(po.boundary1, r), identity_functor(E))),
        ("r is a functor", not validate_functor(r)),
        ("d is a fibration", not validate_fibration(d)),
        ("d well defined", all(p.on_arrows[g[0]] == p.on_arrows[g[1]]
                               for g in po.path_groupoid.arrows)),
    ]
    if len(po.path_groupoid.arrows) <= _VALIDATE_LIMIT:
        checks.append(("Path(p) is a groupoid", not validate_groupoid(po.path_groupoid)))
    for name, ok in checks:
        run.check("path object", ok, name, p=p)


def _stability_laws(run, p, f):
    st = stability(p, f)
    bad = st.failures()
    run.check("stability square", not bad, ", ".join(bad), p=p, f=f)
    run.check("stability square", is_bijective(st.iso), "i is not bijective", p=p, f=f)


def _factorization_laws(run, f):
    fact = factorize(f)
    run.check("factorization", functor_equal(compose_functors(fact.rho, fact.lambda_), f),
              "rho lambda != f", f=f)
    v = validate_fibration(fact.rho)
    run.check("factorization", not v, f"rho: {v[:3]!r}", f=f)
    v = validate_functor(fact.lambda_)
    run.check("factorization", not v, f"lambda: {v[:3]!r}", f=f)


def _in_unit_image(po, u, W, h):
    """``g`` with ``r g = u h`` if ``u h`` factors through the unit, else ``None``."""
    uo, ua = u.on_objects, u.on_arrows
    on_objects, on_arrows = {}, {}
    for x in W.objects:
        a, b, al = uo[h.on_objects[x]]
        if a != b or al != po.base.dom.identities[a]:
            return None
        on_objects[x] = a
    for w in W.arrows:
        g0, g1, _ = ua[h.on_arrows[w]]
        if g0 != g1:
            return None
        on_arrows[w] = g0
    return on_objects, on_arrows


def _transport_laws(run, rng, p):
    gen = random_fibration(rng, p.dom, 1)
    q = gen.fibration
    if not q.dom.objects or len(q.dom.arrows) > _MAX_DOMAIN_ARROWS:
        q = identity_fibration(p.dom)
    po = path_object(p)
    Z = random_groupoid(rng, 2, 4, prefix="z")
    e = random_functor(rng, Z, q.dom)
    if e is None:
        # empty total space: no map into it, the contracts hold vacuously
        run.count("transport (empty fibre)")
        return
    if rng.random() < 0.5:
        u = compose_functors(po.unit, compose_functors(q, e))
    else:
        u = random_functor(rng, Z, po.path_groupoid, over=(po.boundary0, compose_functors(q, e)))
    run.count("transport instances")
    t = transport(p, q, e, u)
    data = {"p": p, "q": q, "e": e, "u": u}
    ok = functor_equal(compose_functors(q, t), compose_functors(po.boundary1, u))
    run.check("transport (i)", ok, "q t != d1 u", **data)
    for name in _TEST_SHAPES:
        W = _shape(name)
        for h in enumerate_functors(W, Z):
            if _in_unit_image(po, u, W, h) is None:
                continue
            run.count("transport squares")
            ok = functor_equal(compose_functors(t, h), compose_functors(e, h))
            run.check("transport (ii)", ok, f"t h != e h for W = {name}", h=h, **data)


def _lifting_laws(run, rng, f, budget):
    fact = factorize(f)
    M = fact.mid
    for _ in range(2):
        gen = random_fibration(rng, M, 1, max_arrows=_LIFT_DOMAIN_ARROWS)
        q = gen.fibration
        try:
            tops = enumerate_functors(f.dom, q.dom, budget, over=(q, fact.lambda_))
        except BudgetExceeded:
            run.count("skipped (over budget)")
            continue
        for top in tops:
            prob = fact.lifting_problem(q, top)
            run.count("lifting problems")
            data = {"f": f, "q": q, "top": top, "recipe": gen.recipe}
            j = solve_lifting(prob).j
            bad = filler_failures(prob, j)
            run.check("lifting soundness", not bad, ", ".join(bad), **data)
            if filler_search_space(prob) > budget.max_candidates:
                run.count("skipped (over budget)")
                continue
            fillers = find_fillers(prob, budget)
            key = _functor_key(M, j)
            ok = any(_functor_key(M, k) == key for k in fillers)
            run.check("filler membership", ok, "constructed filler not among enumerated fillers",
                      **data)


def _catalogue():
    """Small fibrations used as right-hand sides for the lifting-property oracle."""
    out = [
        ("Z2 -> 1", terminal_fibration(z2())),
        ("I -> 1", terminal_fibration(interval())),
        ("2 -> 1", terminal_fibration(two())),
        ("Z2 x 2 -> Z2", product(z2(), two()).proj0),
        ("I x Z2 -> I", product(interval(), z2()).proj0),
    ]
    Z = z2()
    po = path_object(terminal_fibration(Z))
    out.append(("d0 of Path(Z2)", po.boundary0))
    return out


def _llp_laws(run, rng, fs, budget):
    fact = factorize(fs)
    name, g = rng.choice(_catalogue())
    data = {"f": fs, "g": g, "g_name": name}
    run.count("llp decisions")
    cex = llp_counterexample(fact.lambda_, g, budget)
    run.check("has_llp", cex is None, "lambda fails to lift", **data)
    direct = has_llp_direct(fact.lambda_, g, budget)
    run.check("llp reduction", direct == (cex is None), "reduction changed the verdict", **data)


def _enumeration_laws(run, X, B, budget):
    fast = enumerate_functors(X, B, budget)
    slow = enumerate_functors_naive(X, B)
    ok = [_functor_key(X, F) for F in fast] == [_functor_key(X, F) for F in slow]
    run.check("enumeration", ok, f"structured {len(fast)} vs naive {len(slow)}", X=X, B=B)

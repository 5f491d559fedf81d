"""Brute-force ground truth: functor enumeration, filler search, lifting properties.

On a connected component with root ``r`` a functor is fixed by the image
of ``r``, the images of one chosen arrow ``r -> x`` per object and a group
homomorphism on the vertex group ``hom(r, r)``.  The enumerator branches on
exactly those choices, so it never visits an assignment that is not a
functor.  :func:`enumerate_functors_naive` is the slow cross-check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import product as cartesian

from .errors import BudgetExceeded
from .fibration import NormalClovenFibration, pullback
from .groupoid import Functor, Groupoid, compose_functors, identity_functor, sort_key, validate_functor
from .wfs import LiftingProblem


@dataclass(frozen=True)
class SearchBudget:
    max_candidates: int = 10**6
    max_seconds: float = 60.0

    def __post_init__(self):
        if self.max_candidates <= 0 or self.max_seconds <= 0:
            raise ValueError("budget must be positive")


DEFAULT_BUDGET = SearchBudget()


class _Clock:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.deadline = time.monotonic() + budget.max_seconds
        self.ticks = 0

    def tick(self):
        self.ticks += 1
        if self.ticks % 256 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded(f"search exceeded {self.budget.max_seconds} s", bound="max_seconds")


def _clock(budget, clock):
    if clock is not None:
        return clock
    return _Clock(budget or DEFAULT_BUDGET)


# -- structure of the source groupoid ----------------------------------------


def _spanning(X: Groupoid):
    """Per component: root, chosen arrows ``r -> x`` and the vertex group at ``r``."""
    out = []
    for comp in X.components:
        r = comp[0]
        tree = {r: X.identities[r]}
        for x in comp[1:]:
            tree[x] = X.hom(r, x)[0] if X.hom(r, x) else None
        out.append((r, comp, tree, X.hom(r, r)))
    return out


class _Constraint:
    """Which images a searched functor may use.

    ``over=(right, bottom)`` asks for ``right . F == bottom``; ``fixed``
    pins the images of some objects and arrows outright.
    """

    def __init__(self, over=None, fixed=None):
        self.right, self.bottom = over if over is not None else (None, None)
        self.objects, self.arrows = fixed if fixed is not None else ({}, {})

    def obj_ok(self, x, b):
        if x in self.objects and self.objects[x] != b:
            return False
        return self.right is None or self.right.on_objects[b] == self.bottom.on_objects[x]

    def arr_ok(self, a, img):
        if a in self.arrows and self.arrows[a] != img:
            return False
        return self.right is None or self.right.on_arrows[img] == self.bottom.on_arrows[a]


def _candidates(B: Groupoid, cons: _Constraint, source_obj=None, source_arr=None, start=None):
    """Objects (or arrows out of ``start``) of ``B`` allowed by the constraint."""
    if start is None:
        return [b for b in B.objects if cons.obj_ok(source_obj, b)]
    return [a for a in B.out_arrows(start) if cons.arr_ok(source_arr, a)]


def _group_homs(X: Groupoid, G: list, B: Groupoid, b, cons: _Constraint, clock):
    """All homomorphisms from the vertex group ``G`` into ``hom(b, b)`` allowed by ``cons``."""
    if not G:
        return
    unit = X.identities[X.src(G[0])]
    targets = B.hom(b, b)
    allowed = {g: [t for t in targets if cons.arr_ok(g, t)] for g in G}
    start = {unit: B.identities[b]}
    if start[unit] not in allowed[unit]:
        return

    def close(assign, g, img):
        assign = dict(assign)
        assign[g] = img
        frontier = [g]
        while frontier:
            new = []
            for h in frontier:
                for k in list(assign):
                    for left, right in ((h, k), (k, h)):
                        prod = X.compose(left, right)
                        val = B.compose(assign[left], assign[right])
                        old = assign.get(prod)
                        if old is None:
                            if val not in allowed[prod]:
                                return None
                            assign[prod] = val
                            new.append(prod)
                        elif old != val:
                            return None
            frontier = new
        return assign

    def extend(assign):
        clock.tick()
        free = next((g for g in G if g not in assign), None)
        if free is None:
            yield assign
            return
        for img in allowed[free]:
            nxt = close(assign, free, img)
            if nxt is not None:
                yield from extend(nxt)

    yield from extend(start)


def _assemble(X, B, comp, tree, hom, tree_imgs):
    on_objects, on_arrows = {}, {}
    for x in comp:
        on_objects[x] = B.tgt(tree_imgs[x])
    for x in comp:
        for a in X.out_arrows(x):
            y = X.tgt(a)
            loop = X.chain(X.inverses[tree[y]], a, tree[x])
            on_arrows[a] = B.chain(tree_imgs[y], hom[loop], B.inverses[tree_imgs[x]])
    return on_objects, on_arrows


def _component_functors(X, B, spanning_entry, cons, clock):
    r, comp, tree, G = spanning_entry
    if any(t is None for t in tree.values()):
        raise ValueError("component is not connected")
    others = comp[1:]
    for b in _candidates(B, cons, source_obj=r):
        choices = [
            [a for a in _candidates(B, cons, source_arr=tree[x], start=b) if cons.obj_ok(x, B.tgt(a))]
            for x in others
        ]
        homs = list(_group_homs(X, G, B, b, cons, clock))
        if not homs:
            continue
        for picks in cartesian(*choices):
            clock.tick()
            tree_imgs = {r: B.identities[b], **dict(zip(others, picks))}
            for hom in homs:
                o, a = _assemble(X, B, comp, tree, hom, tree_imgs)
                if all(cons.arr_ok(x, y) for x, y in a.items()):
                    yield o, a


def search_space(X: Groupoid, B: Groupoid, over=None) -> int:
    """Upper bound on the candidates :func:`enumerate_functors` explores."""
    total = 1
    cons = _Constraint(over)
    for r, comp, tree, G in _spanning(X):
        roots = _candidates(B, cons, source_obj=r)
        if not roots:
            return 0
        branch, vertex = _branching(B, over)
        gens = int(math.floor(math.log2(len(G)))) if len(G) > 1 else 0
        total *= len(roots) * branch ** (len(comp) - 1) * max(vertex, 1) ** gens
    return total


def _branching(B: Groupoid, over):
    """Largest number of arrow choices out of one object, and within one vertex group."""
    if over is None:
        branch = max((len(B.out_arrows(b)) for b in B.objects), default=0)
        vertex = max((len(B.hom(b, b)) for b in B.objects), default=0)
        return branch, vertex
    right = over[0]
    branch = vertex = 0
    for b in B.objects:
        out, loops = {}, {}
        for a in B.out_arrows(b):
            img = right.on_arrows[a]
            out[img] = out.get(img, 0) + 1
            if B.tgt(a) == b:
                loops[img] = loops.get(img, 0) + 1
        branch = max(branch, max(out.values(), default=0))
        vertex = max(vertex, max(loops.values(), default=0))
    return branch, vertex


def _functor_key(X: Groupoid, F: Functor):
    return (
        tuple(sort_key(F.on_objects[x]) for x in X.objects),
        tuple(sort_key(F.on_arrows[a]) for a in X.arrows),
    )


def enumerate_functors(X: Groupoid, B: Groupoid, budget: SearchBudget | None = None,
                       over=None, clock=None, fixed=None) -> list[Functor]:
    """Every functor ``X -> B``, canonically ordered.

    ``over=(right, bottom)`` restricts to functors ``F`` with
    ``right . F == bottom``; ``fixed=(objects, arrows)`` pins some images.
    The bound ignores ``fixed``, which only prunes.  Raises :class:`BudgetExceeded` up front when
    :func:`search_space` is above the budget, and during the search when
    time runs out.
    """
    budget = budget or DEFAULT_BUDGET
    clock = _clock(budget, clock)
    bound = search_space(X, B, over)
    if bound > budget.max_candidates:
        raise BudgetExceeded(
            f"search space {bound} exceeds {budget.max_candidates} candidates", bound=bound
        )
    cons = _Constraint(over, fixed)
    parts = [list(_component_functors(X, B, s, cons, clock)) for s in _spanning(X)]
    result = []
    for combo in cartesian(*parts):
        clock.tick()
        on_objects, on_arrows = {}, {}
        for o, a in combo:
            on_objects.update(o)
            on_arrows.update(a)
        result.append(Functor(X, B, on_objects, on_arrows))
    result.sort(key=lambda F: _functor_key(X, F))
    return result


def enumerate_functors_naive(X: Groupoid, B: Groupoid) -> list[Functor]:
    """All functors by filtering every endpoint-respecting assignment.  Tiny inputs only."""
    result = []
    arrows = list(X.arrows)
    for images in cartesian(B.objects, repeat=len(X.objects)):
        on_objects = dict(zip(X.objects, images))
        homs = [B.hom(on_objects[X.src(a)], on_objects[X.tgt(a)]) for a in arrows]
        for picks in cartesian(*homs):
            F = Functor(X, B, on_objects, dict(zip(arrows, picks)))
            if not validate_functor(F):
                result.append(F)
    result.sort(key=lambda F: _functor_key(X, F))
    return result


def random_functor(rng, X: Groupoid, B: Groupoid, over=None) -> Functor | None:
    """A functor drawn by making each structural choice uniformly; ``None`` if none exists."""
    clock = _Clock(DEFAULT_BUDGET)
    cons = _Constraint(over)
    on_objects, on_arrows = {}, {}
    for r, comp, tree, G in _spanning(X):
        roots = _candidates(B, cons, source_obj=r)
        rng.shuffle(roots)
        for b in roots:
            homs = list(_group_homs(X, G, B, b, cons, clock))
            choices = [_candidates(B, cons, source_arr=tree[x], start=b) for x in comp[1:]]
            if homs and all(choices):
                break
        else:
            return None
        picks = [rng.choice(c) for c in choices]
        tree_imgs = {r: B.identities[b], **dict(zip(comp[1:], picks))}
        o, a = _assemble(X, B, comp, tree, rng.choice(homs), tree_imgs)
        on_objects.update(o)
        on_arrows.update(a)
    return Functor(X, B, on_objects, on_arrows)


# -- lifting -------------------------------------------------------------------


def filler_search_space(prob: LiftingProblem) -> int:
    return search_space(prob.left.cod, prob.right.dom, over=(prob.right, prob.bottom))


def find_fillers(prob: LiftingProblem, budget: SearchBudget | None = None, clock=None) -> list[Functor]:
    """Every diagonal filler of ``prob``, canonically ordered.

    The upper triangle pins the filler on the image of ``left``, which the
    search uses for pruning; both triangles are still checked on the result.
    """
    L, T = prob.left, prob.top
    objects, arrows = {}, {}
    for src, dst, lo, to in ((L.dom.objects, objects, L.on_objects, T.on_objects),
                             (L.dom.arrows, arrows, L.on_arrows, T.on_arrows)):
        for x in src:
            if dst.setdefault(lo[x], to[x]) != to[x]:
                return []
    candidates = enumerate_functors(
        prob.left.cod, prob.right.dom, budget, over=(prob.right, prob.bottom), clock=clock,
        fixed=(objects, arrows),
    )
    out = []
    for j in candidates:
        if all(j.on_objects[L.on_objects[x]] == T.on_objects[x] for x in L.dom.objects) and all(
            j.on_arrows[L.on_arrows[a]] == T.on_arrows[a] for a in L.dom.arrows
        ):
            out.append(j)
    return out


def llp_counterexample(f: Functor, g: NormalClovenFibration, budget: SearchBudget | None = None,
                       clock=None) -> LiftingProblem | None:
    """A square of ``f`` over ``g`` with no filler, or ``None`` if ``f`` lifts against ``g``.

    Every square is pulled back along its bottom map first, so only
    identity-bottom problems are searched; the counterexample is returned in
    its original form.
    """
    clock = _clock(budget, clock)
    X = f.cod
    for bottom in enumerate_functors(X, g.cod, budget, clock=clock):
        sq = pullback(bottom, g)
        for top in enumerate_functors(f.dom, sq.apex, budget, over=(sq.proj0, f), clock=clock):
            reduced = LiftingProblem(f, sq.proj0, top, identity_functor(X))
            if not find_fillers(reduced, budget, clock=clock):
                return LiftingProblem(f, g, compose_functors(sq.proj1, top), bottom)
    return None


def has_llp(f: Functor, g: NormalClovenFibration, budget: SearchBudget | None = None) -> bool:
    return llp_counterexample(f, g, budget) is None


def has_llp_direct(f: Functor, g: NormalClovenFibration, budget: SearchBudget | None = None) -> bool:
    """Same verdict as :func:`has_llp`, searching every square without reduction."""
    clock = _clock(budget, None)
    for bottom in enumerate_functors(f.cod, g.cod, budget, clock=clock):
        for top in enumerate_functors(f.dom, g.dom, budget, over=(g, compose_functors(bottom, f)),
                                      clock=clock):
            if not find_fillers(LiftingProblem(f, g, top, bottom), budget, clock=clock):
                return False
    return True

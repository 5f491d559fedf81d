"""Factor the inclusion of the endpoints into the interval, then lift.

The inclusion 2 -> I is not a fibration: the arrow u: 0 -> 1 has no lift
starting at the point 0 of the discrete groupoid.  Factoring it through
the mapping path object replaces it by a fibration rho, preceded by a map
lambda that lifts against every fibration.  We pick a fibration q over
the middle groupoid, pose every square of lambda against q, and compare
the constructed filler with the complete list the oracle finds.
"""

from tribes import (
    NotAFibration,
    compose_functors,
    derive_canonical_cleavage,
    factorize,
    find_fillers,
    functor_equal,
    inclusion,
    interval,
    product,
    solve_lifting,
    two,
    validate_fibration,
    z2,
)
from tribes.oracle import enumerate_functors
from tribes.wfs import filler_failures

f = inclusion(two(), interval())
try:
    derive_canonical_cleavage(f)
except NotAFibration as exc:
    print("2 -> I is not a fibration; no lift at", exc.violation().witness)

fact = factorize(f)
M = fact.mid
print(f"Middle groupoid: {len(M.objects)} objects, {len(M.arrows)} arrows")
print("rho after lambda equals f:", functor_equal(compose_functors(fact.rho, fact.lambda_), f))
print("rho passes the fibration check:", validate_fibration(fact.rho) == [])
print()

q = product(M, z2()).proj0
tops = enumerate_functors(f.dom, q.dom, over=(q, fact.lambda_))
print(f"q = M x Z2 -> M, commuting squares with identity bottom: {len(tops)}")
for i, top in enumerate(tops):
    prob = fact.lifting_problem(q, top)
    j = solve_lifting(prob).j
    fillers = find_fillers(prob)
    found = any(functor_equal(j, k) for k in fillers)
    print(f"  square {i}: triangles hold: {not filler_failures(prob, j)}, "
          f"oracle has {len(fillers)} fillers, ours among them: {found}")

"""A square with no diagonal, and a full seeded verification run.

Collapsing the two endpoints of 2 onto one point is a fibration, and the
inclusion 2 -> I does not lift against it: a filler would have to send u
to an arrow between the two distinct points of 2, and there is none.
The oracle finds that square.  Afterwards the whole law suite runs on
random instances and prints its tallies.
"""

from tribes import find_fillers, has_llp, inclusion, interval, llp_counterexample, terminal_fibration, two
from tribes.verify import verify_wfs

f = inclusion(two(), interval())
g = terminal_fibration(two())
print("2 -> I lifts against 2 -> 1:", has_llp(f, g))
square = llp_counterexample(f, g)
print("counterexample top:", square.top.on_objects)
print("square commutes:", square.commutes(), "| fillers:", find_fillers(square))
print()

report = verify_wfs(seed=42, instances=5)
width = max(map(len, report.tallies))
for law, t in sorted(report.tallies.items()):
    print(f"  {law:<{width}}  pass {t['pass']:>4}  fail {t['fail']}")
print("all laws hold:", report.ok)

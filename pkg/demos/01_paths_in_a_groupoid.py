"""Walk through the path groupoid of a small fibration.

A path in the fibre of p: E -> X is a vertical arrow a -> b.  A morphism
of paths is a commuting square whose sides lie over the same base arrow.
This script builds those squares for Z2 over the point and for the
interval over the point, and checks that paths in a discrete fibre
collapse back to the original groupoid.
"""

from tribes import identity_fibration, interval, path_object, terminal_fibration, two, z2
from tribes.paths import is_bijective


def describe(p):
    po = path_object(p)
    P = po.path_groupoid
    print(f"Path({p.dom.name} -> {p.cod.name}): {len(P.objects)} objects, {len(P.arrows)} arrows")
    for obj in P.objects:
        print("   path", obj)
    return po


print("Z2 over the point. Both arrows of Z2 are vertical, so there are two paths.")
po = describe(terminal_fibration(z2()))
print("The unit sends the base object to the constant path:", po.unit.on_objects)
print()

print("The interval over the point has four vertical arrows, hence four paths,")
print("and between any two of them there are as many squares as arrows of I.")
describe(terminal_fibration(interval()))
print()

print("Over itself, every fibre is a point, so only identity paths survive.")
for E in (z2(), interval(), two()):
    po = path_object(identity_fibration(E))
    print(f"  {E.name}: unit is a bijection onto Path(id): {is_bijective(po.unit)}")

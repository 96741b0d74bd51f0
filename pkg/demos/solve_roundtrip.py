"""Build f = D_1 g, recover the minimal-norm u with D_1 u = f and compare norms."""
import random

from kmonogenic.complex_ops import D, random_section, section_norm2
from kmonogenic.resolution import solve

rng = random.Random(3)
g = random_section(6, 1, 1, rng)
f = D(1, g)
res = solve(1, f)

print("terms in f:", sum(len(p.terms) for p in f.components.values()))
print("D_1 u == f:", D(1, res.u) == f)
print("deg f, deg u:", f.degree(), res.degree)
print("||u||^2 =", float(res.norm2), " ||g||^2 =", float(section_norm2(g)))

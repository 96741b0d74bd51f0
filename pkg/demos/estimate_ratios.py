"""Sample the ratio lhs/rhs of the L2 estimate at k = 6; it must stay <= 1."""
import random

from kmonogenic.complex_ops import estimate_check, random_section

rng = random.Random(11)
for l in (1, 2, 3):
    ratios = []
    for _ in range(5):
        r = estimate_check(l, 6, random_section(6, l, 1, rng))
        ratios.append(r.lhs / r.rhs)
    print(f"l={l}  max ratio {float(max(ratios)):.4f}  all hold: {max(ratios) <= 1}")

"""Print fiber dimensions and symbol ranks at a random covector for k = 4..8."""
import random

from kmonogenic.symbol import exactness_report, random_covector

rng = random.Random(7)
for k in range(4, 9):
    r = exactness_report(k, random_covector(rng))
    print(f"k={k}  dims={list(r.dims)}  ranks={list(r.ranks)}  exact sequence: {r.all_true}")

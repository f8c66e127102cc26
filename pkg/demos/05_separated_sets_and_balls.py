"""Entropy counted by hand: separated sets on a finite dual.

The nine solutions of (2e + g) h = 0 on the dual of Z/3 are pairwise at
sup-distance at least 1/9, so at the canonical threshold 1/(8 |f|_1) = 1/24
the maximal separated set is all of X_f and (1/3) log 9 reproduces the
entropy.  The lattice-ball counter underlying the separated-set bounds is
also exercised against its volume envelope.
"""

import math
from fractions import Fraction

import grdet as G

C3 = G.cyclic_product([3])
f = G.ring_element(C3, {(0,): 2, (1,): 1})

dual = G.solve_dual_finite(f, C3)
w = dual.window
print("X_f on Z/3 for 2e + g:")
for h in dual.vectors():
    print("   ", tuple(str(v) for v in h.values))

eps = Fraction(1, 8 * int(G.l1_norm(f)))
print(f"\nthreshold eps = 1/(8 |f|_1) = {eps}")
for p in (1, 2, math.inf):
    sep = G.extremal_count(dual, w, p, eps, "separated")
    span = G.extremal_count(dual, w, p, eps, "spanning")
    print(f"  p = {str(p):>3}: separated {sep}, spanning {span}")

sep_inf = G.extremal_count(dual, w, math.inf, eps, "separated")
print(f"(1/3) log(separated) = {math.log(sep_inf) / 3:.6f}  vs  "
      f"entropy {G.entropy_finite_group(f, C3).value:.6f}")

print("\ninteger points in l2 balls vs the inflated-ball volume envelope:")
for k in (1, 2, 3, 4):
    R = 5
    count = G.count_lattice_ball(k, R)
    bound = math.pi ** (k / 2) * (R + math.sqrt(k)) ** k / math.gamma(k / 2 + 1)
    print(f"  dim {k}: {count:6d} points, envelope {bound:9.1f}")

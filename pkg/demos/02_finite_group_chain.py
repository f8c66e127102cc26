"""The equality chain on a finite group, link by link.

On a finite abelian group G with an integer symbol f whose full-group
compression is nonsingular, four quantities coincide exactly:

    |X_f|  =  |Z[G] / f Z[G]|  =  |det f_G|  =  exp(|G| * entropy)

where X_f is the set of torus-valued vectors annihilated by f.  Everything
below is exact integer arithmetic.
"""

import math

import grdet as G

C5 = G.cyclic_product([5])
f = G.ring_element(C5, {(0,): 3, (1,): 1})
print("group Z/5, symbol 3e + g")

window = G.folner_window(C5, 1)
M = G.compress(f, window)
print("compression (circulant):")
for row in M.to_int_rows():
    print("   ", row)

res = G.snf(M.to_int_rows())
print("elementary divisors:", res.divisors)
print("quotient order     :", G.quotient_order(res), "(= 3^5 + 1)")

dual = G.solve_dual_finite(f, C5)
print("dual solutions     :", dual.count, "(each verified exactly)")
print("first solutions    :")
for h in dual.vectors()[:4]:
    print("   ", tuple(str(v) for v in h.values))

est = G.entropy_finite_group(f, C5)
print(f"entropy            : {est.value:.12f} = log({est.quotient_order})/5")
assert est.quotient_order == est.abs_det == dual.count == 244
assert abs(est.value - math.log(244) / 5) < 1e-15

# the solution set is shift-invariant: shifting permutes it
g1 = G.GroupElement(C5, (1,))
orbit = {G.shift(h, g1).values for h in dual.vectors()}
assert orbit == {h.values for h in dual.vectors()}
print("shift-invariance   : confirmed")

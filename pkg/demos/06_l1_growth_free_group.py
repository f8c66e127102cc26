"""Why l1 invertibility is strictly stronger than l2 invertibility.

Let a, b generate a free subsemigroup and set g = (e + a - a^2) b.  On the
unit circle |1 + z - z^2| stays below 3, so 3e - g is invertible in the
operator algebra with inverse (1/3) sum (g/3)^k.  But the powers g^k have
pairwise disjoint supports and l1 norm exactly 3^k, so that series never
converges absolutely: no l1 inverse exists.  This script verifies the two
combinatorial facts behind the argument.
"""

import itertools

import grdet as G

F2 = G.free_group_rank2()
g = G.ring_element(F2, {(2,): 1, (1, 2): 1, (1, 1, 2): -1})  # (e + a - a^2) b

print("k   |g^k|_1   3^k   support words   pairwise disjoint so far")
supports = []
p = G.identity_element(F2)
ok = True
for k in range(7):
    if k:
        p = G.convolve(p, g)
    norm = int(G.l1_norm(p))
    supports.append(p.support())
    for prev in supports[:-1]:
        ok = ok and not (prev & supports[-1])
    print(f"{k}   {norm:7d}   {3**k:4d}   {len(p):13d}   {ok}")
    assert norm == 3 ** k == len(p)

assert all(not (a & b) for a, b in itertools.combinations(supports, 2))
print("\nevery coefficient of g^k is +-1 and no word ever repeats:")
print("the l1 norms multiply perfectly and the Neumann series cannot be summable.")

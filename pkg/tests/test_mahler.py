import math
import random

import pytest

import grdet as G
from grdet.errors import DomainError

Z1 = G.integer_lattice(1)
Z2 = G.integer_lattice(2)


def zpoly(mapping, desc=Z1):
    return G.ring_element(desc, {(k,) if isinstance(k, int) else k: v for k, v in mapping.items()})


def rand_nonvanishing(rng, desc, span=2):
    """c e + r with |c| > |r|_1: the symbol cannot vanish on the torus."""
    d = desc.params[0]
    while True:
        terms = {}
        for _ in range(rng.randint(1, 3)):
            g = tuple(rng.randint(-span, span) for _ in range(d))
            if g == (0,) * d:
                continue
            terms[g] = rng.randint(-2, 2)
        r = G.ring_element(desc, terms)
        norm = G.l1_norm(r)
        c = int(norm) + rng.randint(1, 3)
        if rng.random() < 0.5:
            c = -c
        return G.add(G.ring_element(desc, {(0,) * d: c}), r)


def test_mahler_roots_examples():
    assert G.mahler_roots(zpoly({0: 2})) == pytest.approx(math.log(2), rel=1e-14)
    assert G.mahler_roots(zpoly({1: 1})) == 0.0
    # roots of z^2 + 3z + 1; the larger magnitude is (3 + sqrt 5)/2
    expected = math.log((3 + math.sqrt(5)) / 2)
    assert G.mahler_roots(zpoly({0: 3, 1: 1, -1: 1})) == pytest.approx(expected, abs=1e-12)


def test_mahler_roots_rejects():
    with pytest.raises(DomainError):
        G.mahler_roots(G.zero_element(Z1))
    with pytest.raises(DomainError):
        G.mahler_roots(zpoly({(0, 0): 1}, Z2))


def test_laurent_round_trip():
    f = zpoly({-2: 5, 0: -1, 3: 2})
    lp = G.LaurentPoly.from_ring_element(f)
    assert lp.to_ring_element() == f
    k, coeffs = lp.univariate()
    assert k == -2
    assert coeffs == [5, 0, -1, 0, 0, 2]


def test_mahler_grid_examples():
    f = G.ring_element(Z2, {(0, 0): 5, (1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1})
    expect = (math.log(9) + math.log(5) + math.log(5) + math.log(1)) / 4
    assert G.mahler_grid(f, 2) == pytest.approx(expect, rel=1e-14)
    assert G.mahler_grid(zpoly({0: 2}), 8) == pytest.approx(math.log(2), rel=1e-14)
    f3 = zpoly({0: 3, 1: 1, -1: 1})
    assert abs(G.mahler_grid(f3, 64) - G.mahler_roots(f3)) < 1e-10


def test_mahler_grid_defect_warning():
    # u - 1 vanishes at the grid point 1
    f = zpoly({1: 1, 0: -1})
    with pytest.warns(UserWarning, match="near torus"):
        G.mahler_grid(f, 8)


def test_circulant_examples():
    f = zpoly({0: 2, 1: 1})
    # det of circ(2,1,0) = 2^3 + 1 = 9
    assert G.circulant_logdet(f, 3) == pytest.approx(math.log(9) / 3, rel=1e-12)
    assert G.circulant_logdet(G.identity_element(Z1), 5) == 0.0


def test_circulant_matches_grid_randomized():
    rng = random.Random(314)
    for desc in (Z1, Z2):
        for _ in range(8):
            f = rand_nonvanishing(rng, desc)
            for N in (2, 4, 8, 16):
                a = G.mahler_grid(f, N)
                b = G.circulant_logdet(f, N)
                assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_mahler_multiplicative_randomized():
    rng = random.Random(2718)
    done = 0
    while done < 12:
        f = rand_nonvanishing(rng, Z1)
        g = rand_nonvanishing(rng, Z1)
        prod = G.convolve(f, g)
        lhs = G.mahler_roots(prod)
        rhs = G.mahler_roots(f) + G.mahler_roots(g)
        assert abs(lhs - rhs) < 1e-9
        done += 1


def test_mahler_adjoint_symmetry_exact():
    rng = random.Random(99)
    for _ in range(10):
        f = rand_nonvanishing(rng, Z2)
        for N in (4, 8):
            assert G.mahler_grid(f, N) == G.mahler_grid(G.adjoint(f), N)


def test_mahler_grid_monotonicity_in_symbol():
    # pointwise domination of |symbol| values forces domination of the means
    f = zpoly({0: 3, 1: 1, -1: 1})    # values 3 + 2cos in [1, 5]
    g = zpoly({0: 6, 1: 1, -1: 1})    # values 6 + 2cos, always larger
    for N in (4, 8, 16):
        assert G.mahler_grid(f, N) <= G.mahler_grid(g, N)


def test_mahler_grid_refinement_settles():
    f = zpoly({0: 3, 1: 1, -1: 1})
    deltas = []
    for N in (8, 16, 32, 64):
        deltas.append(abs(G.mahler_grid(f, 2 * N) - G.mahler_grid(f, N)))
    assert all(b <= a for a, b in zip(deltas, deltas[1:]))


def test_mahler_grid_rejects_zero():
    with pytest.raises(DomainError):
        G.mahler_grid(G.zero_element(Z1), 4)

import random
from fractions import Fraction

import pytest

import grdet as G
from grdet.errors import DomainError, UnsupportedFamily

Z1 = G.integer_lattice(1)
Z2 = G.integer_lattice(2)
H3 = G.heisenberg3()
C5 = G.cyclic_product([5])
F2 = G.free_group_rank2()

ALL_FAMILIES = [Z2, H3, G.cyclic_product([4, 6]), F2]


def rand_element(rng, desc):
    if desc.family == "lattice":
        return G.GroupElement(desc, tuple(rng.randint(-6, 6) for _ in range(desc.params[0])))
    if desc.family == "heisenberg":
        return G.GroupElement(desc, tuple(rng.randint(-6, 6) for _ in range(3)))
    if desc.family == "cyclic":
        return G.GroupElement(desc, tuple(rng.randrange(m) for m in desc.params))
    word = [rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 8))]
    return G.GroupElement(desc, word)


def test_multiply_examples():
    assert G.multiply(G.GroupElement(Z2, (1, 0)), G.GroupElement(Z2, (0, 1))).coords == (1, 1)
    a = G.GroupElement(H3, (1, 0, 0))
    b = G.GroupElement(H3, (0, 1, 0))
    assert G.multiply(a, b).coords == (1, 1, 1)
    assert G.multiply(b, a).coords == (1, 1, 0)
    # (a b) (b^-1 a) reduces to a a
    w1 = G.GroupElement(F2, (1, 2))
    w2 = G.GroupElement(F2, (-2, 1))
    assert G.multiply(w1, w2).coords == (1, 1)


def test_multiply_descriptor_mismatch():
    with pytest.raises(G.DescriptorMismatch):
        G.multiply(G.GroupElement(Z1, (1,)), G.GroupElement(C5, (1,)))


def test_inverse_examples():
    assert G.inverse(G.GroupElement(Z2, (3, -1))).coords == (-3, 1)
    # Heisenberg: solve (1,1,0)(x,y,z) = e from the group law
    g = G.GroupElement(H3, (1, 1, 0))
    assert G.inverse(g).coords == (-1, -1, 1)
    assert G.multiply(g, G.inverse(g)) == G.identity(H3)
    assert G.inverse(G.GroupElement(C5, (2,))).coords == (3,)


def test_group_laws_randomized():
    rng = random.Random(12345)
    for desc in ALL_FAMILIES:
        e = G.identity(desc)
        for _ in range(60):
            g = rand_element(rng, desc)
            h = rand_element(rng, desc)
            k = rand_element(rng, desc)
            assert G.multiply(G.multiply(g, h), k) == G.multiply(g, G.multiply(h, k))
            assert G.multiply(g, e) == g
            assert G.multiply(e, g) == g
            assert G.multiply(g, G.inverse(g)) == e
            assert G.inverse(G.inverse(g)) == g


def test_free_word_canonical_form():
    # adjacent inverse pairs collapse on construction
    assert G.GroupElement(F2, (1, -1, 2)).coords == (2,)
    assert G.GroupElement(F2, (1, 2, -2, -1)).coords == ()


def test_folner_window_examples():
    w = G.folner_window(Z1, 2)
    assert [g.coords for g in w.elements] == [(-2,), (-1,), (0,), (1,), (2,)]
    assert len(G.folner_window(H3, 1)) == 27
    assert len(G.folner_window(C5, 3)) == 5
    with pytest.raises(UnsupportedFamily):
        G.folner_window(F2, 1)


def test_window_determinism():
    a = G.folner_window(H3, 2)
    b = G.folner_window(H3, 2)
    assert a.elements == b.elements
    assert a.index == b.index


def test_boundary_ratio_examples():
    F = G.window_from_coords(Z1, [(i,) for i in range(10)])
    K = [G.GroupElement(Z1, (k,)) for k in (-1, 0, 1)]
    # K.F = {-1..10}; symmetric difference {-1, 10}
    assert G.boundary_ratio(F, K) == Fraction(2, 10)

    full = G.folner_window(C5, 1)
    K5 = [G.GroupElement(C5, (j,)) for j in (0, 1, 2)]
    assert G.boundary_ratio(full, K5) == 0

    F2d = G.window_from_coords(Z2, [(i, j) for i in range(5) for j in range(5)])
    cross = [G.GroupElement(Z2, c) for c in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]]
    assert G.boundary_ratio(F2d, cross) == Fraction(20, 25)

    with pytest.raises(DomainError):
        G.boundary_ratio(F, [])


def test_boundary_ratio_fast_path_matches_generic():
    cross = [G.GroupElement(Z2, c) for c in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]]
    for n in (1, 2, 5):
        w = G.folner_window(Z2, n)
        generic = G.window_from_coords(Z2, [g.coords for g in w.elements])
        assert G.boundary_ratio(w, cross) == G.boundary_ratio(generic, cross)
        assert G.box_boundary_ratio(Z2, n, cross) == G.boundary_ratio(generic, cross)
    KH = [G.GroupElement(H3, c) for c in [(0, 0, 0), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]]
    for n in (1, 2, 3):
        w = G.folner_window(H3, n)
        generic = G.window_from_coords(H3, [g.coords for g in w.elements])
        assert G.boundary_ratio(w, KH) == G.boundary_ratio(generic, KH)
        assert G.box_boundary_ratio(H3, n, KH) == G.boundary_ratio(generic, KH)


def test_boundary_ratio_vanishes_along_windows():
    # ratio is eventually non-increasing and falls below 0.1 / 0.01 at
    # explicit stages (Heisenberg at 0.01 needs ~10^10-element windows and
    # is documented as out of desk scale)
    K1 = [G.GroupElement(Z1, (k,)) for k in (-1, 0, 1)]
    vals = [G.box_boundary_ratio(Z1, n, K1) for n in (2, 4, 8, 16, 32, 64, 128)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert G.box_boundary_ratio(Z1, 10, K1) < Fraction(1, 10)
    assert G.box_boundary_ratio(Z1, 100, K1) < Fraction(1, 100)

    cross = [G.GroupElement(Z2, c) for c in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]]
    assert G.box_boundary_ratio(Z2, 20, cross) < Fraction(1, 10)
    assert G.box_boundary_ratio(Z2, 200, cross) < Fraction(1, 100)

    KH = [G.GroupElement(H3, c) for c in [(0, 0, 0), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]]
    hv = [G.box_boundary_ratio(H3, n, KH) for n in (4, 8, 16)]
    assert all(b <= a for a, b in zip(hv, hv[1:]))


def test_descriptor_strings():
    for desc in [Z1, Z2, H3, C5, G.cyclic_product([2, 3, 4]), F2]:
        assert G.parse_descriptor(G.descriptor_string(desc)) == desc
    with pytest.raises(G.FormatError):
        G.parse_descriptor("Q^2")

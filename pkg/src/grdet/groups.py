"""Group families, canonical elements and Folner windows.

Supported families: integer lattices Z^d, the discrete Heisenberg group
H3(Z), finite products of cyclic groups, and the free group of rank 2.
The free group is non-amenable and is admitted only so that the l1-growth
computation is expressible; all Folner operations reject it.

Canonical coordinates:
  * lattice     -- tuple of d integers
  * heisenberg  -- (x, y, z) with law
                   (x1,y1,z1)(x2,y2,z2) = (x1+x2, y1+y2, z1+z2+x1*y2)
  * cyclic      -- residues reduced into [0, modulus)
  * free2       -- reduced word, a tuple over {1, -1, 2, -2} meaning
                   a, a^-1, b, b^-1, with no adjacent inverse pair
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .errors import DescriptorMismatch, DomainError, FormatError, UnsupportedFamily

LATTICE = "lattice"
HEISENBERG = "heisenberg"
CYCLIC = "cyclic"
FREE2 = "free2"

_FREE_LETTERS = {1: "a", -1: "a^-1", 2: "b", -2: "b^-1"}
_FREE_TOKENS = {v: k for k, v in _FREE_LETTERS.items()}


@dataclass(frozen=True)
class GroupDescriptor:
    """Identifies a group family together with its parameters."""

    family: str
    params: tuple = ()

    def __post_init__(self):
        if self.family == LATTICE:
            (d,) = self.params
            if not (isinstance(d, int) and d >= 1):
                raise DomainError("lattice rank must be a positive integer")
        elif self.family == CYCLIC:
            if not self.params or any(not (isinstance(m, int) and m >= 2) for m in self.params):
                raise DomainError("every cyclic modulus must be an integer >= 2")
        elif self.family in (HEISENBERG, FREE2):
            if self.params:
                raise DomainError(f"{self.family} takes no parameters")
        else:
            raise DomainError(f"unknown group family {self.family!r}")

    @property
    def is_amenable(self) -> bool:
        return self.family != FREE2

    @property
    def is_finite(self) -> bool:
        return self.family == CYCLIC

    def order(self) -> int:
        if self.family != CYCLIC:
            raise DomainError("order() is defined for finite groups only")
        n = 1
        for m in self.params:
            n *= m
        return n

    def __str__(self) -> str:
        return descriptor_string(self)


def integer_lattice(d: int) -> GroupDescriptor:
    return GroupDescriptor(LATTICE, (d,))


def heisenberg3() -> GroupDescriptor:
    return GroupDescriptor(HEISENBERG)


def cyclic_product(moduli: Iterable[int]) -> GroupDescriptor:
    return GroupDescriptor(CYCLIC, tuple(int(m) for m in moduli))


def free_group_rank2() -> GroupDescriptor:
    return GroupDescriptor(FREE2)


def descriptor_string(desc: GroupDescriptor) -> str:
    """Serialize a descriptor: Z^d, H3, Zmod:m1xm2x..., F2."""
    if desc.family == LATTICE:
        return f"Z^{desc.params[0]}"
    if desc.family == HEISENBERG:
        return "H3"
    if desc.family == CYCLIC:
        return "Zmod:" + "x".join(str(m) for m in desc.params)
    return "F2"


def parse_descriptor(text: str) -> GroupDescriptor:
    """Parse the string form produced by descriptor_string."""
    s = text.strip()
    if s == "H3":
        return heisenberg3()
    if s == "F2":
        return free_group_rank2()
    if s.startswith("Z^"):
        try:
            return integer_lattice(int(s[2:]))
        except ValueError as exc:
            raise FormatError(f"bad lattice descriptor {text!r}") from exc
    if s.startswith("Zmod:"):
        try:
            return cyclic_product(int(tok) for tok in s[5:].split("x"))
        except ValueError as exc:
            raise FormatError(f"bad cyclic descriptor {text!r}") from exc
    raise FormatError(f"unknown group descriptor {text!r}")


# ---------------------------------------------------------------------------
# coordinate kernels (raw tuples; also used by the hot loops in det.py)

def _mul_lattice(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _mul_heis(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1])


def _reduce_word(word):
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def _mul_free(a, b):
    i = len(a)
    j = 0
    while i > 0 and j < len(b) and a[i - 1] == -b[j]:
        i -= 1
        j += 1
    return a[:i] + b[j:]


def coordinate_multiplier(desc: GroupDescriptor):
    """Return a function multiplying raw coordinate tuples for this family."""
    if desc.family == LATTICE:
        return _mul_lattice
    if desc.family == HEISENBERG:
        return _mul_heis
    if desc.family == CYCLIC:
        moduli = desc.params
        def mul(a, b, _m=moduli):
            return tuple((x + y) % m for x, y, m in zip(a, b, _m))
        return mul
    return _mul_free


def _inverse_coords(desc: GroupDescriptor, c):
    if desc.family == LATTICE:
        return tuple(-x for x in c)
    if desc.family == HEISENBERG:
        # (x,y,z)^-1 = (-x,-y,-z+xy); check: z + (-z+xy) + x*(-y) = 0
        return (-c[0], -c[1], -c[2] + c[0] * c[1])
    if desc.family == CYCLIC:
        return tuple((-x) % m for x, m in zip(c, desc.params))
    return tuple(-letter for letter in reversed(c))


def _canonical_coords(desc: GroupDescriptor, c):
    if desc.family == CYCLIC:
        c = tuple(int(x) % m for x, m in zip(c, desc.params))
        if len(c) != len(desc.params):
            raise DomainError("coordinate length does not match moduli")
        return c
    if desc.family == LATTICE:
        c = tuple(int(x) for x in c)
        if len(c) != desc.params[0]:
            raise DomainError("coordinate length does not match lattice rank")
        return c
    if desc.family == HEISENBERG:
        c = tuple(int(x) for x in c)
        if len(c) != 3:
            raise DomainError("Heisenberg elements have three coordinates")
        return c
    word = tuple(int(x) for x in c)
    if any(letter not in _FREE_LETTERS for letter in word):
        raise DomainError("free-group letters must be one of 1,-1,2,-2")
    return _reduce_word(word)


class GroupElement:
    """A group element in canonical coordinates. Immutable and hashable."""

    __slots__ = ("descriptor", "coords", "_hash")

    def __init__(self, descriptor: GroupDescriptor, coords):
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "coords", _canonical_coords(descriptor, coords))
        object.__setattr__(self, "_hash", hash((descriptor, self.coords)))

    def __setattr__(self, *_):
        raise AttributeError("GroupElement is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.descriptor == other.descriptor
            and self.coords == other.coords
        )

    def __repr__(self):
        return f"GroupElement({descriptor_string(self.descriptor)}, {self.coords})"

    def sort_key(self):
        if self.descriptor.family == FREE2:
            return (len(self.coords), self.coords)
        return self.coords


def identity(desc: GroupDescriptor) -> GroupElement:
    if desc.family == FREE2:
        return GroupElement(desc, ())
    if desc.family == HEISENBERG:
        return GroupElement(desc, (0, 0, 0))
    if desc.family == CYCLIC:
        return GroupElement(desc, (0,) * len(desc.params))
    return GroupElement(desc, (0,) * desc.params[0])


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.descriptor != h.descriptor:
        raise DescriptorMismatch("elements belong to different groups")
    mul = coordinate_multiplier(g.descriptor)
    return GroupElement(g.descriptor, mul(g.coords, h.coords))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.descriptor, _inverse_coords(g.descriptor, g.coords))


# ---------------------------------------------------------------------------
# element <-> token text (used by the .gre format)

def element_tokens(g: GroupElement) -> list[str]:
    if g.descriptor.family == FREE2:
        return [_FREE_LETTERS[letter] for letter in g.coords]
    return [str(x) for x in g.coords]


def element_from_tokens(desc: GroupDescriptor, tokens: list[str]) -> GroupElement:
    if desc.family == FREE2:
        try:
            word = [_FREE_TOKENS[t] for t in tokens]
        except KeyError as exc:
            raise FormatError(f"bad free-group letter {exc.args[0]!r}") from exc
        return GroupElement(desc, word)
    try:
        coords = [int(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"bad integer coordinate in {tokens!r}") from exc
    return GroupElement(desc, coords)


# ---------------------------------------------------------------------------
# Folner windows

class FolnerWindow:
    """An ordered finite subset of a group, with positional index.

    The element order is part of the contract: it fixes matrix indexing for
    compressions, so two windows built from equal arguments are identical.
    """

    __slots__ = ("descriptor", "elements", "index", "n", "_box")

    def __init__(self, descriptor: GroupDescriptor, elements, n: Optional[int] = None, _box=None):
        elems = tuple(elements)
        if not elems:
            raise DomainError("window must be nonempty")
        index = {}
        for i, g in enumerate(elems):
            if not isinstance(g, GroupElement) or g.descriptor != descriptor:
                raise DescriptorMismatch("window element over wrong group")
            if g in index:
                raise DomainError("window elements must be distinct")
            index[g] = i
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_box", _box)

    def __setattr__(self, *_):
        raise AttributeError("FolnerWindow is immutable")

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    def __eq__(self, other):
        return (
            isinstance(other, FolnerWindow)
            and self.descriptor == other.descriptor
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((self.descriptor, self.elements))

    def __repr__(self):
        return f"FolnerWindow({descriptor_string(self.descriptor)}, size={len(self)}, n={self.n})"


def window_from_coords(desc: GroupDescriptor, coords_list) -> FolnerWindow:
    """Build a window from raw coordinates, preserving the given order."""
    return FolnerWindow(desc, (GroupElement(desc, c) for c in coords_list))


def folner_window(desc: GroupDescriptor, n: int) -> FolnerWindow:
    """The standard window at stage n, in lexicographic coordinate order.

    Lattice: box [-n, n]^d.  Heisenberg: |x| <= n, |y| <= n, |z| <= n^2
    (the z-range follows the group's growth so boundary ratios vanish).
    Finite groups: the whole group, independent of n.
    """
    if not desc.is_amenable:
        raise UnsupportedFamily("free group admits no Folner windows")
    if n < 1:
        raise DomainError("window stage must be >= 1")
    if desc.family == LATTICE:
        d = desc.params[0]
        rng = range(-n, n + 1)
        coords = itertools.product(*([rng] * d))
        box = (LATTICE, d, n)
    elif desc.family == HEISENBERG:
        coords = (
            (x, y, z)
            for x in range(-n, n + 1)
            for y in range(-n, n + 1)
            for z in range(-n * n, n * n + 1)
        )
        box = (HEISENBERG, n)
    else:
        coords = itertools.product(*(range(m) for m in desc.params))
        box = None
    elems = tuple(GroupElement(desc, c) for c in coords)
    return FolnerWindow(desc, elems, n=n, _box=box)


def _box_contains(box, arr: np.ndarray) -> np.ndarray:
    if box[0] == LATTICE:
        n = box[2]
        return (np.abs(arr) <= n).all(axis=1)
    n = box[1]
    return (
        (np.abs(arr[:, 0]) <= n)
        & (np.abs(arr[:, 1]) <= n)
        & (np.abs(arr[:, 2]) <= n * n)
    )


def _box_coords_array(box) -> np.ndarray:
    if box[0] == LATTICE:
        _, d, n = box
        axes = [np.arange(-n, n + 1)] * d
    else:
        n = box[1]
        axes = [np.arange(-n, n + 1), np.arange(-n, n + 1), np.arange(-n * n, n * n + 1)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _translate_array(box, k_coords, arr: np.ndarray) -> np.ndarray:
    if box[0] == LATTICE:
        return arr + np.asarray(k_coords)
    kx, ky, kz = k_coords
    out = np.empty_like(arr)
    out[:, 0] = arr[:, 0] + kx
    out[:, 1] = arr[:, 1] + ky
    out[:, 2] = arr[:, 2] + kz + kx * arr[:, 1]
    return out


def _box_outside_count(box, K_coords) -> int:
    """|KF \\ F| for a standard box window F, computed with numpy."""
    arr = _box_coords_array(box)
    pieces = []
    for k in K_coords:
        shifted = _translate_array(box, k, arr)
        outside = shifted[~_box_contains(box, shifted)]
        if len(outside):
            pieces.append(outside)
    if not pieces:
        return 0
    stacked = np.vstack(pieces)
    return len(np.unique(stacked, axis=0))


def boundary_ratio(window: FolnerWindow, K) -> Fraction:
    """Exact |K.F symm-diff F| / |F| for a finite nonempty K."""
    K = list(K)
    if not K:
        raise DomainError("K must be nonempty")
    for k in K:
        if k.descriptor != window.descriptor:
            raise DescriptorMismatch("K element over wrong group")
    has_identity = any(k.coords == identity(window.descriptor).coords for k in K)
    if window._box is not None and has_identity:
        # F subset of KF, so the symmetric difference is KF \ F
        out = _box_outside_count(window._box, [k.coords for k in K])
        return Fraction(out, len(window))
    mul = coordinate_multiplier(window.descriptor)
    fset = {g.coords for g in window.elements}
    kf = {mul(k.coords, c) for k in K for c in fset}
    sym = len(kf - fset) + len(fset - kf)
    return Fraction(sym, len(window))


def box_boundary_ratio(desc: GroupDescriptor, n: int, K) -> Fraction:
    """boundary_ratio(folner_window(desc, n), K) without materializing the window.

    Only for lattice / Heisenberg standard windows with the identity in K;
    agrees with boundary_ratio wherever both run (tested).  Exists because
    Heisenberg windows grow like n^4 and the object form becomes the cost.
    """
    if desc.family == CYCLIC:
        return Fraction(0)
    if desc.family == LATTICE:
        box = (LATTICE, desc.params[0], n)
        size = (2 * n + 1) ** desc.params[0]
    elif desc.family == HEISENBERG:
        box = (HEISENBERG, n)
        size = (2 * n + 1) ** 2 * (2 * n * n + 1)
    else:
        raise UnsupportedFamily("free group admits no Folner windows")
    K = list(K)
    if not K:
        raise DomainError("K must be nonempty")
    if not any(k.coords == identity(desc).coords for k in K):
        raise DomainError("box_boundary_ratio requires the identity in K")
    out = _box_outside_count(box, [k.coords for k in K])
    return Fraction(out, size)

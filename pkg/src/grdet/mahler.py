"""Mahler measures of lattice group-ring elements.

Three routes, which agree where their hypotheses overlap:

  * mahler_roots     -- d = 1 only; log|leading coeff| + sum of log+ of the
                        root magnitudes (companion-matrix eigenvalues);
  * mahler_grid      -- torus quadrature of log|symbol| on the N-th roots
                        of unity, any d;
  * circulant_logdet -- normalized log-determinant of the symbol acting on
                        the group ring of (Z/N)^d; its eigenvalues are
                        exactly the symbol values on the same grid.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from . import groups, ring
from .det import logabsdet
from .ring import RingElement
from .sections import compress

ZERO_SYMBOL_FLOOR = 1e-14


@dataclass(frozen=True)
class LaurentPoly:
    """A lattice ring element viewed as coefficients on exponent vectors."""

    descriptor: groups.GroupDescriptor
    exps: tuple  # sorted tuple of (exponent tuple, coefficient)

    @property
    def dimension(self) -> int:
        return self.descriptor.params[0]

    @classmethod
    def from_ring_element(cls, f: RingElement) -> "LaurentPoly":
        if f.descriptor.family != groups.LATTICE:
            raise DomainError("Laurent view needs an integer-lattice element")
        pairs = tuple((g.coords, v) for g, v in f.sorted_terms())
        return cls(f.descriptor, pairs)

    def to_ring_element(self) -> RingElement:
        return ring.ring_element(self.descriptor, dict(self.exps))

    def univariate(self):
        """For d = 1: (k, [c_0..c_n]) with f = u^k * sum c_j u^j, c_0 c_n != 0."""
        if self.dimension != 1:
            raise DomainError("univariate extraction needs d = 1")
        if not self.exps:
            raise DomainError("zero element has no Laurent normal form")
        lo = self.exps[0][0][0]
        hi = self.exps[-1][0][0]
        coeffs = [0] * (hi - lo + 1)
        for (e,), c in self.exps:
            coeffs[e - lo] = c
        return lo, coeffs


def _as_laurent(f) -> LaurentPoly:
    if isinstance(f, LaurentPoly):
        return f
    return LaurentPoly.from_ring_element(f)


def mahler_roots(f) -> float:
    """Log Mahler measure for d = 1 from polynomial roots.

    Uses the companion-matrix eigenvalue solver (with balancing) behind
    numpy.roots; accurate to ~1e-10 absolute through degree 50.
    """
    poly = _as_laurent(f)
    _, coeffs = poly.univariate()
    cs = [float(c) for c in coeffs]
    n = len(cs) - 1
    if n == 0:
        return math.log(abs(cs[0]))
    lam = np.roots(cs[::-1])
    return math.fsum(
        [math.log(abs(cs[-1]))] + [math.log(a) for a in np.abs(lam) if a > 1.0]
    )


def _symbol_values_fixed_order(f: RingElement, N: int):
    """|f| at every point of the N-th-roots grid, in grid enumeration order.

    Each value is assembled with exact-rounded summation (math.fsum) of the
    term contributions, so it does not depend on the term order; the adjoint
    symbol therefore yields bit-identical magnitudes.
    """
    d = f.descriptor.params[0]
    table = [cmath.exp(2j * math.pi * j / N) for j in range(N)]
    terms = [(g.coords, complex(v)) for g, v in f.sorted_terms()]
    out = []
    total = N ** d
    for flat in range(total):
        k = []
        rem = flat
        for _ in range(d):
            k.append(rem % N)
            rem //= N
        k.reverse()
        parts = [c * table[sum(e * ki for e, ki in zip(exp, k)) % N] for exp, c in terms]
        re = math.fsum(p.real for p in parts)
        im = math.fsum(p.imag for p in parts)
        out.append(math.hypot(re, im))
    return out


def mahler_grid(f: RingElement, N: int) -> float:
    """Mean of log|f| over the N^d grid of N-th roots of unity.

    Grid points where |f| falls below 1e-14 are defects: they are excluded
    from the mean and reported through a warning, since quadrature through a
    torus zero is unreliable (the measure itself is still defined).
    """
    if f.descriptor.family != groups.LATTICE:
        raise DomainError("mahler_grid needs an integer-lattice element")
    if not f:
        raise DomainError("mahler_grid rejects the zero element")
    if not (isinstance(N, int) and N >= 2):
        raise DomainError("grid size must be an integer >= 2")
    values = _symbol_values_fixed_order(f, N)
    logs = []
    defects = 0
    for v in values:
        if v < ZERO_SYMBOL_FLOOR:
            defects += 1
        else:
            logs.append(math.log(v))
    if not logs:
        raise DomainError("every grid point is a near-zero defect")
    if defects:
        warnings.warn(
            f"mahler_grid: {defects} of {len(values)} grid points are near torus "
            "zeros and were excluded; the estimate is unreliable"
        )
    return math.fsum(logs) / len(logs)


def circulant_logdet(f: RingElement, N: int) -> float:
    """Normalized log|det| of f acting on the group ring of (Z/N)^d.

    The image of f under exponent reduction mod N is compressed over the
    whole finite group (a d-level circulant) and eliminated by logabsdet;
    a singular image reports -inf.
    """
    if f.descriptor.family != groups.LATTICE:
        raise DomainError("circulant_logdet needs an integer-lattice element")
    if not (isinstance(N, int) and N >= 2):
        raise DomainError("modulus must be an integer >= 2")
    d = f.descriptor.params[0]
    quot = groups.cyclic_product([N] * d)
    folded: dict = {}
    for g, v in f.sorted_terms():
        key = tuple(x % N for x in g.coords)
        folded[key] = folded.get(key, 0) + v
    img = ring.ring_element(quot, folded, f.domain)
    window = groups.folner_window(quot, 1)
    if not img:
        return -math.inf
    return logabsdet(compress(img, window)) / (N ** d)

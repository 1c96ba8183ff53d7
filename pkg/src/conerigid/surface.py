"""Rank-3 lattices on the fibre surfaces and the two fibrewise reflections.

Two surfaces carry the involutions:

* ``T~``, a degree-2 Del Pezzo fibre blown up at the points where a section
  ``l`` and its conjugate ``l*`` meet it. Basis ``(h, e, e*)`` with ``h`` the
  elliptic fibre class; the Bertini involution acts by reflecting in ``e*``.
  The auxiliary basis ``(h', e, e*)`` with ``h' = h + e + e*`` diagonalises the
  form as ``diag(2, -1, -1)``.
* ``S~``, a fibre blown up where ``s1`` and ``s2`` meet it. Basis
  ``(g, e1, e2)`` with exactly the same intersection form.

Classes on the unblown fibre ``S`` (``K_S^2 = 2``) containing a pair of
conjugate (-1)-lines are handled by :class:`DP2Class`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import rat

# (h, e, e*) and (g, e1, e2)
FORM = np.array([[0, 1, 1], [1, -1, 0], [1, 0, -1]], dtype=np.int64)
# (h', e, e*)
FORM_PRIME = np.array([[2, 0, 0], [0, -1, 0], [0, 0, -1]], dtype=np.int64)
# coordinates of h', e, e* (columns) in the basis (h, e, e*)
PRIME_TO_H = np.array([[1, 0, 0], [1, 1, 0], [1, 0, 1]], dtype=np.int64)
H_TO_PRIME = np.array([[1, 0, 0], [-1, 1, 0], [-1, 0, 1]], dtype=np.int64)

# columns are the images of the basis vectors
# h -> h, e -> -e + 2e* + 2h, e* -> e*
BERTINI = np.array([[1, 2, 0], [0, -1, 0], [0, 2, 1]], dtype=np.int64)
# g -> g, e1 -> -e1 + 2e2 + 2g, e2 -> e2
FIBER_REFLECTION = BERTINI.copy()

# (-K_S, L1, L2) with L1 + L2 = -K_S; a generating set, so the form is degenerate
DP2_FORM = np.array([[2, 1, 1], [1, -1, 2], [1, 2, -1]], dtype=np.int64)

BASES = {
    "h": ("h", "e", "e*"),
    "h'": ("h'", "e", "e*"),
    "g": ("g", "e1", "e2"),
}


class BasisMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FibSurfaceClass:
    """Integer class ``x0*b0 + x1*b1 + x2*b2`` in one of the bases of :data:`BASES`."""

    coords: tuple[int, int, int]
    basis: str = "h"

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) != 3:
            raise ValueError("fibre surface classes have three coordinates")

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def __add__(self, other: FibSurfaceClass) -> FibSurfaceClass:
        if other.basis != self.basis:
            raise BasisMismatch(f"{self.basis} vs {other.basis}")
        return FibSurfaceClass(tuple(self.vec + other.vec), self.basis)

    def __repr__(self) -> str:
        names = BASES[self.basis]
        terms = [f"{c}{n}" for c, n in zip(self.coords, names) if c]
        return " + ".join(terms) or "0"

    def to_prime(self) -> FibSurfaceClass:
        if self.basis == "h'":
            return self
        if self.basis != "h":
            raise BasisMismatch("only the (h, e, e*) picture has an h' basis")
        return FibSurfaceClass(tuple(H_TO_PRIME @ self.vec), "h'")

    def to_h(self) -> FibSurfaceClass:
        if self.basis == "h":
            return self
        if self.basis != "h'":
            raise BasisMismatch("only the (h', e, e*) basis converts to (h, e, e*)")
        return FibSurfaceClass(tuple(PRIME_TO_H @ self.vec), "h")


@dataclass(frozen=True)
class DP2Class:
    """``n*(-K_S) - k1*L1 - k2*L2`` on a degree-2 Del Pezzo fibre.

    ``k1``, ``k2`` are the multiplicities with which the conjugate lines are
    split off, matching ``D|_S = C + k1*L1 + k2*L2`` with ``C`` the residual.
    """

    n: int
    k1: int = 0
    k2: int = 0

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.n, -self.k1, -self.k2], dtype=np.int64)


def _form_for(basis: str) -> np.ndarray:
    return FORM_PRIME if basis == "h'" else FORM


def surf_pair(c1, c2) -> Fraction:
    if isinstance(c1, DP2Class) and isinstance(c2, DP2Class):
        return Fraction(int(c1.vec @ DP2_FORM @ c2.vec))
    if isinstance(c1, FibSurfaceClass) and isinstance(c2, FibSurfaceClass):
        if c1.basis != c2.basis:
            raise BasisMismatch(f"{c1.basis} vs {c2.basis}")
        return Fraction(int(c1.vec @ _form_for(c1.basis) @ c2.vec))
    raise BasisMismatch("cannot pair classes from different surfaces")


def bertini_pullback(c: FibSurfaceClass) -> FibSurfaceClass:
    """Pull back by the Bertini involution of ``T~``; accepts ``h`` or ``h'`` coordinates."""
    if c.basis == "h":
        return FibSurfaceClass(tuple(BERTINI @ c.vec), "h")
    if c.basis == "h'":
        return bertini_pullback(c.to_h()).to_prime()
    raise BasisMismatch(f"Bertini involution acts on the (h, e, e*) picture, got {c.basis}")


def fiber_reflection_pullback(c: FibSurfaceClass) -> FibSurfaceClass:
    if c.basis != "g":
        raise BasisMismatch(f"fibre reflection acts on the (g, e1, e2) picture, got {c.basis}")
    return FibSurfaceClass(tuple(FIBER_REFLECTION @ c.vec), "g")


def marked_restriction(n: int, nu: int, nu_conj: int) -> FibSurfaceClass:
    """``n*h' - nu*e - nu_conj*e*``: a marked system restricted to ``T~``."""
    return FibSurfaceClass((n, -nu, -nu_conj), "h'")


def bertini_coefficients(n: int, nu: int, nu_conj: int) -> tuple[int, int, int]:
    """``(n', nu', nu*')`` read off the pulled-back restriction."""
    a, c, d = bertini_pullback(marked_restriction(n, nu, nu_conj)).coords
    return a, -c, -d


def dp2_line_degrees(c: DP2Class) -> tuple[Fraction, Fraction]:
    return Fraction(c.n + c.k1 - 2 * c.k2), Fraction(c.n - 2 * c.k1 + c.k2)


def dp2_anticanonical_degree(n: int, k: int) -> Fraction:
    """``C.L`` for ``C = n*(-K_S) - k*L`` with ``L`` an irreducible member of ``|-K_S|``."""
    return Fraction(2 * n - 2 * k)


def mult_sum_bound(n: int, m: int, marks) -> Fraction:
    """Upper bound for ``nu + nu~`` at a point and an infinitely near point of a fibre.

    ``marks`` is ``(k1, k2)`` when the anticanonical curve through the two
    points splits into conjugate lines (only ``L1`` passing through them), or a
    single ``k`` when it is irreducible. ``m >= 0`` is the extra multiplicity the
    exceptional curve picks up after one blow-up.

    The reducible bound is ``C.L1 + 2*k1 + m = n + 3*k1 - 2*k2 + m``, which
    ``C.L2 >= 0`` keeps below ``5n/2 + m``; the irreducible one is ``2n + m``.
    """
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    if isinstance(marks, (tuple, list)):
        k1, k2 = (int(k) for k in marks)
        if k1 < 0 or k2 < 0:
            raise ValueError("line multiplicities must be non-negative")
        cl1, cl2 = dp2_line_degrees(DP2Class(n, k1, k2))
        if cl1 < 0 or cl2 < 0:
            raise ValueError(
                f"residual curve not effective on the lines: C.L1={cl1}, C.L2={cl2}"
            )
        bound = cl1 + 2 * k1 + m
        assert bound <= Fraction(5 * n, 2) + m
        return bound
    k = int(marks)
    if k < 0:
        raise ValueError("line multiplicity must be non-negative")
    cl = dp2_anticanonical_degree(n, k)
    if cl < 0:
        raise ValueError(f"residual curve not effective on L: C.L={cl}")
    return cl + 2 * k + m


def lemma_bound(n) -> Fraction:
    """``5n/2``: the bound on ``nu_1 + nu_2`` at a point of ``s1``."""
    return Fraction(5, 2) * rat(n)

"""Riemann-Roch on the smooth model and triple products after blowing up a section.

``chi(O(D)) = D^3/6 - D^2.K/4 + D.(K^2 + c2)/12 + chi(O)`` with ``chi(O) = 1``
and all intersection numbers taken from :mod:`conerigid.lattice`. This is an
Euler characteristic; it equals ``h^0`` only for the nef and big multiples of
``-K`` where higher cohomology vanishes, and callers decide when to claim that.

Blow-up calculus along a smooth rational curve ``B`` of class ``s + alpha*f``
with exceptional divisor ``E``::

    psi*A . psi*A' . E = 0
    psi*A . E^2       = -A.B
    E^3               = 2 - (-K).B     (= -deg N_B for genus 0)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .lattice import (
    CycleClass,
    DivisorClass,
    anticanonical,
    c2,
    div_cycle_pair,
    div_triple,
    fmt_rat,
    rat,
)

CHI_STRUCTURE_SHEAF = 1


def chi_line_bundle(d: DivisorClass) -> Fraction:
    mk = anticanonical(d.model)
    d3 = div_triple(d, d, d)
    d2k = div_triple(d, d, mk)  # D^2 . (-K)
    dk2 = div_triple(d, mk, mk)  # D . K^2
    dc2 = div_cycle_pair(d, c2(d.model))
    return d3 / 6 + d2k / 4 + (dk2 + dc2) / 12 + CHI_STRUCTURE_SHEAF


def cone_quadric_count(degree: int = 2) -> int:
    """``h^0(Q, O(degree))`` for the quadric cone ``Q`` in ``P^4``.

    Sections of ``O_P4(d)`` modulo multiples of the quadric equation.
    """
    if degree < 0:
        return 0
    return comb(degree + 4, 4) - (comb(degree + 2, 4) if degree >= 2 else 0)


def section_curve(alpha, model: str = "V") -> CycleClass:
    return CycleClass(1, alpha, model)


def blowup_triple_coefficients(alpha: int, m_g=1) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients ``(c_nn, c_nnu, c_nunu)`` of ``(psi*D - nu*E)^2 . (psi*G - m_g*E)``.

    ``D`` ranges over ``|-n*K|`` with multiplicity ``nu`` along ``B`` and ``G`` is a
    member of ``|-2K|`` through ``B`` with multiplicity ``m_g``.
    """
    if alpha not in (2, 3):
        raise ValueError(f"horizontal degree alpha={alpha} unsupported; only 2 and 3")
    m_g = rat(m_g)
    mk = anticanonical()
    g = DivisorClass("V", 2, 0)
    b = section_curve(alpha)
    kb = div_cycle_pair(mk, b)
    e_cubed = 2 - kb
    # expand (X - nu E)^2 (Y - m_g E) with X = psi*(-K) scaled by n, Y = psi*G
    c_nn = div_triple(mk, mk, g)
    # -2 nu m_g X.E.E  (X.E^2 = -n(-K).B) ; X.Y.E and X^2.E vanish
    c_nnu = 2 * m_g * (-kb)
    # nu^2 (E^2.Y) - nu^2 m_g E^3 ; E^2.Y = -G.B
    c_nunu = -div_cycle_pair(g, b) - m_g * e_cubed
    return Fraction(c_nn), Fraction(c_nnu), Fraction(c_nunu)


def blowup_triple(n, nu, alpha: int, m_g=1):
    """Triple product of strict transforms after blowing up ``B``.

    Generic in the numeric type of ``n`` and ``nu`` so it can be evaluated on
    symbols as well as rationals.
    """
    c_nn, c_nnu, c_nunu = blowup_triple_coefficients(alpha, m_g)
    return c_nn * n * n + c_nnu * n * nu + c_nunu * nu * nu


@dataclass(frozen=True)
class GateVerdict:
    n: int
    eps: Fraction
    alpha: Fraction
    degree_product: Fraction
    degree_bound: Fraction
    verdict: str  # "admissible" | "excluded"
    reason: str


def horizontal_degree_gate(n, eps, alpha, nu=None) -> GateVerdict:
    """Decide whether a maximal section of class ``s + alpha*f`` survives.

    ``eps`` is the coefficient of the curve in ``D1.D2``; being maximal forces
    ``eps >= nu^2 > n^2``. Degree against ``-K`` gives ``alpha*eps <= 4n^2``, and
    the blow-up triple product rules out ``alpha = 2, 3``. If ``nu`` is omitted
    the triple product is certified negative for every ``nu > n``.
    """
    n, eps, alpha = rat(n), rat(eps), rat(alpha)
    if alpha < 0 or alpha.denominator != 1:
        raise ValueError(f"alpha must be a non-negative integer, got {fmt_rat(alpha)}")
    if eps <= n * n:
        raise ValueError(f"a maximal curve has eps > n^2; got eps={fmt_rat(eps)}, n={fmt_rat(n)}")
    if nu is not None:
        nu = rat(nu)
        if nu <= n or nu * nu > eps:
            raise ValueError("need n < nu and nu^2 <= eps")
    product = alpha * eps
    bound = 4 * n * n
    if product > bound:
        return GateVerdict(int(n), eps, alpha, product, bound, "excluded",
                           f"alpha*eps = {fmt_rat(product)} > 4n^2 = {fmt_rat(bound)}")
    if alpha in (0, 1):
        return GateVerdict(int(n), eps, alpha, product, bound, "admissible",
                           f"alpha = {fmt_rat(alpha)}: a line")
    a = int(alpha)
    if nu is not None:
        value = blowup_triple(n, nu, a)
        return GateVerdict(int(n), eps, alpha, product, bound, "excluded",
                           f"triple product {fmt_rat(value)} < 0 at nu={fmt_rat(nu)}")
    c_nn, c_nnu, c_nunu = blowup_triple_coefficients(a)
    at_n = blowup_triple(n, n, a)
    # value at nu = n is <= 0 and both nu-coefficients are negative, so it only drops for nu > n
    assert at_n <= 0 and c_nnu < 0 and c_nunu < 0
    return GateVerdict(int(n), eps, alpha, product, bound, "excluded",
                       f"triple product <= {fmt_rat(at_n)} at nu=n and decreasing for nu > n")

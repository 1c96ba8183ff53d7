"""Divisor and 1-cycle lattices of the double cone and its two small resolutions.

Everything here is exact. Rationals are :class:`fractions.Fraction`; floats are
rejected at every entry point.

Coordinates
-----------
On ``X`` a Weil divisor class is ``a*F1 + b*F2``. On a smooth model the same
class is written ``-n*K + m*F`` where ``F`` is the fibre of that model's Del
Pezzo fibration (``F1`` on ``V``, ``F2`` on ``U``). Because ``-K = F1 + F2``,

    V:  (a, b) = (n + m, n)
    U:  (a, b) = (n, n + m)

1-cycles live in ``A^2_Q = Q*s + Q*f`` with ``s`` the flopping section
(``s1`` on ``V``, ``s2`` on ``U``) and ``f`` a vertical line.

Basis table (model V, basis ``-K``, ``F1``), reconstructed from
``-K = F1 + F2``, ``K_F^2 = 2``, ``F1^2 = 0`` and checked against the products
``D^2.F2 = 2n^2 + 4mn`` and ``D^2.(-K) = 4n^2 + 4mn``::

    (-K)^3 = 4     (-K)^2.F1 = 2     (-K).F1^2 = 0     F1^3 = 0
    (-K).s1 = 0    (-K).f = 1        F1.s1 = 1         F1.f = 0
    c2 = 10 s1 + 24 f

``(-K)^3`` and ``(-K).s1`` are never written down explicitly in the source
argument; they are forced by the quoted products. The ``U`` tables are the same
numbers with ``F1 <-> F2`` and ``s1 <-> s2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

RatLike = Union[int, Fraction, str]

MODELS = ("V", "U")

# symmetric trilinear table in the basis (-K, F) of either model
_TRIPLE = {
    (0, 0, 0): 4,
    (0, 0, 1): 2,
    (0, 1, 1): 0,
    (1, 1, 1): 0,
}

# pairing of the basis (-K, F) with the cycle basis (s, f)
_PAIR = (
    (0, 1),  # -K . s, -K . f
    (1, 0),  # F . s,  F . f
)

# second Chern class in the cycle basis (s, f)
C2_SIGMA = 10
C2_PHI = 24


class ModelMismatch(ValueError):
    pass


class ModelChoiceError(ValueError):
    pass


def rat(x: RatLike) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts ints, Fractions and strings of the form ``"p"`` or ``"p/q"``.
    Floats and decimal strings are refused.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(c in s for c in ".eE"):
            raise ValueError(f"not an exact rational: {x!r}")
        return Fraction(s)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"not an exact rational: {x!r} ({type(x).__name__})")


def fmt_rat(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _check_model(model: str) -> str:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected 'V' or 'U'")
    return model


@dataclass(frozen=True)
class DivisorClassX:
    """``a*F1 + b*F2`` in ``Cl(X)``."""

    a: int
    b: int

    def __add__(self, other: DivisorClassX) -> DivisorClassX:
        return DivisorClassX(self.a + other.a, self.b + other.b)

    @property
    def threshold(self) -> int:
        return min(self.a, self.b)


@dataclass(frozen=True)
class DivisorClass:
    """``-n*K + m*F`` on the smooth model ``model``."""

    model: str
    n: int
    m: int

    def __post_init__(self):
        _check_model(self.model)

    def __add__(self, other: DivisorClass) -> DivisorClass:
        _same_model(self, other)
        return DivisorClass(self.model, self.n + other.n, self.m + other.m)

    def __neg__(self) -> DivisorClass:
        return DivisorClass(self.model, -self.n, -self.m)

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        return self + (-other)

    def __mul__(self, k: int) -> DivisorClass:
        return DivisorClass(self.model, k * self.n, k * self.m)

    __rmul__ = __mul__

    def coords(self) -> tuple[int, int]:
        return (self.n, self.m)

    def to_x(self) -> DivisorClassX:
        if self.model == "V":
            return DivisorClassX(self.n + self.m, self.n)
        return DivisorClassX(self.n, self.n + self.m)


@dataclass(frozen=True)
class CycleClass:
    """``sigma*s + phi*f`` in ``A^2_Q`` of ``model``."""

    sigma: Fraction
    phi: Fraction
    model: str = "V"

    def __post_init__(self):
        _check_model(self.model)
        object.__setattr__(self, "sigma", rat(self.sigma))
        object.__setattr__(self, "phi", rat(self.phi))

    def __add__(self, other: CycleClass) -> CycleClass:
        _same_model(self, other)
        return CycleClass(self.sigma + other.sigma, self.phi + other.phi, self.model)

    def __mul__(self, k: RatLike) -> CycleClass:
        k = rat(k)
        return CycleClass(k * self.sigma, k * self.phi, self.model)

    __rmul__ = __mul__


def _same_model(*objs) -> str:
    models = {o.model for o in objs}
    if len(models) != 1:
        raise ModelMismatch(f"classes live on different models: {sorted(models)}")
    return models.pop()


def anticanonical(model: str = "V") -> DivisorClass:
    return DivisorClass(model, 1, 0)


def fiber(model: str = "V") -> DivisorClass:
    """Fibre of the model's own pencil (``F1`` on V, ``F2`` on U)."""
    return DivisorClass(model, 0, 1)


def other_fiber(model: str = "V") -> DivisorClass:
    """The other pencil, ``-K - F``."""
    return DivisorClass(model, 1, -1)


def section(model: str = "V") -> CycleClass:
    return CycleClass(1, 0, model)


def vertical_line(model: str = "V") -> CycleClass:
    return CycleClass(0, 1, model)


def c2(model: str = "V") -> CycleClass:
    return CycleClass(C2_SIGMA, C2_PHI, model)


def div_triple(d1: DivisorClass, d2: DivisorClass, d3: DivisorClass) -> Fraction:
    """Triple intersection number ``d1 . d2 . d3``."""
    _same_model(d1, d2, d3)
    total = 0
    for i, x in enumerate(d1.coords()):
        if not x:
            continue
        for j, y in enumerate(d2.coords()):
            if not y:
                continue
            for k, z in enumerate(d3.coords()):
                if z:
                    total += x * y * z * _TRIPLE[tuple(sorted((i, j, k)))]
    return Fraction(total)


def div_cycle_pair(d: DivisorClass, c: CycleClass) -> Fraction:
    _same_model(d, c)
    total = Fraction(0)
    for i, x in enumerate(d.coords()):
        total += x * (_PAIR[i][0] * c.sigma + _PAIR[i][1] * c.phi)
    return total


def div_div_cycle(d1: DivisorClass, d2: DivisorClass) -> CycleClass:
    """The 1-cycle ``d1 . d2`` recovered from its pairings with ``-K`` and ``F``.

    The pairing is nondegenerate: ``-K`` reads off ``phi`` and ``F`` reads off
    ``sigma``.
    """
    model = _same_model(d1, d2)
    phi = div_triple(d1, d2, anticanonical(model))
    sigma = div_triple(d1, d2, fiber(model))
    return CycleClass(sigma, phi, model)


def model_transfer(x: DivisorClassX, target: str) -> DivisorClass:
    """Write ``x`` as ``-n*K + m*F`` with ``m >= 0`` on ``target``.

    Raises :class:`ModelChoiceError` (naming the valid model) if the target
    would need a negative fibre coefficient.
    """
    _check_model(target)
    if target == "V":
        n, m = x.b, x.a - x.b
    else:
        n, m = x.a, x.b - x.a
    if m < 0:
        other = "U" if target == "V" else "V"
        alt = model_transfer(x, other)
        raise ModelChoiceError(
            f"class (a={x.a}, b={x.b}) has m={m} < 0 on {target}; "
            f"use {other} with (n={alt.n}, m={alt.m})"
        )
    return DivisorClass(target, n, m)


def choose_model(x: DivisorClassX) -> DivisorClass:
    """Model on which the fibre coefficient is non-negative; V on ties."""
    return model_transfer(x, "V" if x.a >= x.b else "U")

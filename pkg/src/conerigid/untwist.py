"""Marked linear systems on a smooth model and the untwisting involutions.

A :class:`MarkedSystem` is a class ``-n*K + m*F`` together with multiplicities
along a few named curves. The three kinds of generators act on it as

    tau_l (section l, conjugate l*):  n -> 3n - 2nu,  nu_l -> 4n - 3nu,  nu_l* fixed,
                                      m forgotten
    tau_1 (line s1):                  n -> 3n - 2nu1, nu1 -> 4n - 3nu1,  nu2 fixed, m fixed
    tau_2 (line s2):                  symmetric

Each action is an involution on the pair ``(n, nu)`` and lowers ``n`` exactly
when ``nu > n``, which is what drives :func:`untwist` to termination.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .lattice import CycleClass, DivisorClass, fmt_rat, rat

SECTION_PAIR = "section_pair"
S1 = "s1"
S2 = "s2"
KINDS = (SECTION_PAIR, S1, S2)


class UntwistError(ValueError):
    pass


class InadmissibleStep(UntwistError):
    pass


@dataclass(frozen=True)
class CurveMark:
    id: str
    kind: str
    cls: CycleClass
    mult: Fraction
    conj_mult: Fraction = Fraction(0)
    on_ramification: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        object.__setattr__(self, "mult", rat(self.mult))
        object.__setattr__(self, "conj_mult", rat(self.conj_mult))
        if self.kind == SECTION_PAIR:
            if self.on_ramification:
                raise ValueError(
                    f"{self.id}: a section in the ramification divisor has no conjugate"
                )
            if self.cls.sigma != 1:
                raise ValueError(f"{self.id}: a section has class s + alpha*f")
        elif self.conj_mult:
            raise ValueError(f"{self.id}: only section pairs carry a conjugate multiplicity")


@dataclass(frozen=True)
class Generator:
    name: str  # "tau_l", "tau_1", "tau_2"
    curve: Optional[str] = None

    def __str__(self) -> str:
        return f"tau_l({self.curve})" if self.name == "tau_l" else self.name

    @classmethod
    def parse(cls, text: str) -> Generator:
        text = text.strip()
        if text in ("tau_1", "tau_2"):
            return cls(text)
        if text.startswith("tau_l(") and text.endswith(")") and len(text) > 7:
            return cls("tau_l", text[6:-1])
        raise ValueError(f"not a generator: {text!r}")


UntwistWord = tuple  # tuple[Generator, ...]


def free_reduce(word) -> tuple:
    """Cancel adjacent equal generators until none are left (all generators are involutions)."""
    out: list[Generator] = []
    for g in word:
        if out and out[-1] == g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def format_word(word) -> str:
    return "[" + ", ".join(str(g) for g in word) + "]"


@dataclass(frozen=True)
class MarkedSystem:
    """``|D| ⊂ |-n*K + m*F|`` with multiplicity marks; ``m is None`` once forgotten."""

    model: str
    n: Fraction
    m: Optional[Fraction]
    marks: tuple[CurveMark, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "n", rat(self.n))
        if self.m is not None:
            object.__setattr__(self, "m", rat(self.m))
            if self.m < 0:
                raise ValueError(f"fibre coefficient must be non-negative, got {self.m}")
        if self.n < 0:
            raise ValueError(f"threshold must be non-negative, got {self.n}")
        object.__setattr__(self, "marks", tuple(self.marks))
        ids = [mk.id for mk in self.marks]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate curve ids: {ids}")
        kinds = [mk.kind for mk in self.marks if mk.kind != SECTION_PAIR]
        if len(set(kinds)) != len(kinds):
            raise ValueError("s1 and s2 may each be marked at most once")
        for mk in self.marks:
            if mk.cls.model != self.model:
                raise ValueError(f"{mk.id} lives on {mk.cls.model}, system on {self.model}")

    @property
    def m_known(self) -> bool:
        return self.m is not None

    @property
    def pencil(self) -> bool:
        return self.n == 0

    @property
    def cls(self) -> DivisorClass:
        if self.m is None:
            raise ValueError("fibre coefficient unknown after a section involution")
        if self.n.denominator != 1 or self.m.denominator != 1:
            raise ValueError("class has non-integral coefficients")
        return DivisorClass(self.model, int(self.n), int(self.m))

    def mark(self, key: str) -> CurveMark:
        for mk in self.marks:
            if mk.id == key or (mk.kind == key and key in (S1, S2)):
                return mk
        raise KeyError(key)

    def mark_for_kind(self, kind: str) -> Optional[CurveMark]:
        for mk in self.marks:
            if mk.kind == kind:
                return mk
        return None

    def _with_mark(self, new: CurveMark) -> list[CurveMark]:
        return [new if mk.id == new.id else mk for mk in self.marks]

    def signature(self) -> tuple:
        """Hashable summary used to compare systems up to the forgotten ``m``."""
        return (self.model, self.n) + tuple(
            (mk.id, mk.kind, mk.mult, mk.conj_mult) for mk in self.marks
        )


def is_maximal(sys: MarkedSystem, mark: CurveMark) -> bool:
    """A curve centre is maximal when its multiplicity exceeds ``n`` (discrepancy 1)."""
    return mark.mult > sys.n


def _reflect(n: Fraction, nu: Fraction, label: str) -> tuple[Fraction, Fraction]:
    n_new = 3 * n - 2 * nu
    if n_new < 0:
        raise InadmissibleStep(
            f"{label}: 3n - 2nu = {fmt_rat(n_new)} < 0 (nu={fmt_rat(nu)} > 3n/2 "
            f"with n={fmt_rat(n)}); not a linear system without fixed components"
        )
    return n_new, 4 * n - 3 * nu


def apply_tau_l(sys: MarkedSystem, mark: CurveMark) -> MarkedSystem:
    if mark.kind != SECTION_PAIR:
        raise UntwistError(f"tau_l needs a section pair, {mark.id} is {mark.kind}")
    if mark.cls.model != sys.model:
        raise UntwistError(f"{mark.id} is a section of the other fibration")
    mark = sys.mark(mark.id)
    n_new, nu_new = _reflect(sys.n, mark.mult, f"tau_l({mark.id})")
    marks = sys._with_mark(replace(mark, mult=nu_new))
    return MarkedSystem(sys.model, n_new, None, tuple(marks))


def _apply_tau_s(sys: MarkedSystem, kind: str) -> MarkedSystem:
    name = "tau_1" if kind == S1 else "tau_2"
    mark = sys.mark_for_kind(kind)
    nu = mark.mult if mark else Fraction(0)
    n_new, nu_new = _reflect(sys.n, nu, name)
    if mark is None:
        marks = list(sys.marks) + [CurveMark(kind, kind, CycleClass(1, 0, sys.model), nu_new)]
    else:
        marks = sys._with_mark(replace(mark, mult=nu_new))
    return MarkedSystem(sys.model, n_new, sys.m, tuple(marks))


def apply_tau_1(sys: MarkedSystem) -> MarkedSystem:
    return _apply_tau_s(sys, S1)


def apply_tau_2(sys: MarkedSystem) -> MarkedSystem:
    return _apply_tau_s(sys, S2)


def apply_generator(sys: MarkedSystem, g: Generator) -> MarkedSystem:
    if g.name == "tau_1":
        return apply_tau_1(sys)
    if g.name == "tau_2":
        return apply_tau_2(sys)
    if g.name == "tau_l":
        return apply_tau_l(sys, sys.mark(g.curve))
    raise ValueError(f"unknown generator {g}")


def generator_for(mark: CurveMark) -> Generator:
    if mark.kind == S1:
        return Generator("tau_1")
    if mark.kind == S2:
        return Generator("tau_2")
    return Generator("tau_l", mark.id)


def replay(sys: MarkedSystem, word) -> MarkedSystem:
    """Apply ``word`` right-to-left, undoing an :func:`untwist` run from its terminal state."""
    for g in reversed(tuple(word)):
        sys = apply_generator(sys, g)
    return sys


@dataclass(frozen=True)
class UntwistStep:
    generator: Generator
    curve: str
    nu: Fraction
    n_before: Fraction
    n_after: Fraction
    nu_after: Fraction
    m_after: Optional[Fraction]

    def line(self) -> str:
        return (
            f"n: {fmt_rat(self.n_before)} -> {fmt_rat(self.n_after)} via {self.generator} "
            f"(nu={fmt_rat(self.nu)} -> {fmt_rat(self.nu_after)})"
        )


@dataclass(frozen=True)
class UntwistCertificate:
    initial: MarkedSystem
    terminal: MarkedSystem
    steps: tuple[UntwistStep, ...]
    word: tuple
    status: str  # "no-maximal-curves" | "pencil"
    notes: tuple[str, ...] = field(default=())

    @property
    def n_sequence(self) -> tuple[Fraction, ...]:
        return (self.initial.n,) + tuple(s.n_after for s in self.steps)


def maximal_marks(sys: MarkedSystem) -> list[CurveMark]:
    return [mk for mk in sys.marks if is_maximal(sys, mk)]


def check_admissible(sys: MarkedSystem) -> list[CurveMark]:
    """Validate the maximal-curve constraints and return the maximal marks."""
    maximal = maximal_marks(sys)
    if len(maximal) > 1:
        names = ", ".join(f"{mk.id} (nu={fmt_rat(mk.mult)})" for mk in maximal)
        raise UntwistError(
            f"two maximal curves at once: {names} with n={fmt_rat(sys.n)}; "
            f"2n >= nu1 + nu2 > 2n is impossible (Prop (iii))"
        )
    if maximal and maximal[0].kind == SECTION_PAIR and sys.m == 0:
        raise UntwistError(
            f"maximal section {maximal[0].id} on |-nK| with m = 0: only s1 or s2 "
            f"can be maximal there (Prop (ii))"
        )
    return maximal


def untwist(sys: MarkedSystem, max_steps: Optional[int] = None):
    """Untwist maximal curves until none is left or the system is a pencil.

    Returns ``(terminal, word, certificate)``. ``n`` drops strictly at each
    step, so on integer data the loop runs at most ``n`` times.
    """
    for mk in sys.marks:
        if mk.mult < 0 or mk.conj_mult < 0:
            raise UntwistError(f"negative multiplicity on {mk.id}")
    initial = sys
    steps: list[UntwistStep] = []
    word: list[Generator] = []
    notes = []
    limit = max_steps if max_steps is not None else 10_000
    while not sys.pencil:
        maximal = check_admissible(sys)
        if not maximal:
            break
        if len(steps) >= limit:
            raise UntwistError(f"no termination after {limit} steps")
        mk = maximal[0]
        g = generator_for(mk)
        new = apply_generator(sys, g)
        after = new.mark(mk.id)
        steps.append(
            UntwistStep(g, mk.id, mk.mult, sys.n, new.n, after.mult, new.m)
        )
        if g.name == "tau_l" and sys.m is not None:
            notes.append(f"fibre coefficient forgotten after {g}")
        word.append(g)
        sys = new
    if len(sys.marks) > 1 and steps:
        notes.append("multiplicities along unreflected curves carried unchanged")
    status = "pencil" if sys.pencil else "no-maximal-curves"
    if sys.pencil and any(mk.mult < 0 for mk in sys.marks):
        notes.append("pencil state: negative formal multiplicities are effective multiplicity 0")
    reduced = free_reduce(word)
    cert = UntwistCertificate(initial, sys, tuple(steps), reduced, status, tuple(notes))
    return sys, reduced, cert

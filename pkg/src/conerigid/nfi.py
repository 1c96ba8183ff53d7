"""Resolution graphs, Noether-Fano inequalities and the exclusion chains over points.

The exclusion operations are checkers. Given a concrete resolution graph and
concrete multiplicity data they replay an inequality chain whose hypotheses
cannot hold simultaneously, and record every link with its exact values. A
verdict is

``input-infeasible``
    a precondition (effectivity bounds, maximality, graph shape) fails;
``excluded``
    the preconditions hold and at least one hypothesis of the chain fails,
    so the data cannot come from a maximal singularity of that shape;
``reduced``
    the point-on-``s1`` step only: its hypotheses hold and it hands ``p = 1``
    and ``2*Sigma0' > Sigma0`` on to the infinitely near analysis;
``not-excluded``
    every hypothesis holds. The chains are valid deductions, so this never
    happens on consistent data; :func:`conerigid.enumeration.enumerate_verify`
    reports such inputs as escapes.

Notation: ``r_i`` counts paths from the top vertex ``N`` to ``i``;
``Sigma0 = r_1 + ... + r_L`` (point centres), ``Sigma1 = r_{L+1} + ... + r_N``
(curve centres), ``Sigma0' = r_1 + ... + r_L'`` (centres on the fibre).
Truncated counts (suffix ``~``) only follow arrows among point levels and put
``1`` on level ``L``.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np

from . import kernels
from .lattice import fmt_rat, rat
from .surface import lemma_bound, mult_sum_bound

INPUT_INFEASIBLE = "input-infeasible"
EXCLUDED = "excluded"
REDUCED = "reduced"
NOT_EXCLUDED = "not-excluded"

_RELATIONS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
}

QUADRATIC_NOTE = (
    "quadratic bound uses (2n*Sigma0 + n*Sigma1 + e)^2, the reading consistent with "
    "e = sum r_i nu_i - 2n*Sigma0 - n*Sigma1"
)
TRUNCATION_NOTE = (
    "truncated counts: level L seeded with 1, lower point levels summed over arrows "
    "from point levels only"
)


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class ResolutionGraph:
    """Blow-up tower of a maximal singularity.

    Levels ``1..L`` are point centres, ``L+1..N`` curve centres. ``arrows``
    holds pairs ``(i, j)`` with ``i > j`` meaning the ``i``-th centre lies on
    the strict transform of the ``j``-th exceptional divisor.
    """

    N: int
    L: int
    arrows: frozenset
    nu: tuple
    L_prime: int = 1
    q: Optional[int] = None

    def __post_init__(self):
        arrows = frozenset((int(i), int(j)) for i, j in self.arrows)
        object.__setattr__(self, "arrows", arrows)
        object.__setattr__(self, "nu", tuple(rat(x) for x in self.nu))
        if self.N < 1:
            raise GraphError("N must be positive")
        if not 1 <= self.L <= self.N:
            raise GraphError(f"need 1 <= L <= N, got L={self.L}, N={self.N}")
        if not 1 <= self.L_prime <= self.L:
            raise GraphError(f"need 1 <= L' <= L, got L'={self.L_prime}")
        if self.q is not None and not 1 <= self.q <= self.L:
            raise GraphError(f"need 1 <= q <= L, got q={self.q}")
        for i, j in arrows:
            if not (1 <= j < i <= self.N):
                raise GraphError(f"arrow {i}->{j} must point downward between levels 1..N")
        for i in range(2, self.N + 1):
            if (i, i - 1) not in arrows:
                raise GraphError(f"missing arrow {i}->{i - 1}")
        if len(self.nu) != self.N:
            raise GraphError(f"ladder has {len(self.nu)} entries, expected N={self.N}")
        if any(x <= 0 for x in self.nu):
            raise GraphError("ladder entries must be positive")
        if any(a < b for a, b in zip(self.nu, self.nu[1:])):
            raise GraphError("ladder not non-increasing")

    @classmethod
    def chain(cls, nu, L=None, L_prime=1, q=None, extra=()):
        N = len(nu)
        arrows = {(i, i - 1) for i in range(2, N + 1)} | set(extra)
        return cls(N, N if L is None else L, frozenset(arrows), tuple(nu), L_prime, q)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.N + 1, self.N + 1), dtype=np.int64)
        for i, j in self.arrows:
            adj[i, j] = 1
        return adj


def path_counts(g: ResolutionGraph) -> tuple[int, ...]:
    """``(r_1, ..., r_N)`` from ``r_N = 1`` and ``r_i = sum_{j -> i} r_j``."""
    r = kernels.path_counts_kernel(g.adjacency(), g.N)
    out = tuple(int(x) for x in r[1:])
    if any(x == 0 for x in out):
        raise GraphError("dangling vertex: no path from the top level")
    return out


def truncated_path_counts(g: ResolutionGraph) -> tuple[int, ...]:
    """Counts with the recursion restricted to point levels and ``r_L`` seeded with 1."""
    full = path_counts(g)
    low = kernels.path_counts_kernel(g.adjacency(), g.L)
    return tuple(int(x) for x in low[1 : g.L + 1]) + full[g.L :]


@dataclass(frozen=True)
class Sums:
    r: tuple
    S0: int
    S1: int
    S0p: int
    weighted: Fraction  # sum r_i nu_i
    weighted_sq: Fraction  # sum r_i nu_i^2


def sums(g: ResolutionGraph, r=None) -> Sums:
    r = path_counts(g) if r is None else tuple(r)
    S0 = sum(r[: g.L])
    S1 = sum(r[g.L :])
    S0p = sum(r[: g.L_prime])
    w = sum((ri * v for ri, v in zip(r, g.nu)), Fraction(0))
    w2 = sum((ri * v * v for ri, v in zip(r, g.nu)), Fraction(0))
    return Sums(r, S0, S1, S0p, w, w2)


def discrepancy(g: ResolutionGraph) -> int:
    """``delta = 2*Sigma0 + Sigma1``."""
    s = sums(g)
    return 2 * s.S0 + s.S1


def nfi_excess(g: ResolutionGraph, n) -> Fraction:
    """``e = sum r_i nu_i - 2n*Sigma0 - n*Sigma1``; positive means maximal."""
    n = rat(n)
    s = sums(g)
    return s.weighted - 2 * n * s.S0 - n * s.S1


@dataclass(frozen=True)
class TraceLine:
    name: str
    lhs: Fraction
    rel: str
    rhs: Fraction
    role: str  # precondition | hypothesis | derived | identity | consequence | contradiction
    tag: str = ""

    def __post_init__(self):
        if self.rel not in _RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        object.__setattr__(self, "lhs", rat(self.lhs))
        object.__setattr__(self, "rhs", rat(self.rhs))

    @property
    def holds(self) -> bool:
        return _RELATIONS[self.rel](self.lhs, self.rhs)

    def text(self) -> str:
        mark = "ok" if self.holds else "FAILS"
        return f"[{self.role}] {self.name}: {fmt_rat(self.lhs)} {self.rel} {fmt_rat(self.rhs)} ({mark})"


def strong_nfi_check(g: ResolutionGraph, n, m, r=None) -> tuple[bool, TraceLine]:
    """``sum r_i nu_i > 2n*Sigma0 + n*Sigma1 + m*Sigma0'``."""
    n, m = rat(n), rat(m)
    s = sums(g, r)
    line = TraceLine(
        "strong nfi: sum r_i nu_i > 2n Sigma0 + n Sigma1 + m Sigma0'",
        s.weighted,
        ">",
        2 * n * s.S0 + n * s.S1 + m * s.S0p,
        "hypothesis",
        "strong-nfi",
    )
    return line.holds, line


def quadratic_lower_bound(g: ResolutionGraph, n, e) -> Fraction:
    """``(2n*Sigma0 + n*Sigma1 + e)^2 / (Sigma0 + Sigma1)``, a lower bound for ``sum r_i nu_i^2``."""
    n, e = rat(n), rat(e)
    s = sums(g)
    return (2 * n * s.S0 + n * s.S1 + e) ** 2 / (s.S0 + s.S1)


def phi_bound(n, m, r1, sigma1) -> Fraction:
    """``phi(Sigma1) = (n*Sigma1 - m*r1)^2 / ((r1 + Sigma1) * r1)``."""
    n, m, r1, sigma1 = rat(n), rat(m), rat(r1), rat(sigma1)
    if r1 <= 0 or r1 + sigma1 <= 0:
        raise ValueError("phi needs r1 > 0 and r1 + Sigma1 > 0")
    return (n * sigma1 - m * r1) ** 2 / ((r1 + sigma1) * r1)


def sigma1_lower_limit(n, m, r1, theta) -> Fraction:
    """Strong NFI with ``2*theta = nu_1 + nu_2`` forces ``Sigma1`` above this value."""
    n, m, r1, theta = rat(n), rat(m), rat(r1), rat(theta)
    if theta == n:
        raise ZeroDivisionError("theta = n: the lower limit is undefined")
    if theta < n:
        raise ValueError(f"excess forces theta > n; got theta={fmt_rat(theta)}, n={fmt_rat(n)}")
    return ((2 * n - theta) + m) * r1 / (theta - n)


def phi_lower_bound(n, m, theta) -> Fraction:
    """``phi`` at :func:`sigma1_lower_limit`: ``(2n - theta)^2 (n + m) / (theta - n)``."""
    n, m, theta = rat(n), rat(m), rat(theta)
    if theta == n:
        raise ZeroDivisionError("theta = n: the lower bound is undefined")
    if theta < n:
        raise ValueError(f"excess forces theta > n; got theta={fmt_rat(theta)}, n={fmt_rat(n)}")
    return (2 * n - theta) ** 2 * (n + m) / (theta - n)


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class SingularityData:
    """Numbers attached to one maximal singularity over a point ``B0``.

    ``mh``/``mv`` are the multiplicities at ``B0`` of the horizontal and
    vertical parts of ``D1.D2``; ``mh_ladder`` optionally gives them on the
    point levels ``1..L`` (defaults to ``mh`` throughout). ``d`` and ``mij``
    carry the optional degree/multiplicity system of the ``q = 2`` case, with
    ``mij[(k, i)]`` the multiplicity of ``Z_k`` at the ``i``-th centre.
    """

    n: int
    m: int
    alpha1: Fraction
    alpha2: Fraction
    p: int
    mh: Fraction
    mv: Fraction
    on_s1: bool = False
    b1_line_in_S: bool = False
    mh_ladder: Optional[tuple] = None
    d: Optional[tuple] = None
    mij: Optional[dict] = None
    lemma_marks: Optional[object] = None  # (k1, k2) or k
    lemma_m: int = 0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "mh", "mv"):
            object.__setattr__(self, name, rat(getattr(self, name)))
        if self.mh_ladder is not None:
            object.__setattr__(self, "mh_ladder", tuple(rat(x) for x in self.mh_ladder))
        if self.d is not None:
            object.__setattr__(self, "d", tuple(rat(x) for x in self.d))
        if self.mij is not None:
            object.__setattr__(
                self, "mij", {(int(k), int(i)): rat(v) for (k, i), v in dict(self.mij).items()}
            )
        if not isinstance(self.n, int) or not isinstance(self.m, int) or not isinstance(self.p, int):
            raise TypeError("n, m and p are integers")

    def ladder(self, L: int) -> tuple:
        if self.mh_ladder is None:
            return (self.mh,) * L
        if len(self.mh_ladder) != L:
            raise GraphError(f"mh ladder has {len(self.mh_ladder)} entries, expected L={L}")
        return self.mh_ladder


@dataclass(frozen=True)
class ExclusionCertificate:
    case: str
    trace: tuple
    verdict: str
    failed: tuple
    notes: tuple = field(default=())

    @property
    def first_failed_tag(self) -> str:
        for line in self.trace:
            if line.role in ("precondition", "hypothesis") and not line.holds:
                return line.tag
        return ""


def _verdict(trace, allow_reduced=False) -> tuple[str, tuple]:
    pre = tuple(t.name for t in trace if t.role == "precondition" and not t.holds)
    if pre:
        return INPUT_INFEASIBLE, pre
    hyp = tuple(t.name for t in trace if t.role == "hypothesis" and not t.holds)
    if hyp:
        return EXCLUDED, hyp
    return (REDUCED if allow_reduced else NOT_EXCLUDED), ()


def _preconditions(data: SingularityData, g: ResolutionGraph, s: Sums, e: Fraction) -> list:
    n, m = data.n, data.m
    n2 = Fraction(2 * n * n)
    out = [
        TraceLine("n >= 1", n, ">=", 1, "precondition", "n"),
        TraceLine("m >= 0", m, ">=", 0, "precondition", "m"),
        TraceLine("p >= 1", data.p, ">=", 1, "precondition", "p"),
        TraceLine("alpha1 >= 0", data.alpha1, ">=", 0, "precondition", "alpha"),
        TraceLine("alpha2 >= 0", data.alpha2, ">=", 0, "precondition", "alpha"),
        TraceLine("mv >= 0", data.mv, ">=", 0, "precondition", "mv"),
    ]
    ladder = data.ladder(g.L)
    out.append(TraceLine("mh_i >= 0", min(ladder), ">=", 0, "precondition", "mh"))
    out.append(TraceLine("mh_1 = mh", ladder[0], "==", data.mh, "precondition", "mh"))
    for i in range(1, len(ladder)):
        out.append(
            TraceLine(f"mh ladder: mh_{i + 1} <= mh_{i}", ladder[i], "<=", ladder[i - 1],
                      "precondition", "mh")
        )
    out += [
        TraceLine("(n2) mh <= 2n^2 - alpha1 - alpha2", data.mh, "<=",
                  n2 - data.alpha1 - data.alpha2, "precondition", "n2"),
        TraceLine("(n2) mh + mv <= 4n^2 + 4mn", data.mh + data.mv, "<=",
                  4 * n * n + 4 * m * n, "precondition", "n2"),
        TraceLine("Sigma0' <= Sigma0", s.S0p, "<=", s.S0, "precondition", "graph"),
        TraceLine("nfi: sum r_i nu_i > 2n Sigma0 + n Sigma1", s.weighted, ">",
                  2 * n * s.S0 + n * s.S1, "precondition", "nfi"),
    ]
    return out


def _cauchy_schwarz(s: Sums, n, e, label="") -> TraceLine:
    bound = (2 * n * s.S0 + n * s.S1 + e) ** 2 / (s.S0 + s.S1)
    return TraceLine(f"cauchy-schwarz{label}: sum r_i nu_i^2 >= (2n Sigma0 + n Sigma1 + e)^2/(Sigma0 + Sigma1)",
                     s.weighted_sq, ">=", bound, "derived", "cs")


def exclusion_point_general(data: SingularityData, g: ResolutionGraph) -> ExclusionCertificate:
    """Chain for a centre ``B0`` off ``s1`` and ``s2``: ends in ``(n*Sigma1 - e)^2 < 0``."""
    if data.on_s1:
        raise ValueError("B0 lies on s1; use exclusion_point_on_s1")
    n, p = Fraction(data.n), data.p
    s = sums(g)
    e = s.weighted - 2 * n * s.S0 - n * s.S1
    a12 = data.alpha1 + data.alpha2
    trace = _preconditions(data, g, s, e)
    trace.append(TraceLine("alpha1 + alpha2 <= 2n^2 (so alpha1, alpha2 <= 2n^2)", a12, "<=",
                           2 * n * n, "precondition", "alpha"))
    p_div = max(p, 1)
    trace += [
        TraceLine("supermaximal: Sigma0' mv < Sigma0' (2n^2 + alpha1 + alpha2)/p + 4ne",
                  s.S0p * data.mv, "<", s.S0p * (2 * n * n + a12) / p_div + 4 * n * e,
                  "hypothesis", "supermaximal"),
        TraceLine("multiplicity: Sigma0 mh + Sigma0' mv >= sum r_i nu_i^2",
                  s.S0 * data.mh + s.S0p * data.mv, ">=", s.weighted_sq, "hypothesis", "multiplicity"),
        _cauchy_schwarz(s, n, e),
        TraceLine("bound from (n2), p >= 1, Sigma0' <= Sigma0: Sigma0 mh + Sigma0' mv < 4n^2 Sigma0 + 4ne",
                  s.S0 * data.mh + s.S0p * data.mv, "<", 4 * n * n * s.S0 + 4 * n * e, "derived", "bound"),
        TraceLine("identity: (Sigma0+Sigma1)(4n^2 Sigma0 + 4ne) - (2n Sigma0 + n Sigma1 + e)^2 = -(n Sigma1 - e)^2",
                  (s.S0 + s.S1) * (4 * n * n * s.S0 + 4 * n * e) - (2 * n * s.S0 + n * s.S1 + e) ** 2,
                  "==", -((n * s.S1 - e) ** 2), "identity", "identity"),
        TraceLine("(n Sigma1 - e)^2 < 0", (n * s.S1 - e) ** 2, "<", 0, "contradiction", "contradiction"),
    ]
    verdict, failed = _verdict(trace)
    return ExclusionCertificate("point-general", tuple(trace), verdict, failed, (QUADRATIC_NOTE,))


def _on_s1_lines(data: SingularityData, g: ResolutionGraph) -> tuple[list, Sums, Fraction]:
    n, p = Fraction(data.n), data.p
    s = sums(g)
    e = s.weighted - 2 * n * s.S0 - n * s.S1
    a1, a12 = data.alpha1, data.alpha1 + data.alpha2
    trace = _preconditions(data, g, s, e)
    trace.append(TraceLine("alpha1 <= 2n^2", a1, "<=", 2 * n * n, "precondition", "alpha"))
    p_div = max(p, 1)
    lhs = s.S0 * (data.mh + a1) + s.S0p * data.mv
    ratio_lhs = (2 * n * n + a1) / p_div
    ratio_rhs = 2 * n * n * Fraction(s.S0, s.S0p)
    x = ratio_lhs * Fraction(s.S0p, s.S0)
    trace += [
        TraceLine("supermaximal: Sigma0' mv < Sigma0' (2n^2 + alpha1 + alpha2)/p + 4ne",
                  s.S0p * data.mv, "<", s.S0p * (2 * n * n + a12) / p_div + 4 * n * e,
                  "hypothesis", "supermaximal"),
        TraceLine("multiplicity on s1: Sigma0 (mh + alpha1) + Sigma0' mv >= sum r_i nu_i^2",
                  lhs, ">=", s.weighted_sq, "hypothesis", "multiplicity"),
        _cauchy_schwarz(s, n, e),
        TraceLine("bound: Sigma0 (mh + alpha1) + Sigma0' mv < Sigma0 (2n^2 + X) + 4ne, "
                  "X = (2n^2 + alpha1) Sigma0' / (p Sigma0)",
                  lhs, "<", s.S0 * (2 * n * n + x) + 4 * n * e, "derived", "bound"),
        TraceLine("identity: (Sigma0+Sigma1)(Sigma0 (2n^2 + X) + 4ne) - (2n Sigma0 + n Sigma1 + e)^2 "
                  "= -[(n Sigma1 - e)^2 + Sigma0 (Sigma0 + Sigma1)(2n^2 - X)]",
                  (s.S0 + s.S1) * (s.S0 * (2 * n * n + x) + 4 * n * e) - (2 * n * s.S0 + n * s.S1 + e) ** 2,
                  "==", -((n * s.S1 - e) ** 2 + s.S0 * (s.S0 + s.S1) * (2 * n * n - x)),
                  "identity", "identity"),
        TraceLine("(n Sigma1 - e)^2 + Sigma0 (Sigma0 + Sigma1)(2n^2 - X) < 0",
                  (n * s.S1 - e) ** 2 + s.S0 * (s.S0 + s.S1) * (2 * n * n - x), "<", 0,
                  "consequence", "s1-quadratic"),
        TraceLine("ratio: (2n^2 + alpha1)/p > 2n^2 Sigma0/Sigma0'", ratio_lhs, ">", ratio_rhs,
                  "consequence", "ratio"),
        TraceLine("p = 1", p, "==", 1, "consequence", "p1"),
        TraceLine("(n1) Sigma0' > Sigma0/2", s.S0p, ">", Fraction(s.S0, 2), "consequence", "n1"),
    ]
    return trace, s, e


def exclusion_point_on_s1(data: SingularityData, g: ResolutionGraph) -> ExclusionCertificate:
    """Centre ``B0`` on ``s1``: derive ``p = 1`` and ``Sigma0' > Sigma0/2`` or a contradiction."""
    if not data.on_s1:
        raise ValueError("B0 is not on s1; use exclusion_point_general")
    trace, _, _ = _on_s1_lines(data, g)
    verdict, failed = _verdict(trace, allow_reduced=True)
    return ExclusionCertificate("point-on-s1", tuple(trace), verdict, failed, (QUADRATIC_NOTE,))


def _equality_system_lines(data: SingularityData, g: ResolutionGraph, rt) -> list:
    """Check the degree/multiplicity system of the q = 2 case and its annihilated sum."""
    L, q = g.L, g.q
    ladder = data.ladder(L)
    dks = data.d
    mij = data.mij or {}
    if len(dks) != L:
        raise GraphError(f"d has {len(dks)} entries, expected L={L}")
    lines = []
    for i in range(1, L + 1):
        left = (data.alpha1 if i <= q else 0) + ladder[i - 1] + (data.mv if i == 1 else 0)
        left += sum((mij.get((k, i), Fraction(0)) for k in range(1, i)), Fraction(0))
        right = g.nu[i - 1] ** 2 + dks[i - 1]
        lines.append(TraceLine(f"degree system level {i}", left, "==", right, "precondition", "system"))
    for (k, i), v in sorted(mij.items()):
        if not (1 <= k < i <= L):
            raise GraphError(f"m_{{{k},{i}}} outside 1 <= k < i <= L")
        if v:
            lines.append(TraceLine(f"m_{k},{i} nonzero only along an arrow {i}->{k}",
                                   int((i, k) in g.arrows), "==", 1, "precondition", "system"))
        lines.append(TraceLine(f"m_{k},{i} <= d_{k}", v, "<=", dks[k - 1], "precondition", "system"))
    annihilated = sum((rt[i - 1] * mij.get((k, i), Fraction(0)) for (k, i) in mij), Fraction(0))
    lines.append(TraceLine("annihilation: sum_i r~_i sum_k m_k,i <= sum_k r~_k d_k", annihilated, "<=",
                           sum((rt[k] * dks[k] for k in range(L)), Fraction(0)), "derived", "system"))
    return lines


def _near_case(data: SingularityData, g: ResolutionGraph) -> str:
    q = g.q
    if q >= 3:
        return "q>=3"
    if q == 2:
        return "q=2"
    if g.L >= 2:
        return "q=1-off-s1"
    return "q=1-on-S"


def exclusion_infinitely_near(data: SingularityData, g: ResolutionGraph) -> ExclusionCertificate:
    """Infinitely near analysis for ``B0`` on ``s1``, dispatched on ``q`` and the position of ``B1``.

    The trace starts with the point-on-``s1`` step, whose consequences
    (``p = 1`` and ``2*Sigma0' > Sigma0``) the cases rely on.
    """
    if not data.on_s1:
        raise ValueError("infinitely near cases need B0 on s1")
    if g.q is None:
        raise ValueError("q is not set on the graph")
    n, m = Fraction(data.n), Fraction(data.m)
    trace, s, e = _on_s1_lines(data, g)
    notes = [QUADRATIC_NOTE, TRUNCATION_NOTE]
    case = _near_case(data, g)
    q, L, N = g.q, g.L, g.N
    rt = truncated_path_counts(g)
    t = sums(g, rt)
    n2 = 2 * n * n
    r1 = Fraction(rt[0])
    r2 = Fraction(rt[1]) if N > 1 else Fraction(0)

    if q >= 2:
        trace.append(TraceLine("q >= 2 puts B1 off the fibre: L' = 1", g.L_prime, "==", 1,
                               "precondition", "graph"))
    strong = TraceLine(
        "strong nfi (truncated): sum r~_i nu_i > 2n Sigma0~ + n Sigma1 + m Sigma0'~",
        t.weighted, ">", 2 * n * t.S0 + n * t.S1 + m * t.S0p, "hypothesis", "strong-nfi")

    if case == "q>=3":
        into_one = sorted(i for (i, j) in g.arrows if j == 1 and i >= 3)
        trace.append(TraceLine("q >= 3: B2 off E1, no arrow j->1 with j >= 3", len(into_one), "==", 0,
                               "precondition", "graph"))
        trace.append(strong)
        r = s.r
        trace += [
            TraceLine("r_2 = r_1", r[1], "==", r[0], "derived", "r2"),
            TraceLine("Sigma0'/Sigma0 <= 1/2", Fraction(s.S0p, s.S0), "<=", Fraction(1, 2), "derived", "ratio"),
            TraceLine("(n1) contradiction: Sigma0' > Sigma0/2", s.S0p, ">", Fraction(s.S0, 2),
                      "contradiction", "contradiction"),
        ]
    elif case in ("q=2", "q=1-off-s1"):
        if L < 2:
            raise GraphError(f"{case} needs L >= 2")
        ladder = data.ladder(L)
        if case == "q=2" and data.d is not None:
            trace += _equality_system_lines(data, g, rt)
        trace.append(strong)
        weight = (r1 + r2) if case == "q=2" else r1
        lhs = weight * data.alpha1 + sum((rt[i] * ladder[i] for i in range(L)), Fraction(0)) + r1 * data.mv
        mult_name = ("multiplicity q=2: (r~1 + r~2) alpha1 + sum r~_i mh_i + r~1 mv >= sum r~_i nu_i^2"
                     if case == "q=2" else
                     "multiplicity q=1: r~1 alpha1 + sum r~_i mh_i + r~1 mv >= sum r~_i nu_i^2")
        trace.append(TraceLine(mult_name, lhs, ">=", t.weighted_sq, "hypothesis", "multiplicity-near"))
        base = 2 * n * t.S0 + n * t.S1 + m * r1
        quad = base ** 2 / (t.S0 + t.S1)
        trace += [
            TraceLine("m Sigma0'~ >= m r~1", m * t.S0p, ">=", m * r1, "derived", "weaken"),
            TraceLine("cauchy-schwarz (truncated): sum r~_i nu_i^2 >= (sum r~_i nu_i)^2/(Sigma0~ + Sigma1)",
                      t.weighted_sq, ">=", t.weighted ** 2 / (t.S0 + t.S1), "derived", "cs"),
            TraceLine("(2n Sigma0~ + n Sigma1 + m r~1)^2/(Sigma0~ + Sigma1) >= 4n^2 Sigma0~ + 4mn r~1",
                      quad, ">=", 4 * n * n * t.S0 + 4 * m * n * r1, "derived", "quadratic"),
            TraceLine("identity: (2n Sigma0~ + n Sigma1 + m r~1)^2 - (Sigma0~ + Sigma1)(4n^2 Sigma0~ + 4mn r~1)"
                      " = (n Sigma1 - m r~1)^2",
                      base ** 2 - (t.S0 + t.S1) * (4 * n * n * t.S0 + 4 * m * n * r1), "==",
                      (n * t.S1 - m * r1) ** 2, "identity", "identity"),
            TraceLine("Sigma0~ - r~1 >= r~1", t.S0 - r1, ">=", r1, "derived", "structure"),
            TraceLine("r~2 <= r~1", r2, "<=", r1, "derived", "structure"),
        ]
        if case == "q=2":
            ub = weight * data.alpha1 + r1 * (4 * n * n + 4 * m * n) + (n2 - data.alpha1) * (t.S0 - r1)
            trace += [
                TraceLine("bound from (n2): lhs <= (r~1 + r~2) alpha1 + r~1 (4n^2 + 4mn) + (2n^2 - alpha1)(Sigma0~ - r~1)",
                          lhs, "<=", ub, "derived", "bound"),
                TraceLine("(r~1 + r~2) alpha1 > (2n^2 + alpha1) r~1", weight * data.alpha1, ">",
                          (n2 + data.alpha1) * r1, "derived", "alpha"),
            ]
        else:
            ub = r1 * data.alpha1 + r1 * (4 * n * n + 4 * m * n) + n2 * (t.S0 - r1)
            trace += [
                TraceLine("bound from (n2): lhs <= r~1 alpha1 + r~1 (4n^2 + 4mn) + 2n^2 (Sigma0~ - r~1)",
                          lhs, "<=", ub, "derived", "bound"),
                TraceLine("r~1 alpha1 > 2n^2 (Sigma0~ - r~1)", r1 * data.alpha1, ">", n2 * (t.S0 - r1),
                          "derived", "alpha"),
            ]
        trace.append(TraceLine("alpha1 > 2n^2 contradiction", data.alpha1, ">", n2, "contradiction",
                               "contradiction"))
    else:  # q = 1 with L = 1
        if data.b1_line_in_S:
            if N < 2:
                raise GraphError("B1 = E1 ∩ S1 needs a second level")
            trace.append(strong)
            theta = (g.nu[0] + g.nu[1]) / 2
            trace += [
                TraceLine("anticanonical curve through B0: nu1 + nu2 <= 2n", g.nu[0] + g.nu[1], "<=", 2 * n,
                          "hypothesis", "anticanonical-curve"),
                TraceLine("theta > n from strong nfi", theta, ">", n, "derived", "theta"),
                TraceLine("2n >= nu1 + nu2 > 2n contradiction", g.nu[0] + g.nu[1], ">", 2 * n,
                          "contradiction", "contradiction"),
            ]
            notes.append("B1 is the line E1 ∩ S1")
        elif N == 1:
            trace.append(strong)
            trace += [
                TraceLine("anticanonical curve through B0: nu1 <= 2n", g.nu[0], "<=", 2 * n,
                          "hypothesis", "anticanonical-curve"),
                TraceLine("nu1 > 2n + m contradiction", g.nu[0], ">", 2 * n + m, "contradiction",
                          "contradiction"),
            ]
        else:
            trace.append(strong)
            theta = (g.nu[0] + g.nu[1]) / 2
            bound = lemma_bound(n)
            if data.lemma_marks is not None:
                bound = mult_sum_bound(data.n, data.lemma_m, data.lemma_marks) - data.lemma_m
                trace.append(TraceLine("lemma bound <= 5n/2", bound, "<=", lemma_bound(n), "derived", "lemma"))
            trace.append(TraceLine("lemma: nu1 + nu2 <= 5n/2", g.nu[0] + g.nu[1], "<=", bound,
                                   "hypothesis", "lemma"))
            lhs = r1 * (data.alpha1 + data.mh + data.mv)
            trace.append(TraceLine("multiplicity at B0: r~1 (alpha1 + mh + mv) >= sum r~_i nu_i^2",
                                   lhs, ">=", t.weighted_sq, "hypothesis", "multiplicity-near"))
            trace.append(TraceLine("Sigma1 >= r~1", t.S1, ">=", r1, "derived", "structure"))
            trace.append(TraceLine("theta > n from strong nfi", theta, ">", n, "derived", "theta"))
            phi_here = phi_bound(n, m, r1, t.S1)
            trace.append(TraceLine("alpha1 + mh + mv > 4n^2 + 4mn + phi(Sigma1)",
                                   data.alpha1 + data.mh + data.mv, ">", 4 * n * n + 4 * m * n + phi_here,
                                   "derived", "phi"))
            if theta > n:
                low = sigma1_lower_limit(n, m, r1, theta)
                phi_low = phi_lower_bound(n, m, theta)
                trace += [
                    TraceLine("Sigma1 > (2n - theta + m) r~1/(theta - n)", t.S1, ">", low, "derived", "sigma1"),
                    TraceLine("phi(Sigma1) >= (2n - theta)^2 (n + m)/(theta - n)", phi_here, ">=", phi_low,
                              "derived", "phi"),
                    TraceLine("phi lower bound > 2n^2", phi_low, ">", n2, "derived", "phi"),
                ]
            else:
                notes.append("theta <= n: the lower limit for Sigma1 is undefined")
            trace += [
                TraceLine("alpha1 + mh + mv > 6n^2 + 4mn", data.alpha1 + data.mh + data.mv, ">",
                          6 * n * n + 4 * m * n, "derived", "alpha"),
                TraceLine("alpha1 > 2n^2 contradiction", data.alpha1, ">", n2, "contradiction", "contradiction"),
            ]
    verdict, failed = _verdict(trace)
    return ExclusionCertificate(case, tuple(trace), verdict, failed, tuple(notes))


def exclude(data: SingularityData, g: ResolutionGraph) -> ExclusionCertificate:
    """Run the full chain that applies to ``(data, g)``."""
    if not data.on_s1:
        return exclusion_point_general(data, g)
    if g.q is None:
        return exclusion_point_on_s1(data, g)
    return exclusion_infinitely_near(data, g)


def two_curves_exclusion(n, nu1, nu2) -> ExclusionCertificate:
    """Two maximal curves would give ``2n = C.D >= nu1 + nu2 > 2n``."""
    n, nu1, nu2 = rat(n), rat(nu1), rat(nu2)
    trace = (
        TraceLine("first curve maximal: nu1 > n", nu1, ">", n, "precondition", "maximal"),
        TraceLine("second curve maximal: nu2 > n", nu2, ">", n, "precondition", "maximal"),
        TraceLine("anticanonical curve through both: 2n >= nu1 + nu2", 2 * n, ">=", nu1 + nu2,
                  "hypothesis", "anticanonical-curve"),
        TraceLine("2n >= nu1 + nu2 > 2n contradiction", nu1 + nu2, ">", 2 * n, "contradiction", "contradiction"),
    )
    verdict, failed = _verdict(trace)
    return ExclusionCertificate("maximal-curve", trace, verdict, failed)


def all_graphs(N: int):
    """Every arrow set on ``N`` levels containing the consecutive arrows."""
    optional = [(i, j) for i in range(3, N + 1) for j in range(1, i - 1)]
    base = frozenset((i, i - 1) for i in range(2, N + 1))
    for k in range(len(optional) + 1):
        for extra in combinations(optional, k):
            yield base | frozenset(extra)

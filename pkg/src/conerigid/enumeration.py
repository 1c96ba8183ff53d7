"""Bounded exhaustive search for maximal singularities over points that escape every chain.

Candidates
----------
A structural candidate fixes a resolution graph, ``L``, ``L'``, the case
(``B0`` off ``s1``, or on ``s1`` with ``q`` and the position of ``B1``), a
non-increasing ladder of values ``k/D`` with ``0 < nu <= nu_max`` whose reduced
denominators are at most ``denom`` (``D = lcm(1..denom)``), ``n``,
``m in 0..m_max``, ``p in 1..p_max`` and ``A`` on the grid ``k/D`` in
``[0, 2n^2]``. The cap ``nu_max^2 <= 6n^2 + 4n*m_max`` is no restriction:
``nu_1^2`` is at most the multiplicity of ``D1.D2`` at ``B0``, which is
``alpha1 + mh + mv <= 2n^2 + 4n^2 + 4mn``. ``A`` is ``alpha1 + alpha2`` off ``s1`` and ``alpha1`` on
``s1`` (where ``alpha2`` drops out of every inequality, so it is set to 0).

The two remaining multiplicities are chosen by dominance rather than
enumerated. Every chain hypothesis is monotone in them: the multiplicity
inequalities only improve as ``mh`` or ``mv`` grows, the supermaximal bound
caps ``mv`` from above, and the effectivity bounds cap ``mh <= 2n^2 - A`` and
``mh + mv <= 4n^2 + 4mn``. Since ``mh`` always enters with a weight at least
that of ``mv`` (``Sigma0 >= Sigma0'``, ``Sigma0~ >= r~1``), moving mass from
``mv`` to ``mh`` never hurts, so ``mh = 2n^2 - A`` and ``mv`` the largest
grid value allowed by the two upper bounds. If this choice is excluded, every
grid choice of ``(mh, mv)`` is. The same argument makes ``p = 1`` dominate:
``p`` only divides the right side of the supermaximal bound, so ``p_max``
defaults to 1.

Escapes
-------
A row escapes when every hypothesis of its chain holds. The integer kernel
decides every row; a deterministic sample and every escape are re-run through
the exact checkers of :mod:`conerigid.nfi` and must agree.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, lcm

import numpy as np

from . import kernels
from .kernels import (
    CASE_GENERAL,
    CASE_LABELS,
    CASE_Q1_LINE,
    CASE_Q1_OFF,
    CASE_Q1_ON_S,
    CASE_Q2,
    CASE_Q3,
    CODE_LABELS,
    NCOLS_FIXED,
)
from .nfi import ResolutionGraph, SingularityData, all_graphs, exclude

DEFAULT_WORK_LIMIT = 10_000_000
WORK_LIMIT_ENV = "CONERIGID_WORK_LIMIT"
SAMPLE_STRIDE = 997


class WorkLimitExceeded(ValueError):
    pass


class KernelMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class Bounds:
    N_max: int
    L_max: int
    n_max: int
    denominator_max: int
    m_max: int | None = None  # defaults to n for each n
    p_max: int = 1  # p only divides the supermaximal bound, so p = 1 dominates

    def __post_init__(self):
        for name in ("N_max", "L_max", "n_max", "denominator_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.m_max is not None and self.m_max < 0:
            raise ValueError("m_max must be non-negative")
        if self.p_max < 1:
            raise ValueError("p_max must be at least 1")

    @property
    def empty(self) -> bool:
        return min(self.N_max, self.L_max, self.n_max, self.denominator_max) == 0


@dataclass
class Report:
    candidates: int = 0
    by_case: dict = field(default_factory=dict)
    by_code: dict = field(default_factory=dict)
    escapes: list = field(default_factory=list)
    cross_checked: int = 0
    seconds: float = 0.0
    backend: str = ""

    def merge(self, other: Report) -> Report:
        out = Report(
            self.candidates + other.candidates,
            _add(self.by_case, other.by_case),
            _add(self.by_code, other.by_code),
            sorted(self.escapes + other.escapes),
            self.cross_checked + other.cross_checked,
            self.seconds + other.seconds,
            self.backend or other.backend,
        )
        return out

    def summary(self) -> str:
        n = len(self.escapes)
        return f"{n} escape{'' if n == 1 else 's'}"

    def to_dict(self) -> dict:
        return {
            "candidates": self.candidates,
            "by_case": dict(sorted(self.by_case.items())),
            "by_code": dict(sorted(self.by_code.items())),
            "escapes": list(self.escapes),
            "cross_checked": self.cross_checked,
            "backend": self.backend,
        }


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def work_limit() -> int:
    raw = os.environ.get(WORK_LIMIT_ENV)
    if raw is None or raw == "":
        return DEFAULT_WORK_LIMIT
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{WORK_LIMIT_ENV} must be positive")
    return value


def grid_denominator(denom: int) -> int:
    return lcm(*range(1, denom + 1))


def ladder_values(n: int, denom: int, m_max: int) -> list[int]:
    """Scaled values ``k`` (meaning ``k/D``) with ``(k/D)^2 <= 6n^2 + 4n*m_max`` and reduced denominator ``<= denom``."""
    D = grid_denominator(denom)
    cap = (6 * n * n + 4 * n * m_max) * D * D
    out = []
    k = 1
    while k * k <= cap:
        if Fraction(k, D).denominator <= denom:
            out.append(k)
        k += 1
    return out


def _ladders(n: int, N: int, denom: int, m_max: int) -> np.ndarray:
    vals = sorted(ladder_values(n, denom, m_max), reverse=True)
    rows = list(combinations_with_replacement(vals, N))
    if not rows:
        return np.zeros((0, N), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


@dataclass(frozen=True)
class Config:
    """Graph-level part of a candidate: everything but ``n, m, p, A`` and the ladder."""

    N: int
    L: int
    L_prime: int
    case: int
    arrows: tuple

    def graph(self, nu) -> ResolutionGraph:
        q = {CASE_GENERAL: None, CASE_Q3: 3, CASE_Q2: 2}.get(self.case, 1)
        return ResolutionGraph(self.N, self.L, frozenset(self.arrows), tuple(nu), self.L_prime, q)


def _configs(N: int, L_max: int, arrows: frozenset) -> list[Config]:
    arr = tuple(sorted(arrows))
    into_one_high = any(j == 1 and i >= 3 for i, j in arrows)
    out = []
    for L in range(1, min(L_max, N) + 1):
        for Lp in range(1, L + 1):
            out.append(Config(N, L, Lp, CASE_GENERAL, arr))
            if L >= 2:
                out.append(Config(N, L, Lp, CASE_Q1_OFF, arr))
        if L >= 3 and not into_one_high:
            out.append(Config(N, L, 1, CASE_Q3, arr))
        if L >= 2:
            out.append(Config(N, L, 1, CASE_Q2, arr))
        if L == 1:
            out.append(Config(N, 1, 1, CASE_Q1_ON_S, arr))
            if N >= 2:
                out.append(Config(N, 1, 1, CASE_Q1_LINE, arr))
    return out


def _m_range(bounds: Bounds, n: int) -> range:
    return range(0, (n if bounds.m_max is None else bounds.m_max) + 1)


def _chunks(bounds: Bounds):
    """Independent units of work: ``(n, config)``."""
    if bounds.empty:
        return []
    out = []
    for n in range(1, bounds.n_max + 1):
        for N in range(1, bounds.N_max + 1):
            for arrows in all_graphs(N):
                for cfg in _configs(N, bounds.L_max, arrows):
                    out.append((n, cfg))
    return out


def _chunk_size(bounds: Bounds, n: int, cfg: Config) -> int:
    D = grid_denominator(bounds.denominator_max)
    nvals = len(ladder_values(n, bounds.denominator_max, _m_range(bounds, n)[-1]))
    ladders = comb(nvals + cfg.N - 1, cfg.N)
    return ladders * len(_m_range(bounds, n)) * bounds.p_max * (2 * n * n * D + 1)


def count_candidates(bounds: Bounds) -> int:
    return sum(_chunk_size(bounds, n, cfg) for n, cfg in _chunks(bounds))


def _build_rows(bounds: Bounds, n: int, cfg: Config, nmax: int) -> np.ndarray:
    D = grid_denominator(bounds.denominator_max)
    lad = _ladders(n, cfg.N, bounds.denominator_max, _m_range(bounds, n)[-1])
    graph = ResolutionGraph(cfg.N, cfg.L, frozenset(cfg.arrows), (1,) * cfg.N, cfg.L_prime)
    adj = graph.adjacency()
    r = kernels.path_counts_kernel(adj, cfg.N)[1:]
    t = np.concatenate([kernels.path_counts_kernel(adj, cfg.L)[1 : cfg.L + 1], r[cfg.L :]])
    ms = np.array(list(_m_range(bounds, n)), dtype=np.int64)
    ps = np.arange(1, bounds.p_max + 1, dtype=np.int64)
    As = np.arange(0, 2 * n * n * D + 1, dtype=np.int64)
    # cartesian product ladder x m x p x A, ladder slowest
    grid = np.stack(np.meshgrid(np.arange(len(lad)), ms, ps, As, indexing="ij"), -1).reshape(-1, 4)
    rows = np.zeros((grid.shape[0], NCOLS_FIXED + 3 * nmax), dtype=np.int64)
    rows[:, kernels.COL_CASE] = cfg.case
    rows[:, kernels.COL_N] = cfg.N
    rows[:, kernels.COL_L] = cfg.L
    rows[:, kernels.COL_LP] = cfg.L_prime
    rows[:, kernels.COL_n] = n
    rows[:, kernels.COL_m] = grid[:, 1]
    rows[:, kernels.COL_p] = grid[:, 2]
    rows[:, kernels.COL_A] = grid[:, 3]
    rows[:, kernels.COL_d] = D
    v0, r0, t0 = NCOLS_FIXED, NCOLS_FIXED + nmax, NCOLS_FIXED + 2 * nmax
    rows[:, v0 : v0 + cfg.N] = lad[grid[:, 0]]
    rows[:, r0 : r0 + cfg.N] = r
    rows[:, t0 : t0 + cfg.N] = t
    return rows


def greedy_multiplicities(row: np.ndarray, nmax: int) -> tuple[Fraction, Fraction]:
    """The dominating ``(mh, mv)`` for one scan row, as exact rationals."""
    N, L, Lp, n, m, p, A, D = (int(row[c]) for c in range(1, NCOLS_FIXED))
    nu = row[NCOLS_FIXED : NCOLS_FIXED + N]
    r = row[NCOLS_FIXED + nmax : NCOLS_FIXED + nmax + N]
    S0, S1, S0p = int(r[:L].sum()), int(r[L:].sum()), int(r[:Lp].sum())
    Ed = int((r * nu).sum()) - D * (2 * n * S0 + n * S1)
    H = 2 * n * n * D - A
    X = S0p * (2 * n * n * D + A) + 4 * n * p * Ed
    W = min((X - 1) // (p * S0p), (4 * n * n + 4 * m * n) * D - H)
    return Fraction(H, D), Fraction(max(W, 0), D)


def row_to_input(row: np.ndarray, nmax: int, arrows) -> tuple[SingularityData, ResolutionGraph]:
    case, N, L, Lp, n, m, p, A, D = (int(row[c]) for c in range(NCOLS_FIXED))
    nu = tuple(Fraction(int(v), D) for v in row[NCOLS_FIXED : NCOLS_FIXED + N])
    cfg = Config(N, L, Lp, case, tuple(arrows))
    g = cfg.graph(nu)
    mh, mv = greedy_multiplicities(row, nmax)
    data = SingularityData(
        n=n, m=m, alpha1=Fraction(A, D), alpha2=Fraction(0), p=p, mh=mh, mv=mv,
        on_s1=case != CASE_GENERAL, b1_line_in_S=case == CASE_Q1_LINE,
    )
    return data, g


def encode(row: np.ndarray, nmax: int, arrows) -> str:
    case, N, L, Lp, n, m, p, A, D = (int(row[c]) for c in range(NCOLS_FIXED))
    nu = ",".join(str(Fraction(int(v), D)) for v in row[NCOLS_FIXED : NCOLS_FIXED + N])
    arr = ",".join(f"{i}>{j}" for i, j in sorted(arrows))
    return (f"N={N};L={L};Lp={Lp};arrows={arr};case={CASE_LABELS[case]};n={n};m={m};p={p};"
            f"A={Fraction(A, D)};nu=({nu})")


_EXPECTED_TAG = {
    -2: "alpha", -1: "nfi", 0: "", 1: "supermaximal", 2: "multiplicity", 3: "strong-nfi",
    4: "multiplicity-near", 5: "anticanonical-curve", 6: "lemma",
}


def cross_check(row: np.ndarray, nmax: int, arrows, code: int) -> None:
    data, g = row_to_input(row, nmax, arrows)
    cert = exclude(data, g)
    tag = cert.first_failed_tag
    if tag != _EXPECTED_TAG[code]:
        raise KernelMismatch(
            f"kernel code {code} ({CODE_LABELS[code]}) vs exact checker '{tag or cert.verdict}' "
            f"on {encode(row, nmax, arrows)}"
        )


def _run_chunk(args) -> Report:
    bounds, n, cfg, nmax, use_numba = args
    t0 = time.perf_counter()
    rows = _build_rows(bounds, n, cfg, nmax)
    codes = kernels.scan_kernel(rows, nmax, use_numba)
    rep = Report(candidates=int(rows.shape[0]))
    label = CASE_LABELS[cfg.case] if cfg.case != CASE_Q1_LINE else "q=1-on-S(line)"
    rep.by_case = {label: int(rows.shape[0])}
    vals, cnts = np.unique(codes, return_counts=True)
    rep.by_code = {CODE_LABELS[int(v)]: int(c) for v, c in zip(vals, cnts)}
    checked = 0
    for k in range(0, rows.shape[0], SAMPLE_STRIDE):
        cross_check(rows[k], nmax, cfg.arrows, int(codes[k]))
        checked += 1
    for k in np.flatnonzero(codes == 0):
        cross_check(rows[k], nmax, cfg.arrows, 0)
        checked += 1
        rep.escapes.append(encode(rows[k], nmax, cfg.arrows))
    rep.escapes.sort()
    rep.cross_checked = checked
    rep.seconds = time.perf_counter() - t0
    return rep


def enumerate_verify(bounds: Bounds, jobs: int = 1, use_numba: bool | None = None) -> Report:
    """Scan every candidate within ``bounds``; the report lists escapes sorted by encoding."""
    start = time.perf_counter()
    if use_numba is None:
        use_numba = kernels.numba_enabled()
    total = count_candidates(bounds)
    limit = work_limit()
    if total > limit:
        raise WorkLimitExceeded(
            f"{total} candidates exceed the work limit {limit} (set {WORK_LIMIT_ENV} to raise it)"
        )
    nmax = max(bounds.N_max, 1)
    tasks = [(bounds, n, cfg, nmax, use_numba) for n, cfg in _chunks(bounds)]
    report = Report(backend="numba" if use_numba else "numpy")
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        parts = [_run_chunk(t) for t in tasks]
    for part in parts:
        report = report.merge(part)
    report.seconds = time.perf_counter() - start
    return report

"""Integer kernels: path counts on resolution graphs and the exclusion scan.

Both kernels exist twice, as numba ``@njit`` loops and as plain numpy code.
The numba path is used unless ``CONERIGID_DISABLE_NUMBA=1`` is set or numba
cannot be imported. All arithmetic is int64 on data scaled by the common
denominator, so the two paths must agree bit for bit.

Scan rows
---------
One row per candidate, columns given by the ``COL_*`` constants followed by
three blocks of width ``nmax``: the scaled ladder ``nu_i * d``, the path counts
``r_i`` and the truncated path counts. Unused levels are zero.

Result codes (first failing check in evaluation order)::

    -2  alpha exceeds 2n^2 (precondition)
    -1  Noether-Fano inequality fails: not a maximal singularity (precondition)
     0  every hypothesis holds: escape
     1  supermaximal inequality
     2  multiplicity inequality over B0
     3  strong Noether-Fano inequality (truncated counts)
     4  multiplicity inequality of the infinitely near case
     5  anticanonical curve bound
     6  nu_1 + nu_2 <= 5n/2
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def decorator(func):
            return func

        return decorator


def numba_enabled() -> bool:
    return NUMBA_AVAILABLE and os.environ.get("CONERIGID_DISABLE_NUMBA", "") not in ("1", "true", "yes")


CASE_GENERAL = 0
CASE_Q3 = 1
CASE_Q2 = 2
CASE_Q1_OFF = 3
CASE_Q1_LINE = 4
CASE_Q1_ON_S = 5

CASE_LABELS = {
    CASE_GENERAL: "point-general",
    CASE_Q3: "q>=3",
    CASE_Q2: "q=2",
    CASE_Q1_OFF: "q=1-off-s1",
    CASE_Q1_LINE: "q=1-on-S",
    CASE_Q1_ON_S: "q=1-on-S",
}

CODE_LABELS = {
    -2: "alpha-range",
    -1: "nfi",
    0: "escape",
    1: "supermaximal",
    2: "multiplicity",
    3: "strong-nfi",
    4: "multiplicity-near",
    5: "anticanonical-curve",
    6: "lemma",
}

COL_CASE, COL_N, COL_L, COL_LP, COL_n, COL_m, COL_p, COL_A, COL_d = range(9)
NCOLS_FIXED = 9


# ---------------------------------------------------------------- path counts


@njit(cache=True)
def _path_counts_numba(adj, top):
    N = adj.shape[0] - 1
    r = np.zeros(N + 1, dtype=np.int64)
    r[top] = 1
    for i in range(top - 1, 0, -1):
        s = 0
        for j in range(i + 1, top + 1):
            if adj[j, i]:
                s += r[j]
        r[i] = s
    return r


def _path_counts_numpy(adj, top):
    N = adj.shape[0] - 1
    r = np.zeros(N + 1, dtype=np.int64)
    r[top] = 1
    for i in range(top - 1, 0, -1):
        r[i] = adj[i + 1 : top + 1, i] @ r[i + 1 : top + 1]
    return r


def path_counts_kernel(adj: np.ndarray, top: int, use_numba: bool | None = None) -> np.ndarray:
    """``r[i]`` = number of directed paths from ``top`` to ``i`` (index 0 unused).

    ``adj[i, j] = 1`` encodes an arrow ``i -> j`` with ``i > j``. Vertices above
    ``top`` are ignored.
    """
    adj = np.ascontiguousarray(adj, dtype=np.int64)
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba:
        return _path_counts_numba(adj, int(top))
    return _path_counts_numpy(adj, int(top))


# ------------------------------------------------------------------ the scan


@njit(cache=True)
def _scan_numba(rows, nmax):
    out = np.empty(rows.shape[0], dtype=np.int8)
    v0 = NCOLS_FIXED
    r0 = v0 + nmax
    t0 = r0 + nmax
    for k in range(rows.shape[0]):
        case = rows[k, COL_CASE]
        N = rows[k, COL_N]
        L = rows[k, COL_L]
        Lp = rows[k, COL_LP]
        n = rows[k, COL_n]
        m = rows[k, COL_m]
        p = rows[k, COL_p]
        A = rows[k, COL_A]
        d = rows[k, COL_d]
        SR = 0
        SR2 = 0
        S0 = 0
        S1 = 0
        S0p = 0
        SRt = 0
        SRt2 = 0
        T0 = 0
        T0p = 0
        for i in range(N):
            v = rows[k, v0 + i]
            r = rows[k, r0 + i]
            t = rows[k, t0 + i]
            SR += r * v
            SR2 += r * v * v
            SRt += t * v
            SRt2 += t * v * v
            if i < L:
                S0 += r
                T0 += t
            else:
                S1 += r
            if i < Lp:
                S0p += r
                T0p += t
        Ed = SR - d * (2 * n * S0 + n * S1)
        if Ed <= 0:
            out[k] = -1
            continue
        H = 2 * n * n * d - A
        if H < 0:
            out[k] = -2
            continue
        Bd = (4 * n * n + 4 * m * n) * d
        X = S0p * (2 * n * n * d + A) + 4 * n * p * Ed
        W = (X - 1) // (p * S0p)
        if Bd - H < W:
            W = Bd - H
        if W < 0:
            out[k] = 1
            continue
        if case == 0:
            out[k] = 0 if d * (S0 * H + S0p * W) >= SR2 else 2
            continue
        if d * (S0 * (H + A) + S0p * W) < SR2:
            out[k] = 2
            continue
        if SRt <= d * (2 * n * T0 + n * S1 + m * T0p):
            out[k] = 3
            continue
        rt1 = rows[k, t0]
        rt2 = rows[k, t0 + 1] if nmax > 1 else 0
        V1 = rows[k, v0]
        V2 = rows[k, v0 + 1] if nmax > 1 else 0
        if case == 1:
            out[k] = 0
        elif case == 2:
            out[k] = 0 if d * ((rt1 + rt2) * A + T0 * H + rt1 * W) >= SRt2 else 4
        elif case == 3:
            out[k] = 0 if d * (rt1 * A + T0 * H + rt1 * W) >= SRt2 else 4
        elif case == 4:
            out[k] = 0 if V1 + V2 <= 2 * n * d else 5
        else:
            if N == 1:
                out[k] = 0 if V1 <= 2 * n * d else 5
            elif 2 * (V1 + V2) > 5 * n * d:
                out[k] = 6
            else:
                out[k] = 0 if d * rt1 * (A + H + W) >= SRt2 else 4
    return out


def _scan_numpy(rows, nmax):
    rows = rows.astype(np.int64, copy=False)
    case, N, L, Lp, n, m, p, A, d = (rows[:, c] for c in range(NCOLS_FIXED))
    V = rows[:, NCOLS_FIXED : NCOLS_FIXED + nmax]
    R = rows[:, NCOLS_FIXED + nmax : NCOLS_FIXED + 2 * nmax]
    T = rows[:, NCOLS_FIXED + 2 * nmax : NCOLS_FIXED + 3 * nmax]
    idx = np.arange(nmax)[None, :]
    live = idx < N[:, None]
    pts = idx < L[:, None]
    fib = idx < Lp[:, None]
    R = np.where(live, R, 0)
    T = np.where(live, T, 0)
    SR = (R * V).sum(1)
    SR2 = (R * V * V).sum(1)
    SRt = (T * V).sum(1)
    SRt2 = (T * V * V).sum(1)
    S0 = np.where(pts, R, 0).sum(1)
    S1 = np.where(pts, 0, R).sum(1)
    S0p = np.where(fib, R, 0).sum(1)
    T0 = np.where(pts, T, 0).sum(1)
    T0p = np.where(fib, T, 0).sum(1)

    Ed = SR - d * (2 * n * S0 + n * S1)
    H = 2 * n * n * d - A
    Bd = (4 * n * n + 4 * m * n) * d
    X = S0p * (2 * n * n * d + A) + 4 * n * p * Ed
    W = np.minimum((X - 1) // (p * S0p), Bd - H)
    rt1 = T[:, 0]
    rt2 = T[:, 1] if nmax > 1 else np.zeros_like(rt1)
    V1 = V[:, 0]
    V2 = V[:, 1] if nmax > 1 else np.zeros_like(V1)

    mult4_general = d * (S0 * H + S0p * W) >= SR2
    mult4_s1 = d * (S0 * (H + A) + S0p * W) >= SR2
    strong = SRt > d * (2 * n * T0 + n * S1 + m * T0p)
    near_q2 = d * ((rt1 + rt2) * A + T0 * H + rt1 * W) >= SRt2
    near_q1 = d * (rt1 * A + T0 * H + rt1 * W) >= SRt2
    near_phi = d * rt1 * (A + H + W) >= SRt2
    line_ok = V1 + V2 <= 2 * n * d
    single_ok = V1 <= 2 * n * d
    lemma_ok = 2 * (V1 + V2) <= 5 * n * d

    out = np.zeros(rows.shape[0], dtype=np.int8)
    # case-specific tail, written back to front so earlier checks win
    tail = np.zeros_like(out)
    tail = np.where((case == 2) & ~near_q2, 4, tail)
    tail = np.where((case == 3) & ~near_q1, 4, tail)
    tail = np.where((case == 4) & ~line_ok, 5, tail)
    phi = case == 5
    tail = np.where(phi & (N == 1) & ~single_ok, 5, tail)
    tail = np.where(phi & (N > 1) & lemma_ok & ~near_phi, 4, tail)
    tail = np.where(phi & (N > 1) & ~lemma_ok, 6, tail)
    out = tail
    out = np.where((case != 0) & ~strong, 3, out)
    out = np.where((case != 0) & ~mult4_s1, 2, out)
    out = np.where((case == 0) & ~mult4_general, 2, out)
    out = np.where((case == 0) & mult4_general, 0, out)
    out = np.where(W < 0, 1, out)
    out = np.where(H < 0, -2, out)
    out = np.where(Ed <= 0, -1, out)
    return out.astype(np.int8)


def scan_kernel(rows: np.ndarray, nmax: int, use_numba: bool | None = None) -> np.ndarray:
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    if use_numba is None:
        use_numba = numba_enabled()
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=np.int8)
    if use_numba:
        return _scan_numba(rows, int(nmax))
    return _scan_numpy(rows, int(nmax))

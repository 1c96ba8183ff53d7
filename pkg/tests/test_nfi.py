from fractions import Fraction
from itertools import product

import pytest
from conftest import brute_paths
from hypothesis import given
from hypothesis import strategies as st

from conerigid.nfi import (
    EXCLUDED,
    INPUT_INFEASIBLE,
    NOT_EXCLUDED,
    QUADRATIC_NOTE,
    REDUCED,
    TRUNCATION_NOTE,
    GraphError,
    ResolutionGraph,
    SingularityData,
    all_graphs,
    discrepancy,
    exclude,
    exclusion_infinitely_near,
    exclusion_point_general,
    exclusion_point_on_s1,
    nfi_excess,
    path_counts,
    phi_bound,
    phi_lower_bound,
    quadratic_lower_bound,
    sigma1_lower_limit,
    strong_nfi_check,
    sums,
    truncated_path_counts,
    two_curves_exclusion,
)

F = Fraction


def graph(N, extra=(), nu=None, L=None, Lp=1, q=None):
    return ResolutionGraph.chain(nu or (1,) * N, L=L, L_prime=Lp, q=q, extra=extra)


# ------------------------------------------------------------------ graphs


def test_path_count_examples():
    assert path_counts(graph(3)) == (1, 1, 1)
    assert path_counts(graph(3, [(3, 1)])) == (2, 1, 1)
    assert path_counts(graph(4, [(4, 2), (3, 1)]))[0] == 3


def test_graph_validation():
    with pytest.raises(GraphError, match="missing arrow"):
        ResolutionGraph(3, 3, frozenset({(3, 2)}), (1, 1, 1))
    with pytest.raises(GraphError, match="downward"):
        ResolutionGraph(2, 2, frozenset({(2, 1), (1, 2)}), (1, 1))
    with pytest.raises(GraphError, match="ladder not non-increasing"):
        graph(2, nu=(2, 3))
    with pytest.raises(GraphError):
        graph(2, nu=(1, 0))


def test_truncated_examples():
    assert truncated_path_counts(graph(3, L=2)) == (1, 1, 1)
    g = graph(3, [(3, 1)], L=2)
    full, trunc = path_counts(g), truncated_path_counts(g)
    assert full[0] - trunc[0] == full[2]
    assert truncated_path_counts(graph(4, [(4, 2), (3, 1)], L=1))[0] == 1


def test_path_counts_brute_force_n_le_6():
    for N in range(1, 7):
        for arrows in all_graphs(N):
            g = ResolutionGraph(N, N, arrows, (1,) * N)
            assert path_counts(g) == brute_paths(N, arrows)
            for L in range(1, N + 1):
                gl = ResolutionGraph(N, L, arrows, (1,) * N)
                low = brute_paths(N, {(i, j) for i, j in arrows if i <= L}, top=L)
                assert truncated_path_counts(gl)[:L] == low[:L]


def test_discrepancy_matches_levels():
    for N in range(1, 5):
        for arrows in all_graphs(N):
            for L in range(1, N + 1):
                g = ResolutionGraph(N, L, arrows, (1,) * N)
                r = path_counts(g)
                assert discrepancy(g) == sum(ri * (2 if i < L else 1) for i, ri in enumerate(r))


# -------------------------------------------------------------- inequalities


def test_excess_examples():
    assert nfi_excess(graph(1, nu=(3,)), 1) == 1
    for n in range(1, 5):
        assert nfi_excess(graph(1, nu=(2 * n,)), n) == 0
    assert nfi_excess(graph(2, nu=(3, 1), L=1), 1) == 1


def test_strong_nfi_examples():
    assert strong_nfi_check(graph(1, nu=(4,)), 1, 1)[0]
    assert not strong_nfi_check(graph(1, nu=(3,)), 1, 1)[0]
    ok, line = strong_nfi_check(graph(2, nu=(5, 2), L=1), 2, 0)
    assert ok and (line.lhs, line.rhs) == (7, 6)


def test_quadratic_bound_examples():
    assert quadratic_lower_bound(graph(1, nu=(3,)), 1, 1) == 9
    g = graph(2, nu=(3, 1), L=1)
    assert quadratic_lower_bound(g, 1, nfi_excess(g, 1)) == 8 <= sums(g).weighted_sq == 10
    flat = graph(3, nu=(2, 2, 2), L=2)
    assert quadratic_lower_bound(flat, 1, nfi_excess(flat, 1)) == sums(flat).weighted_sq


ladder = st.lists(st.fractions(min_value=F(1, 8), max_value=20, max_denominator=8), min_size=1, max_size=5)


@given(ladder, st.data())
def test_cauchy_schwarz_and_substitution(nu, data):
    nu = sorted(nu, reverse=True)
    N = len(nu)
    graphs = list(all_graphs(N))
    arrows = data.draw(st.sampled_from(graphs))
    L = data.draw(st.integers(1, N))
    n = data.draw(st.integers(1, 6))
    g = ResolutionGraph(N, L, arrows, tuple(nu))
    s = sums(g)
    assert s.weighted_sq >= s.weighted ** 2 / (s.S0 + s.S1)
    assert quadratic_lower_bound(g, n, nfi_excess(g, n)) == s.weighted ** 2 / (s.S0 + s.S1)


def test_phi_examples():
    assert phi_bound(1, 0, 1, 2) == F(4, 3)
    for n in range(1, 6):
        assert phi_lower_bound(n, 0, F(5 * n, 4)) == F(9 * n * n, 4)
        assert phi_lower_bound(n, 0, F(9 * n, 8)) == F(49 * n * n, 8)
    assert phi_bound(3, 2, 3, 2) == 0
    with pytest.raises(ValueError, match="excess forces"):
        phi_lower_bound(2, 0, 1)
    with pytest.raises(ZeroDivisionError):
        phi_lower_bound(2, 0, 2)
    with pytest.raises(ZeroDivisionError):
        sigma1_lower_limit(2, 0, 1, 2)


def test_phi_lower_bound_above_two_n_squared():
    for n in range(1, 7):
        for m in range(0, 4):
            for k in range(1, 33):
                theta = n + F(k, 32) * F(n, 4)  # n < theta <= 5n/4
                assert phi_lower_bound(n, m, theta) >= F(9, 4) * n * n > 2 * n * n


def test_phi_is_value_at_lower_limit():
    for n, m, r1, theta in [(2, 0, 1, F(9, 4)), (3, 1, 2, F(7, 2)), (1, 2, 1, F(5, 4))]:
        s1 = sigma1_lower_limit(n, m, r1, theta)
        assert phi_bound(n, m, r1, s1) == phi_lower_bound(n, m, theta)


def test_two_curves():
    assert two_curves_exclusion(2, 3, 3).verdict == EXCLUDED
    assert two_curves_exclusion(2, 3, 2).verdict == INPUT_INFEASIBLE
    for n in range(1, 11):
        for a, b in product(range(1, 6), repeat=2):
            assert two_curves_exclusion(n, n + F(a, 4), n + F(b, 3)).verdict == EXCLUDED


# ----------------------------------------------------------------- chains


def general_data(**kw):
    base = dict(n=1, m=0, alpha1=0, alpha2=0, p=1, mh=2, mv=1)
    base.update(kw)
    return SingularityData(**base)


def test_point_general_excluded():
    cert = exclusion_point_general(general_data(), graph(1, nu=(3,)))
    assert cert.verdict == EXCLUDED
    assert cert.trace[-1].name == "(n Sigma1 - e)^2 < 0"
    assert "multiplicity: Sigma0 mh + Sigma0' mv >= sum r_i nu_i^2" in cert.failed
    assert QUADRATIC_NOTE in cert.notes


def test_point_general_infeasible():
    cert = exclusion_point_general(general_data(alpha1=1, mh=2), graph(1, nu=(3,)))
    assert cert.verdict == INPUT_INFEASIBLE
    assert any("(n2)" in name for name in cert.failed)
    cert = exclusion_point_general(general_data(), graph(1, nu=(2,)))
    assert cert.verdict == INPUT_INFEASIBLE


def test_identity_lines_always_hold():
    for nu in [(3,), (F(7, 2), 2), (4, 3, 1)]:
        for L in range(1, len(nu) + 1):
            g = graph(len(nu), nu=nu, L=L)
            for c in (exclusion_point_general(general_data(), g),
                      exclusion_point_on_s1(general_data(on_s1=True), g)):
                assert all(t.holds for t in c.trace if t.role in ("identity", "derived") and t.tag == "identity")


def test_on_s1_p_forced():
    # alpha1 = 2n^2 and Sigma0' = Sigma0: the ratio line holds only for p = 1
    g = graph(1, nu=(3,))
    for p, expect in ((1, True), (2, False), (3, False)):
        d = SingularityData(n=1, m=1, alpha1=2, alpha2=0, p=p, mh=0, mv=7, on_s1=True)
        cert = exclusion_point_on_s1(d, g)
        ratio = next(t for t in cert.trace if t.tag == "ratio")
        assert ratio.holds is expect


def test_on_s1_reduced_examples():
    for nu, a, mh, mv in [(F(5, 2), 1, 1, F(9, 2)), (3, 2, 0, F(15, 2))]:
        d = SingularityData(n=1, m=1, alpha1=a, alpha2=0, p=1, mh=mh, mv=mv, on_s1=True)
        cert = exclusion_point_on_s1(d, graph(1, nu=(nu,)))
        assert cert.verdict == REDUCED
        cons = {t.tag: t.holds for t in cert.trace if t.role == "consequence"}
        assert all(cons.values()) and set(cons) == {"p1", "n1", "ratio", "s1-quadratic"}


def test_on_s1_half_ratio_contradiction():
    g = graph(2, nu=(3, 3), L=2, Lp=1)  # Sigma0' = 1, Sigma0 = 2
    for a in range(0, 3):
        for mv in range(0, 9):
            d = SingularityData(n=1, m=1, alpha1=a, alpha2=0, p=1, mh=2 - a, mv=min(mv, 6 + a), on_s1=True)
            cert = exclusion_point_on_s1(d, g)
            n1 = next(t for t in cert.trace if t.tag == "n1")
            assert not n1.holds
            assert cert.verdict in (EXCLUDED, INPUT_INFEASIBLE)


def test_q3_structure():
    g = graph(3, nu=(3, 3, 3), L=3, q=3)
    d = SingularityData(n=1, m=0, alpha1=1, alpha2=0, p=1, mh=1, mv=3, on_s1=True)
    cert = exclusion_infinitely_near(d, g)
    r2 = next(t for t in cert.trace if t.tag == "r2")
    assert r2.holds and r2.lhs == r2.rhs
    ratio = next(t for t in cert.trace if t.tag == "ratio" and t.role == "derived")
    assert ratio.holds
    assert cert.trace[-1].name.startswith("(n1) contradiction")
    assert cert.verdict == EXCLUDED


def test_q3_rejects_arrow_into_first_level():
    g = graph(3, [(3, 1)], nu=(3, 3, 3), L=3, q=3)
    d = SingularityData(n=1, m=0, alpha1=1, alpha2=0, p=1, mh=1, mv=3, on_s1=True)
    assert exclusion_infinitely_near(d, g).verdict == INPUT_INFEASIBLE


def test_q2_final_line():
    g = graph(2, nu=(F(5, 2), 2), L=2, q=2)
    d = SingularityData(n=1, m=1, alpha1=1, alpha2=0, p=1, mh=1, mv=6, on_s1=True)
    cert = exclusion_infinitely_near(d, g)
    assert cert.case == "q=2"
    assert cert.trace[-1].name == "alpha1 > 2n^2 contradiction"
    assert cert.verdict == EXCLUDED
    assert TRUNCATION_NOTE in cert.notes


def test_q2_equality_system():
    g = graph(2, nu=(F(5, 2), 2), L=2, q=2)
    d = SingularityData(n=1, m=1, alpha1=1, alpha2=0, p=1, mh=1, mv=6, on_s1=True,
                        d=(F(7, 4), 0), mij={(1, 2): F(7, 4)})
    cert = exclusion_infinitely_near(d, g)
    lines = {t.name: t for t in cert.trace if t.tag == "system"}
    assert lines["degree system level 1"].holds
    assert not lines["degree system level 2"].holds
    assert cert.verdict == INPUT_INFEASIBLE


def test_q2_grid_never_escapes():
    for n in range(1, 4):
        for nu in product([F(k, 2) for k in range(1, 4 * n + 1)], repeat=2):
            if nu[0] < nu[1]:
                continue
            g = graph(2, nu=nu, L=2, q=2)
            for a in range(0, 2 * n * n + 1):
                d = SingularityData(n=n, m=n, alpha1=a, alpha2=0, p=1, mh=2 * n * n - a,
                                    mv=4 * n * n + 4 * n * n - (2 * n * n - a), on_s1=True)
                assert exclusion_infinitely_near(d, g).verdict != NOT_EXCLUDED


def test_q1_line_case():
    g = graph(2, nu=(F(3, 2), F(3, 2)), L=1, q=1)
    d = SingularityData(n=1, m=0, alpha1=0, alpha2=0, p=1, mh=2, mv=2, on_s1=True, b1_line_in_S=True)
    cert = exclusion_infinitely_near(d, g)
    assert cert.case == "q=1-on-S"
    assert any(t.tag == "anticanonical-curve" for t in cert.trace)
    assert cert.verdict in (EXCLUDED, INPUT_INFEASIBLE)


def test_q1_phi_case_numbers():
    n = 8
    theta = F(9 * n, 8)
    g = graph(2, nu=(theta + 1, theta - 1), L=1, q=1)
    d = SingularityData(n=n, m=0, alpha1=1, alpha2=0, p=1, mh=2 * n * n - 1, mv=4 * n * n, on_s1=True)
    cert = exclusion_infinitely_near(d, g)
    low = next(t for t in cert.trace if t.name.startswith("phi(Sigma1) >="))
    assert low.rhs == F(49 * n * n, 8)
    assert cert.trace[-1].name == "alpha1 > 2n^2 contradiction"


def test_exclude_dispatch_and_errors():
    g = graph(1, nu=(3,))
    assert exclude(general_data(), g).case == "point-general"
    assert exclude(general_data(on_s1=True), g).case == "point-on-s1"
    with pytest.raises(ValueError):
        exclusion_point_general(general_data(on_s1=True), g)
    with pytest.raises(ValueError):
        exclusion_infinitely_near(general_data(on_s1=True), g)


def test_infeasible_never_excluded():
    # negative mv violates a precondition; the verdict must say so even if a hypothesis fails too
    d = general_data(mv=-1)
    assert exclusion_point_general(d, graph(1, nu=(3,))).verdict == INPUT_INFEASIBLE


def test_trace_relations_recheck():
    cert = exclusion_point_general(general_data(), graph(2, nu=(3, 2), L=1))
    for t in cert.trace:
        assert t.holds == {"<": t.lhs < t.rhs, "<=": t.lhs <= t.rhs, ">": t.lhs > t.rhs,
                           ">=": t.lhs >= t.rhs, "==": t.lhs == t.rhs}[t.rel]

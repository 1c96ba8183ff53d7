from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conerigid.surface import (
    BasisMismatch,
    DP2Class,
    FibSurfaceClass,
    bertini_coefficients,
    bertini_pullback,
    dp2_line_degrees,
    fiber_reflection_pullback,
    lemma_bound,
    marked_restriction,
    mult_sum_bound,
    surf_pair,
)

coords = st.tuples(*[st.integers(-10**6, 10**6)] * 3)
H, E, ES = (FibSurfaceClass(v) for v in np.eye(3, dtype=int))


def test_bertini_images():
    assert bertini_pullback(E) == FibSurfaceClass((2, -1, 2))
    assert bertini_pullback(H) == H
    assert bertini_pullback(ES) == ES


def test_fiber_reflection_images():
    g, e1, e2 = (FibSurfaceClass(v, "g") for v in np.eye(3, dtype=int))
    assert fiber_reflection_pullback(e1) == FibSurfaceClass((2, -1, 2), "g")
    assert fiber_reflection_pullback(g) == g
    assert fiber_reflection_pullback(e2) == e2


def test_pairings():
    assert surf_pair(E, E) == -1
    hp = FibSurfaceClass((1, 0, 0), "h'")
    assert surf_pair(hp, hp) == 2
    assert surf_pair(hp.to_h(), hp.to_h()) == 2
    img = bertini_pullback(E)
    assert surf_pair(img, img) == -1
    with pytest.raises(BasisMismatch):
        surf_pair(E, hp)
    with pytest.raises(BasisMismatch):
        bertini_pullback(FibSurfaceClass((1, 0, 0), "g"))


def test_coefficient_action():
    assert bertini_coefficients(3, 4, 1) == (1, 0, 1)
    assert bertini_coefficients(5, 5, 0) == (5, 5, 0)
    assert bertini_pullback(marked_restriction(4, 3, 2)) == marked_restriction(6, 7, 2)


def test_dp2_line_degrees():
    assert dp2_line_degrees(DP2Class(1, 0, 0)) == (1, 1)
    assert dp2_line_degrees(DP2Class(2, 1, 1)) == (1, 1)


def test_mult_sum_bound_examples():
    assert mult_sum_bound(2, 0, (1, 0)) == 5 == lemma_bound(2)
    assert mult_sum_bound(2, 3, (0, 0)) == 5
    assert mult_sum_bound(3, 0, 1) == 6
    with pytest.raises(ValueError):
        mult_sum_bound(2, 0, (2, 0))  # C.L2 = -2
    with pytest.raises(ValueError):
        mult_sum_bound(1, 0, 2)


def test_irreducible_bound_is_max_over_k():
    for n in range(1, 8):
        vals = [mult_sum_bound(n, 0, k) for k in range(0, n + 1)]
        assert max(vals) == 2 * n


@given(coords)
def test_involutions(c):
    x = FibSurfaceClass(c)
    assert bertini_pullback(bertini_pullback(x)) == x
    g = FibSurfaceClass(c, "g")
    assert fiber_reflection_pullback(fiber_reflection_pullback(g)) == g
    p = FibSurfaceClass(c, "h'")
    assert bertini_pullback(bertini_pullback(p)) == p
    assert p.to_h().to_prime() == p


@given(coords, coords)
def test_isometry(a, b):
    x, y = FibSurfaceClass(a), FibSurfaceClass(b)
    assert surf_pair(bertini_pullback(x), bertini_pullback(y)) == surf_pair(x, y)
    assert surf_pair(x.to_prime(), y.to_prime()) == surf_pair(x, y)
    gx, gy = FibSurfaceClass(a, "g"), FibSurfaceClass(b, "g")
    assert surf_pair(fiber_reflection_pullback(gx), fiber_reflection_pullback(gy)) == surf_pair(gx, gy)


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
def test_line_degrees_match_form(n, k1, k2):
    c = DP2Class(n, k1, k2)
    l1, l2 = DP2Class(0, -1, 0), DP2Class(0, 0, -1)
    assert dp2_line_degrees(c) == (surf_pair(c, l1), surf_pair(c, l2))


def test_locform_grid():
    # nu = mult + k1, nu~ = mult' + k1 + m with mult + mult' <= C.L1 (the residual meets L1 there)
    for n in range(1, 9):
        for m in range(0, 4):
            for k1 in range(0, n + 1):
                for k2 in range(0, 2 * n + 1):
                    cl1, cl2 = dp2_line_degrees(DP2Class(n, k1, k2))
                    if cl1 < 0 or cl2 < 0:
                        continue
                    for a in range(0, int(cl1) + 1):
                        b = int(cl1) - a
                        assert (a + k1) + (b + k1 + m) <= Fraction(5 * n, 2) + m

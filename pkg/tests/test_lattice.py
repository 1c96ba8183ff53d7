from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conerigid.lattice import (
    CycleClass,
    DivisorClass,
    DivisorClassX,
    ModelChoiceError,
    ModelMismatch,
    anticanonical,
    c2,
    choose_model,
    div_cycle_pair,
    div_div_cycle,
    div_triple,
    fiber,
    model_transfer,
    other_fiber,
    rat,
    section,
    vertical_line,
)

small = st.integers(-20, 20)
divisors = st.builds(lambda n, m: DivisorClass("V", n, m), small, small)


def test_rat_rejects_floats_and_decimals():
    assert rat("3/6") == Fraction(1, 2)
    assert rat(4) == 4
    for bad in (0.5, "0.5", "1e3", True):
        with pytest.raises((TypeError, ValueError)):
            rat(bad)


def test_triple_examples():
    d = DivisorClass("V", 1, 1)
    assert div_triple(d, d, other_fiber()) == 6
    d2 = DivisorClass("V", 2, 0)
    assert div_triple(d2, d2, anticanonical()) == 16
    for x in (anticanonical(), fiber(), other_fiber(), DivisorClass("V", 3, -7)):
        assert div_triple(fiber(), fiber(), x) == 0


def test_basis_table_from_relations():
    # (-K)^3 from D^2.(-K) at n=1, m=0; mixed entries from F2 = -K - F1
    mk, f1, f2 = anticanonical(), fiber(), other_fiber()
    assert div_triple(mk, mk, mk) == 4
    assert div_triple(mk, mk, f1) == 2
    assert div_triple(mk, f1, f2) == 2
    # the fibre F1 restricted to itself: F1^2 = 0
    assert div_triple(f1, f1, mk) == 0
    # on V the other pencil does not square to zero
    assert div_triple(f2, f2, f1) == 2
    assert div_triple(f2, f2, f2) == -2


def test_closed_forms_symbolically():
    n, m = sp.symbols("n m")
    # expand (n(-K) + m F1)^2 . X with the basis table as an independent polynomial oracle
    table = {(0, 0, 0): 4, (0, 0, 1): 2, (0, 1, 1): 0, (1, 1, 1): 0}
    D = (n, m)

    def tri(a, b, c):
        return sp.expand(sum(a[i] * b[j] * c[k] * table[tuple(sorted((i, j, k)))]
                             for i in range(2) for j in range(2) for k in range(2)))

    assert tri(D, D, (1, -1)) == sp.expand(2 * n**2 + 4 * m * n)
    assert tri(D, D, (1, 0)) == sp.expand(4 * n**2 + 4 * m * n)


def test_cycle_pairings():
    assert div_cycle_pair(fiber(), section()) == 1
    assert div_cycle_pair(other_fiber(), section()) == -1
    assert div_cycle_pair(anticanonical(), vertical_line()) == 1
    assert div_cycle_pair(other_fiber(), vertical_line()) == 1
    assert div_cycle_pair(anticanonical(), c2()) == 24
    for alpha in range(6):
        assert div_cycle_pair(anticanonical(), CycleClass(1, alpha)) == alpha


def test_div_div_cycle_recovers_pairings():
    d = DivisorClass("V", 2, 1)
    cyc = div_div_cycle(d, d)
    assert div_cycle_pair(anticanonical(), cyc) == div_triple(d, d, anticanonical())
    assert div_cycle_pair(fiber(), cyc) == div_triple(d, d, fiber())


def test_model_mismatch():
    with pytest.raises(ModelMismatch):
        div_triple(DivisorClass("V", 1, 0), DivisorClass("U", 1, 0), DivisorClass("V", 1, 0))
    with pytest.raises(ModelMismatch):
        div_cycle_pair(DivisorClass("U", 1, 0), section("V"))


def test_model_transfer_examples():
    assert model_transfer(DivisorClassX(5, 3), "V") == DivisorClass("V", 3, 2)
    assert model_transfer(DivisorClassX(2, 2), "V") == DivisorClass("V", 2, 0)
    with pytest.raises(ModelChoiceError, match=r"use U with \(n=1, m=3\)"):
        model_transfer(DivisorClassX(1, 4), "V")
    assert choose_model(DivisorClassX(2, 2)).model == "V"
    assert choose_model(DivisorClassX(1, 4)) == DivisorClass("U", 1, 3)


def test_u_model_mirrors_v():
    for n in range(4):
        for m in range(4):
            dv, du = DivisorClass("V", n, m), DivisorClass("U", n, m)
            assert div_triple(dv, dv, dv) == div_triple(du, du, du)
            assert div_cycle_pair(dv, section("V")) == div_cycle_pair(du, section("U"))


@given(divisors, divisors, divisors)
def test_triple_symmetric(a, b, c):
    v = div_triple(a, b, c)
    assert v == div_triple(b, a, c) == div_triple(c, b, a) == div_triple(a, c, b)


@given(divisors, divisors, divisors, small)
def test_triple_linear(a, b, c, k):
    assert div_triple(a + k * b, c, c) == div_triple(a, c, c) + k * div_triple(b, c, c)


@given(st.integers(-30, 30), st.integers(-30, 30))
def test_transfer_round_trip(a, b):
    x = DivisorClassX(a, b)
    d = choose_model(x)
    assert d.m >= 0
    assert d.to_x() == x
    assert d.n == x.threshold

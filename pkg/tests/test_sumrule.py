import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from brauerloop import qkzsolve
from brauerloop.polyring import Poly, parse_poly
from brauerloop.sumrule import (
    NotAntisymmetric, commuting_degree, compute_zsum, determinant, localization_check_points,
    localization_mdeg, pfaffian, sector_identity, sumrule_report, weyl_symmetric, zformula,
)


def test_pfaffian_two_by_two():
    a = mpq(5, 3)
    assert pfaffian([[0, a], [-a, 0]]) == a


def test_pfaffian_rejects_bad_input():
    with pytest.raises(NotAntisymmetric):
        pfaffian([[0, 1], [1, 0]])
    with pytest.raises(NotAntisymmetric):
        pfaffian([[0, 1, 2], [-1, 0, 3], [-2, -3, 0]])


@given(st.integers(1, 3).flatmap(lambda k: st.lists(
    st.fractions(min_value=-9, max_value=9, max_denominator=6), min_size=k * (2 * k - 1), max_size=k * (2 * k - 1))))
@settings(max_examples=40, deadline=None)
def test_pfaffian_squared_is_determinant(vals):
    n = {1: 2, 6: 4, 15: 6}[len(vals)]
    M = [[mpq(0)] * n for _ in range(n)]
    it = iter(vals)
    for i in range(n):
        for j in range(i + 1, n):
            v = next(it)
            M[i][j] = mpq(v.numerator, v.denominator)
            M[j][i] = -M[i][j]
    pf = pfaffian(M)
    assert pf * pf == determinant(M)
    oracle = sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in r] for r in M]).det()
    assert determinant(M) == mpq(int(oracle.p), int(oracle.q))


def test_hand_computed_sums():
    sol = qkzsolve.solve("i", 2)
    assert compute_zsum(sol) == parse_poly("2*(5*A^2-2*z1^2-2*z2^2)", sol.vt)
    one = qkzsolve.solve("i", 1)
    assert compute_zsum(one) == Poly.const(one.vt, 2)
    c3 = qkzsolve.solve("c", 3)
    Z = compute_zsum(c3)
    assert Z == sum((c.substitute({"e": 0}) for c in c3.components.values()), Poly(c3.vt))
    assert weyl_symmetric(Z, 3, even=True)


def test_closed_form_examples():
    assert zformula("i", 2) == parse_poly("2*(5*A^2-2*z1^2-2*z2^2)", zformula("i", 2).vt)
    assert zformula("i", 1) == Poly.const(zformula("i", 1).vt, 2)
    assert zformula("p", 2) == Poly.const(zformula("p", 2).vt, 2)


def test_localization_examples():
    loc = localization_mdeg("i", 2)
    assert loc == parse_poly("2*A", loc.vt)
    i4, o8 = localization_mdeg("i", 4), localization_mdeg("o", 8)
    assert o8 == i4 * i4
    assert localization_check_points("i", 4, i4)
    assert localization_check_points("p", 3, localization_mdeg("p", 3))


@pytest.mark.parametrize("btype,L", [(t, L) for t in "pico" for L in range(1, 4)] + [("m", 1), ("m", 2)])
def test_sum_rules(btype, L):
    rep = sumrule_report(btype, L)
    assert rep.ok, rep.flags


def test_sector_identity_examples():
    rep = sector_identity("i", 1)
    assert rep["ok"] and rep["constant"] == "2"
    rep = sector_identity("c", 1)
    assert rep["ok"] and rep["power_of_two"]


def test_commuting_degrees():
    assert commuting_degree(2) == 1
    assert commuting_degree(4) == 11
    with pytest.raises(ValueError):
        commuting_degree(3)

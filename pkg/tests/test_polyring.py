import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from brauerloop.polyring import (
    DuplicateNode, Inconsistent, InsufficientNodes, InterpolationMismatch, LinForm, LinFrac,
    NotDivisible, Poly, VarTable, exact_div, lagrange_interpolate, parse_poly, poly_arith, rat,
    solve_sparse_linear_exact,
)

VT = VarTable.standard(2)
NAMES = VT.names
SYMS = sympy.symbols(" ".join(NAMES))


def P(text):
    return parse_poly(text, VT)


def to_sympy(p: Poly):
    return sympy.expand(sympy.sympify(str(p).replace("^", "**"), locals=dict(zip(NAMES, SYMS))))


terms = st.lists(
    st.tuples(st.tuples(*[st.integers(0, 2)] * len(NAMES)),
              st.fractions(min_value=-5, max_value=5, max_denominator=4)),
    max_size=5)


def build(ts):
    return Poly.from_terms(VT, [(e, rat(c)) for e, c in ts])


polys = terms.map(build)


def test_rational_canonical():
    x = rat("-6/4")
    assert (x.numerator, x.denominator) == (-3, 2)
    assert rat(0).denominator == 1


def test_difference_of_squares():
    assert P("(A+z1)*(A-z1)") == P("A^2-z1^2")


def test_r_expansion():
    assert P("(A+z1)*(2*A-z1-e)") == P("2*A^2+A*z1-A*e-z1^2-z1*e")


def test_additive_inverse_is_empty():
    p = P("3*A*z1-z2+1/2")
    z = p + (-p)
    assert z.t == {} and not z


def test_poly_arith_kinds():
    a, b = P("A+z1"), P("A-z1")
    assert poly_arith(a, b, "add") == P("2*A")
    assert poly_arith(a, b, "sub") == P("2*z1")
    assert poly_arith(a, b, "mul") == P("A^2-z1^2")
    with pytest.raises(ValueError):
        poly_arith(a, b, "div")


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(polys, polys)
@settings(max_examples=60, deadline=None)
def test_against_sympy(a, b):
    assert to_sympy(a * b - a) == sympy.expand(to_sympy(a) * to_sympy(b) - to_sympy(a))


@given(polys)
@settings(max_examples=60, deadline=None)
def test_text_and_json_round_trip(a):
    assert parse_poly(str(a), VT) == a
    assert Poly.from_json(a.to_json(), VT) == a


@given(polys, polys)
@settings(max_examples=40, deadline=None)
def test_exact_div_of_product(a, b):
    if not b:
        return
    assert exact_div(a * b, b) == a


def test_exact_div_examples():
    assert exact_div(P("A^2-4*z1^2"), P("A+2*z1")) == P("A-2*z1")
    assert exact_div(P("(A+z1)*(2*A-z1-e)"), P("A+z1")) == P("2*A-z1-e")
    with pytest.raises(NotDivisible):
        exact_div(P("A^2+1"), P("A+1"))
    with pytest.raises(ZeroDivisionError):
        exact_div(P("A"), Poly(VT))


def test_substitution_reflections():
    assert P("A+z1+z2").substitute({"z2": -Poly.var(VT, "z2")}) == P("A+z1-z2")
    p = P("A-e-z1-z2").substitute({"z1": -Poly.var(VT, "z1") - Poly.var(VT, "e")})
    assert p == P("A+z1-z2")
    num, den = P("A-e"), P("A-e/2")
    assert num.substitute({"e": 0}) == den.substitute({"e": 0}) == P("A")


def test_interpolation_constant_nodes():
    nodes = [Poly.const(VT, k) for k in (0, 1, 2)]
    vals = [Poly.const(VT, k * k) for k in (0, 1, 2)]
    assert lagrange_interpolate(nodes, vals, "z1", 2) == P("z1^2")


def test_interpolation_reconstructs_psi21():
    psi = P("2*(A-e-2*z1)*(A+2*z2)*(A+z1-z2)")
    nodes = [P("A+z1"), P("-A-z1"), P("-A/2"), P("A")]
    vals = [psi.substitute({"z2": n}) for n in nodes]
    assert lagrange_interpolate(nodes, vals, "z2", 2) == psi


def test_interpolation_errors():
    psi = P("z1^3")
    nodes = [Poly.const(VT, k) for k in range(4)]
    vals = [psi.substitute({"z1": n}) for n in nodes]
    with pytest.raises((InterpolationMismatch, NotDivisible)):
        lagrange_interpolate(nodes, vals, "z1", 2)
    with pytest.raises(InsufficientNodes):
        lagrange_interpolate(nodes[:2], vals[:2], "z1", 2)
    with pytest.raises(DuplicateNode):
        lagrange_interpolate([nodes[0], nodes[0]], vals[:2], "z1", 1)


def test_linear_solver_examples():
    eye = [{0: 1}, {1: 1}, {2: 1}]
    sol = solve_sparse_linear_exact(eye, 3, [1, 2, 3])
    assert sol.particular == {0: 1, 1: 2, 2: 3} and sol.nullity == 0
    sol = solve_sparse_linear_exact([{0: 1, 1: 1}], 2)
    assert sol.nullity == 1 and sol.nullspace[0] == {0: -1, 1: 1}
    with pytest.raises(Inconsistent):
        solve_sparse_linear_exact([{0: 1}, {0: 2}], 1, [1, 1])


@given(st.lists(st.dictionaries(st.integers(0, 4), st.integers(-3, 3), max_size=4), max_size=6))
@settings(max_examples=50, deadline=None)
def test_nullspace_matches_sympy(rows):
    sol = solve_sparse_linear_exact(rows, 5)
    M = sympy.Matrix([[r.get(c, 0) for c in range(5)] for r in rows]) if rows else sympy.zeros(0, 5)
    assert sol.nullity == 5 - (M.rank() if rows else 0)
    for v in sol.nullspace:
        for r in rows:
            assert sum(mpq(x) * v.get(c, 0) for c, x in r.items()) == 0


def test_linfrac_cancels():
    f = LinFrac.ratio(P("(A+z1)*(A-z1)"), [P("A+z1")])
    assert f.is_poly() and f.clear() == P("A-z1")
    g = LinFrac.ratio(P("1"), [P("2*A+2*z1")]) + LinFrac.ratio(P("1"), [P("A+z1")])
    assert g == LinFrac.ratio(P("3"), [P("2*A+2*z1")])
    c, f = LinForm.normalize(P("2*A+4*z1"))
    assert c == 4 and f == LinForm.normalize(P("A+2*z1"))[1]

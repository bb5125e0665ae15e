import pytest
from hypothesis import given, settings, strategies as st

from brauerloop.linkpat import PatternSpace
from brauerloop.polyring import Poly, VarTable, parse_poly, rat
from brauerloop.rkops import (
    InvalidKind, LoopOperator, build_operator, divided_difference, tau,
    verify_algebra_relations, verify_operator_identities,
)

VT = VarTable(["z", "w", "A", "e"])
Z, W, A = (Poly.var(VT, v) for v in "zwA")


def op(kind, btype, L):
    return build_operator(kind, PatternSpace(btype, L), VT)


@pytest.mark.parametrize("btype", "picom")
def test_r_at_zero_is_identity(btype):
    space = PatternSpace(btype, 3)
    R0 = build_operator(("R", 1, Poly(VT)), space, VT)
    assert not R0.mismatches(LoopOperator.identity(space, VT))


def test_k_at_zero_is_identity():
    space = PatternSpace("i", 2)
    for kind in ("K0", "KL"):
        assert not build_operator((kind, Poly(VT)), space, VT).mismatches(LoopOperator.identity(space, VT))


def test_invalid_kind():
    with pytest.raises(InvalidKind):
        op(("sigma",), "i", 2)
    with pytest.raises(InvalidKind):
        op(("X", 1), "i", 2)


def test_named_identities():
    assert not any(verify_operator_identities(PatternSpace("i", 2), ("unitarity",)).values())
    assert not any(verify_operator_identities(PatternSpace("c", 3), ("ybe",)).values())
    assert not any(verify_operator_identities(PatternSpace("m", 2), ("reflection",)).values())
    assert not any(verify_operator_identities(PatternSpace("p", 3), ("rpoint",)).values())


@pytest.mark.parametrize("btype", "picom")
@pytest.mark.parametrize("L", [2, 3, 4])
def test_all_identities(btype, L):
    rep = verify_operator_identities(PatternSpace(btype, L))
    assert not any(rep.values()), rep


def test_a_broken_identity_is_reported():
    space = PatternSpace("i", 2)
    R = build_operator(("R", 1, Z), space, VT)
    assert R.mismatches(LoopOperator.identity(space, VT))


def test_named_relations():
    assert not any(verify_algebra_relations("i", 3).values())
    assert not any(verify_algebra_relations("o", 2).values())
    assert not any(verify_algebra_relations("i", 4).values())


@pytest.mark.parametrize("btype", "picom")
@pytest.mark.parametrize("L", range(2, 6))
def test_all_relations(btype, L):
    rep = verify_algebra_relations(btype, L)
    assert rep and not any(rep.values()), {k: v for k, v in rep.items() if v}


VT2 = VarTable.standard(2)


def P(text):
    return parse_poly(text, VT2)


def test_divided_difference_examples():
    assert divided_difference(P("z1"), 1, btype="c", L=2) == P("1")
    assert divided_difference(P("z2^2"), 2, btype="c", L=2) == P("0")
    # type c with s = 0 is reached by specializing e
    f = divided_difference(P("z1"), 0, btype="c", L=2).substitute({"e": 0})
    assert f == P("-1")


def test_tau_reflections():
    assert tau(P("A+z1+z2"), 2, "i", 2) == P("A+z1-z2")
    assert tau(P("A-e-z1-z2"), 0, "c", 2) == P("A+z1-z2")
    assert tau(tau(P("z1^2*z2+A"), 1, "c", 2), 1, "c", 2) == P("z1^2*z2+A")


coeffs = st.integers(-3, 3)
polys2 = st.lists(st.tuples(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1), st.integers(0, 1)),
                            coeffs), max_size=4).map(lambda ts: Poly.from_terms(VT2, [(e, rat(c)) for e, c in ts]))


@given(polys2, polys2, st.sampled_from([0, 1, 2]), st.sampled_from("ico"))
@settings(max_examples=50, deadline=None)
def test_leibniz_rule(f, g, i, btype):
    d = lambda p: divided_difference(p, i, btype=btype, L=2)  # noqa: E731
    assert d(f * g) == d(f) * g + tau(f, i, btype, 2) * d(g)


@given(polys2, st.sampled_from([0, 1, 2]), st.sampled_from("ic"))
@settings(max_examples=40, deadline=None)
def test_invariants_are_killed(f, i, btype):
    sym = f + tau(f, i, btype, 2)
    assert divided_difference(sym, i, btype=btype, L=2) == Poly(VT2)


def test_primed_divided_difference_clears():
    psi = P("2*(A-e-2*z1)*(A+2*z2)")
    out = divided_difference(psi, 1, kind="primed", btype="i", L=2)
    # (A + a) d (A + a)^-1 applied to (A + a) g is (A + a) d g
    a = P("z1-z2")
    g = divided_difference(psi * (P("A") + a), 1, kind="primed", btype="i", L=2)
    assert g.is_poly() and g.clear() == (P("A") + a) * divided_difference(psi, 1, btype="i", L=2)
    assert out is not None

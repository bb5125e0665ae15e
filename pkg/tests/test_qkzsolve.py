import json

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from brauerloop import qkzsolve
from brauerloop.acceptance import REFERENCE, reference_entries, reference_poly
from brauerloop.linkpat import LinkPattern, PatternSpace
from brauerloop.polyring import Poly, parse_poly
from brauerloop.qkzsolve import (
    QkzSolution, base_solution, eps2A_factorization, evaluate_point, joint_gcd_is_trivial,
    nullspace_dimension, solve, verify_recurrences, verify_solution,
)


def P(sol, text):
    return parse_poly(text, sol.vt)


@pytest.mark.parametrize("btype,L", [x for x in REFERENCE if x != ("c", 4)])
def test_reference_polynomials(btype, L):
    sol = solve(btype, L)
    entries = [e for e in reference_entries() if e["type"] == btype and len(e["pattern"]) == L]
    assert entries
    for e in entries:
        assert sol[e["pattern"]] == reference_poly(e, sol.vt), e["pattern"]


def test_reference_file_covers_every_component():
    for btype, L in REFERENCE:
        names = {e["pattern"] for e in reference_entries() if e["type"] == btype and len(e["pattern"]) == L}
        if btype == "c" and L == 4:
            assert names == {"3412", "2143", "4321"}
        else:
            assert len(names) == len(PatternSpace(btype, L))


def test_printed_identified_two_site():
    sol = solve("i", 2, "linear")
    assert sol["bb"] == P(sol, "4*(2*A-e+z2-z1)*(A+z1-z2)")
    assert sol["21"] == P(sol, "2*(A-e-2*z1)*(A+2*z2)")


def test_printed_mixed_two_site():
    sol = solve("m", 2, "linear")
    s = "(e/2)"
    assert sol["21"] == P(sol, f"2*(A-{s})*(A+2*z2)*(4*A^2-5*A*{s}+2*{s}^2+2*{s}*z1+2*z1^2-2*z2^2)")
    assert sol["rr"] == P(sol, f"4*(2*A-{s}+z1+z2)*(2*A-2*{s}-z1+z2)*(A-{s}-z1-z2)*(A+z1-z2)")


def test_base_solutions():
    o1 = base_solution("o", 1)
    assert o1["l"] == P(o1, "2*(A+2*z1)") and o1["r"] == P(o1, "2*(A-e/2-2*z1)")
    assert base_solution("c", 1)["*"] == Poly.const(base_solution("c", 1).vt, 2)
    assert base_solution("i", 0)[""] == Poly.const(base_solution("i", 0).vt, 1)
    with pytest.raises(ValueError):
        base_solution("i", 2)


@pytest.mark.parametrize("btype,L", [("i", 2), ("i", 3), ("c", 3), ("o", 2), ("m", 2), ("p", 3)])
def test_strategies_agree(btype, L):
    assert solve(btype, L, "linear") == solve(btype, L, "recur")


@pytest.mark.parametrize("btype,L", [("i", 2), ("i", 3), ("c", 3), ("o", 2), ("m", 2)])
def test_one_dimensional_nullspace(btype, L):
    assert nullspace_dimension(btype, L) == 1


def test_unknown_method():
    with pytest.raises(ValueError):
        solve("i", 2, "magic")


@pytest.mark.parametrize("btype,L", [(t, L) for t in "picom" for L in range(1, 4)])
def test_verify_solution(btype, L):
    rep = verify_solution(solve(btype, L))
    assert rep["ok"], {k: v for k, v in rep.items() if v and k != "ok"}


def test_verify_solution_catches_corruption():
    sol = solve("i", 2)
    bad = QkzSolution("i", 2, sol.vt, dict(sol.components))
    pat = LinkPattern.parse("i", "21")
    bad.components[pat] = bad.components[pat] * 2
    assert not verify_solution(bad)["ok"]


def test_named_component_facts():
    sol = solve("i", 3)
    assert sol["bbb"] == P(sol, "8*(2*A-e+z2-z1)*(A+z1-z2)*(2*A-e+z3-z1)*(A+z1-z3)*(2*A-e+z3-z2)*(A+z2-z3)")
    i2 = solve("i", 2)
    assert i2["21"].substitute({"z2": P(i2, "-A/2")}) == Poly(i2.vt)
    m2 = solve("m", 2)
    psi = m2["21"]
    assert psi.substitute({"z1": P(m2, "-z1-e/2")}) == psi


@pytest.mark.parametrize("btype,L", [(t, L) for t in "picom" for L in range(2, 4)])
def test_recurrences(btype, L):
    rep = verify_recurrences(solve(btype, L), solve(btype, L - 1), solve(btype, L - 2))
    assert rep["ok"], rep


def test_recurrence_catches_wrong_lower_solution():
    low = solve("i", 1)
    wrong = QkzSolution("i", 1, low.vt, {p: v * 3 for p, v in low.components.items()})
    assert not verify_recurrences(solve("i", 3), solve("i", 2), wrong)["ok"]


def test_nonimage_components_vanish():
    sol = solve("i", 2)
    assert sol["bb"].substitute({"z2": P(sol, "A+z1")}) == Poly(sol.vt)


def test_evaluate_point_example():
    vals = evaluate_point("i", 2, {"z1": 1, "z2": 2, "A": 7})
    assert vals[LinkPattern.parse("i", "21")] == 110


def symbolic_values(sol, point):
    sub = {k: v for k, v in point.items()}
    sub["e"] = 0
    return {p: c.evaluate({k: mpq(v) for k, v in sub.items()}) for p, c in sol.components.items()}


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=5)


@given(st.sampled_from([("i", 2), ("i", 3), ("c", 3), ("o", 2), ("m", 2), ("p", 3)]),
       st.lists(rationals, min_size=3, max_size=3), st.integers(3, 40))
@settings(max_examples=25, deadline=None)
def test_numeric_descent_matches_symbolic(inst, zs, A):
    btype, L = inst
    point = {f"z{i+1}": mpq(zs[i].numerator, zs[i].denominator) for i in range(L)}
    point["A"] = mpq(A)
    try:
        num = evaluate_point(btype, L, point)
    except qkzsolve.DegenerateNode:
        return
    sym = symbolic_values(solve(btype, L), point)
    for p in PatternSpace(btype, L):
        assert num.get(p, 0) == sym.get(p, 0)


def test_homogeneity_scaling():
    pt = {"z1": mpq(1), "z2": mpq(2), "z3": mpq(-3), "A": mpq(11)}
    base = evaluate_point("i", 3, pt)
    scaled = evaluate_point("i", 3, {k: 3 * v for k, v in pt.items()})
    for p, v in base.items():
        assert scaled[p] == v * 3 ** (3 * 2)


def test_eps2A_examples():
    sol = solve("i", 2)
    assert sol["21"].substitute({"e": P(sol, "2*A")}) == P(sol, "-2*(A+2*z1)*(A+2*z2)")
    for btype, L in [("i", 3), ("c", 3), ("o", 2), ("m", 3), ("p", 3)]:
        assert eps2A_factorization(solve(btype, L))["ok"]


def test_primitivity():
    assert joint_gcd_is_trivial(list(solve("c", 3).components.values()))
    sol = solve("i", 2)
    assert not joint_gcd_is_trivial([c * P(sol, "A+z1") for c in sol.components.values()])


@pytest.mark.parametrize("btype,L", [("i", 3), ("o", 2), ("c", 0)])
def test_json_round_trip(btype, L):
    sol = solve(btype, L)
    text = sol.to_json()
    back = QkzSolution.from_json(text)
    assert back == sol and back.to_json() == text
    assert json.loads(text)["degree"] == sol.degree


def test_factored_text_parses_back():
    sol = solve("i", 2)
    for text in ("2*(A - e - 2*z1)*(A + 2*z2)", str(sol["21"])):
        assert P(sol, text) == sol["21"]

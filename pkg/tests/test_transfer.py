import pytest
from gmpy2 import mpq

from brauerloop import qkzsolve
from brauerloop.qkzsolve import QkzSolution
from brauerloop.transfer import (
    build_transfer, commuting_check, eigenvector_identity, stochastic, verify_transfer,
)


def test_single_pattern_space_is_one():
    T = build_transfer("c", 2)
    assert len(T.space) == 1
    pt = {"z1": mpq(3), "z2": mpq(5), "A": mpq(7), "e": mpq(0), "w": mpq(2)}
    assert T.numeric(pt) == [[1]]


@pytest.mark.parametrize("btype,L", [("p", 2), ("m", 2), ("i", 3), ("o", 2)])
def test_stochastic(btype, L):
    assert stochastic(build_transfer(btype, L))


@pytest.mark.parametrize("btype,L", [("i", 2), ("c", 3), ("p", 3), ("o", 2), ("m", 2)])
def test_eigenvector(btype, L):
    assert eigenvector_identity(build_transfer(btype, L), qkzsolve.solve(btype, L))


def test_eigenvector_rejects_wrong_vector():
    sol = qkzsolve.solve("i", 2)
    comps = dict(sol.components)
    first = sorted(comps)[0]
    comps[first] = comps[first] * 2
    assert not eigenvector_identity(build_transfer("i", 2), QkzSolution("i", 2, sol.vt, comps))


def test_commuting_examples():
    pt = {"z1": mpq(3), "z2": mpq(5), "A": mpq(7), "e": mpq(0)}
    assert commuting_check("i", 2, 1, 2, pt)
    pt3 = dict(pt, z3=mpq(-4))
    assert commuting_check("p", 3, 1, 2, pt3)


@pytest.mark.parametrize("btype", "picom")
@pytest.mark.parametrize("L", [1, 2, 3])
def test_full_report(btype, L):
    rep = verify_transfer(build_transfer(btype, L), qkzsolve.solve(btype, L), seed=L)
    assert rep["ok"], rep

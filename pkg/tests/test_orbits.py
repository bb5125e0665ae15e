import itertools
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from brauerloop import orbits
from brauerloop.acceptance import PRINTED_PI_LESS, printed_matrix
from brauerloop.linkpat import PatternSpace
from brauerloop.orbits import (
    Involution, IrrationalSquareRoot, MalformedInput, SquareZeroMatrix, build_pi_less,
    canonical_reduce, component_dims, conj, dimoneless_check, enumerate_involutions,
    is_typed_borel, lift_involution, link_pattern_lifts, matmul, maxf_report, orbit_label,
    random_typed_borel, rank_matrix, restricted_diagonal, underline, verify_defeq,
)


def brute_involutions(a, N):
    """Oracle: filter all permutations by the defining conditions."""
    out = set()
    for p in itertools.permutations(range(1, N + 1)):
        if any(p[p[i] - 1] != i + 1 for i in range(N)):
            continue
        if a in ("i", "c"):
            if any(p[i] != N - p[N - i - 1] + 1 for i in range(N)):
                continue
            if a == "c" and any(p[i] == N - i for i in range(N)):
                continue
        out.add(p)
    return out


@pytest.mark.parametrize("a", "ic")
@pytest.mark.parametrize("N", [2, 4, 6])
def test_enumeration_matches_brute_force(a, N):
    assert {p.images for p in enumerate_involutions(a, N)} == brute_involutions(a, N)


def test_printed_counts():
    assert len(enumerate_involutions("i", 4)) == 6
    assert len(enumerate_involutions("c", 4)) == 3
    assert len(enumerate_involutions("i", 2)) == 2


@pytest.mark.parametrize("a,label", sorted(PRINTED_PI_LESS))
def test_printed_canonical_forms(a, label):
    assert build_pi_less(Involution.parse(label, a)).entries == printed_matrix(a, label)


def test_printed_label_typo_is_rejected():
    with pytest.raises(MalformedInput):
        Involution.parse("(563421)", "c")


@pytest.mark.parametrize("a", "ic")
@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_canonical_forms_are_square_zero_and_typed(a, N):
    for pi in enumerate_involutions(a, N):
        X = build_pi_less(pi)
        X.check()
        assert not any(any(r) for r in matmul(X.entries, X.entries))


@pytest.mark.parametrize("a", "ic")
@pytest.mark.parametrize("N", [2, 4, 6])
def test_label_inverts_builder(a, N):
    for pi in enumerate_involutions(a, N):
        assert orbit_label(build_pi_less(pi)) == pi
        got, U = canonical_reduce(build_pi_less(pi))
        assert got == pi and U == orbits.identity(N)


def test_zero_matrix_label():
    pi = orbit_label(SquareZeroMatrix(orbits.zeros(4), "i"))
    assert pi.fixed() == [1, 2, 3, 4]


def test_malformed_inputs():
    with pytest.raises(MalformedInput):
        orbit_label(SquareZeroMatrix([[0, 1], [1, 0]], "i"))
    with pytest.raises(MalformedInput):
        orbit_label(SquareZeroMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]]))
    with pytest.raises(MalformedInput):
        orbit_label(SquareZeroMatrix([[0, 1], [0, 0]], "c"))
    with pytest.raises(MalformedInput):
        SquareZeroMatrix([[0, 1]], "i")


def reduce_with_rescale(X):
    for _ in range(8):
        try:
            return canonical_reduce(X)
        except IrrationalSquareRoot as exc:
            X = SquareZeroMatrix([[v * exc.value for v in r] for r in X.entries], X.btype)
    raise AssertionError("rescaling did not clear the square roots")


@given(st.sampled_from("ic"), st.sampled_from([2, 4, 6, 8]), st.integers(0, 10 ** 6))
@settings(max_examples=100, deadline=None)
def test_label_is_conjugation_invariant(a, N, seed):
    rng = random.Random(seed)
    pi = rng.choice(enumerate_involutions(a, N))
    U = random_typed_borel(N, rng)
    assert is_typed_borel(U)
    X = SquareZeroMatrix(conj(U, build_pi_less(pi).entries), a)
    assert orbit_label(X) == pi
    got, V = reduce_with_rescale(X)
    assert got == pi and is_typed_borel(V)


def test_rank_increasing_block():
    X = SquareZeroMatrix([[0, 4], [0, 0]], "i")
    pi, U = canonical_reduce(X)
    assert str(pi) == "(21)"
    assert U == [[mpq(1, 2), 0], [0, mpq(2)]]


def test_square_diagonal_conjugation():
    rng = random.Random(3)
    for a in "ic":
        for pi in enumerate_involutions(a, 6):
            D = orbits.identity(6)
            for i in range(3):
                d = mpq(rng.choice([1, 4, 9, 25]), rng.choice([1, 4, 9]))
                D[i][i], D[5 - i][5 - i] = d, 1 / d
            X = SquareZeroMatrix(conj(D, build_pi_less(pi).entries), a)
            got, U = canonical_reduce(X)
            assert got == pi and conj(U, X.entries) == build_pi_less(pi).entries


def test_irrational_root_is_reported():
    with pytest.raises(IrrationalSquareRoot) as exc:
        canonical_reduce(SquareZeroMatrix([[0, 2], [0, 0]], "i"))
    assert exc.value.level == 2 and exc.value.value == 2


def test_matrix_json_round_trip():
    X = SquareZeroMatrix(conj(random_typed_borel(6, random.Random(5)),
                              build_pi_less(Involution.parse("(351624)", "i")).entries), "i")
    assert SquareZeroMatrix.from_json_obj(X.to_json_obj()).entries == X.entries


def rank_oracle(M, i, j):
    import sympy
    N = len(M)
    sub = [[sympy.Rational(int(M[r][c].numerator), int(M[r][c].denominator)) for c in range(j)]
           for r in range(i - 1, N)]
    return sympy.Matrix(sub).rank() if sub and sub[0] else 0


def test_rank_matrix_against_sympy():
    X = conj(random_typed_borel(6, random.Random(9)), build_pi_less(Involution.parse("(351624)", "i")).entries)
    rm = rank_matrix(X)
    for i in range(1, 7):
        for j in range(1, 7):
            assert rm[i - 1][j - 1] == rank_oracle(X, i, j)


def test_dimension_examples():
    dims = {str(p): d for p, d in component_dims("i", 4).items()}
    assert dims == {"(1234)": 4, "(1324)": 5, "(2143)": 6, "(3412)": 5, "(4231)": 5, "(4321)": 6}
    dims = {str(p): d for p, d in component_dims("c", 4).items()}
    assert dims == {"(1234)": 2, "(2143)": 4, "(3412)": 3}


@pytest.mark.parametrize("a", "ic")
@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_maximal_dimension(a, N):
    rep = maxf_report(a, N)
    n = N // 2
    assert rep.maximum == (n * (n + 1) if a == "i" else 2 * (n * n // 2))
    assert rep.ok, rep.to_json_obj()
    if N >= 4:
        assert rep.second == rep.maximum - 1


def test_arg_max_counts():
    assert len(maxf_report("i", 4).argmax) == 2
    assert maxf_report("c", 4).argmax == ["(2143)"]


@pytest.mark.parametrize("a", "ic")
@pytest.mark.parametrize("N", [4, 6, 8])
def test_one_less_shapes(a, N):
    assert dimoneless_check(a, N)["ok"]


def test_lifts_are_typed_involutions():
    for a in "ic":
        for L in range(1, 5):
            for pat in PatternSpace(a, L):
                inv = lift_involution(pat)
                assert inv.btype == a and inv.N == 2 * L


@pytest.mark.parametrize("a", "ic")
@pytest.mark.parametrize("L", [2, 3, 4])
def test_defining_equations_on_samples(a, L):
    for pat in PatternSpace(a, L):
        rep = verify_defeq(pat, samples=3, seed=L)
        assert rep.ok, rep.to_json_obj()


def test_signed_products_of_the_diagonal():
    rng = random.Random(11)
    for pat in PatternSpace("i", 2):
        inv = lift_involution(pat)
        t = [rng.randint(20, 900) for _ in range(4)]
        M = underline(inv, t, "i")
        tr = restricted_diagonal(M, inv)
        assert all(tr)
        for k in range(1, 5):
            assert M.s(k) in (tr[k - 1] * tr[inv(k) - 1], -tr[k - 1] * tr[inv(k) - 1])


def test_generic_sample_keeps_ranks():
    for a in "ic":
        for pat in PatternSpace(a, 2):
            inv = lift_involution(pat)
            M = underline(inv, [31, 47, 59, 83], a)
            ref = underline(inv, None, "p")
            N = inv.N
            assert all(M.rm(i, j) == ref.rm(i, j) for i in range(1, N + 1) for j in range(i, i + 2 * N))


@pytest.mark.parametrize("a", "ic")
@pytest.mark.parametrize("N", [4, 6])
def test_non_lifts_have_distinct_rank_data(a, N):
    lifts = link_pattern_lifts(a, N)

    def data(pi):
        M = underline(pi, None, "p")
        return tuple(M.rm(i, j) for i in range(1, N + 1) for j in range(i, i + 2 * N))

    lift_data = {data(p) for p in lifts}
    for pi in enumerate_involutions(a, N):
        if pi not in lifts:
            assert data(pi) not in lift_data

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from brauerloop.linkpat import (
    InvalidGenerator, LinkPattern, PatternSpace, WrongType, act_generator, enumerate_patterns,
    generators, m_pi, pattern_count, pattern_stats, periodic_lift, rotate_sigma,
)

TYPES = "picom"


def brute_count(btype, L):
    """Independent count: every map site -> site-or-letter that is a valid pattern."""
    letters = {"p": ["*"], "c": ["*"], "i": ["b"], "o": ["l", "r"], "m": ["r"]}[btype]
    n = 0
    for tgt in itertools.product(list(range(1, L + 1)) + letters, repeat=L):
        try:
            LinkPattern.parse(btype, ",".join(map(str, tgt)) if L else "")
        except ValueError:
            continue
        n += 1
    return n


@pytest.mark.parametrize("btype", TYPES)
@pytest.mark.parametrize("L", range(0, 6))
def test_count_matches_closed_form_and_brute_force(btype, L):
    space = enumerate_patterns(btype, L)
    assert len(space) == pattern_count(btype, L)
    if L <= 4:
        assert len(space) == brute_count(btype, L)


def test_printed_counts():
    assert len(PatternSpace("i", 3)) == 4
    assert len(PatternSpace("o", 2)) == 5
    assert {p.ascii() for p in PatternSpace("c", 3)} == {"21*", "*32", "3*1"}


def test_render_and_parse():
    p = LinkPattern.parse("i", "(3,b,1,b)")
    assert p.render() == "(3,b,1,b)"
    assert LinkPattern.parse("i", "3b1b") == p
    assert LinkPattern.from_json_obj(p.to_json_obj()) == p
    with pytest.raises(ValueError):
        LinkPattern.parse("i", "(2,3,1)")
    with pytest.raises(ValueError):
        LinkPattern.parse("c", "(r,r)")
    with pytest.raises(WrongType):
        PatternSpace("x", 2)


def test_small_arc_closes_loop():
    for btype in TYPES:
        for pat in PatternSpace(btype, 4):
            for i in range(1, 4):
                if pat(i) == i + 1:
                    r = act_generator(("e", i), pat)
                    assert r.pattern == pat and r.beta_exponent == 1


@pytest.mark.parametrize("btype", TYPES)
def test_f_squared_is_identity(btype):
    for L in range(2, 5):
        for pat in PatternSpace(btype, L):
            for g in generators(btype, L):
                if g[0] == "f":
                    once = act_generator(g, pat)
                    twice = act_generator(g, once.pattern)
                    assert twice.pattern == pat and once.beta_exponent == twice.beta_exponent == 0


def test_boundary_generator_example():
    r = act_generator(("e", 4), LinkPattern.parse("i", "3412"))
    assert r.pattern.render() == "(3,b,1,b)" and r.beta_exponent == 0


def test_generator_validity():
    pat = LinkPattern.parse("c", "21")
    with pytest.raises(InvalidGenerator):
        act_generator(("e", 0), pat)
    with pytest.raises(InvalidGenerator):
        act_generator(("e", 3), LinkPattern.parse("i", "21b"[:2]))
    assert ("e", 0) in generators("o", 2) and ("e", 0) not in generators("m", 2)
    assert ("e", 2) in generators("m", 2) and ("e", 2) not in generators("c", 2)


def test_rotation():
    p = LinkPattern.parse("p", "2143")
    assert rotate_sigma(p).ascii() == "4321"
    for L in range(1, 7):
        for q in PatternSpace("p", L):
            r = q
            for _ in range(L):
                r = rotate_sigma(r)
            assert r == q
    with pytest.raises(WrongType):
        rotate_sigma(LinkPattern.parse("i", "bb"))


def test_pattern_stats_examples():
    assert pattern_stats(LinkPattern.parse("c", "3*1")) == {"chords": 1, "fixed_points": 1, "m_pi": 4}
    assert pattern_stats(LinkPattern.parse("i", "bb"))["chords"] == 2
    assert m_pi(LinkPattern.parse("i", "bb")) == 4
    assert m_pi(LinkPattern.parse("i", "21")) == 2


def test_lift_examples():
    assert periodic_lift(LinkPattern.parse("i", "3b1b")).target == (3, 7, 1, 5, 4, 8, 2, 6)
    assert periodic_lift(LinkPattern.parse("i", "3412")).target == (3, 4, 1, 2, 7, 8, 5, 6)


@pytest.mark.parametrize("btype", ["i", "c", "o", "m"])
def test_lifts_are_mirror_symmetric_and_injective(btype):
    for L in range(1, 5):
        lifts = set()
        for pat in PatternSpace(btype, L):
            q = periodic_lift(pat)
            N = q.L
            imgs = [x for x in q.target]
            for j, x in enumerate(imgs, 1):
                if x != "*":
                    assert imgs[x - 1] == j
                    assert imgs[N - j] == N - x + 1
            lifts.add(q)
        assert len(lifts) == len(PatternSpace(btype, L))


@given(st.sampled_from("picom"), st.integers(2, 5), st.data())
@settings(max_examples=60, deadline=None)
def test_generator_image_is_valid(btype, L, data):
    pat = data.draw(st.sampled_from(PatternSpace(btype, L).patterns))
    g = data.draw(st.sampled_from(generators(btype, L)))
    r = act_generator(g, pat)
    assert r.pattern in PatternSpace(btype, L).index

"""Link patterns of the five boundary types and the Brauer generator actions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

TYPES = ("p", "i", "c", "o", "m")
LETTERS = ("b", "l", "r", "*")


class WrongType(ValueError):
    pass


class InvalidGenerator(ValueError):
    pass


def shift_of(btype: str):
    """The qKZ shift s as a multiple of e: 1 for p,i,c and 1/2 for o,m."""
    from fractions import Fraction
    return Fraction(1) if btype in ("p", "i", "c") else Fraction(1, 2)


def right_letter(btype: str) -> str | None:
    return {"i": "b", "o": "r", "m": "r"}.get(btype)


def left_letter(btype: str) -> str | None:
    return {"i": "b", "o": "l"}.get(btype)


def has_left_boundary(btype):
    return left_letter(btype) is not None


def has_right_boundary(btype):
    return right_letter(btype) is not None


def _key(x):
    if isinstance(x, str):
        return LETTERS.index(x)
    return 3 + x


@dataclass(frozen=True)
class LinkPattern:
    btype: str
    target: tuple

    @property
    def L(self) -> int:
        return len(self.target)

    def __call__(self, i: int):
        return self.target[i - 1]

    def sort_key(self):
        return tuple(_key(x) for x in self.target)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        sep = "" if self.L < 10 else ","
        return sep.join("•" if x == "*" else str(x) for x in self.target)

    def render(self) -> str:
        return "(" + ",".join("•" if x == "*" else str(x) for x in self.target) + ")"

    def ascii(self) -> str:
        return "".join(str(x) for x in self.target) if self.L < 10 else ",".join(map(str, self.target))

    def to_json_obj(self):
        return {"type": self.btype, "L": self.L, "target": [str(x) for x in self.target]}

    def to_json(self):
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj):
        tgt = tuple(x if x in LETTERS else int(x) for x in obj["target"])
        pat = cls(obj["type"], tgt)
        validate(pat)
        return pat

    @classmethod
    def parse(cls, btype: str, text: str) -> "LinkPattern":
        """Parse "3,b,1,b", "(3,b,1,b)" or the compact "3b1b" for L < 10."""
        text = text.strip().strip("()").replace("•", "*")
        parts = text.split(",") if "," in text else list(text)
        tgt = tuple(p if p in LETTERS else int(p) for p in (q.strip() for q in parts))
        pat = cls(btype, tgt)
        validate(pat)
        return pat


def validate(pat: LinkPattern) -> None:
    t, L, ty = pat.target, pat.L, pat.btype
    if ty not in TYPES:
        raise WrongType(ty)
    allowed = {"p": {"*"}, "c": {"*"}, "i": {"b"}, "o": {"l", "r"}, "m": {"r"}}[ty]
    stars = 0
    for i, x in enumerate(t, 1):
        if isinstance(x, str):
            if x not in allowed:
                raise ValueError(f"letter {x} not allowed for type {ty}")
            stars += x == "*"
        else:
            if not 1 <= x <= L or x == i or t[x - 1] != i:
                raise ValueError(f"site {i} -> {x} is not an involutive link")
    if ty in ("p", "c") and stars != L % 2:
        raise ValueError("unpaired site count must equal L mod 2")


def _matchings(sites: tuple) -> Iterator[dict]:
    """All partial matchings of ``sites`` (as dicts of paired sites)."""
    if not sites:
        yield {}
        return
    first, rest = sites[0], sites[1:]
    for m in _matchings(rest):
        yield m  # first left unmatched
    for k, other in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for m in _matchings(remaining):
            d = dict(m)
            d[first] = other
            d[other] = first
            yield d


class PatternSpace:
    """All link patterns of one (type, size) in canonical order."""

    def __init__(self, btype: str, L: int):
        if btype not in TYPES:
            raise WrongType(btype)
        self.btype = btype
        self.L = L
        pats = set()
        sites = tuple(range(1, L + 1))
        for m in _matchings(sites):
            free = [i for i in sites if i not in m]
            if btype in ("p", "c"):
                if len(free) != L % 2:
                    continue
                choices = [("*",)] * len(free)
            elif btype == "i":
                choices = [("b",)] * len(free)
            elif btype == "m":
                choices = [("r",)] * len(free)
            else:
                choices = [("l", "r")] * len(free)
            for letters in _product(choices):
                tgt = [None] * L
                for a, b in m.items():
                    tgt[a - 1] = b
                for i, x in zip(free, letters):
                    tgt[i - 1] = x
                pats.add(LinkPattern(btype, tuple(tgt)))
        self.patterns = sorted(pats)
        self.index = {p: k for k, p in enumerate(self.patterns)}

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __getitem__(self, k):
        return self.patterns[k]

    def pattern(self, text: str) -> LinkPattern:
        return LinkPattern.parse(self.btype, text)


def _product(choices):
    if not choices:
        yield ()
        return
    for x in choices[0]:
        for rest in _product(choices[1:]):
            yield (x,) + rest


@lru_cache(maxsize=None)
def enumerate_patterns(btype: str, L: int) -> PatternSpace:
    if L < 0:
        raise ValueError("size must be non-negative")
    return PatternSpace(btype, L)


def _dfact(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def pattern_count(btype: str, L: int) -> int:
    """Closed-form cardinality of the pattern space."""
    if btype in ("p", "c"):
        return _dfact(2 * ((L + 1) // 2) - 1)
    if btype in ("i", "m"):
        return sum(comb(L, 2 * j) * _dfact(2 * j - 1) for j in range(L // 2 + 1))
    if btype == "o":
        return sum(2 ** (L - 2 * j) * comb(L, 2 * j) * _dfact(2 * j - 1) for j in range(L // 2 + 1))
    raise WrongType(btype)


# ---------------------------------------------------------------------------
# generator actions


@dataclass(frozen=True)
class GenResult:
    pattern: LinkPattern
    beta_exponent: int


def _join(t: list, a, b) -> None:
    """Connect the strands ending at a and b (sites or letters)."""
    if isinstance(a, int) and isinstance(b, int):
        t[a - 1] = b
        t[b - 1] = a
    elif isinstance(a, int):
        t[a - 1] = b
    elif isinstance(b, int):
        t[b - 1] = a
    # two boundary ends: the path leaves the diagram with weight one


def generators(btype: str, L: int) -> list:
    """Valid generator names for a type and size, as (kind, index) pairs."""
    gens = []
    top = L if (btype == "p" and L >= 2) else L - 1
    for i in range(1, top + 1):
        gens.append(("e", i))
        gens.append(("f", i))
    if L >= 1 and has_left_boundary(btype):
        gens.append(("e", 0))
    if L >= 1 and has_right_boundary(btype):
        gens.append(("e", L) if btype != "p" else None)
    return [g for g in gens if g is not None]


def _sites(btype, L, i):
    if btype == "p" and i == L:
        return L, 1
    return i, i + 1


def act_generator(g, pat: LinkPattern) -> GenResult:
    kind, i = g
    ty, L = pat.btype, pat.L
    t = list(pat.target)
    if kind == "e" and (i == 0 or (i == L and ty != "p")):
        letter = left_letter(ty) if i == 0 else right_letter(ty)
        if letter is None or L == 0:
            raise InvalidGenerator(f"{g} not available for type {ty}")
        site = 1 if i == 0 else L
        a = t[site - 1]
        if a == letter:
            return GenResult(pat, 0)
        if isinstance(a, int):
            t[a - 1] = letter
        t[site - 1] = letter
        return GenResult(LinkPattern(ty, tuple(t)), 0)
    valid = 1 <= i <= L - 1 or (ty == "p" and i == L and L >= 2)
    if kind not in ("e", "f") or not valid:
        raise InvalidGenerator(f"{g} not available for type {ty}, L={L}")
    x, y = _sites(ty, L, i)
    a, b = t[x - 1], t[y - 1]
    if a == y:
        # small arc between the two sites
        return GenResult(pat, 1 if kind == "e" else 0)
    if kind == "e":
        _join(t, a, b)
        t[x - 1] = y
        t[y - 1] = x
        return GenResult(LinkPattern(ty, tuple(t)), 0)
    t[x - 1], t[y - 1] = b, a
    if isinstance(b, int):
        t[b - 1] = x
    if isinstance(a, int):
        t[a - 1] = y
    return GenResult(LinkPattern(ty, tuple(t)), 0)


def rotate_sigma(pat: LinkPattern) -> LinkPattern:
    """One clockwise step: the new site i carries what site i+1 carried."""
    if pat.btype != "p":
        raise WrongType("rotation only exists for periodic patterns")
    L = pat.L
    t = pat.target
    new = []
    for i in range(1, L + 1):
        x = t[i % L]
        new.append(x if isinstance(x, str) else (x - 2) % L + 1)
    return LinkPattern("p", tuple(new))


def pattern_stats(pat: LinkPattern) -> dict:
    chords = 0
    fixed = 0
    for i, x in enumerate(pat.target, 1):
        if x == "*":
            fixed += 1
        elif isinstance(x, str):
            chords += 1
        elif x > i:
            chords += 1
    return {"chords": chords, "fixed_points": fixed, "m_pi": 2 ** (chords + fixed)}


def m_pi(pat: LinkPattern) -> int:
    return pattern_stats(pat)["m_pi"]


def insert_small_arc(pat: LinkPattern, j: int) -> LinkPattern:
    """Insert a small arc on new sites j, j+1 (size grows by two)."""
    def sh(x):
        return x if isinstance(x, str) or x < j else x + 2
    old = [sh(x) for x in pat.target]
    new = old[: j - 1] + [j + 1, j] + old[j - 1:]
    return LinkPattern(pat.btype, tuple(new))


def insert_boundary_site(pat: LinkPattern, side: str) -> LinkPattern:
    """Insert a first (side='left') or last (side='right') site tied to that boundary."""
    ty = pat.btype
    if side == "left":
        letter = left_letter(ty)
        if letter is None:
            raise WrongType(f"no left boundary generator for type {ty}")
        new = [letter] + [x if isinstance(x, str) else x + 1 for x in pat.target]
    else:
        letter = right_letter(ty)
        if letter is None:
            raise WrongType(f"no right boundary generator for type {ty}")
        new = list(pat.target) + [letter]
    return LinkPattern(ty, tuple(new))


def periodic_lift(pat: LinkPattern) -> LinkPattern:
    """Unfold a boundary-type pattern into a mirror-symmetric periodic one.

    For the odd closed case the unpaired site and its mirror image both stay
    unpaired, so the result carries two fixed points.
    """
    ty, L = pat.btype, pat.L
    if ty not in ("i", "c", "o", "m"):
        raise WrongType("lift is defined for i, c, o, m")
    if ty in ("i", "c"):
        N = 2 * L
        t = [None] * N
        for j, x in enumerate(pat.target, 1):
            if x == "b":
                k = N - j + 1
            elif x == "*":
                k = None
            else:
                k = x
            if k is None:
                t[j - 1] = "*"
                t[N - j] = "*"
            else:
                t[j - 1] = k
                t[N - j] = N - k + 1
        return LinkPattern("p", tuple(t))
    n = 2 * L
    N = 4 * L
    t = [None] * N

    def put(a, b):
        t[a - 1] = b
        t[b - 1] = a

    for j, x in enumerate(pat.target, 1):
        if x == "l":
            put(j, N - j + 1)
            put(n - j + 1, n + j)
        elif x == "r":
            put(j, n - j + 1)
            put(N - j + 1, n + j)
        else:
            k = x
            put(j, k)
            put(N - j + 1, N - k + 1)
            put(n - j + 1, n - k + 1)
            put(n + j, n + k)
    return LinkPattern("p", tuple(t))

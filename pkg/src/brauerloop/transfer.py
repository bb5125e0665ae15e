"""Transfer matrix of the Brauer loop model at loop weight one (e = 0).

Columns are built by sweeping the row(s) of plaquettes one piece at a time
while tracking how the open line ends are connected.  Every configuration of
a column shares the same denominator (the product of the plaquette and
boundary denominators), so the sweep accumulates numerators only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from gmpy2 import mpq

from .linkpat import (
    LinkPattern,
    enumerate_patterns,
    insert_small_arc,
    left_letter,
    right_letter,
)
from .polyring import LinFrac, Poly, VarTable
from . import qkzsolve

_OUT = "out"
_TERM = "term"


def transfer_vt(L: int) -> VarTable:
    return VarTable.standard(L, ["w"])


def _plaquette_choices(vt, u: Poly, rotated: bool):
    """(numerator, pairs) for the three pictures of R(u); sides are b, t, l, r."""
    A = Poly.var(vt, "A")
    first = [("b", "r"), ("l", "t")]
    second = [("b", "l"), ("r", "t")]
    if rotated:
        first = [("r", "t"), ("b", "l")]
        second = [("b", "r"), ("t", "l")]
    return [
        (A * (A - u) * 2, first),
        (A * u * 2, second),
        ((A - u) * u, [("b", "t"), ("l", "r")]),
    ], [A + u, A * 2 - u]


def _boundary_choices(vt, side: str, btype: str):
    """(numerator, kind) options and denominators for K_0 (left) or K_L (right)."""
    A, w = Poly.var(vt, "A"), Poly.var(vt, "w")
    letter = left_letter(btype) if side == "left" else right_letter(btype)
    if letter is None:
        return [(Poly.const(vt, 1), None)], []
    if side == "left":
        return [(w * 2 - A, None), ((A - w) * 4, letter)], [A * 3 - w * 2]
    return [(A - w * 2, None), (w * 4, letter)], [A + w * 2]


class _Sweep:
    """Connectivity of open line ends with an accumulated numerator per state."""

    def __init__(self, vt):
        self.states = {(frozenset(), frozenset()): Poly.const(vt, 1)}

    @staticmethod
    def _connect(E: dict, res: set, x, y):
        def is_node(a):
            return not (isinstance(a, tuple) and a and a[0] in (_OUT, _TERM))

        ends = []
        for a in (x, y):
            if is_node(a):
                if a in E:
                    ends.append(E.pop(a))
                else:
                    ends.append(a)
            else:
                ends.append(a)
        ex, ey = ends
        if is_node(x) and is_node(y) and x == y and ex == x:
            return  # a loop drawn inside one piece
        if is_node(ex) and ex == y and is_node(y):
            E.pop(y, None)
            return  # closes a loop
        if is_node(ey) and ey == x and is_node(x):
            E.pop(x, None)
            return
        if is_node(ex) and is_node(ey):
            E[ex] = ey
            E[ey] = ex
        elif is_node(ex):
            E[ex] = ey
        elif is_node(ey):
            E[ey] = ex
        else:
            if ex[0] == _OUT or ey[0] == _OUT:
                res.add((ex, ey) if ex[0] == _OUT else (ey, ex))
            # two boundary or defect terminals: a path with weight one

    def add_piece(self, options):
        """options: list of (numerator, pairs)."""
        new: dict = {}
        for (Ef, Rf), wt in self.states.items():
            for num, pairs in options:
                E = dict(Ef)
                res = set(Rf)
                for x, y in pairs:
                    self._connect(E, res, x, y)
                key = (frozenset(E.items()), frozenset(res))
                val = wt * num
                new[key] = new[key] + val if key in new else val
        self.states = {k: v for k, v in new.items() if v.t}


def _pattern_piece(pat: LinkPattern):
    pairs = []
    for i, x in enumerate(pat.target, 1):
        if isinstance(x, str):
            pairs.append((("v0", i), (_TERM, x)))
        elif x > i:
            pairs.append((("v0", i), ("v0", x)))
    return pairs


def _plaquette_pairs(pairs, sides):
    return [(sides[a], sides[b]) for a, b in pairs]


def _result_pattern(btype, L, res) -> LinkPattern:
    tgt = [None] * L
    for (_, i), other in res:
        if other[0] == _OUT:
            tgt[i - 1] = other[1]
            tgt[other[1] - 1] = i
        else:
            tgt[i - 1] = other[1]
    return LinkPattern(btype, tuple(tgt))


@dataclass
class TransferMatrix:
    btype: str
    L: int
    vt: VarTable
    space: object
    num: dict  # (row, col) -> Poly
    den: list  # linear denominators shared by every entry

    def den_poly(self) -> Poly:
        p = Poly.const(self.vt, 1)
        for d in self.den:
            p = p * d
        return p

    def entry(self, r, c) -> LinFrac:
        return LinFrac.ratio(self.num.get((r, c), Poly(self.vt)), self.den)

    def numeric(self, point) -> list:
        """Dense matrix of rationals at a point."""
        n = len(self.space)
        d = mpq(1)
        for f in self.den:
            v = f.evaluate(point)
            if v == 0:
                raise ZeroDivisionError("pole of the transfer matrix")
            d *= v
        M = [[mpq(0)] * n for _ in range(n)]
        for (r, c), p in self.num.items():
            M[r][c] = p.evaluate(point) / d
        return M

    def to_json_obj(self) -> dict:
        return {
            "type": self.btype,
            "L": self.L,
            "patterns": [p.render() for p in self.space],
            "den": [d.to_json_obj() for d in self.den],
            "entries": [[r, c, p.to_json_obj()] for (r, c), p in sorted(self.num.items())],
        }


def build_transfer(btype: str, L: int, reverse: bool = False) -> TransferMatrix:
    """Transfer matrix with symbolic w; ``reverse`` sweeps the pieces in the opposite order."""
    vt = transfer_vt(L)
    space = enumerate_patterns(btype, L)
    w = Poly.var(vt, "w")
    z = [Poly.var(vt, f"z{i}") for i in range(1, L + 1)]
    pieces = []  # (options, denominators)
    den: list = []
    if btype == "p":
        for i in range(1, L + 1):
            opts, d = _plaquette_choices(vt, w - z[i - 1], False)
            sides = {"b": ("v0", i), "t": (_OUT, i), "l": ("h", (i - 1) % L), "r": ("h", i % L)}
            pieces.append([(n, _plaquette_pairs(p, sides)) for n, p in opts])
            den += d
    else:
        for i in range(1, L + 1):
            opts, d = _plaquette_choices(vt, w - z[i - 1], False)
            sides = {"b": ("v0", i), "t": ("v1", i), "l": ("h0", i - 1), "r": ("h0", i)}
            pieces.append([(n, _plaquette_pairs(p, sides)) for n, p in opts])
            den += d
        opts, d = _boundary_choices(vt, "right", btype)
        pieces.append([(n, [(("h0", L), ("h1", L))] if k is None else
                        [(("h0", L), (_TERM, k)), (("h1", L), (_TERM, k))]) for n, k in opts])
        den += d
        for i in range(L, 0, -1):
            opts, d = _plaquette_choices(vt, z[i - 1] + w, True)
            sides = {"b": ("v1", i), "t": (_OUT, i), "l": ("h1", i - 1), "r": ("h1", i)}
            pieces.append([(n, _plaquette_pairs(p, sides)) for n, p in opts])
            den += d
        opts, d = _boundary_choices(vt, "left", btype)
        pieces.append([(n, [(("h0", 0), ("h1", 0))] if k is None else
                        [(("h0", 0), (_TERM, k)), (("h1", 0), (_TERM, k))]) for n, k in opts])
        den += d
    if reverse:
        pieces = pieces[::-1]
    num: dict = {}
    for c, pat in enumerate(space):
        sw = _Sweep(vt)
        sw.add_piece([(Poly.const(vt, 1), _pattern_piece(pat))])
        for opts in pieces:
            sw.add_piece(opts)
        for (E, res), val in sw.states.items():
            if E:
                raise AssertionError("open line ends left after the sweep")
            r = space.index[_result_pattern(btype, L, res)]
            num[(r, c)] = num[(r, c)] + val if (r, c) in num else val
    num = {k: v for k, v in num.items() if v.t}
    return TransferMatrix(btype, L, vt, space, num, den)


# ---------------------------------------------------------------------------
# verification


def _embed(p: Poly, vt: VarTable) -> Poly:
    return p.substitute({n: (Poly.var(vt, n) if n in vt else 0) for n in p.vt.names}, vt)


def stochastic(T: TransferMatrix) -> bool:
    """Every column sums to one."""
    D = T.den_poly()
    for c in range(len(T.space)):
        s = Poly(T.vt)
        for r in range(len(T.space)):
            if (r, c) in T.num:
                s = s + T.num[(r, c)]
        if s != D:
            return False
    return True


def eigenvector_identity(T: TransferMatrix, sol) -> bool:
    """T Psi = Psi at e = 0 with symbolic w, as a cleared identity."""
    vt = T.vt
    psi = [_embed(sol.components.get(p, Poly(sol.vt)), vt) for p in T.space]
    psi = [p.substitute({"e": 0}) for p in psi]
    D = T.den_poly()
    n = len(T.space)
    for r in range(n):
        s = Poly(vt)
        for c in range(n):
            if (r, c) in T.num and psi[c].t:
                s = s + T.num[(r, c)] * psi[c]
        if s != D * psi[r]:
            return False
    return True


def _matmul(X, Y):
    n, m, k = len(X), len(Y[0]), len(Y)
    return [[sum((X[i][t] * Y[t][j] for t in range(k)), mpq(0)) for j in range(m)] for i in range(n)]


def _random_point(rng, L, extra=()):
    pt = {f"z{i}": mpq(rng.randint(-50, 50), rng.randint(1, 9)) for i in range(1, L + 1)}
    pt["A"] = mpq(rng.randint(1, 40), rng.randint(1, 5))
    pt["e"] = mpq(0)
    for name in extra:
        pt[name] = mpq(rng.randint(-50, 50), rng.randint(1, 9))
    return pt


def commuting_check(btype: str, L: int, w1, w2, point=None, T: TransferMatrix | None = None,
                    seed: int = 0) -> bool:
    """[T(w1), T(w2)] = 0 exactly at one numeric point."""
    T = build_transfer(btype, L) if T is None else T
    pt = dict(point) if point is not None else _random_point(random.Random(seed), L)
    p1, p2 = dict(pt), dict(pt)
    p1["w"], p2["w"] = mpq(w1), mpq(w2)
    X, Y = T.numeric(p1), T.numeric(p2)
    return _matmul(X, Y) == _matmul(Y, X)


def _apply_matrix(M, space, vec: dict) -> dict:
    out: dict = {}
    for c, pat in enumerate(space):
        v = vec.get(pat)
        if not v:
            continue
        for r in range(len(space)):
            if M[r][c]:
                q = space[r]
                out[q] = out.get(q, mpq(0)) + M[r][c] * v
    return {k: v for k, v in out.items() if v}


def interlacing_check(T: TransferMatrix, i: int, point) -> bool:
    """R_i(z_i - z_{i+1}) T(.., z_i, z_{i+1}, ..) = T(.., z_{i+1}, z_i, ..) R_i(z_i - z_{i+1})."""
    dom = qkzsolve._NumDomain(point["A"], 0, T.btype)
    swapped = dict(point)
    swapped[f"z{i}"], swapped[f"z{i + 1}"] = point[f"z{i + 1}"], point[f"z{i}"]
    M1, M2 = T.numeric(point), T.numeric(swapped)
    u = point[f"z{i}"] - point[f"z{i + 1}"]
    for pat in T.space:
        left = qkzsolve._apply_R(dom, _apply_matrix(M1, T.space, {pat: mpq(1)}), i, u)
        right = _apply_matrix(M2, T.space, qkzsolve._apply_R(dom, {pat: mpq(1)}, i, u))
        if left != right:
            return False
    return True


def recurrence_check(T: TransferMatrix, Tlow: TransferMatrix, i: int, point) -> bool:
    """T_L(z_{i+1} = A + z_i) phi_i = phi_i T_{L-2} on one numeric slice."""
    pt = dict(point)
    pt[f"z{i + 1}"] = pt["A"] + pt[f"z{i}"]
    M = T.numeric(pt)
    low = {"A": pt["A"], "e": 0, "w": pt["w"]}
    k = 1
    for j in range(1, T.L + 1):
        if j not in (i, i + 1):
            low[f"z{k}"] = pt[f"z{j}"]
            k += 1
    Ml = Tlow.numeric(low)
    for c, pat in enumerate(Tlow.space):
        lhs = _apply_matrix(M, T.space, {insert_small_arc(pat, i): mpq(1)})
        rhs = {}
        for r, q in enumerate(Tlow.space):
            if Ml[r][c]:
                rhs[insert_small_arc(q, i)] = Ml[r][c]
        if lhs != rhs:
            return False
    return True


def verify_transfer(T: TransferMatrix, sol=None, seed: int = 0, points: int = 3) -> dict:
    rng = random.Random(seed)
    rep = {"stochastic": stochastic(T)}
    if sol is not None:
        rep["eigenvector"] = eigenvector_identity(T, sol)
    comm = []
    for _ in range(points):
        pt = _random_point(rng, T.L)
        comm.append(commuting_check(T.btype, T.L, mpq(rng.randint(-30, 30), 7),
                                    mpq(rng.randint(-30, 30), 11), pt, T))
    rep["commuting"] = all(comm)
    inter = []
    for i in range(1, T.L):
        pt = _random_point(rng, T.L, ["w"])
        inter.append(interlacing_check(T, i, pt))
    rep["interlacing"] = all(inter)
    if T.L >= 2:
        Tlow = build_transfer(T.btype, T.L - 2)
        rec = []
        for i in range(1, T.L):
            pt = _random_point(rng, T.L, ["w"])
            rec.append(recurrence_check(T, Tlow, i, pt))
        rep["recurrence"] = all(rec)
    rep["ok"] = all(rep.values())
    return rep

"""R- and K-matrices on link-pattern space and checks of the operator identities.

An operator is stored as a polynomial numerator matrix over one shared list of
linear-form denominators, so identities between products are verified by
cross-multiplying and comparing polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .linkpat import (
    LinkPattern,
    PatternSpace,
    act_generator,
    has_left_boundary,
    has_right_boundary,
    left_letter,
    right_letter,
    rotate_sigma,
    shift_of,
)
from .polyring import LinForm, LinFrac, NotDivisible, Poly, VarTable, exact_div, rat


class InvalidKind(ValueError):
    pass


# ---------------------------------------------------------------------------
# scalar helpers


def sym(vt: VarTable, name: str) -> Poly:
    return Poly.var(vt, name)


def shift_poly(vt: VarTable, btype: str) -> Poly:
    """s as a polynomial in e."""
    return Poly.var(vt, "e").scale(rat(shift_of(btype)))


def r_factors(vt: VarTable, z: Poly) -> list:
    A, e = sym(vt, "A"), sym(vt, "e")
    return [A + z, A.scale(2) - z - e]


def r_of(vt: VarTable, z: Poly) -> Poly:
    a, b = r_factors(vt, z)
    return a * b


def k_of(vt: VarTable, w: Poly) -> Poly:
    return sym(vt, "A") + w.scale(2)


# ---------------------------------------------------------------------------
# operators


class LoopOperator:
    """Matrix on a pattern space: numerator[(row, col)] / prod(denominators)."""

    def __init__(self, space: PatternSpace, vt: VarTable, num: dict, den: list | None = None):
        self.space = space
        self.vt = vt
        self.num = {k: v for k, v in num.items() if v.t}
        self.den = list(den or [])

    @classmethod
    def identity(cls, space, vt):
        one = Poly.const(vt, 1)
        return cls(space, vt, {(c, c): one for c in range(len(space))})

    def den_poly(self) -> Poly:
        p = Poly.const(self.vt, 1)
        for d in self.den:
            p = p * d
        return p

    def entry(self, row: int, col: int) -> LinFrac:
        return LinFrac.ratio(self.num.get((row, col), Poly(self.vt)), self.den)

    def columns(self) -> dict:
        cols: dict = {}
        for (r, c), v in self.num.items():
            cols.setdefault(c, []).append((r, v))
        return cols

    def __matmul__(self, other: "LoopOperator") -> "LoopOperator":
        rows_of: dict = {}
        for (r, c), v in self.num.items():
            rows_of.setdefault(c, []).append((r, v))
        out: dict = {}
        for (k, c), v in other.num.items():
            for r, u in rows_of.get(k, ()):
                key = (r, c)
                p = u * v
                out[key] = out[key] + p if key in out else p
        return LoopOperator(self.space, self.vt, out, self.den + other.den)

    def scaled(self, p: Poly) -> "LoopOperator":
        return LoopOperator(self.space, self.vt, {k: v * p for k, v in self.num.items()}, self.den)

    def mismatches(self, other: "LoopOperator", scalar_other: Poly | None = None) -> list:
        """Entries where self != scalar_other * other, after cross-multiplication."""
        mine = _cancel_common(self.den, other.den)
        lhs_extra, rhs_extra = mine
        lf = Poly.const(self.vt, 1)
        for d in lhs_extra:
            lf = lf * d
        rf = Poly.const(self.vt, 1)
        for d in rhs_extra:
            rf = rf * d
        if scalar_other is not None:
            rf = rf * scalar_other
        bad = []
        for key in sorted(set(self.num) | set(other.num)):
            a = self.num.get(key, Poly(self.vt)) * rf
            b = other.num.get(key, Poly(self.vt)) * lf
            if (a - b).t:
                bad.append(key)
        return bad

    def apply(self, vec: Mapping) -> dict:
        """Numerator of the action on {pattern: Poly}; divide by den_poly() for the value."""
        idx = self.space.index
        out: dict = {}
        cols = self.columns()
        for pat, val in vec.items():
            if not val.t:
                continue
            for r, u in cols.get(idx[pat], ()):
                rp = self.space[r]
                p = u * val
                out[rp] = out[rp] + p if rp in out else p
        return {k: v for k, v in out.items() if v.t}

    def to_json_obj(self) -> dict:
        entries = []
        for (r, c) in sorted(self.num):
            entries.append({"row": r, "col": c, "value": self.entry(r, c).to_json_obj()})
        return {"type": self.space.btype, "L": self.space.L, "entries": entries}


def _cancel_common(a: list, b: list):
    """Denominator lists with the common linear forms removed from both."""
    def key(p):
        return LinForm.normalize(p)

    bb = [(key(d), d) for d in b]
    rest_a = []
    used = [False] * len(bb)
    for d in a:
        ca, fa = key(d)
        hit = None
        for j, ((cb, fb), _) in enumerate(bb):
            if not used[j] and fa == fb:
                hit = j
                break
        if hit is None:
            rest_a.append(d)
        else:
            used[hit] = True
            cb = bb[hit][0][0]
            # d = ca*f, other = cb*f: keep the scalar ratio on the a side
            if ca != cb:
                rest_a.append(Poly.const(d.vt, ca / cb))
    rest_b = [d for j, (_, d) in enumerate(bb) if not used[j]]
    return rest_a, rest_b


def _beta_num(vt):
    """(2A-e) * beta = 2(A-e)."""
    A, e = sym(vt, "A"), sym(vt, "e")
    return (A - e).scale(2)


def build_generator(space: PatternSpace, vt: VarTable, g) -> LoopOperator:
    """Generator matrix with beta = 2(A-e)/(2A-e) as an explicit fraction."""
    A, e = sym(vt, "A"), sym(vt, "e")
    two_a_e = A.scale(2) - e
    out = {}
    for c, pat in enumerate(space):
        res = act_generator(g, pat)
        r = space.index[res.pattern]
        out[(r, c)] = _beta_num(vt) if res.beta_exponent else two_a_e
    return LoopOperator(space, vt, out, [two_a_e])


def build_R(space: PatternSpace, vt: VarTable, i: int, z: Poly) -> LoopOperator:
    """R_i(z) = [(2A-e)(A-z) + (2A-e) z e_i + (A-z) z f_i] / r(z)."""
    A, e = sym(vt, "A"), sym(vt, "e")
    two_a_e = A.scale(2) - e
    c_id = two_a_e * (A - z)
    c_e = two_a_e * z
    c_e_loop = _beta_num(vt) * z
    c_f = (A - z) * z
    out: dict = {}

    def add(key, p):
        out[key] = out[key] + p if key in out else p

    for c, pat in enumerate(space):
        add((c, c), c_id)
        re_ = act_generator(("e", i), pat)
        add((space.index[re_.pattern], c), c_e_loop if re_.beta_exponent else c_e)
        rf = act_generator(("f", i), pat)
        add((space.index[rf.pattern], c), c_f)
    return LoopOperator(space, vt, out, r_factors(vt, z))


def build_K(space: PatternSpace, vt: VarTable, side: str, w: Poly) -> LoopOperator:
    """K(w) = [(A-2w) + 4w e_boundary] / k(w); the identity without that generator."""
    btype = space.btype
    present = has_left_boundary(btype) if side == "left" else has_right_boundary(btype)
    if not present or space.L == 0:
        return LoopOperator.identity(space, vt)
    g = ("e", 0) if side == "left" else ("e", space.L)
    A = sym(vt, "A")
    out: dict = {}
    for c, pat in enumerate(space):
        key = (c, c)
        out[key] = out.get(key, Poly(vt)) + (A - w.scale(2))
        res = act_generator(g, pat)
        key = (space.index[res.pattern], c)
        out[key] = out.get(key, Poly(vt)) + w.scale(4)
    return LoopOperator(space, vt, out, [k_of(vt, w)])


def build_sigma(space: PatternSpace, vt: VarTable) -> LoopOperator:
    one = Poly.const(vt, 1)
    return LoopOperator(space, vt, {(space.index[rotate_sigma(p)], c): one for c, p in enumerate(space)})


def build_operator(kind, space: PatternSpace, vt: VarTable) -> LoopOperator:
    """kind: ("R", i, z) | ("K0", w) | ("KL", w) | ("sigma",) | ("e"|"f", i)."""
    tag = kind[0]
    if tag == "R":
        return build_R(space, vt, kind[1], kind[2])
    if tag == "K0":
        return build_K(space, vt, "left", kind[1])
    if tag == "KL":
        return build_K(space, vt, "right", kind[1])
    if tag == "sigma":
        if space.btype != "p":
            raise InvalidKind("rotation exists only for the periodic type")
        return build_sigma(space, vt)
    if tag in ("e", "f"):
        return build_generator(space, vt, (tag, kind[1]))
    raise InvalidKind(str(kind))


# ---------------------------------------------------------------------------
# operator identities


def _bulk_indices(btype, L):
    if btype == "p" and L >= 3:
        return list(range(1, L + 1))
    return list(range(1, L))


def verify_operator_identities(space: PatternSpace, which=("unitarity", "ybe", "reflection", "rpoint")) -> dict:
    """Exact checks; returns {identity name: list of failure descriptions}."""
    vt = VarTable(["z", "w", "A", "e"])
    z, w, A = sym(vt, "z"), sym(vt, "w"), sym(vt, "A")
    L, btype = space.L, space.btype
    report: dict = {}
    bulk = _bulk_indices(btype, L)
    nxt = (lambda i: i % L + 1) if btype == "p" else (lambda i: i + 1)

    def record(name, what, bad):
        report.setdefault(name, [])
        if bad:
            report[name].append(f"{what}: {len(bad)} entries differ, first {bad[0]}")

    one = LoopOperator.identity(space, vt)
    if "unitarity" in which:
        for i in bulk:
            lhs = build_R(space, vt, i, z) @ build_R(space, vt, i, -z)
            record("unitarity", f"R{i}", lhs.mismatches(one))
        for side in ("left", "right"):
            lhs = build_K(space, vt, side, w) @ build_K(space, vt, side, -w)
            record("unitarity", f"K-{side}", lhs.mismatches(one))
    if "ybe" in which:
        for i in bulk:
            j = nxt(i)
            if btype != "p" and j > L - 1:
                continue
            lhs = build_R(space, vt, i, z) @ build_R(space, vt, j, z + w) @ build_R(space, vt, i, w)
            rhs = build_R(space, vt, j, w) @ build_R(space, vt, i, z + w) @ build_R(space, vt, j, z)
            record("ybe", f"R{i}R{j}R{i}", lhs.mismatches(rhs))
        report.setdefault("ybe", [])
    if "reflection" in which and btype != "p" and L >= 2:
        for side, i in (("left", 1), ("right", L - 1)):
            K = lambda x: build_K(space, vt, side, x)  # noqa: E731
            R = lambda x: build_R(space, vt, i, x)  # noqa: E731
            lhs = K(z) @ R(z + w) @ K(w) @ R(w - z)
            rhs = R(w - z) @ K(w) @ R(z + w) @ K(z)
            record("reflection", side, lhs.mismatches(rhs))
    if "rpoint" in which:
        for i in bulk:
            # beta * R_i(A) = e_i, beta = 2(A-e)/(2A-e)
            lhs = build_R(space, vt, i, A).scaled(_beta_num(vt))
            lhs.den = lhs.den + [A.scale(2) - sym(vt, "e")]
            record("rpoint", f"R{i}(A)", lhs.mismatches(build_generator(space, vt, ("e", i))))
    return report


# ---------------------------------------------------------------------------
# algebra relations over Q[beta]


def _word_apply(word, pat: LinkPattern) -> dict:
    """Apply a word (leftmost acts last) to a pattern; result {pattern: {beta^k: coeff}}."""
    vec = {pat: {0: 1}}
    for g in reversed(word):
        new: dict = {}
        for p, poly in vec.items():
            res = act_generator(g, p)
            tgt = new.setdefault(res.pattern, {})
            for k, c in poly.items():
                kk = k + res.beta_exponent
                tgt[kk] = tgt.get(kk, 0) + c
        vec = {p: {k: c for k, c in poly.items() if c} for p, poly in new.items()}
        vec = {p: poly for p, poly in vec.items() if poly}
    return vec


def _times_beta(vec: dict, k: int) -> dict:
    return {p: {e + k: c for e, c in poly.items()} for p, poly in vec.items()}


def algebra_relations(btype: str, L: int) -> list:
    """(name, lhs word, rhs word, beta power on rhs) for every applicable relation."""
    rels = []
    E = lambda i: ("e", i)  # noqa: E731
    F = lambda i: ("f", i)  # noqa: E731
    periodic = btype == "p"
    if periodic and L < 3:
        bulk = list(range(1, L))
    else:
        bulk = _bulk_indices(btype, L)
    nb = set(bulk)

    def norm(i):
        return (i - 1) % L + 1 if periodic else i

    for i in bulk:
        rels += [
            (f"e{i}^2=beta e{i}", [E(i), E(i)], [E(i)], 1),
            (f"f{i}^2=1", [F(i), F(i)], [], 0),
            (f"f{i}e{i}=e{i}", [F(i), E(i)], [E(i)], 0),
            (f"e{i}f{i}=e{i}", [E(i), F(i)], [E(i)], 0),
        ]
        for j in (norm(i - 1), norm(i + 1)):
            if j not in nb or j == i:
                continue
            rels += [
                (f"e{i}e{j}e{i}=e{i}", [E(i), E(j), E(i)], [E(i)], 0),
                (f"f{i}e{j}e{i}=f{j}e{i}", [F(i), E(j), E(i)], [F(j), E(i)], 0),
                (f"e{i}e{j}f{i}=e{i}f{j}", [E(i), E(j), F(i)], [E(i), F(j)], 0),
                (f"f{i}f{j}f{i}=f{j}f{i}f{j}", [F(i), F(j), F(i)], [F(j), F(i), F(j)], 0),
            ]
        for j in bulk:
            dist = abs(i - j)
            if periodic:
                dist = min(dist, L - dist)
            if j > i and dist >= 2:
                for a in (E, F):
                    for b in (E, F):
                        rels.append((f"{a(i)[0]}{i}{b(j)[0]}{j} commute", [a(i), b(j)], [b(j), a(i)], 0))
    left = has_left_boundary(btype)
    right = has_right_boundary(btype)
    if left and L >= 1:
        rels.append(("e0^2=e0", [E(0), E(0)], [E(0)], 0))
        if L >= 2:
            rels += [
                ("e1e0e1=e1", [E(1), E(0), E(1)], [E(1)], 0),
                ("e0f1e0=e0e1e0", [E(0), F(1), E(0)], [E(0), E(1), E(0)], 0),
            ]
        for j in range(2, L):
            for b in (E, F):
                rels.append((f"e0{b(j)[0]}{j} commute", [E(0), b(j)], [b(j), E(0)], 0))
    if right and L >= 1:
        rels.append((f"e{L}^2=e{L}", [E(L), E(L)], [E(L)], 0))
        if L >= 2:
            rels += [
                (f"e{L-1}e{L}e{L-1}=e{L-1}", [E(L - 1), E(L), E(L - 1)], [E(L - 1)], 0),
                (f"e{L}f{L-1}e{L}=e{L}e{L-1}e{L}", [E(L), F(L - 1), E(L)], [E(L), E(L - 1), E(L)], 0),
            ]
        for j in range(1, L - 1):
            for b in (E, F):
                rels.append((f"e{L}{b(j)[0]}{j} commute", [E(L), b(j)], [b(j), E(L)], 0))
    if left and right and L >= 2:
        rels.append((f"e0e{L} commute", [E(0), E(L)], [E(L), E(0)], 0))
    idem = _idempotents(btype, L)
    if idem:
        I1, I2, power = idem
        rels.append(("I1I2I1=I1", I1 + I2 + I1, I1, power))
        rels.append(("I2I1I2=I2", I2 + I1 + I2, I2, power))
    return rels


def _idempotents(btype, L):
    if btype in ("i", "o") and L >= 2:
        if L % 2 == 0:
            return [("e", j) for j in range(0, L + 1, 2)], [("e", j) for j in range(1, L, 2)], 0
        return [("e", j) for j in range(0, L, 2)], [("e", j) for j in range(1, L + 1, 2)], 0
    if btype == "p" and L >= 2:
        if L % 2 == 0:
            return [("e", j) for j in range(1, L, 2)], [("e", j) for j in range(2, L + 1, 2)], 2
        if L >= 3:
            # odd periodic size: e_L and e_1 overlap and the loop weights cancel
            return [("e", j) for j in range(1, L + 1, 2)], [("e", j) for j in range(2, L, 2)], 0
    return None


def verify_algebra_relations(btype: str, L: int) -> dict:
    """Check every relation on every basis pattern; returns {relation: failing patterns}."""
    space = PatternSpace(btype, L)
    report = {}
    for name, lhs, rhs, k in algebra_relations(btype, L):
        bad = []
        for pat in space:
            a = _word_apply(lhs, pat)
            b = _times_beta(_word_apply(rhs, pat), k)
            if a != b:
                bad.append(str(pat))
        report[name] = bad
    return report


# ---------------------------------------------------------------------------
# Weyl group action and divided differences


def tau(p: Poly, i: int, btype: str, L: int) -> Poly:
    """Simple reflection tau_i on a polynomial in z1..zL."""
    vt = p.vt
    if 1 <= i <= L - 1:
        return p.substitute({f"z{i}": f"z{i+1}", f"z{i+1}": f"z{i}"})
    s = shift_poly(vt, btype)
    if i == 0:
        if btype == "p":
            raise ValueError("no tau_0 in the periodic type")
        return p.substitute({"z1": -sym(vt, "z1") - s})
    if i == L:
        if btype == "p":
            raise ValueError("no tau_L in the periodic type")
        return p.substitute({f"z{L}": -sym(vt, f"z{L}")})
    raise ValueError(f"no reflection tau_{i}")


def alpha(vt: VarTable, i: int, btype: str, L: int) -> Poly:
    if 1 <= i <= L - 1:
        return sym(vt, f"z{i}") - sym(vt, f"z{i+1}")
    if i == 0:
        return -sym(vt, "z1").scale(2) - shift_poly(vt, btype)
    if i == L:
        return sym(vt, f"z{L}").scale(2)
    raise ValueError(i)


def _dd_one(p: Poly, i: int, kind: str, btype: str, L: int):
    vt = p.vt
    a = alpha(vt, i, btype, L)
    tp = tau(p, i, btype, L)
    if kind == "plain":
        return exact_div(p - tp, a)
    A = sym(vt, "A")
    # (A+a) d (A+a)^-1 f = [f (A-a) - tau f (A+a)] / (a (A-a))
    num = p * (A - a) - tp * (A + a)
    return LinFrac.ratio(exact_div(num, a), [A - a])


def divided_difference(v, i: int, kind: str = "plain", btype: str = "c", L: int | None = None):
    """Plain or primed divided difference, on a Poly or a {pattern: Poly} vector."""
    if isinstance(v, Poly):
        if L is None:
            L = sum(1 for n in v.vt.names if n.startswith("z") and n[1:].isdigit())
        return _dd_one(v, i, kind, btype, L)
    if L is None:
        L = next(iter(v)).L
    return {k: _dd_one(p, i, kind, btype, L) for k, p in v.items()}


# ---------------------------------------------------------------------------
# qKZ relations in cleared form


def qkz_relations(btype: str, L: int) -> list:
    """Names of the exchange/boundary/rotation relations of the system."""
    rels = [("bulk", i) for i in range(1, L)]
    if btype == "p":
        if L >= 2:
            rels.append(("rotate", None))
    else:
        if L >= 1:
            rels.append(("left", 0))
            rels.append(("right", L))
    return rels


def relation_residual(rel, components: Mapping, space: PatternSpace, vt: VarTable) -> dict:
    """Cleared residual of one relation; zero dict iff the relation holds.

    bulk i : numerator(R_i(z_i-z_{i+1})) Psi - r(z_i-z_{i+1}) tau_i Psi
    left   : numerator(K_0(-z1-s/2)) Psi - k(-z1-s/2) tau_0 Psi
    right  : numerator(K_L(z_L)) Psi - k(z_L) tau_L Psi
    rotate : sigma Psi(z) - Psi(z2, ..., zL, z1+s)
    """
    btype, L = space.btype, space.L
    tag, i = rel
    zero = Poly(vt)
    if tag == "rotate":
        s = shift_poly(vt, btype)
        mapping = {f"z{k}": sym(vt, f"z{k % L + 1}") for k in range(1, L)}
        mapping[f"z{L}"] = sym(vt, "z1") + s
        out = {}
        for pat in space:
            out[pat] = zero
        for pat, val in components.items():
            out[rotate_sigma(pat)] = out[rotate_sigma(pat)] + val
        for pat in space:
            out[pat] = out[pat] - components.get(pat, zero).substitute(mapping)
        return {k: v for k, v in out.items() if v.t}
    if tag == "bulk":
        zz = sym(vt, f"z{i}") - sym(vt, f"z{i+1}")
        op = build_R(space, vt, i, zz)
        other = r_of(vt, zz)
        tv = {k: tau(v, i, btype, L) for k, v in components.items()}
    elif tag == "left":
        s = shift_poly(vt, btype)
        w = -sym(vt, "z1") - s.scale(rat(Fraction(1, 2)))
        op = build_K(space, vt, "left", w)
        other = k_of(vt, w) if op.den else Poly.const(vt, 1)
        tv = {k: tau(v, 0, btype, L) for k, v in components.items()}
    elif tag == "right":
        w = sym(vt, f"z{L}")
        op = build_K(space, vt, "right", w)
        other = k_of(vt, w) if op.den else Poly.const(vt, 1)
        tv = {k: tau(v, L, btype, L) for k, v in components.items()}
    else:
        raise ValueError(rel)
    lhs = op.apply(components)
    out = {}
    for pat in space:
        d = lhs.get(pat, zero) - other * tv.get(pat, zero)
        if d.t:
            out[pat] = d
    return out


# ---------------------------------------------------------------------------
# component relations


def _pattern_sum(space, comps, pred: Callable) -> Poly:
    vt = next(iter(comps.values())).vt
    tot = Poly(vt)
    for rho in space:
        if pred(rho):
            tot = tot + comps.get(rho, Poly(vt))
    return tot


def verify_component_relations(sol) -> dict:
    """Check the per-component factor, symmetry and divided-difference rules."""
    btype, L, comps, vt = sol.btype, sol.L, sol.components, sol.vt
    space = PatternSpace(btype, L)
    A, e = sym(vt, "A"), sym(vt, "e")
    s = shift_poly(vt, btype)
    zero = Poly(vt)
    fails: list = []

    def fail(msg):
        fails.append(msg)

    for pat in space:
        psi = comps.get(pat, zero)
        for i in range(1, L):
            zi, zj = sym(vt, f"z{i}"), sym(vt, f"z{i+1}")
            if pat(i) != i + 1:
                fpat = act_generator(("f", i), pat).pattern
                lhs = divided_difference(psi, i, "prime", btype, L)
                lhs = lhs * ((A.scale(2) - zi + zj - e) * Poly.const(vt, -1))
                rhs = psi + comps.get(fpat, zero)
                if not lhs == LinFrac(rhs):
                    fail(f"{pat} i={i}: primed divided-difference rule")
                if psi.t:
                    try:
                        exact_div(psi, A + zi - zj)
                    except NotDivisible:
                        fail(f"{pat} i={i}: missing factor A+z{i}-z{i+1}")
                a, b = pat(i), pat(i + 1)
                if isinstance(a, str) and a == b and a in ("l", "r", "b") and psi.t:
                    try:
                        S = exact_div(psi, r_of(vt, zi - zj))
                        if (S - tau(S, i, btype, L)).t:
                            fail(f"{pat} i={i}: r-factor quotient not symmetric")
                    except NotDivisible:
                        fail(f"{pat} i={i}: missing r(z{i}-z{i+1})")
            else:
                lhs = (-divided_difference(psi, i, "plain", btype, L)) * r_of(vt, zi - zj)
                rhs = _pattern_sum(space, comps, lambda rho: rho != pat and act_generator(("e", i), rho).pattern == pat)
                rhs = rhs * (A.scale(2) - e)
                if (lhs - rhs).t:
                    fail(f"{pat} i={i}: small-arc divided-difference rule")
        if btype == "p":
            continue
        # right end
        if L >= 1:
            zL = sym(vt, f"z{L}")
            if has_right_boundary(btype):
                if pat(L) != right_letter(btype):
                    try:
                        S = exact_div(psi, k_of(vt, zL)) if psi.t else psi
                        if (S - tau(S, L, btype, L)).t:
                            fail(f"{pat}: right quotient not even in z{L}")
                    except NotDivisible:
                        fail(f"{pat}: missing k(z{L})")
                else:
                    lhs = (-divided_difference(psi, L, "plain", btype, L)) * k_of(vt, zL)
                    rhs = _pattern_sum(space, comps, lambda rho: rho != pat and act_generator(("e", L), rho).pattern == pat)
                    if (lhs - rhs.scale(2)).t:
                        fail(f"{pat}: right boundary divided-difference rule")
            elif (psi - tau(psi, L, btype, L)).t:
                fail(f"{pat}: not even in z{L}")
            # left end
            w0 = -sym(vt, "z1") - s.scale(rat(Fraction(1, 2)))
            if has_left_boundary(btype):
                if pat(1) != left_letter(btype):
                    try:
                        S = exact_div(psi, k_of(vt, w0)) if psi.t else psi
                        if (S - tau(S, 0, btype, L)).t:
                            fail(f"{pat}: left quotient not reflection invariant")
                    except NotDivisible:
                        fail(f"{pat}: missing k(-z1-s/2)")
                else:
                    lhs = (-divided_difference(psi, 0, "plain", btype, L)) * k_of(vt, w0)
                    rhs = _pattern_sum(space, comps, lambda rho: rho != pat and act_generator(("e", 0), rho).pattern == pat)
                    if (lhs - rhs.scale(2)).t:
                        fail(f"{pat}: left boundary divided-difference rule")
            elif (psi - tau(psi, 0, btype, L)).t:
                fail(f"{pat}: not invariant under z1 -> -z1-s")
    return {"failures": fails, "ok": not fails}

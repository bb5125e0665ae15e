"""Minimal polynomial solutions of the qKZ system and their verification.

Two independent strategies are provided:

* ``solve_linear`` sets up the denominator-cleared exchange relations as a
  homogeneous linear system on the monomial coefficients of every component;
* ``solve_recursive`` interpolates in the last spectral parameter, obtaining
  the values at the interpolation nodes from smaller solutions through the
  bulk and boundary recurrences after transporting the node onto a
  recurrence point with R- and K-matrices.

``evaluate_point`` runs the recursive strategy on rational numbers only.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpq

from .linkpat import (
    LinkPattern,
    PatternSpace,
    act_generator,
    has_left_boundary,
    has_right_boundary,
    insert_boundary_site,
    insert_small_arc,
    left_letter,
    m_pi,
    right_letter,
    rotate_sigma,
    shift_of,
)
from .polyring import (
    Poly,
    PolyError,
    VarTable,
    exact_div,
    lagrange_interpolate,
    rat,
    solve_sparse_linear_exact,
)
from .rkops import (
    build_K,
    build_R,
    k_of,
    qkz_relations,
    r_of,
    relation_residual,
    shift_poly,
    tau,
    verify_component_relations,
)

NORMALIZATION_VERSION = 1


class NoSolution(PolyError):
    pass


class AmbiguousSolution(PolyError):
    pass


class DegenerateNode(PolyError):
    pass


# ---------------------------------------------------------------------------
# degrees


def total_degree(btype: str, L: int) -> int:
    h, g = L // 2, max(L - 1, 0) // 2
    return {"p": 2 * h * g, "i": L * (L - 1), "c": 4 * h * g, "o": L * (2 * L - 1), "m": 2 * L * (L - 1)}[btype]


def zdegree_bound(btype: str, L: int) -> int:
    """Degree bound of every component in each single z_i."""
    if L <= 0:
        return 0
    if btype == "p":
        return L - 2 if L % 2 == 0 else L - 1
    if btype == "i":
        return 2 * (L - 1)
    if btype == "c":
        return 2 * (L - 2) if L % 2 == 0 else 2 * (L - 1)
    if btype == "o":
        return 4 * L - 3
    if btype == "m":
        return 4 * (L - 1)
    raise ValueError(btype)


@dataclass(frozen=True)
class DegreeTable:
    btype: str
    L: int

    @property
    def total(self) -> int:
        return total_degree(self.btype, self.L)

    @property
    def zbound(self) -> int:
        return zdegree_bound(self.btype, self.L)

    @property
    def bulk_factor(self) -> int:
        L = self.L
        return {"p": 2 * (L - 2), "i": 2 * (2 * L - 3), "c": 4 * (L - 2), "o": 2 * (4 * L - 5), "m": 4 * (2 * L - 3)}[self.btype]

    @property
    def boundary_factor(self):
        L = self.L
        return {"i": 2 * (L - 1), "o": 4 * L - 3, "m": 4 * (L - 1)}.get(self.btype)


# ---------------------------------------------------------------------------
# solution container


@dataclass
class QkzSolution:
    btype: str
    L: int
    vt: VarTable
    components: dict
    normalization: str = ""
    method: str = ""
    info: dict = field(default_factory=dict)

    @property
    def space(self) -> PatternSpace:
        return PatternSpace(self.btype, self.L)

    @property
    def degree(self) -> int:
        return total_degree(self.btype, self.L)

    def __getitem__(self, pat):
        if isinstance(pat, str):
            pat = LinkPattern.parse(self.btype, pat) if pat else LinkPattern(self.btype, ())
        return self.components.get(pat, Poly(self.vt))

    def __eq__(self, other):
        if not isinstance(other, QkzSolution):
            return NotImplemented
        keys = set(self.components) | set(other.components)
        return (self.btype, self.L) == (other.btype, other.L) and all(
            self[k] == other[k] for k in keys)

    def to_json_obj(self, checks_passed=None) -> dict:
        comps = {str(p.ascii()) if p.L else "": self.components[p].to_json_obj()
                 for p in sorted(self.components)}
        return {
            "type": self.btype,
            "L": self.L,
            "degree": self.degree,
            "normalization": self.normalization,
            "normalization_version": NORMALIZATION_VERSION,
            "method": self.method,
            "checks_passed": checks_passed,
            "components": comps,
        }

    def to_json(self, checks_passed=None) -> str:
        return json.dumps(self.to_json_obj(checks_passed), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj) -> "QkzSolution":
        btype, L = obj["type"], obj["L"]
        vt = VarTable.standard(L)
        comps = {}
        for k, v in obj["components"].items():
            pat = LinkPattern.parse(btype, k) if k else LinkPattern(btype, ())
            comps[pat] = Poly.from_json_obj(v, vt)
        return cls(btype, L, vt, comps, obj.get("normalization", ""), obj.get("method", ""))

    @classmethod
    def from_json(cls, text: str) -> "QkzSolution":
        return cls.from_json_obj(json.loads(text))


def _half():
    return mpq(1, 2)


# ---------------------------------------------------------------------------
# base solutions


def base_solution(btype: str, L: int) -> QkzSolution:
    if L not in (0, 1):
        raise ValueError("base solutions exist for sizes 0 and 1")
    vt = VarTable.standard(L)
    if L == 0:
        return QkzSolution(btype, 0, vt, {LinkPattern(btype, ()): Poly.const(vt, 1)}, "empty product", "base")
    two = Poly.const(vt, 2)
    if btype in ("p", "c"):
        comps = {LinkPattern(btype, ("*",)): two}
    elif btype == "i":
        comps = {LinkPattern(btype, ("b",)): two}
    elif btype == "m":
        comps = {LinkPattern(btype, ("r",)): two}
    else:
        A, z, s = Poly.var(vt, "A"), Poly.var(vt, "z1"), shift_poly(vt, btype)
        comps = {
            LinkPattern("o", ("l",)): (A + z * 2) * 2,
            LinkPattern("o", ("r",)): (A - s - z * 2) * 2,
        }
    return QkzSolution(btype, 1, vt, comps, "m_pi of the single-site pattern", "base")


# ---------------------------------------------------------------------------
# scalar domains for the transport engine


class _SymDomain:
    def __init__(self, vt: VarTable, btype: str):
        self.vt = vt
        self.A = Poly.var(vt, "A")
        self.e = Poly.var(vt, "e")
        self.s = shift_poly(vt, btype)
        self.zero = Poly(vt)
        self.one = Poly.const(vt, 1)

    def div(self, n, d):
        return exact_div(n, d)

    def equal(self, a, b):
        return not (a - b).t


class _NumDomain:
    def __init__(self, A, e, btype: str):
        self.A = rat(A)
        self.e = rat(e)
        self.s = self.e * rat(shift_of(btype))
        self.zero = mpq(0)
        self.one = mpq(1)

    def div(self, n, d):
        if d == 0:
            raise DegenerateNode("zero denominator during transport")
        return n / d

    def equal(self, a, b):
        return a == b


def _r(dom, x):
    return (dom.A + x) * (dom.A * 2 - x - dom.e)


def _k(dom, w):
    return dom.A + w * 2


def _add(out, key, val):
    if val:
        cur = out.get(key)
        out[key] = val if cur is None else cur + val


def _nonsingular(dom, d):
    if isinstance(dom, _NumDomain) and not d:
        raise DegenerateNode("singular transport operator")


def _apply_R(dom, vec, k, u):
    A, e = dom.A, dom.e
    two = A * 2 - e
    c_id = two * (A - u)
    c_e = two * u
    c_loop = (A - e) * 2 * u
    c_f = (A - u) * u
    out: dict = {}
    for pat, v in vec.items():
        _add(out, pat, c_id * v)
        res = act_generator(("e", k), pat)
        _add(out, res.pattern, (c_loop if res.beta_exponent else c_e) * v)
        res = act_generator(("f", k), pat)
        _add(out, res.pattern, c_f * v)
    f1, f2 = A + u, two - u
    _nonsingular(dom, f1 * f2)
    return {p: dom.div(dom.div(x, f1), f2) for p, x in out.items() if x}


def _apply_K(dom, vec, side, w, btype, L):
    present = has_left_boundary(btype) if side == "left" else has_right_boundary(btype)
    if not present:
        return vec
    g = ("e", 0) if side == "left" else ("e", L)
    c1 = dom.A - w * 2
    c2 = w * 4
    out: dict = {}
    for pat, v in vec.items():
        _add(out, pat, c1 * v)
        _add(out, act_generator(g, pat).pattern, c2 * v)
    d = _k(dom, w)
    _nonsingular(dom, d)
    return {p: dom.div(x, d) for p, x in out.items() if x}


# ---------------------------------------------------------------------------
# recurrence factors


def bulk_factor(dom, btype: str, y: list, k: int):
    """p_k for the pair at positions k, k+1 of the argument list y."""
    A, e = dom.A, dom.e
    h = _half()
    zj = y[k - 1]
    before, after = y[: k - 1], y[k + 1:]
    rest = before + after
    f = dom.one * 2
    for zi in before:
        f = f * _r(dom, zi - zj)
    for zi in after:
        f = f * _r(dom, A + zj - zi)
    if btype == "p":
        return f
    for zi in rest:
        f = f * _r(dom, A + zi + zj)
    if btype == "c":
        return f
    if btype == "i":
        return f * _k(dom, -zj - e * h) * _k(dom, A + zj)
    q = h * h
    f = f * (A - e * h) * (A * 2 - e * h) * _k(dom, -zj - e * h) * _k(dom, A + zj)
    for zi in rest:
        f = f * _r(dom, zi - zj - e * h) * _r(dom, -zj - zi - e * h)
    if btype == "o":
        f = f * _k(dom, -zj - e * q) * _k(dom, A + zj - e * q)
    return f


def left_factor(dom, btype: str, rest: list):
    """p_0 as a function of the remaining arguments."""
    A, e, s = dom.A, dom.e, dom.s
    h = _half()
    q = h * h
    if btype == "i":
        f = dom.one * 2
        for w in rest:
            f = f * _k(dom, A - w - e * h) * _k(dom, A + w - e * h) * q
        return f
    if btype == "o":
        f = (A * 2 - s) * 2
        for w in rest:
            f = (f * _k(dom, A - w - e * q) * _k(dom, A + w - e * 3 * q)
                 * _k(dom, A + w - e * q) * _k(dom, A - w - e * 3 * q) * (q * q))
        return f
    raise ValueError(f"no left recurrence for type {btype}")


def right_factor(dom, btype: str, rest: list):
    """p_L as a function of the remaining arguments."""
    A, e, s = dom.A, dom.e, dom.s
    h = _half()
    q = h * h
    if btype == "i":
        f = dom.one * 2
        for w in rest:
            f = f * _k(dom, A + w) * _k(dom, A - w - e) * q
        return f
    if btype in ("o", "m"):
        f = dom.one * 2 if btype == "m" else (A * 2 - s) * 2
        for w in rest:
            f = (f * _k(dom, A + w) * _k(dom, A - w - e) * _k(dom, A - w - e * h)
                 * _k(dom, A + w - e * h) * (q * q))
        return f
    raise ValueError(f"no right recurrence for type {btype}")


# ---------------------------------------------------------------------------
# interpolation nodes and transport plans


def _node_kinds(btype: str, L: int) -> list:
    """Ordered candidate nodes for z_L as (kind, j)."""
    two_site = {"p": "ad", "c": "ac", "i": "abcd", "o": "abcd", "m": "abcd"}[btype]
    one_site = {"p": "", "c": "", "i": "efgh", "o": "efgh", "m": "eh"}[btype]
    out = []
    for kind in two_site:
        for j in range(L - 1, 0, -1):
            out.append((kind, j))
    for kind in one_site:
        out.append((kind, None))
    return out


def _node_value(dom, kind, j, y):
    A, s = dom.A, dom.s
    h = _half()
    if kind == "a":
        return A + y[j - 1]
    if kind == "b":
        return -A - y[j - 1]
    if kind == "c":
        return A - y[j - 1] - s
    if kind == "d":
        return -A + y[j - 1] + s
    if kind == "e":
        return -A * h
    if kind == "f":
        return (A - s) * h
    if kind == "g":
        return -(A - s) * h
    if kind == "h":
        return A * h - s
    raise ValueError(kind)


def _plan(btype: str, L: int, kind: str, j):
    """Elementary moves bringing the node onto a recurrence point."""
    to_front = [("swap", k) for k in range(L - 1, 0, -1)]
    if kind == "a":
        return [("swap", k) for k in range(L - 1, j, -1)] + [("bulk", j)]
    if kind == "b":
        return [("reflL",)] + _plan(btype, L, "a", j)
    if kind == "c":
        return ([("swap", k) for k in range(j - 1, 0, -1)] + [("refl0",)]
                + [("swap", k) for k in range(1, L - 1)] + [("bulk", L - 1)])
    if kind == "d":
        if btype == "p":
            return [("rot",)] + [("swap", k) for k in range(1, j)] + [("bulk", j)]
        return [("reflL",)] + _plan(btype, L, "c", j)
    if kind == "e":
        return [("right",)]
    if kind == "f":
        return to_front + [("left",)]
    if kind == "g":
        return [("reflL",)] + to_front + [("left",)]
    if kind == "h":
        return to_front + [("refl0",)] + [("swap", k) for k in range(1, L)] + [("right",)]
    raise ValueError(kind)


def _run_plan(dom, btype: str, L: int, y: list, plan: list, lower):
    """Psi_L(y) by transport along ``plan``; ``lower(L', args)`` gives smaller solutions."""
    y = list(y)
    trail = []
    h = _half()
    for op in plan:
        tag = op[0]
        if tag == "swap":
            k = op[1]
            trail.append(("R", k, y[k] - y[k - 1]))
            y[k - 1], y[k] = y[k], y[k - 1]
        elif tag == "refl0":
            trail.append(("K0", y[0] + dom.s * h))
            y[0] = -y[0] - dom.s
        elif tag == "reflL":
            trail.append(("KL", -y[-1]))
            y[-1] = -y[-1]
        elif tag == "rot":
            trail.append(("sigma",))
            y = [y[-1] - dom.s] + y[:-1]
        elif tag == "bulk":
            k = op[1]
            if not dom.equal(y[k], dom.A + y[k - 1]):
                raise AssertionError("transport did not reach a bulk recurrence point")
            rest = y[: k - 1] + y[k + 1:]
            f = bulk_factor(dom, btype, y, k)
            sub = lower(L - 2, rest)
            vec = {insert_small_arc(p, k): f * v for p, v in sub.items() if v}
        elif tag == "left":
            if not dom.equal(y[0], (dom.A - dom.s) * h):
                raise AssertionError("transport did not reach the left recurrence point")
            f = left_factor(dom, btype, y[1:])
            sub = lower(L - 1, y[1:])
            vec = {insert_boundary_site(p, "left"): f * v for p, v in sub.items() if v}
        elif tag == "right":
            if not dom.equal(y[-1], -dom.A * h):
                raise AssertionError("transport did not reach the right recurrence point")
            f = right_factor(dom, btype, y[:-1])
            sub = lower(L - 1, y[:-1])
            vec = {insert_boundary_site(p, "right"): f * v for p, v in sub.items() if v}
        else:
            raise ValueError(op)
    for step in reversed(trail):
        if step[0] == "R":
            vec = _apply_R(dom, vec, step[1], step[2])
        elif step[0] == "K0":
            vec = _apply_K(dom, vec, "left", step[1], btype, L)
        elif step[0] == "KL":
            vec = _apply_K(dom, vec, "right", step[1], btype, L)
        else:
            vec = {rotate_sigma(p): v for p, v in vec.items()}
    return vec


# ---------------------------------------------------------------------------
# caching


_MEMO: dict = {}


def _cache_path(btype, L, method):
    root = os.environ.get("BRAUER_CACHE_DIR")
    if not root:
        return None
    return Path(root) / f"psi_{btype}{L}_{method}_v{NORMALIZATION_VERSION}.json"


def _cached(btype, L, method, compute):
    key = (btype, L, method)
    if key in _MEMO:
        return _MEMO[key]
    path = _cache_path(btype, L, method)
    if path is not None and path.exists():
        sol = QkzSolution.from_json(path.read_text())
        sol.method = method
    else:
        sol = compute()
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(sol.to_json())
    _MEMO[key] = sol
    return sol


def clear_memo():
    _MEMO.clear()


# ---------------------------------------------------------------------------
# recursive solver


def _substituted(sol: QkzSolution, args: list, vt: VarTable) -> dict:
    mapping = {f"z{i + 1}": a for i, a in enumerate(args)}
    return {p: c.substitute(mapping, vt) for p, c in sol.components.items()}


def _extra_nodes(L):
    return 1


def solve_recursive(btype: str, L: int, check_nodes: int = 1) -> QkzSolution:
    """Interpolate Psi_L in z_L from recurrence values of smaller solutions."""
    if L <= 1:
        return base_solution(btype, L)
    return _cached(btype, L, "recur", lambda: _solve_recursive(btype, L, check_nodes))


def _solve_recursive(btype, L, check_nodes):
    vt = VarTable.standard(L)
    dom = _SymDomain(vt, btype)
    y = [Poly.var(vt, f"z{i}") for i in range(1, L)]
    lower_sols: dict = {}

    def lower(Lp, args):
        if Lp not in lower_sols:
            lower_sols[Lp] = solve_recursive(btype, Lp)
        return _substituted(lower_sols[Lp], args, vt)

    even = btype == "c"
    bound = zdegree_bound(btype, L)
    need = (bound // 2 if even else bound) + 1
    nodes, values = [], []
    for kind, j in _node_kinds(btype, L):
        if len(nodes) >= need + check_nodes:
            break
        node = _node_value(dom, kind, j, y)
        if any(not (node - n).t or (even and not (node + n).t) for n in nodes):
            continue
        plan = _plan(btype, L, kind, j)
        values.append(_run_plan(dom, btype, L, y + [node], plan, lower))
        nodes.append(node)
    if len(nodes) < need:
        from .polyring import InsufficientNodes
        raise InsufficientNodes(f"{len(nodes)} nodes for bound {bound}")
    comps = lagrange_interpolate(nodes, values, f"z{L}", need - 1, even=even)
    space = PatternSpace(btype, L)
    comps = {p: comps.get(p, Poly(vt)) for p in space}
    return QkzSolution(btype, L, vt, comps, "recurrence constants", "recur",
                       {"nodes": len(nodes), "degree_bound": bound})


# ---------------------------------------------------------------------------
# maximally factorized components


def omega_components(btype: str, L: int) -> dict:
    """Closed-form components (with unit symmetric factor) keyed by pattern."""
    vt = VarTable.standard(L)
    dom = _SymDomain(vt, btype)
    A, s = dom.A, dom.s
    z = [None] + [Poly.var(vt, f"z{i}") for i in range(1, L + 1)]
    h = _half()
    out = {}
    one = dom.one

    def r(x):
        return _r(dom, x)

    def k(w):
        return _k(dom, w)

    if btype == "p":
        if L == 0:
            return {LinkPattern("p", ()): one}
        f = one
        if L % 2 == 0:
            n = L // 2
            tgt = tuple(list(range(n + 1, L + 1)) + list(range(1, n + 1)))
            for i in range(1, L + 1):
                for j in range(i + 1, L + 1):
                    if j - i < n:
                        f = f * (A + z[i] - z[j])
                    elif j - i > n:
                        f = f * (A - z[i] + z[j] - s)
        else:
            n = (L - 1) // 2
            tgt = tuple(list(range(n + 1, L)) + list(range(1, n + 1)) + ["*"])
            for i in range(1, L + 1):
                for j in range(i + 1, L + 1):
                    if j - i < n or i > n:
                        f = f * (A + z[i] - z[j])
                    if j - i > n:
                        f = f * (A - z[i] + z[j] - s)
        pat = LinkPattern("p", tgt)
        out[pat] = f * m_pi(pat)
        return out
    if btype == "i":
        if L == 0:
            return {LinkPattern("i", ()): one}
        f = one * 2 ** L
        for i in range(1, L + 1):
            for j in range(i + 1, L + 1):
                f = f * r(z[i] - z[j])
        out[LinkPattern("i", ("b",) * L)] = f
        if L >= 2:
            f = one * 2 ** (L - 1) * k(-z[1] - s * h) * k(z[L])
            for i in range(2, L):
                for j in range(i + 1, L):
                    f = f * r(z[i] - z[j])
            for i in range(2, L):
                f = f * (A + z[1] - z[i]) * (A + z[i] - z[L]) * (A - z[1] - z[i] - s) * (A + z[i] + z[L])
            out[LinkPattern("i", tuple([L] + ["b"] * (L - 2) + [1]))] = f
        return out
    if btype == "o":
        for kk in range(L + 1):
            f = one * 2 ** L
            for i in range(1, kk + 1):
                f = f * k(-z[i] - s * h)
            for i in range(kk + 1, L + 1):
                f = f * k(z[i])
            for i in range(1, kk + 1):
                for j in range(i + 1, kk + 1):
                    f = f * r(z[i] - z[j]) * r(-z[i] - z[j] - s)
            for i in range(kk + 1, L + 1):
                for j in range(i + 1, L + 1):
                    f = f * r(z[i] - z[j]) * r(z[i] + z[j])
            for i in range(1, kk + 1):
                for j in range(kk + 1, L + 1):
                    f = f * (A + z[i] - z[j]) * (A - z[i] - z[j] - s) * (A + z[i] + z[j]) * (A - z[i] + z[j] - s)
            out[LinkPattern("o", tuple(["r"] * kk + ["l"] * (L - kk)))] = f
        return out
    if btype == "m":
        f = one * 2 ** L
        for i in range(1, L + 1):
            for j in range(i + 1, L + 1):
                f = f * r(z[i] - z[j]) * r(-z[i] - z[j] - s)
        out[LinkPattern("m", ("r",) * L)] = f
        return out
    return {}


# ---------------------------------------------------------------------------
# linear solver


def _monomials(nvars: int, total: int, zvars: int, zbound: int):
    out = []

    def rec(k, left, acc):
        if k == nvars - 1:
            if k < zvars and left > zbound:
                return
            out.append(tuple(acc + [left]))
            return
        top = min(left, zbound) if k < zvars else left
        for a in range(top, -1, -1):
            rec(k + 1, left - a, acc + [a])

    if nvars == 0:
        return [()]
    rec(0, total, [])
    return out


def _relation_data(rel, space, vt):
    """(operator or None, scalar multiplying tau Psi, tau mapping) for one relation."""
    btype, L = space.btype, space.L
    tag, i = rel
    if tag == "bulk":
        zz = Poly.var(vt, f"z{i}") - Poly.var(vt, f"z{i+1}")
        return build_R(space, vt, i, zz), r_of(vt, zz), i
    if tag == "left":
        w = -Poly.var(vt, "z1") - shift_poly(vt, btype) * _half()
        op = build_K(space, vt, "left", w)
        return op, (k_of(vt, w) if op.den else Poly.const(vt, 1)), 0
    if tag == "right":
        w = Poly.var(vt, f"z{L}")
        op = build_K(space, vt, "right", w)
        return op, (k_of(vt, w) if op.den else Poly.const(vt, 1)), L
    return None, None, None


def qkz_linear_system(btype: str, L: int):
    """Rows of the homogeneous coefficient system and the column labels."""
    vt = VarTable.standard(L)
    space = PatternSpace(btype, L)
    D = total_degree(btype, L)
    monos = _monomials(L + 2, D, L, zdegree_bound(btype, L))
    cols = [(p, m) for p in range(len(space)) for m in monos]
    rows: dict = {}
    rels = qkz_relations(btype, L)
    s = shift_poly(vt, btype)
    rot_map = None
    if btype == "p" and L >= 2:
        rot_map = {f"z{k}": Poly.var(vt, f"z{k % L + 1}") for k in range(1, L)}
        rot_map[f"z{L}"] = Poly.var(vt, "z1") + s
    tau_cache: dict = {}
    for ri, rel in enumerate(rels):
        op, other, ti = _relation_data(rel, space, vt)
        opcols = op.columns() if op is not None else None
        for c, (pi, mono) in enumerate(cols):
            M = Poly(vt, {vt.pack(mono): mpq(1)})
            contrib: dict = {}
            if rel[0] == "rotate":
                tgt = space.index[rotate_sigma(space[pi])]
                contrib[tgt] = M
                key = ("rot", mono)
                if key not in tau_cache:
                    tau_cache[key] = M.substitute(rot_map)
                contrib[pi] = contrib.get(pi, Poly(vt)) - tau_cache[key]
            else:
                for r, u in opcols.get(pi, ()):
                    contrib[r] = contrib.get(r, Poly(vt)) + u * M
                key = (ti, mono)
                if key not in tau_cache:
                    tau_cache[key] = tau(M, ti, btype, L)
                contrib[pi] = contrib.get(pi, Poly(vt)) - other * tau_cache[key]
            for r, poly in contrib.items():
                for mk, coef in poly.t.items():
                    rows.setdefault((ri, r, mk), {})[c] = coef
    ordered = [rows[k] for k in sorted(rows)]
    return ordered, cols, monos, vt, space


def solve_linear(btype: str, L: int) -> QkzSolution:
    """Solve the cleared coefficient system; the nullity is stored in ``info``."""
    if L == 0:
        return base_solution(btype, 0)
    return _cached(btype, L, "linear", lambda: _solve_linear(btype, L))


def _unique_rows(rows):
    seen = set()
    uniq = []
    for row in rows:
        key = tuple(sorted(row.items()))
        if key not in seen:
            seen.add(key)
            uniq.append(row)
    return uniq


def nullspace_dimension(btype: str, L: int) -> int:
    """Nullity of the qKZ coefficient system before any normalization."""
    rows, cols, _, _, _ = qkz_linear_system(btype, L)
    return solve_sparse_linear_exact(_unique_rows(rows), len(cols)).nullity


def _solve_linear(btype, L):
    rows, cols, monos, vt, space = qkz_linear_system(btype, L)
    uniq = _unique_rows(rows)
    sol = solve_sparse_linear_exact(uniq, len(cols))
    nullity = sol.nullity
    if nullity == 0:
        raise NoSolution(f"no nonzero solution of degree {total_degree(btype, L)}")
    if nullity > 1:
        raise AmbiguousSolution(f"nullspace dimension {nullity}")
    vec = sol.nullspace[0]
    comps = {p: Poly(vt) for p in space}
    for c, v in vec.items():
        pi, mono = cols[c]
        pat = space[pi]
        comps[pat] = comps[pat] + Poly(vt, {vt.pack(mono): v})
    scale, how = _anchor_scale(btype, L, comps, vt)
    comps = {p: c.scale(scale) for p, c in comps.items()}
    return QkzSolution(btype, L, vt, comps, how, "linear",
                       {"nullity": nullity, "unknowns": len(cols), "rows": len(uniq)})


def _ratio(target: Poly, got: Poly):
    if not got.t:
        raise NoSolution("anchor component vanishes")
    key = max(got.t)
    if key not in target.t:
        raise NoSolution("anchor component has the wrong shape")
    return target.t[key] / got.t[key]


def _anchor_scale(btype, L, comps, vt):
    if btype != "c":
        omegas = omega_components(btype, L)
        pat = min(omegas)
        return _ratio(omegas[pat], comps[pat]), f"maximally factorized component {pat.render()}"
    if L == 1:
        pat = LinkPattern("c", ("*",))
        return _ratio(Poly.const(vt, 2), comps[pat]), "m_pi of the single-site pattern"
    lowsol = solve_linear("c", L - 2)
    dom = _SymDomain(vt, btype)
    y = [Poly.var(vt, f"z{i}") for i in range(1, L + 1)]
    y[1] = dom.A + y[0]
    rest = y[2:]
    low = _substituted(lowsol, rest, vt)
    rho = min(p for p, v in low.items() if v.t)
    target = bulk_factor(dom, "c", y, 1) * low[rho]
    pat = insert_small_arc(rho, 1)
    got = comps[pat].substitute({"z2": y[1]})
    return _ratio(target, got), f"bulk recurrence at sites 1,2 against size {L - 2}"


# ---------------------------------------------------------------------------
# unified entry point


def solve(btype: str, L: int, method: str = "recur") -> QkzSolution:
    if method == "linear":
        return solve_linear(btype, L)
    if method in ("recur", "recursive"):
        return solve_recursive(btype, L)
    raise ValueError(f"unknown method {method}")


# ---------------------------------------------------------------------------
# verification


def _sympy_poly(p: Poly):
    import sympy

    gens = sympy.symbols(" ".join(p.vt.names))
    if not isinstance(gens, tuple):
        gens = (gens,)
    data = {}
    for key, c in p.t.items():
        data[p.vt.unpack(key)] = sympy.Rational(int(c.numerator), int(c.denominator))
    return sympy.Poly.from_dict(data, *gens, domain="QQ") if data else sympy.Poly(0, *gens, domain="QQ")


def joint_gcd_is_trivial(polys: list) -> bool:
    """True when the polynomial gcd over Q of the nonzero inputs is a constant."""
    nz = sorted((p for p in polys if p.t), key=lambda p: len(p.t))
    if not nz:
        return False
    g = _sympy_poly(nz[0])
    for p in nz[1:]:
        if g.total_degree() == 0:
            break
        g = g.gcd(_sympy_poly(p))
    return g.total_degree() == 0


def boundary_vanishing(sol: QkzSolution) -> list:
    """Patterns violating the one-site vanishing rules."""
    bad = []
    vt, btype, L = sol.vt, sol.btype, sol.L
    if L == 0:
        return bad
    dom = _SymDomain(vt, btype)
    h = _half()
    for pat, psi in sol.components.items():
        if has_right_boundary(btype) and pat(L) != right_letter(btype):
            if psi.substitute({f"z{L}": -dom.A * h}).t:
                bad.append(f"{pat.render()} at z{L}=-A/2")
        if has_left_boundary(btype) and pat(1) != left_letter(btype):
            if psi.substitute({"z1": (dom.A - dom.s) * h}).t:
                bad.append(f"{pat.render()} at z1=(A-s)/2")
    return bad


def verify_solution(sol: QkzSolution) -> dict:
    """Every exact check of a single solution; ``ok`` summarizes them."""
    space = sol.space
    rep: dict = {}
    qkz_bad = []
    for rel in qkz_relations(sol.btype, sol.L):
        if relation_residual(rel, sol.components, space, sol.vt):
            qkz_bad.append(str(rel))
    rep["qkz_relations"] = qkz_bad
    D = sol.degree
    rep["homogeneous"] = [p.render() for p, c in sol.components.items() if c.t and not c.is_homogeneous(D)]
    zb = zdegree_bound(sol.btype, sol.L)
    rep["zdegree_bounds"] = [p.render() for p, c in sol.components.items()
                             if any(c.degree_in(f"z{i}") > zb for i in range(1, sol.L + 1))]
    rep["nonzero"] = [p.render() for p in space if not sol[p].t]
    rep["component_relations"] = verify_component_relations(sol)["failures"]
    om = []
    for pat, target in omega_components(sol.btype, sol.L).items():
        if sol[pat] != target:
            om.append(pat.render())
    rep["omega_components"] = om
    rep["boundary_vanishing"] = boundary_vanishing(sol)
    rep["primitive"] = [] if (sol.L == 0 or joint_gcd_is_trivial(list(sol.components.values()))) else ["common factor"]
    rep["ok"] = all(not v for k, v in rep.items() if k != "ok")
    return rep


def verify_recurrences(solL: QkzSolution, solLm1: QkzSolution | None, solLm2: QkzSolution | None) -> dict:
    """Bulk and boundary recurrences of ``solL`` against smaller solutions."""
    btype, L, vt = solL.btype, solL.L, solL.vt
    dom = _SymDomain(vt, btype)
    h = _half()
    z = [Poly.var(vt, f"z{i}") for i in range(1, L + 1)]
    rep: dict = {"bulk": [], "left": [], "right": []}
    space = solL.space
    if solLm2 is not None and L >= 2:
        for j in range(1, L):
            y = list(z)
            y[j] = dom.A + z[j - 1]
            rest = y[: j - 1] + y[j + 1:]
            f = bulk_factor(dom, btype, y, j)
            low = _substituted(solLm2, rest, vt)
            expect = {insert_small_arc(p, j): f * v for p, v in low.items()}
            for pat in space:
                got = solL[pat].substitute({f"z{j+1}": y[j]})
                if got != expect.get(pat, Poly(vt)):
                    rep["bulk"].append(f"j={j} {pat.render()}")
    if solLm1 is not None and L >= 1:
        if has_left_boundary(btype):
            y = [(dom.A - dom.s) * h] + z[1:]
            f = left_factor(dom, btype, y[1:])
            low = _substituted(solLm1, y[1:], vt)
            expect = {insert_boundary_site(p, "left"): f * v for p, v in low.items()}
            for pat in space:
                if solL[pat].substitute({"z1": y[0]}) != expect.get(pat, Poly(vt)):
                    rep["left"].append(pat.render())
        if has_right_boundary(btype):
            y = z[:-1] + [-dom.A * h]
            f = right_factor(dom, btype, y[:-1])
            low = _substituted(solLm1, y[:-1], vt)
            expect = {insert_boundary_site(p, "right"): f * v for p, v in low.items()}
            for pat in space:
                if solL[pat].substitute({f"z{L}": y[-1]}) != expect.get(pat, Poly(vt)):
                    rep["right"].append(pat.render())
    rep["ok"] = not (rep["bulk"] or rep["left"] or rep["right"])
    return rep


# ---------------------------------------------------------------------------
# numeric evaluation


def _newton_numeric(nodes, values, x, even=False):
    n = len(nodes)
    xs = [t * t for t in nodes] if even else list(nodes)
    X = x * x if even else x
    dd = [dict(v) for v in values]
    keys = set().union(*[set(v) for v in values]) if values else set()
    coefs = []
    cur = [{k: v.get(k, mpq(0)) for k in keys} for v in dd]
    coefs.append(cur[0])
    for level in range(1, n):
        nxt = []
        for k in range(n - level):
            den = xs[k + level] - xs[k]
            if den == 0:
                raise DegenerateNode("coincident interpolation nodes")
            nxt.append({key: (cur[k + 1][key] - cur[k][key]) / den for key in keys})
        cur = nxt
        coefs.append(cur[0])
    out = {key: mpq(0) for key in keys}
    for k in range(n - 1, -1, -1):
        out = {key: out[key] * (X - xs[k]) + coefs[k][key] for key in keys}
    return out


def _base_numeric(btype, L, y, dom):
    if L == 0:
        return {LinkPattern(btype, ()): mpq(1)}
    if btype in ("p", "c"):
        return {LinkPattern(btype, ("*",)): mpq(2)}
    if btype == "i":
        return {LinkPattern(btype, ("b",)): mpq(2)}
    if btype == "m":
        return {LinkPattern(btype, ("r",)): mpq(2)}
    return {LinkPattern("o", ("l",)): 2 * (dom.A + 2 * y[0]),
            LinkPattern("o", ("r",)): 2 * (dom.A - dom.s - 2 * y[0])}


def evaluate_point(btype: str, L: int, point, e=0, memo: dict | None = None) -> dict:
    """Rational value of every component at one point by numeric recurrence descent.

    ``point`` maps z1..zL and A to rationals (``e`` defaults to 0).
    """
    A = point["A"]
    ys = tuple(rat(point[f"z{i}"]) for i in range(1, L + 1))
    dom = _NumDomain(A, point.get("e", e), btype)
    memo = {} if memo is None else memo
    return _eval_numeric(btype, L, ys, dom, memo)


def _eval_numeric(btype, L, y, dom, memo):
    key = (L, y)
    if key in memo:
        return memo[key]
    if L <= 1:
        out = _base_numeric(btype, L, y, dom)
        memo[key] = out
        return out
    even = btype == "c"
    bound = zdegree_bound(btype, L)
    need = (bound // 2 if even else bound) + 1

    def lower(Lp, args):
        return _eval_numeric(btype, Lp, tuple(args), dom, memo)

    prefix = list(y[:-1])
    nodes, values = [], []
    for kind, j in _node_kinds(btype, L):
        if len(nodes) >= need:
            break
        node = _node_value(dom, kind, j, prefix)
        if any(node == n or (even and node == -n) for n in nodes):
            continue
        try:
            val = _run_plan(dom, btype, L, prefix + [node], _plan(btype, L, kind, j), lower)
        except (DegenerateNode, ZeroDivisionError):
            continue
        nodes.append(node)
        values.append(val)
    if len(nodes) < need:
        raise DegenerateNode(f"only {len(nodes)} usable nodes, need {need}")
    out = _newton_numeric(nodes, values, y[-1], even)
    out = {p: v for p, v in out.items() if v}
    memo[key] = out
    return out


# ---------------------------------------------------------------------------
# the specialization e = 2A


def eps2A_factorization(sol: QkzSolution) -> dict:
    """Specialize e := 2A and factor every component into linear forms when possible."""
    vt = sol.vt
    A = Poly.var(vt, "A")
    report = {"vanishing": [], "linear": [], "not_linear": [], "factors": {}}
    for pat in sorted(sol.components):
        p = sol.components[pat].substitute({"e": A * 2})
        name = pat.render()
        if not p.t:
            report["vanishing"].append(name)
            continue
        const, facs = _sympy_poly(p).factor_list()
        report["factors"][name] = [(str(f.as_expr()), m) for f, m in facs]
        if all(f.total_degree() <= 1 for f, _ in facs):
            report["linear"].append(name)
        else:
            report["not_linear"].append(name)
    if sol.btype == "m":
        survivors = [p.render() for p in sol.components if sol.components[p].substitute({"e": A * 2}).t]
        allr = LinkPattern("m", ("r",) * sol.L).render()
        report["zero_pattern_ok"] = survivors == [allr]
    report["ok"] = not report["not_linear"] and report.get("zero_pattern_ok", True)
    return report

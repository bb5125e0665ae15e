"""Sum rules of the ground state and related multidegree identities.

All sums are taken at e = 0 unless stated otherwise.  Closed forms are
evaluated over fractions with linear-form denominators and cleared exactly;
fixed-point sums are put over one common denominator built from the
differences and sums of the spectral parameters.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .linkpat import LinkPattern, m_pi
from .polyring import LinForm, LinFrac, NotDivisible, Poly, VarTable, _div_linear, lagrange_interpolate
from . import qkzsolve


class SymmetryViolation(AssertionError):
    pass


class NotAntisymmetric(ValueError):
    pass


class NotProportional(AssertionError):
    pass


def _vt(L: int) -> VarTable:
    return VarTable.standard(L)


def _z(vt, i):
    return Poly.var(vt, f"z{i}")


def _A(vt):
    return Poly.var(vt, "A")


# ---------------------------------------------------------------------------
# the sum of components


def _at_e0(p: Poly) -> Poly:
    return p.substitute({"e": 0}) if "e" in p.vt else p


def weyl_symmetric(p: Poly, L: int, even: bool) -> bool:
    vt = p.vt
    for i in range(1, L):
        a, b = f"z{i}", f"z{i + 1}"
        if p.substitute({a: Poly.var(vt, b), b: Poly.var(vt, a)}) != p:
            return False
    if even and L and p.substitute({"z1": -Poly.var(vt, "z1")}) != p:
        return False
    return True


def compute_zsum(sol) -> Poly:
    """Sum of all components at e = 0, checked for Weyl symmetry."""
    vt = sol.vt
    Z = Poly(vt)
    for comp in sol.components.values():
        Z = Z + comp
    Z = _at_e0(Z)
    if not weyl_symmetric(Z, sol.L, sol.btype != "p"):
        raise SymmetryViolation(f"sum rule of {sol.btype}{sol.L} is not Weyl symmetric")
    return Z


# ---------------------------------------------------------------------------
# Pfaffians and determinants


def _is_zero(x) -> bool:
    if isinstance(x, LinFrac):
        return x.is_zero()
    if isinstance(x, Poly):
        return not x.t
    return x == 0


def _check_antisymmetric(M):
    n = len(M)
    for i in range(n):
        if len(M[i]) != n:
            raise NotAntisymmetric("matrix is not square")
        if not _is_zero(M[i][i]):
            raise NotAntisymmetric(f"nonzero diagonal entry at {i}")
        for j in range(i):
            if not _is_zero(M[i][j] + M[j][i]):
                raise NotAntisymmetric(f"entries ({i},{j}) and ({j},{i}) are not opposite")


def pfaffian(M):
    """Pfaffian by expansion over perfect matchings along the first row."""
    _check_antisymmetric(M)
    if len(M) % 2:
        raise NotAntisymmetric("odd dimension")
    return _pf(M, tuple(range(len(M))))


def _pf(M, idx):
    if not idx:
        return 1
    i = idx[0]
    total = None
    for k in range(1, len(idx)):
        j = idx[k]
        if _is_zero(M[i][j]):
            continue
        sub = _pf(M, idx[1:k] + idx[k + 1:])
        term = M[i][j] * sub if k % 2 else -(M[i][j] * sub)
        total = term if total is None else total + term
    return 0 if total is None else total


def determinant(M):
    """Determinant by cofactor expansion along the first row."""
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("matrix is not square")
    return _det(M, tuple(range(n)), tuple(range(n)))


def _det(M, rows, cols):
    if not rows:
        return 1
    r = rows[0]
    total = None
    for k, c in enumerate(cols):
        if _is_zero(M[r][c]):
            continue
        sub = _det(M, rows[1:], cols[:k] + cols[k + 1:])
        term = M[r][c] * sub if k % 2 == 0 else -(M[r][c] * sub)
        total = term if total is None else total + term
    return 0 if total is None else total


# ---------------------------------------------------------------------------
# closed forms


def _frac(vt, num: Poly, dens) -> LinFrac:
    return LinFrac.ratio(num, dens)


def _b(vt, i, j) -> LinFrac:
    A, zi, zj = _A(vt), _z(vt, i), _z(vt, j)
    num = (A * A - (zi - zj) ** 2) * (A * A - (zi + zj) ** 2)
    return _frac(vt, num, [zi - zj, zi + zj])


def _inv_b(vt, i, j, num: Poly) -> LinFrac:
    A, zi, zj = _A(vt), _z(vt, i), _z(vt, j)
    return _frac(vt, num * (zi - zj) * (zi + zj), [A - zi + zj, A + zi - zj, A - zi - zj, A + zi + zj])


def _bordered(M, vt, top, bottom):
    n = len(M)
    out = [list(row) + [LinFrac(Poly.const(vt, top))] for row in M]
    out.append([LinFrac(Poly.const(vt, bottom))] * n + [LinFrac(Poly(vt))])
    return out


def _entry_matrix(vt, L, entry):
    zero = LinFrac(Poly(vt))
    return [[zero if i == j else entry(i, j) for j in range(1, L + 1)] for i in range(1, L + 1)]


def zformula(btype: str, L: int, printed_odd_closed_constant: bool = False) -> Poly:
    """Closed Pfaffian or determinant form of the sum rule at e = 0.

    For type c at odd L the prefactor is 2^((L+1)/2), which matches the
    normalization Z_1 = 2; ``printed_odd_closed_constant`` selects
    2^((L-1)/2) instead.
    """
    if btype not in ("p", "i", "c", "o"):
        raise ValueError(f"no closed form for type {btype}")
    vt = _vt(L)
    A = _A(vt)
    odd = L % 2
    if L == 0:
        return Poly.const(vt, 1)
    if btype == "p":
        pref = LinFrac(Poly.const(vt, 1))
        for i in range(1, L + 1):
            for j in range(i + 1, L + 1):
                d = _z(vt, i) - _z(vt, j)
                pref = pref * _frac(vt, A * A - d * d, [d])

        def entry(i, j):
            d = _z(vt, i) - _z(vt, j)
            return _frac(vt, d, [A - d, A + d])

        M = _entry_matrix(vt, L, entry)
        if odd:
            M = _bordered(M, vt, -1, 1)
            c = (-2) ** ((L + 1) // 2)
        else:
            c = 2 ** (L // 2)
        return (pref * pfaffian(M) * c).clear()
    pref = LinFrac(Poly.const(vt, 1))
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            pref = pref * _b(vt, i, j)
    if btype == "c":
        M = _entry_matrix(vt, L, lambda i, j: _inv_b(vt, i, j, Poly.const(vt, 1)))
    else:
        M = _entry_matrix(vt, L, lambda i, j: _inv_b(
            vt, i, j, A * A * 5 - _z(vt, i) ** 2 * 2 - _z(vt, j) ** 2 * 2))
    if odd:
        M = _bordered(M, vt, 1, -1)
    if btype == "o":
        c = (A * 2) ** L * (2 if odd else 1)
        return (pref * pref * determinant(M) * c).clear()
    if btype == "i":
        c = 2 ** ((L + 1) // 2) if odd else 2 ** (L // 2)
    else:
        if odd:
            c = 2 ** ((L - 1) // 2) if printed_odd_closed_constant else 2 ** ((L + 1) // 2)
        else:
            c = 2 ** (L // 2)
    return (pref * pfaffian(M) * c).clear()


# ---------------------------------------------------------------------------
# localization


def _fixed_point_sum(vt, prefactor: list, terms, zden: list) -> Poly:
    """prefactor * sum over terms of sign / (A-forms * z-forms), cleared.

    ``terms`` yields (A-forms, z-forms); every A-form must occur in the
    prefactor and every z-form in the common denominator ``zden`` (up to sign).
    """
    base = {}
    for f in prefactor:
        c, g = LinForm.normalize(f)
        base.setdefault(g, []).append(c)
    zbase = {}
    for f in zden:
        c, g = LinForm.normalize(f)
        zbase.setdefault(g, []).append(c)
    total = Poly(vt)
    for aforms, zforms in terms:
        scale = mpq(1)
        avail = {g: list(cs) for g, cs in base.items()}
        for f in aforms:
            c, g = LinForm.normalize(f)
            if not avail.get(g):
                raise NotDivisible(f"denominator {f} not in the prefactor")
            scale *= avail[g].pop() / c
        zavail = {g: list(cs) for g, cs in zbase.items()}
        for f in zforms:
            c, g = LinForm.normalize(f)
            if not zavail.get(g):
                raise NotDivisible(f"denominator {f} not in the common denominator")
            scale *= zavail[g].pop() / c
        num = Poly.const(vt, scale)
        for g, cs in itertools.chain(avail.items(), zavail.items()):
            for c in cs:
                num = num * g.poly.scale(c)
        total = total + num
    for f in zden:
        total = _div_linear(total, f)
    return total


def _pm4(vt, i, j):
    A, zi, zj = _A(vt), _z(vt, i), _z(vt, j)
    return [A + zi + zj, A + zi - zj, A - zi + zj, A - zi - zj]


def _signed_forms(vt, eps, i, j):
    return eps[i - 1] * _z(vt, i) + eps[j - 1] * _z(vt, j)


def _loc_p(L):
    vt = _vt(L)
    A = _A(vt)
    n, r = divmod(L, 2)
    pref = [A + _z(vt, i) - _z(vt, j) for i in range(1, L + 1) for j in range(1, L + 1)]
    zden = [_z(vt, i) - _z(vt, j) for i in range(1, L + 1) for j in range(i + 1, L + 1)]

    def terms():
        for I in itertools.combinations(range(1, L + 1), n):
            J = [j for j in range(1, L + 1) if j not in I]
            yield ([A + _z(vt, i) - _z(vt, j) for i in I for j in J],
                   [_z(vt, j) - _z(vt, i) for i in I for j in J])

    out = _fixed_point_sum(vt, pref, terms(), zden) if L else Poly.const(vt, 1)
    return out * 2 ** r


def _zden_c(vt, L, diag: bool):
    out = [_z(vt, i) * 2 for i in range(1, L + 1)] if diag else []
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            out += [_z(vt, i) - _z(vt, j), _z(vt, i) + _z(vt, j)]
    return out


def _loc_i(L):
    vt = _vt(L)
    A = _A(vt)
    if not L:
        return Poly.const(vt, 1)
    pref = []
    for i in range(1, L + 1):
        for j in range(i, L + 1):
            pref += _pm4(vt, i, j)
    # A^{-n}: drop one copy of A per diagonal pair
    for i in range(1, L + 1):
        pref.remove(next(f for f in pref if f == A))
    zden = _zden_c(vt, L, True)

    def terms():
        for eps in itertools.product((1, -1), repeat=L):
            zf, af = [], []
            for i in range(1, L + 1):
                for j in range(i, L + 1):
                    w = _signed_forms(vt, eps, i, j)
                    zf.append(w)
                    af.append(A - w)
            yield af, zf

    return _fixed_point_sum(vt, pref, terms(), zden)


def _loc_c_even(L):
    vt = _vt(L)
    A = _A(vt)
    if not L:
        return Poly.const(vt, 1)
    pref = [A] * L
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            pref += _pm4(vt, i, j)
    zden = _zden_c(vt, L, True)

    def terms():
        for eps in itertools.product((1, -1), repeat=L):
            zf, af = [], []
            for i in range(1, L + 1):
                for j in range(i, L + 1):
                    w = _signed_forms(vt, eps, i, j)
                    zf.append(w)
                    if i < j:
                        af.append(A - w)
            yield af, zf

    return _fixed_point_sum(vt, pref, terms(), zden)


def _loc_m(L):
    vt = _vt(L)
    A = _A(vt)
    if not L:
        return Poly.const(vt, 1)
    pref = []
    for i in range(1, L + 1):
        for j in range(1, L + 1):
            pref += _pm4(vt, i, j)
    zden = _zden_c(vt, L, True) * 2

    def terms():
        signs = list(itertools.product((1, -1), repeat=L))
        for eps in signs:
            for eps2 in signs:
                zf, af = [], []
                for i in range(1, L + 1):
                    for j in range(i, L + 1):
                        zf.append(_signed_forms(vt, eps, i, j))
                        zf.append(_signed_forms(vt, eps2, i, j))
                for i in range(1, L + 1):
                    for j in range(1, L + 1):
                        af.append(A - eps[i - 1] * _z(vt, i) - eps2[j - 1] * _z(vt, j))
                yield af, zf

    return _fixed_point_sum(vt, pref, terms(), zden)


def _e0_domain(vt):
    dom = qkzsolve._SymDomain(vt, "c")
    dom.e = Poly(vt)
    dom.s = Poly(vt)
    return dom


def _recsum_nodes(L: int, lower: Poly):
    """Values of a type-c sum rule of size L at z_L = A +- z_i from size L-2."""
    vt = _vt(L)
    dom = _e0_domain(vt)
    A = _A(vt)
    nodes, values = [], []
    for i in range(1, L):
        rest_idx = [k for k in range(1, L) if k != i]
        rest = [_z(vt, k) for k in rest_idx]
        ren = {f"z{a}": _z(vt, b) for a, b in zip(range(1, L - 1), rest_idx)}
        low = lower.substitute(ren, vt) if L > 2 else Poly.const(vt, lower.constant_value())
        for sgn in (1, -1):
            zi = _z(vt, i) * sgn
            f = qkzsolve.bulk_factor(dom, "c", rest + [zi, A + zi], L - 1)
            nodes.append(A + zi)
            values.append(f * low)
    return nodes, values


def _sumrule_c_by_recursion(L: int) -> Poly:
    """Type-c sum rule for odd L from the recurrence and evenness in z_L."""
    if L == 1:
        return Poly.const(_vt(1), 2)
    lower = _sumrule_c_by_recursion(L - 2)
    nodes, values = _recsum_nodes(L, lower)
    bound = qkzsolve.zdegree_bound("c", L) // 2
    return lagrange_interpolate(nodes, values, f"z{L}", bound, even=True)


def _size_from_N(btype: str, N: int) -> int:
    k = {"p": 1, "i": 2, "c": 2, "o": 4, "m": 4}[btype]
    if N % k:
        raise ValueError(f"N={N} incompatible with type {btype}")
    return N // k


def localization_mdeg(btype: str, N: int) -> Poly:
    """Fixed-point formula for the multidegree of the orbit closure of size N."""
    L = _size_from_N(btype, N)
    if btype == "p":
        return _loc_p(L)
    if btype == "i":
        return _loc_i(L)
    if btype == "c":
        if L % 2 == 0:
            return _loc_c_even(L)
        return _sumrule_c_by_recursion(L) * _A(_vt(L)) ** L
    if btype == "o":
        q = _loc_i(L)
        return q * q
    if btype == "m":
        return _loc_m(L)
    raise ValueError(btype)


def localization_check_points(btype: str, N: int, poly: Poly, count: int = 3, seed: int = 0) -> bool:
    """Compare ``poly`` with direct evaluation of the fixed-point sum at rational points."""
    L = _size_from_N(btype, N)
    if btype == "c" and L % 2:
        return True
    rng = random.Random(seed)
    for _ in range(count):
        pt = {f"z{i}": mpq(rng.randint(-40, 40), rng.randint(1, 9)) + mpq(i, 101) for i in range(1, L + 1)}
        pt["A"] = mpq(rng.randint(1, 30), rng.randint(1, 7))
        pt["e"] = mpq(0)
        if poly.evaluate(pt) != _loc_numeric(btype, L, pt):
            return False
    return True


def _loc_numeric(btype, L, pt):
    A = pt["A"]
    z = [pt[f"z{i}"] for i in range(1, L + 1)]

    def pm4(i, j):
        out = mpq(1)
        for a in (1, -1):
            for b in (1, -1):
                out *= A + a * z[i] + b * z[j]
        return out

    if btype == "p":
        n, r = divmod(L, 2)
        pref = mpq(1)
        for i in range(L):
            for j in range(L):
                pref *= A + z[i] - z[j]
        tot = mpq(0)
        for I in itertools.combinations(range(L), n):
            t = mpq(1)
            for i in I:
                for j in range(L):
                    if j not in I:
                        t /= (z[j] - z[i]) * (A + z[i] - z[j])
            tot += t
        return 2 ** r * pref * tot
    if btype in ("i", "o"):
        pref = A ** (-L)
        for i in range(L):
            for j in range(i, L):
                pref *= pm4(i, j)
        tot = mpq(0)
        for eps in itertools.product((1, -1), repeat=L):
            t = mpq(1)
            for i in range(L):
                for j in range(i, L):
                    w = eps[i] * z[i] + eps[j] * z[j]
                    t /= w * (A - w)
            tot += t
        v = pref * tot
        return v * v if btype == "o" else v
    if btype == "c":
        pref = A ** L
        for i in range(L):
            for j in range(i + 1, L):
                pref *= pm4(i, j)
        tot = mpq(0)
        for eps in itertools.product((1, -1), repeat=L):
            t = mpq(1)
            for i in range(L):
                for j in range(i, L):
                    w = eps[i] * z[i] + eps[j] * z[j]
                    t /= w if i == j else w * (A - w)
            tot += t
        return pref * tot
    pref = mpq(1)
    for i in range(L):
        for j in range(L):
            pref *= pm4(i, j)
    tot = mpq(0)
    signs = list(itertools.product((1, -1), repeat=L))
    for eps in signs:
        for eps2 in signs:
            t = mpq(1)
            for i in range(L):
                for j in range(i, L):
                    t /= (eps[i] * z[i] + eps[j] * z[j]) * (eps2[i] * z[i] + eps2[j] * z[j])
            for i in range(L):
                for j in range(L):
                    t /= A - eps[i] * z[i] - eps2[j] * z[j]
            tot += t
    return pref * tot


# ---------------------------------------------------------------------------
# recurrences of the sum rule


def recsum_check(btype: str, Z: Poly, L: int, lower2: Poly | None, lower1: Poly | None = None) -> dict:
    """Check the sum-rule recurrences against smaller sum rules (all at e = 0)."""
    vt = Z.vt
    dom = qkzsolve._SymDomain(vt, btype)
    dom.e = Poly(vt)
    dom.s = Poly(vt)
    A = _A(vt)
    out = {"bulk": True, "boundary": True}

    def embed(P, idx):
        if P.vt.n == vt.n and P.vt == vt:
            return P
        mp = {f"z{a}": _z(vt, b) for a, b in enumerate(idx, 1)}
        names = [n for n in P.vt.names if n not in mp]
        for n in names:
            mp[n] = Poly.var(vt, n) if n in vt else 0
        return P.substitute(mp, vt)

    if lower2 is not None and L >= 2:
        signs = (1,) if btype == "p" else (1, -1)
        for i in range(1, L + 1):
            for j in range(1, L + 1):
                if i == j:
                    continue
                rest_idx = [k for k in range(1, L + 1) if k not in (i, j)]
                rest = [_z(vt, k) for k in rest_idx]
                low = embed(lower2, rest_idx)
                for sg in signs:
                    for side in (1, -1):
                        if btype == "p" and side == -1:
                            continue
                        zi = _z(vt, i) * sg
                        if side == 1:
                            lhs = Z.substitute({f"z{j}": A + zi}, vt)
                            f = qkzsolve.bulk_factor(dom, btype, rest + [zi, A + zi], L - 1)
                        else:
                            lhs = Z.substitute({f"z{j}": -A + zi}, vt)
                            f = qkzsolve.bulk_factor(dom, btype, rest + [-zi, A - zi], L - 1)
                        if lhs != f * low:
                            out["bulk"] = False
    if lower1 is not None and btype in ("i", "o", "m") and L >= 1:
        for i in range(1, L + 1):
            rest_idx = [k for k in range(1, L + 1) if k != i]
            rest = [_z(vt, k) for k in rest_idx]
            low = embed(lower1, rest_idx)
            f = qkzsolve.right_factor(dom, btype, rest)
            for sg in (1, -1):
                lhs = Z.substitute({f"z{i}": A.scale(mpq(sg, 2))}, vt)
                if lhs != f * low:
                    out["boundary"] = False
    out["ok"] = out["bulk"] and out["boundary"]
    return out


# ---------------------------------------------------------------------------
# reports


@dataclass
class SumRuleReport:
    btype: str
    L: int
    Z: Poly
    closed_form: Poly | None = None
    localization: Poly | None = None
    flags: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "type": self.btype,
            "L": self.L,
            "Z": str(self.Z),
            "closed_form": None if self.closed_form is None else str(self.closed_form),
            "localization": None if self.localization is None else str(self.localization),
            "flags": dict(self.flags),
        }

    @property
    def ok(self) -> bool:
        return all(v for v in self.flags.values() if isinstance(v, bool))


def sumrule_report(btype: str, L: int, pfaffian: bool = True, localization: bool = True,
                   sol=None) -> SumRuleReport:
    sol = qkzsolve.solve(btype, L) if sol is None else sol
    Z = compute_zsum(sol)
    rep = SumRuleReport(btype, L, Z)
    rep.flags["weyl_symmetric"] = True
    if pfaffian and btype != "m":
        rep.closed_form = zformula(btype, L)
        rep.flags["closed_form_equal"] = rep.closed_form == _embed_std(Z, L)
    if localization:
        N = L * {"p": 1, "i": 2, "c": 2, "o": 4, "m": 4}[btype]
        loc = localization_mdeg(btype, N)
        rep.localization = loc
        rep.flags["localization_equal"] = loc == _embed_std(Z, L) * _A(_vt(L)) ** L
    return rep


def _embed_std(p: Poly, L: int) -> Poly:
    vt = _vt(L)
    if p.vt == vt:
        return p
    return p.substitute({n: Poly.var(vt, n) for n in p.vt.names if n in vt}, vt)


# ---------------------------------------------------------------------------
# the permutation sector


def mdeg_perm_sector(btype: str, m: int) -> Poly:
    """Product of weights of the complete intersection (generic e)."""
    L = 2 * m
    vt = _vt(L)
    A, e = _A(vt), Poly.var(vt, "e")
    z = lambda i: _z(vt, i)  # noqa: E731
    out = Poly.const(vt, 1)
    if btype == "i":
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                out = out * (A + z(i) - z(j)) * (A - z(i) - z(j) - e)
                if i < j:
                    out = out * (A * 2 + z(j) - z(i) - e) * (A * 2 + z(i) + z(j))
        for i in range(m + 1, L + 1):
            for j in range(i, L + 1):
                out = out * (A + z(i) - z(j)) * (A + z(i) + z(j))
                if i < j:
                    out = out * (A * 2 + z(j) - z(i) - e) * (A * 2 - z(i) - z(j) - e)
        return out
    if btype == "c":
        out = A ** L
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                out = (out * (A + z(i) - z(j)) * (A - z(i) - z(j) - e)
                       * (A * 2 + z(j) - z(i) - e) * (A * 2 + z(i) + z(j)))
        for i in range(m + 1, L + 1):
            for j in range(i + 1, L + 1):
                out = (out * (A + z(i) - z(j)) * (A + z(i) + z(j))
                       * (A * 2 + z(j) - z(i) - e) * (A * 2 - z(i) - z(j) - e))
        return out
    raise ValueError(f"no permutation sector formula for type {btype}")


def _in_sector(pat: LinkPattern, m: int) -> bool:
    t = pat.target
    return all(isinstance(t[i - 1], int) and m < t[i - 1] <= 2 * m for i in range(1, m + 1))


def sector_identity(btype: str, m: int, sol=None, sol_other=None) -> dict:
    """Sector sum of A^L psi against the complete-intersection product."""
    L = 2 * m
    sol = qkzsolve.solve(btype, L) if sol is None else sol
    vt = sol.vt
    A = _A(vt)
    pats = [p for p in sol.components if _in_sector(p, m)]
    S = Poly(vt)
    for p in pats:
        S = S + sol.components[p]
    S = S * A ** L
    prod = _embed_std(mdeg_perm_sector(btype, m), L)
    if not S.t:
        raise NotProportional("empty sector sum")
    lead_key = max(prod.t)
    c = S.t.get(lead_key)
    if c is None or S != prod.scale(c / prod.t[lead_key]):
        raise NotProportional(f"sector sum of {btype}{L} is not a multiple of the product")
    const = c / prod.t[lead_key]
    exponent = None
    if const > 0 and const.denominator == 1:
        n = int(const.numerator)
        if n & (n - 1) == 0:
            exponent = n.bit_length() - 1
    report = {
        "type": btype,
        "m": m,
        "patterns": [p.render() for p in sorted(pats)],
        "constant": str(const),
        "power_of_two": exponent is not None,
        "exponent": exponent,
        "stated_exponent": L,
        "matches_stated": exponent == L,
        "m_pi": sorted({m_pi(p) for p in pats}),
    }
    if btype == "i":
        other = qkzsolve.solve("c", L) if sol_other is None else sol_other
        fac = Poly.const(vt, 1)
        e = Poly.var(vt, "e")
        for i in range(1, m + 1):
            fac = fac * (A - _z(vt, i) * 2 - e)
        for i in range(m + 1, L + 1):
            fac = fac * (A + _z(vt, i) * 2)
        rel = {}
        for p in pats:
            q = LinkPattern("c", p.target)
            rel[p.render()] = sol.components[p] == fac * _embed_std(other.components.get(q, Poly(other.vt)), L)
        report["identified_vs_closed"] = rel
        report["identified_vs_closed_ok"] = all(rel.values())
    report["ok"] = report["power_of_two"] and report.get("identified_vs_closed_ok", True)
    return report


# ---------------------------------------------------------------------------
# commuting varieties


def commuting_degree(n: int, samples: int | None = None) -> int:
    """Degree of the symplectic commuting variety of size n (n even).

    The nested-mirror component is restricted to the line z = t*z0, A = 1,
    e = 0, sampled by numeric recurrence descent and interpolated at t = 0.
    """
    if n <= 0 or n % 2:
        raise ValueError("n must be a positive even integer")
    pat = LinkPattern("i", tuple(range(n, 0, -1)))
    D = qkzsolve.total_degree("i", n)
    z0 = [mpq(k) for k in (3, -5, 7, 11, -13, 17, 19, -23, 29, -31)[:n]]
    if len(z0) < n:
        raise ValueError("n too large")
    count = max(D + 2, samples or 0)
    ts = [mpq(k, 7) + mpq(1, 13) for k in range(1, count + 1)]
    memo_vals = []
    for t in ts:
        pt = {f"z{i}": t * z0[i - 1] for i in range(1, n + 1)}
        pt["A"] = mpq(1)
        vals = qkzsolve.evaluate_point("i", n, pt)
        memo_vals.append(vals.get(pat, mpq(0)))
    if _lagrange_at(ts[:D + 1], memo_vals[:D + 1], ts[-1]) != memo_vals[-1]:
        raise qkzsolve.DegenerateNode("restricted component exceeds its degree bound")
    h0 = _lagrange_at(ts[:D + 1], memo_vals[:D + 1], mpq(0))
    deg = h0 / m_pi(pat)
    if deg.denominator != 1:
        raise NotDivisible(f"degree {deg} is not an integer")
    return int(deg)


def _lagrange_at(xs, ys, x):
    total = mpq(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = mpq(1)
        for j, xj in enumerate(xs):
            if j != i:
                w *= (x - xj) / (xi - xj)
        total += w * yi
    return total

"""Exact rational polynomials, linear-form fractions and sparse linear algebra.

Monomials are packed into a single Python integer: every variable owns a
fixed-width bit field and the total degree sits in the topmost field.  With
that layout integer order is graded-lexicographic order and multiplying
monomials is integer addition.
"""

from __future__ import annotations

import heapq
import json
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import gmpy2
from gmpy2 import mpq

Rational = mpq

BITS = 12
MASK = (1 << BITS) - 1


class PolyError(Exception):
    """Base class for arithmetic failures."""


class VarTableMismatch(PolyError):
    pass


class NotDivisible(PolyError):
    """An exact division left a remainder; upstream an identity is violated."""


class DuplicateNode(PolyError):
    pass


class InterpolationMismatch(PolyError):
    pass


class InsufficientNodes(PolyError):
    pass


class Inconsistent(PolyError):
    pass


def rat(x) -> mpq:
    """Coerce ints, Fractions, mpq and "n/d" strings to an exact rational."""
    if isinstance(x, str):
        if "/" in x:
            n, d = x.split("/")
            return mpq(int(n), int(d))
        return mpq(int(x))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def rat_str(c) -> str:
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class VarTable:
    """Ordered variable names shared by every polynomial of one computation."""

    __slots__ = ("names", "index", "n", "shifts", "degshift", "units")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.names = names
        self.index = {v: k for k, v in enumerate(names)}
        self.n = len(names)
        self.shifts = tuple((self.n - 1 - k) * BITS for k in range(self.n))
        self.degshift = self.n * BITS
        self.units = tuple((1 << s) | (1 << self.degshift) for s in self.shifts)

    @classmethod
    def standard(cls, L: int, extra: Sequence[str] = ()) -> "VarTable":
        return cls([f"z{i}" for i in range(1, L + 1)] + ["A", "e"] + list(extra))

    def __eq__(self, other):
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarTable({list(self.names)})"

    def __contains__(self, name):
        return name in self.index

    def idx(self, v) -> int:
        if isinstance(v, int):
            return v
        try:
            return self.index[v]
        except KeyError:
            raise VarTableMismatch(f"unknown variable {v!r} in {self.names}") from None

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.n:
            raise VarTableMismatch("exponent vector length mismatch")
        key = 0
        for e, s in zip(exps, self.shifts):
            if e < 0 or e > MASK:
                raise ValueError(f"exponent {e} out of range")
            key |= e << s
        return key | (sum(exps) << self.degshift)

    def unpack(self, key: int) -> tuple:
        return tuple((key >> s) & MASK for s in self.shifts)

    def exp_of(self, key: int, k: int) -> int:
        return (key >> self.shifts[k]) & MASK


Scalar = Union[int, mpq, Fraction]


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients."""

    __slots__ = ("vt", "t")

    def __init__(self, vt: VarTable, t: dict | None = None):
        self.vt = vt
        self.t = {} if t is None else t

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, vt: VarTable, c) -> "Poly":
        c = rat(c)
        return cls(vt, {0: c} if c else {})

    @classmethod
    def var(cls, vt: VarTable, v) -> "Poly":
        return cls(vt, {vt.units[vt.idx(v)]: mpq(1)})

    @classmethod
    def from_terms(cls, vt: VarTable, terms) -> "Poly":
        out: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            c = rat(c)
            if not c:
                continue
            k = vt.pack(exps)
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return cls(vt, out)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.vt is not self.vt and other.vt != self.vt:
                raise VarTableMismatch(f"{self.vt} vs {other.vt}")
            return other
        if isinstance(other, (int, Fraction, type(mpq(0)))):
            return Poly.const(self.vt, other)
        return NotImplemented

    # inspection -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.t

    def __bool__(self):
        return bool(self.t)

    def __len__(self):
        return len(self.t)

    def terms(self) -> list:
        """Terms in canonical (descending graded-lex) order."""
        return [(self.vt.unpack(k), self.t[k]) for k in sorted(self.t, reverse=True)]

    def degree(self) -> int:
        if not self.t:
            return -1
        return max(self.t) >> self.vt.degshift

    def mindegree(self) -> int:
        if not self.t:
            return -1
        return min(self.t) >> self.vt.degshift

    def is_homogeneous(self, d: int | None = None) -> bool:
        if not self.t:
            return True
        degs = {k >> self.vt.degshift for k in self.t}
        return len(degs) == 1 and (d is None or d in degs)

    def degree_in(self, v) -> int:
        k = self.vt.idx(v)
        if not self.t:
            return -1
        s = self.vt.shifts[k]
        return max((key >> s) & MASK for key in self.t)

    def variables(self) -> set:
        out = set()
        for key in self.t:
            for k, s in enumerate(self.vt.shifts):
                if (key >> s) & MASK:
                    out.add(self.vt.names[k])
        return out

    def constant_value(self):
        if not self.t:
            return mpq(0)
        if set(self.t) != {0}:
            raise ValueError("not a constant")
        return self.t[0]

    def leading(self):
        k = max(self.t)
        return self.vt.unpack(k), self.t[k]

    # arithmetic ------------------------------------------------------------
    def __neg__(self):
        return Poly(self.vt, {k: -c for k, c in self.t.items()})

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.t) > len(self.t):
            big, small = other.t, self.t
        else:
            big, small = self.t, other.t
        out = dict(big)
        for k, c in small.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Poly(self.vt, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.t)
        for k, c in other.t.items():
            v = out.get(k)
            if v is None:
                out[k] = -c
            else:
                v = v - c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Poly(self.vt, out)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def scale(self, c) -> "Poly":
        c = rat(c)
        if not c:
            return Poly(self.vt)
        return Poly(self.vt, {k: v * c for k, v in self.t.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction, type(mpq(0)))):
                return self.scale(other)
            return NotImplemented
        other = self._coerce(other)
        a, b = self.t, other.t
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1:
            (k1, c1), = a.items()
            return Poly(self.vt, {k1 + k2: c1 * c2 for k2, c2 in b.items()})
        out: dict = {}
        get = out.get
        bi = list(b.items())
        for k1, c1 in a.items():
            for k2, c2 in bi:
                k = k1 + k2
                v = get(k)
                out[k] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.vt, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(self.vt, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vt == other.vt and self.t == other.t
        if isinstance(other, (int, Fraction, type(mpq(0)))):
            return self.t == Poly.const(self.vt, other).t
        return NotImplemented

    def __hash__(self):
        return hash((self.vt.names, frozenset(self.t.items())))

    # structure ---------------------------------------------------------------
    def coeffs_in(self, v) -> dict:
        """Split as sum_k C_k v^k; returns {k: C_k} with C_k free of v."""
        k_ = self.vt.idx(v)
        s = self.vt.shifts[k_]
        unit = self.vt.units[k_]
        groups: dict = {}
        for key, c in self.t.items():
            e = (key >> s) & MASK
            groups.setdefault(e, {})[key - e * unit] = c
        return {e: Poly(self.vt, g) for e, g in groups.items()}

    def times_var_power(self, v, e: int) -> "Poly":
        if e == 0:
            return self
        u = self.vt.units[self.vt.idx(v)] * e
        return Poly(self.vt, {k + u: c for k, c in self.t.items()})

    def content(self) -> mpq:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.t:
            return mpq(0)
        g = gmpy2.mpz(0)
        den = gmpy2.mpz(1)
        for c in self.t.values():
            g = gmpy2.gcd(g, c.numerator)
            den = gmpy2.lcm(den, c.denominator)
        return mpq(g, den)

    def primitive(self) -> "Poly":
        c = self.content()
        return self.scale(1 / c) if c else self

    # substitution and evaluation --------------------------------------------
    def rename(self, mapping: Mapping, target: VarTable | None = None) -> "Poly":
        """Substitute variables by (scalar multiples of) single variables."""
        return self.substitute(mapping, target)

    def substitute(self, mapping: Mapping, target: VarTable | None = None) -> "Poly":
        """Simultaneous substitution of variables by polynomials or scalars.

        Unmapped variables go to the equally named variable of ``target``.
        """
        tvt = target or self.vt
        src = self.vt
        simple = []      # (source index, target unit, sign/scale)
        general = []     # (source index, image Poly)
        dropped = []     # source indices mapped to zero
        for k, name in enumerate(src.names):
            img = mapping.get(name, mapping.get(k, None)) if mapping else None
            if img is None:
                if name not in tvt.index:
                    raise VarTableMismatch(f"variable {name} missing from target table")
                simple.append((k, tvt.units[tvt.index[name]], None))
                continue
            if isinstance(img, str):
                simple.append((k, tvt.units[tvt.idx(img)], None))
                continue
            if not isinstance(img, Poly):
                img = Poly.const(tvt, img)
            elif img.vt != tvt:
                raise VarTableMismatch("substitution image lives in another table")
            if not img.t:
                dropped.append(k)
            elif len(img.t) == 1:
                (key, c), = img.t.items()
                if key != 0 and key >> tvt.degshift == 1:
                    simple.append((k, key, None if c == 1 else c))
                else:
                    general.append((k, img))
            else:
                general.append((k, img))
        shifts = src.shifts
        # rename the simple part and group by the exponents of the general part
        groups: dict = {}
        for key, c in self.t.items():
            if dropped and any((key >> shifts[k]) & MASK for k in dropped):
                continue
            nk = 0
            for k, unit, sc in simple:
                e = (key >> shifts[k]) & MASK
                if e:
                    nk += unit * e
                    if sc is not None:
                        c = c * sc ** e
            gexp = tuple((key >> shifts[k]) & MASK for k, _ in general)
            g = groups.setdefault(gexp, {})
            v = g.get(nk)
            g[nk] = c if v is None else v + c
        if not groups:
            return Poly(tvt)
        if not general:
            out = groups.get((), {})
            return Poly(tvt, {k: c for k, c in out.items() if c})
        if len(general) == 1:
            # Horner in the single non-trivial image
            img = general[0][1]
            res = Poly(tvt)
            top = max(g[0] for g in groups)
            for e in range(top, -1, -1):
                res = res * img
                g = groups.get((e,))
                if g:
                    res = res + Poly(tvt, {k: c for k, c in g.items() if c})
            return res
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = general[i][1] ** e
            return cache[key]

        res = Poly(tvt)
        for gexp, g in groups.items():
            part = Poly(tvt, {k: c for k, c in g.items() if c})
            for i, e in enumerate(gexp):
                if e:
                    part = part * power(i, e)
            res = res + part
        return res

    def evaluate(self, point: Mapping) -> mpq:
        """Numeric value; ``point`` maps every occurring variable to a rational."""
        vals = []
        for k, name in enumerate(self.vt.names):
            if name in point:
                vals.append((self.vt.shifts[k], rat(point[name])))
            elif k in point:
                vals.append((self.vt.shifts[k], rat(point[k])))
            else:
                vals.append((self.vt.shifts[k], None))
        powcache: dict = {}
        total = mpq(0)
        for key, c in self.t.items():
            term = c
            for s, x in vals:
                e = (key >> s) & MASK
                if e:
                    if x is None:
                        raise ValueError("missing value for a variable")
                    pk = (s, e)
                    p = powcache.get(pk)
                    if p is None:
                        p = powcache[pk] = x ** e
                    term = term * p
            total += term
        return total

    # serialization ----------------------------------------------------------
    def to_json_obj(self) -> dict:
        return {
            "vars": list(self.vt.names),
            "terms": [
                {"n": str(c.numerator), "d": str(c.denominator), "e": list(e)}
                for e, c in self.terms()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict, vt: VarTable | None = None) -> "Poly":
        src = VarTable(obj["vars"])
        p = cls.from_terms(src, [(t["e"], mpq(int(t["n"]), int(t["d"]))) for t in obj["terms"]])
        if vt is not None and vt != src:
            p = p.substitute({}, vt)
        return p

    @classmethod
    def from_json(cls, text: str, vt: VarTable | None = None) -> "Poly":
        return cls.from_json_obj(json.loads(text), vt)

    def __str__(self):
        if not self.t:
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                (name if e == 1 else f"{name}^{e}")
                for name, e in zip(self.vt.names, exps) if e
            )
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{rat_str(a)}*{mono}"
            else:
                body = rat_str(a)
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    __repr__ = __str__


# ---------------------------------------------------------------------------
# parsing


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def parse_poly(text: str, vt: VarTable) -> Poly:
    """Parse sums/products/powers of variables and rational numbers."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("num", int(m.group(1))))
        elif m.group(2):
            tokens.append(("var", m.group(2)))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op))
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def expr():
        res = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            res = res + rhs if op == "+" else res - rhs
        return res

    def term():
        res = factor()
        while True:
            tok = peek()
            if tok == ("op", "*"):
                take()
                res = res * factor()
            elif tok == ("op", "/"):
                take()
                d = factor()
                res = res.scale(1 / d.constant_value())
            elif tok[0] in ("num", "var") or tok == ("op", "("):
                res = res * factor()  # implicit product
            else:
                return res

    def factor():
        if peek() == ("op", "-"):
            take()
            return -factor()
        if peek() == ("op", "+"):
            take()
            return factor()
        base = atom()
        if peek() == ("op", "^"):
            take()
            tok = take()
            paren = tok == ("op", "(")
            if paren:
                tok = take()
            if tok[0] != "num" or (paren and take() != ("op", ")")):
                raise ValueError("exponent must be an integer")
            base = base ** int(tok[1])
        return base

    def atom():
        tok = take()
        if tok[0] == "num":
            return Poly.const(vt, tok[1])
        if tok[0] == "var":
            return Poly.var(vt, tok[1])
        if tok == ("op", "("):
            res = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parenthesis")
            return res
        raise ValueError(f"unexpected token {tok}")

    out = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in {text!r}")
    return out


# ---------------------------------------------------------------------------
# arithmetic entry points


def poly_arith(a: Poly, b: Poly, kind: str) -> Poly:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


def _div_linear(n: Poly, ell: Poly) -> Poly:
    vt = n.vt
    # pick the variable of ell that appears least in n
    cand = [k for k in range(vt.n) if any(vt.exp_of(key, k) for key in ell.t)]
    k = min(cand, key=lambda k: n.degree_in(k))
    unit = vt.units[k]
    a = ell.t[unit]
    b = Poly(vt, {key: c for key, c in ell.t.items() if key != unit})
    C = n.coeffs_in(k)
    top = max(C) if C else 0
    inv = 1 / a
    q: dict = {}
    Qk = Poly(vt)
    for e in range(top, 0, -1):
        ce = C.get(e)
        cur = ce - b * Qk if ce is not None else -(b * Qk)
        Qk = cur.scale(inv)
        sh = unit * (e - 1)
        for key, c in Qk.t.items():
            q[key + sh] = c
    rem = C.get(0, Poly(vt)) - b * Qk
    if rem.t:
        raise NotDivisible("remainder after division by a linear form")
    return Poly(vt, q)


def exact_div(n: Poly, d: Poly) -> Poly:
    """Exact quotient n/d, raising NotDivisible if d does not divide n."""
    d = n._coerce(d)
    if not d.t:
        raise ZeroDivisionError("division by the zero polynomial")
    if not n.t:
        return Poly(n.vt)
    if set(d.t) == {0}:
        return n.scale(1 / d.t[0])
    if d.degree() == 1:
        return _div_linear(n, d)
    return _div_general(n, d)


def _div_general(n: Poly, d: Poly) -> Poly:
    vt = n.vt
    best = None
    for k in range(vt.n):
        m = d.degree_in(k)
        if m <= 0:
            continue
        lead = d.coeffs_in(k)[m]
        score = (0 if set(lead.t) == {0} else 1, m, len(lead.t))
        if best is None or score < best[0]:
            best = (score, k)
    k = best[1]
    dc = d.coeffs_in(k)
    m = max(dc)
    lead = dc[m]
    q = Poly(vt)
    r = n
    while r.t:
        rc = r.coeffs_in(k)
        top = max(rc)
        if top < m:
            raise NotDivisible("remainder in main variable")
        t = exact_div(rc[top], lead).times_var_power(k, top - m)
        q = q + t
        r = r - t * d
    return q


def divides(d: Poly, n: Poly) -> bool:
    try:
        exact_div(n, d)
        return True
    except NotDivisible:
        return False


# ---------------------------------------------------------------------------
# linear forms and fractions with linear-form denominators


class LinForm:
    """A polynomial of degree at most one, scaled so its leading coefficient is 1."""

    __slots__ = ("poly", "_key")

    def __init__(self, poly: Poly):
        if poly.degree() > 1:
            raise ValueError("not a linear form")
        if not poly.t:
            raise ValueError("zero linear form")
        self.poly = poly
        self._key = (poly.vt.names, tuple(sorted(poly.t.items())))

    @classmethod
    def normalize(cls, poly: Poly):
        """Return (scalar, LinForm) with poly = scalar * form and form monic."""
        if poly.degree() > 1:
            raise ValueError("not a linear form")
        c = poly.t[max(poly.t)]
        return c, cls(poly.scale(1 / c))

    def is_constant(self):
        return set(self.poly.t) == {0}

    def __eq__(self, other):
        return isinstance(other, LinForm) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return f"({self.poly})"


class LinFrac:
    """Numerator polynomial over a product of powers of linear forms."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Mapping | None = None):
        self.num = num
        self.den = {} if den is None else dict(den)

    @classmethod
    def from_poly(cls, p: Poly) -> "LinFrac":
        return cls(p)

    @classmethod
    def ratio(cls, num: Poly, dens: Iterable[Poly]) -> "LinFrac":
        """num divided by the product of the given degree<=1 polynomials."""
        out: dict = {}
        for d in dens:
            if d.degree() == 0:
                num = num.scale(1 / d.constant_value())
                continue
            c, f = LinForm.normalize(d)
            num = num.scale(1 / c)
            out[f] = out.get(f, 0) + 1
        return cls(num, out)

    @property
    def vt(self):
        return self.num.vt

    def is_zero(self):
        return not self.num.t

    def den_poly(self) -> Poly:
        p = Poly.const(self.num.vt, 1)
        for f, m in sorted(self.den.items()):
            p = p * f.poly ** m
        return p

    def __neg__(self):
        return LinFrac(-self.num, self.den)

    def _lift(self, target: dict) -> Poly:
        num = self.num
        for f, m in target.items():
            extra = m - self.den.get(f, 0)
            if extra:
                num = num * f.poly ** extra
        return num

    def __add__(self, other):
        if isinstance(other, Poly):
            other = LinFrac(other)
        if not isinstance(other, LinFrac):
            other = LinFrac(Poly.const(self.num.vt, other))
        if not other.num.t:
            return self
        if not self.num.t:
            return other
        den = dict(self.den)
        for f, m in other.den.items():
            if den.get(f, 0) < m:
                den[f] = m
        return LinFrac(self._lift(den) + other._lift(den), den)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Poly):
            other = LinFrac(other)
        elif not isinstance(other, LinFrac):
            other = LinFrac(Poly.const(self.num.vt, other))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LinFrac):
            den = dict(self.den)
            for f, m in other.den.items():
                den[f] = den.get(f, 0) + m
            return LinFrac(self.num * other.num, den)
        if isinstance(other, Poly):
            return LinFrac(self.num * other, self.den)
        return LinFrac(self.num.scale(other), self.den)

    __rmul__ = __mul__

    def canonical(self) -> "LinFrac":
        """Cancel every denominator factor that divides the numerator."""
        num = self.num
        den = {}
        if not num.t:
            return LinFrac(num)
        for f, m in sorted(self.den.items()):
            left = m
            while left:
                try:
                    num = _div_linear(num, f.poly)
                except NotDivisible:
                    break
                left -= 1
            if left:
                den[f] = left
        return LinFrac(num, den)

    def clear(self) -> Poly:
        """The polynomial this fraction equals; NotDivisible if it is not one."""
        c = self.canonical()
        if c.den:
            raise NotDivisible(f"denominator {c.den} does not cancel")
        return c.num

    def is_poly(self) -> bool:
        return not self.canonical().den

    def evaluate(self, point: Mapping) -> mpq:
        val = self.num.evaluate(point)
        for f, m in self.den.items():
            d = f.poly.evaluate(point)
            if d == 0:
                raise ZeroDivisionError(f"pole at {f}")
            val /= d ** m
        return val

    def substitute(self, mapping: Mapping, target: VarTable | None = None) -> "LinFrac":
        num = self.num.substitute(mapping, target)
        dens = []
        for f, m in self.den.items():
            dens.extend([f.poly.substitute(mapping, target)] * m)
        for d in dens:
            if not d.t:
                raise ZeroDivisionError("substitution hits a pole")
        return LinFrac.ratio(num, dens)

    def __eq__(self, other):
        if isinstance(other, (Poly, int)):
            other = LinFrac(other if isinstance(other, Poly) else Poly.const(self.vt, other))
        if not isinstance(other, LinFrac):
            return NotImplemented
        return (self - other).num.is_zero()

    def __hash__(self):
        raise TypeError("LinFrac is not hashable")

    def to_json_obj(self) -> dict:
        return {
            "num": self.num.to_json_obj(),
            "den": [{"linform": f.poly.to_json_obj(), "mult": m} for f, m in sorted(self.den.items())],
        }

    def __repr__(self):
        if not self.den:
            return f"{self.num}"
        d = "*".join(f"{f}" + (f"^{m}" if m > 1 else "") for f, m in sorted(self.den.items()))
        return f"({self.num})/({d})"


# ---------------------------------------------------------------------------
# interpolation


def _is_vector(v):
    return isinstance(v, Mapping)


def lagrange_interpolate(nodes: Sequence[Poly], values: Sequence, target_var, degree_bound: int,
                         even: bool = False):
    """Polynomial of degree <= degree_bound in target_var through the given values.

    Nodes are degree<=1 polynomials free of target_var; values are Polys or
    mappings of Polys (one interpolation per key).  The interpolant is built in
    Newton form; every divided difference is an exact polynomial division, so a
    remainder signals values that no polynomial of this shape can match.  Extra
    nodes beyond degree_bound+1 are used as consistency checks.

    With ``even`` the result is a polynomial of degree <= degree_bound in
    target_var**2; node differences are then products of two linear forms.
    """
    n = len(nodes)
    if n < degree_bound + 1:
        raise InsufficientNodes(f"{n} nodes for degree {degree_bound}")
    if len(values) != n:
        raise ValueError("nodes and values differ in length")
    vt = nodes[0].vt if isinstance(nodes[0], Poly) else None
    if vt is None:
        raise ValueError("nodes must be polynomials")
    for a in range(n):
        for b in range(a):
            if not (nodes[a] - nodes[b]).t or (even and not (nodes[a] + nodes[b]).t):
                raise DuplicateNode(f"node {nodes[a]} repeated")
    if _is_vector(values[0]):
        keys = sorted(set().union(*[set(v) for v in values]), key=repr)
        out = {}
        for key in keys:
            col = [v.get(key, Poly(vt)) for v in values]
            out[key] = lagrange_interpolate(nodes, col, target_var, degree_bound, even)
        return out
    dd = list(values)
    for level in range(1, n):
        for k in range(n - 1, level - 1, -1):
            diff = dd[k] - dd[k - 1]
            if diff.t:
                dd[k] = exact_div(diff, nodes[k] - nodes[k - level])
                if even:
                    dd[k] = exact_div(dd[k], nodes[k] + nodes[k - level])
            else:
                dd[k] = diff
        if level > degree_bound and dd[level].t:
            raise InterpolationMismatch(
                f"values inconsistent with degree {degree_bound} in {target_var}")
    x = Poly.var(vt, target_var)
    if even:
        x = x * x
    res = dd[degree_bound]
    for k in range(degree_bound - 1, -1, -1):
        res = res * (x - (nodes[k] * nodes[k] if even else nodes[k])) + dd[k]
    return res


# ---------------------------------------------------------------------------
# exact sparse linear algebra


class LinearSolution:
    """Reduced row-echelon data: pivots, a particular solution and a nullspace basis."""

    def __init__(self, ncols, pivots, particular, nullspace):
        self.ncols = ncols
        self.pivots = pivots
        self.rank = len(pivots)
        self.particular = particular
        self.nullspace = nullspace

    @property
    def nullity(self):
        return len(self.nullspace)


def _reduce_row(row: dict, piv: dict) -> dict:
    heap = [c for c in row if c in piv]
    heapq.heapify(heap)
    while heap:
        c = heapq.heappop(heap)
        f = row.get(c)
        if not f:
            continue
        for cc, v in piv[c].items():
            old = row.get(cc)
            if old is None:
                row[cc] = -f * v
                if cc in piv:
                    heapq.heappush(heap, cc)
            else:
                nv = old - f * v
                if nv:
                    row[cc] = nv
                else:
                    del row[cc]
    return row


def solve_sparse_linear_exact(rows: Iterable[Mapping], ncols: int, rhs=None) -> LinearSolution:
    """Solve rows . x = rhs (or the homogeneous system when rhs is None).

    Rows are processed in order and each reduced row is pivoted on its
    smallest column, so the reduced echelon form (hence every output) does not
    depend on the order of the rows.
    """
    aug = ncols
    piv: dict = {}
    for r, row in enumerate(rows):
        cur = {c: rat(v) for c, v in row.items() if v}
        if rhs is not None:
            b = rhs.get(r, 0) if isinstance(rhs, Mapping) else rhs[r]
            if b:
                cur[aug] = rat(b)
        _reduce_row(cur, piv)
        if not cur:
            continue
        c = min(cur)
        if c == aug:
            raise Inconsistent(f"row {r} reduces to 0 = {cur[aug]}")
        inv = 1 / cur[c]
        piv[c] = {k: v * inv for k, v in cur.items()}
    # back substitution into reduced form
    order = sorted(piv, reverse=True)
    for c in order:
        prow = piv[c]
        others = sorted(k for k in prow if k != c and k in piv)
        for k in others:
            f = prow.get(k)
            if not f:
                continue
            for kk, v in piv[k].items():
                nv = prow.get(kk, 0) - f * v
                if nv:
                    prow[kk] = nv
                else:
                    prow.pop(kk, None)
    particular = None
    if rhs is not None:
        particular = {c: prow[aug] for c, prow in piv.items() if aug in prow}
    free = [c for c in range(ncols) if c not in piv]
    null = {f: {f: mpq(1)} for f in free}
    for c, prow in piv.items():
        for f, v in prow.items():
            if f != c and f != aug:
                null[f][c] = -v
    return LinearSolution(ncols, sorted(piv), particular, [null[f] for f in free])

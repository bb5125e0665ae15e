"""Borel orbits of square-zero matrices with a symplectic-type symmetry.

Matrices are N x N (N = 2n) lists of rationals, indexed from 0 internally
and from 1 in every public label.  The adjoint is M^dag = J^{-1} M^T J with
J antidiagonal, +1 in the top half and -1 in the bottom half.  Type i means
M = -M^dag, type c means M = M^dag.  The typed Borel group consists of
invertible upper-triangular U with U^{-1} = U^dag.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

from .linkpat import LinkPattern, enumerate_patterns, periodic_lift


class MalformedInput(ValueError):
    pass


class IrrationalSquareRoot(ArithmeticError):
    """Raised when the reduction needs sqrt of a non-square rational.

    ``level`` is the matrix size at which the root was demanded and
    ``value`` the offending entry.
    """

    def __init__(self, level: int, value):
        super().__init__(f"sqrt({value}) is irrational at size {level}")
        self.level = level
        self.value = value


# ---------------------------------------------------------------- involutions

@dataclass(frozen=True)
class Involution:
    N: int
    images: tuple
    btype: str = "p"

    def __post_init__(self):
        if len(self.images) != self.N:
            raise MalformedInput("image list has wrong length")
        for i, j in enumerate(self.images, 1):
            if not 1 <= j <= self.N or self.images[j - 1] != i:
                raise MalformedInput("not an involution")
        if self.btype in ("i", "c") and not is_symmetric(self.images, self.btype):
            raise MalformedInput(f"not in Inv^{self.btype}")

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def pairs(self) -> list:
        return [(i, j) for i, j in enumerate(self.images, 1) if i < j]

    def fixed(self) -> list:
        return [i for i, j in enumerate(self.images, 1) if i == j]

    def __str__(self):
        sep = "" if self.N < 10 else ","
        return "(" + sep.join(str(j) for j in self.images) + ")"

    def to_json_obj(self):
        return {"N": self.N, "type": self.btype, "images": list(self.images)}

    @classmethod
    def parse(cls, text: str, btype: str = "p") -> "Involution":
        body = text.strip().strip("()")
        imgs = [int(x) for x in body.split(",")] if "," in body else [int(c) for c in body]
        return cls(len(imgs), tuple(imgs), btype)


def is_symmetric(images: Sequence[int], btype: str) -> bool:
    N = len(images)
    for i in range(1, N + 1):
        if images[i - 1] != N - images[N - i] + 1:
            return False
        if btype == "c" and images[i - 1] == N - i + 1:
            return False
    return True


def _all_involutions(N: int) -> Iterable[tuple]:
    def rec(t, free):
        if not free:
            yield tuple(t)
            return
        a = free[0]
        rest = free[1:]
        t[a - 1] = a
        yield from rec(t, rest)
        for k, b in enumerate(rest):
            t[a - 1], t[b - 1] = b, a
            yield from rec(t, rest[:k] + rest[k + 1:])
        t[a - 1] = 0

    yield from rec([0] * N, list(range(1, N + 1)))


def enumerate_involutions(a: str, N: int) -> list:
    if a not in ("p", "i", "c"):
        raise MalformedInput(f"unknown type {a!r}")
    if a != "p" and N % 2:
        raise MalformedInput("symmetric types need even N")
    out = [Involution(N, t, a) for t in _all_involutions(N)
           if a == "p" or is_symmetric(t, a)]
    return sorted(out, key=lambda p: p.images)


def lift_involution(pat: LinkPattern) -> Involution:
    """Involution of 1..2L obtained from the mirror unfolding of an i/c pattern."""
    if pat.btype not in ("i", "c"):
        raise MalformedInput("lift needs an i or c pattern")
    lp = periodic_lift(pat)
    imgs = tuple(i if x == "*" else x for i, x in enumerate(lp.target, 1))
    return Involution(len(imgs), imgs, pat.btype)


def link_pattern_lifts(a: str, N: int) -> set:
    return {lift_involution(p) for p in enumerate_patterns(a, N // 2)}


# ------------------------------------------------------------ matrix helpers

def _eps(i: int, N: int) -> int:
    """Sign of J at 1-based (periodic) index i."""
    return 1 if (i - 1) % N < N // 2 else -1


def zeros(N: int) -> list:
    return [[mpq(0)] * N for _ in range(N)]


def identity(N: int) -> list:
    M = zeros(N)
    for i in range(N):
        M[i][i] = mpq(1)
    return M


def matmul(A, B) -> list:
    n, m = len(A), len(B[0])
    out = zeros(n) if n == m else [[mpq(0)] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        row = out[i]
        for k, a in enumerate(Ai):
            if a:
                Bk = B[k]
                for j in range(m):
                    if Bk[j]:
                        row[j] += a * Bk[j]
    return out


def matadd(A, B, s=1) -> list:
    return [[a + s * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(A, c) -> list:
    return [[c * a for a in r] for r in A]


def dagger(M) -> list:
    N = len(M)
    return [[_eps(i + 1, N) * _eps(j + 1, N) * M[N - 1 - j][N - 1 - i] for j in range(N)]
            for i in range(N)]


def upper_inverse(U) -> list:
    """Inverse of an invertible upper-triangular matrix by back substitution."""
    N = len(U)
    inv = zeros(N)
    for j in range(N):
        inv[j][j] = 1 / mpq(U[j][j])
        for i in range(j - 1, -1, -1):
            s = sum((U[i][k] * inv[k][j] for k in range(i + 1, j + 1)), mpq(0))
            inv[i][j] = -s / U[i][i]
    return inv


def conj(U, X) -> list:
    return matmul(matmul(U, X), upper_inverse(U))


def rank(rows) -> int:
    """Exact rank of a list of rational row vectors."""
    work = [[mpq(x) for x in r] for r in rows if any(r)]
    r = 0
    if not work:
        return 0
    ncol = len(work[0])
    for c in range(ncol):
        piv = next((k for k in range(r, len(work)) if work[k][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        p = work[r]
        for k in range(r + 1, len(work)):
            f = work[k][c]
            if f:
                f = f / p[c]
                work[k] = [x - f * y for x, y in zip(work[k], p)]
        r += 1
        if r == len(work):
            break
    return r


def rank_matrix(M) -> list:
    """rm[i-1][j-1] = rank of the southwest block rows i..N, columns 1..j."""
    N = len(M)
    return [[rank([row[:j] for row in M[i - 1:]]) for j in range(1, N + 1)]
            for i in range(1, N + 1)]


def exp_nilpotent(x) -> list:
    N = len(x)
    out = identity(N)
    term = identity(N)
    for k in range(1, N + 1):
        term = scale(matmul(term, x), mpq(1, k))
        if not any(any(r) for r in term):
            break
        out = matadd(out, term)
    return out


def is_typed_borel(U) -> bool:
    N = len(U)
    if any(U[i][j] for i in range(N) for j in range(i)):
        return False
    if any(not U[i][i] for i in range(N)):
        return False
    return upper_inverse(U) == dagger(U)


# ---------------------------------------------------------- square-zero type

@dataclass
class SquareZeroMatrix:
    entries: list
    btype: str | None = None

    def __post_init__(self):
        self.entries = [[mpq(x) for x in r] for r in self.entries]
        if any(len(r) != len(self.entries) for r in self.entries):
            raise MalformedInput("matrix is not square")

    @property
    def N(self) -> int:
        return len(self.entries)

    def check(self) -> None:
        M, N = self.entries, self.N
        if any(M[i][j] for i in range(N) for j in range(i + 1)):
            raise MalformedInput("matrix is not strictly upper triangular")
        if any(any(r) for r in matmul(M, M)):
            raise MalformedInput("matrix does not square to zero")
        if self.btype in ("i", "c"):
            if N % 2:
                raise MalformedInput("symmetric types need even N")
            s = -1 if self.btype == "i" else 1
            if M != scale(dagger(M), s):
                raise MalformedInput(f"matrix lacks the type {self.btype} symmetry")

    def to_json_obj(self):
        ent = [[i + 1, j + 1, str(v)] for i, r in enumerate(self.entries)
               for j, v in enumerate(r) if v]
        return {"N": self.N, "type": self.btype or "p", "entries": ent}

    @classmethod
    def from_json_obj(cls, obj) -> "SquareZeroMatrix":
        N = int(obj["N"])
        M = zeros(N)
        for i, j, v in obj["entries"]:
            M[int(i) - 1][int(j) - 1] = mpq(v)
        t = obj.get("type", "p")
        return cls(M, None if t == "p" else t)


def build_pi_less(pi: Involution, a: str | None = None) -> SquareZeroMatrix:
    a = a or pi.btype
    N = pi.N
    n = N // 2
    M = zeros(N)
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            if pi(j) != i:
                continue
            if a == "i":
                v = -1 if n < i else 1
            elif a == "c":
                if i + j == N + 1:
                    v = 0
                else:
                    v = -1 if N - j + 1 < i <= n else 1
            else:
                v = 1
            M[i - 1][j - 1] = mpq(v)
    return SquareZeroMatrix(M, a if a in ("i", "c") else None)


def orbit_label(X: SquareZeroMatrix) -> Involution:
    X.check()
    N = X.N
    rm = rank_matrix(X.entries)

    def r(i, j):
        if i > N or j < 1:
            return 0
        return rm[i - 1][j - 1]

    imgs = list(range(1, N + 1))
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            if r(i, j) - r(i + 1, j) - r(i, j - 1) + r(i + 1, j - 1) == 1:
                imgs[i - 1], imgs[j - 1] = j, i
    return Involution(N, tuple(imgs), X.btype or "p")


# ---------------------------------------------------------- canonical reduce

def _exact_sqrt(v, level):
    v = mpq(v)
    if v > 0:
        p, q = gmpy2.isqrt(v.numerator), gmpy2.isqrt(v.denominator)
        if p * p == v.numerator and q * q == v.denominator:
            return mpq(p, q)
    raise IrrationalSquareRoot(level, v)


def _unipotent_first_row(u: dict, N: int) -> list:
    """Typed unipotent element with middle block I and given first row.

    ``u`` maps 0-based columns 1..N-2 to values; the last column follows from
    the symmetry and the (1,N) entry is set to zero.
    """
    R = zeros(N)
    for j, v in u.items():
        R[0][j] = mpq(v)
    x = matadd(R, dagger(R), -1)
    U = exp_nilpotent(x)
    U[0][N - 1] = mpq(0)
    return U


def _reduce(X, a):
    N = len(X)
    if N == 0:
        return (), []
    if N == 2:
        x = X[0][1]
        if not x:
            return (1, 2), identity(2)
        r = _exact_sqrt(x, 2)
        return (2, 1), [[1 / r, mpq(0)], [mpq(0), r]]
    n = N // 2
    Xh = [row[1:N - 1] for row in X[1:N - 1]]
    pih, Uh = _reduce(Xh, a)
    U0 = identity(N)
    for i in range(N - 2):
        for j in range(N - 2):
            U0[i + 1][j + 1] = Uh[i][j]
    Y = conj(U0, X)
    wh = build_pi_less(Involution(N - 2, pih, a), a).entries
    u = {}
    for j in range(1, N - 1):
        v = -sum((wh[j - 1][s - 1] * Y[0][s] for s in range(1, N - 1)), mpq(0))
        if v:
            u[j] = v
    U1 = _unipotent_first_row(u, N)
    Z = conj(U1, Y)
    imgs = [1] + [p + 1 for p in pih] + [N]
    jump = rank(Z) - rank(Xh)
    if jump == 0:
        T = U1
    elif jump == 1:
        r = _exact_sqrt(Z[0][N - 1], N)
        U2 = identity(N)
        U2[0][0], U2[N - 1][N - 1] = 1 / r, r
        T = matmul(U2, U1)
        imgs[0], imgs[N - 1] = N, 1
    elif jump == 2:
        k = next(j for j in range(2, N + 1) if Z[0][j - 1])
        zk = Z[0][k - 1]
        U3 = identity(N)
        U3[0][0], U3[N - 1][N - 1] = 1 / zk, zk
        for j in range(k + 1, N):
            U3[k - 1][j - 1] = Z[0][j - 1] / zk
        U3[k - 1][N - 1] = Z[0][N - 1] / (2 * zk)
        c = N - k + 1
        for i in range(1, c):
            if i == 1:
                v = Z[0][N - 1] / (2 * zk * zk)
                v = -v if k > n else v
            else:
                v = Z[0][N - i] / zk
                if k > n or i > n:
                    v = -v
            U3[i - 1][c - 1] = v
        T = matmul(U3, U1)
        imgs[0], imgs[k - 1] = k, 1
        imgs[c - 1], imgs[N - 1] = N, c
    else:
        raise MalformedInput("rank grew by more than two")
    return tuple(imgs), matmul(T, U0)


def canonical_reduce(X: SquareZeroMatrix):
    """Return (pi, U) with U in the typed Borel and U X U^{-1} = pi_<."""
    X.check()
    if X.btype not in ("i", "c"):
        raise MalformedInput("canonical_reduce needs type i or c")
    imgs, U = _reduce(X.entries, X.btype)
    pi = Involution(X.N, imgs, X.btype)
    if conj(U, X.entries) != build_pi_less(pi).entries or not is_typed_borel(U):
        raise AssertionError("reduction did not reach the canonical form")
    return pi, U


def random_typed_borel(N: int, rng: random.Random, unipotent: bool = False, bound: int = 3) -> list:
    """Random element of the typed Borel group with small integer data."""
    x = zeros(N)
    for i in range(N):
        for j in range(i + 1, N):
            x[i][j] = mpq(rng.randint(-bound, bound))
    x = scale(matadd(x, dagger(x), -1), mpq(1, 2))
    U = exp_nilpotent(x)
    if unipotent:
        return U
    D = identity(N)
    for i in range(N // 2):
        d = mpq(rng.choice([1, 2, 3, -1, -2, mpq(1, 2)]))
        D[i][i], D[N - 1 - i][N - 1 - i] = d, 1 / d
    return matmul(D, U)


# --------------------------------------------------------- component dims

def _typed_basis(N: int, cells, sign: int) -> list:
    """Basis of matrices supported on ``cells`` with M = sign * M^dag."""
    seen = set()
    out = []
    for (i, j) in cells:
        if (i, j) in seen:
            continue
        mi, mj = N - 1 - j, N - 1 - i
        seen.update({(i, j), (mi, mj)})
        e = _eps(i + 1, N) * _eps(j + 1, N)
        B = zeros(N)
        if (mi, mj) == (i, j):
            if sign * e != 1:
                continue
            B[i][j] = mpq(1)
        else:
            B[i][j] = mpq(1)
            B[mi][mj] = mpq(sign * e)
        out.append(B)
    return out


def _flat(M):
    return [x for r in M for x in r]


def component_dim(pi: Involution, a: str | None = None) -> int:
    a = a or pi.btype
    N = pi.N
    w = build_pi_less(pi, a).entries
    borel = _typed_basis(N, [(i, j) for i in range(N) for j in range(i, N)], -1)
    tangent = rank([_flat(matadd(matmul(U, w), matmul(w, U), -1)) for U in borel])
    sign = -1 if a == "i" else 1
    lower = _typed_basis(N, [(i, j) for i in range(N) for j in range(i)], sign)
    imgs = []
    for L in lower:
        S = matadd(matmul(w, L), matmul(L, w))
        imgs.append([S[i][j] for i in range(N) for j in range(i)])
    return tangent + len(lower) - rank(imgs)


def component_dims(a: str, N: int) -> dict:
    if a not in ("i", "c"):
        raise MalformedInput("component_dims needs type i or c")
    return {pi: component_dim(pi, a) for pi in enumerate_involutions(a, N)}


def expected_max_dim(a: str, N: int) -> int:
    n = N // 2
    return n * (n + 1) if a == "i" else 2 * (n * n // 2)


@dataclass
class MaxFReport:
    btype: str
    N: int
    maximum: int
    expected: int
    argmax: list
    lifts: list
    second: int | None

    @property
    def ok(self) -> bool:
        return self.maximum == self.expected and sorted(self.argmax) == sorted(self.lifts)

    def to_json_obj(self):
        return {"type": self.btype, "N": self.N, "max": self.maximum,
                "expected": self.expected, "argmax": self.argmax,
                "lifts": self.lifts, "second": self.second, "ok": self.ok}


def maxf_report(a: str, N: int) -> MaxFReport:
    dims = component_dims(a, N)
    m = max(dims.values())
    vals = sorted(set(dims.values()), reverse=True)
    return MaxFReport(a, N, m, expected_max_dim(a, N),
                      sorted(str(p) for p, d in dims.items() if d == m),
                      sorted(str(p) for p in link_pattern_lifts(a, N)),
                      vals[1] if len(vals) > 1 else None)


# ------------------------------------------------------------ strip matrices

@dataclass
class StripMatrix:
    """Window M_ij, 1 <= i <= N, i < j < i + N, of a periodic matrix."""

    N: int
    btype: str = "p"
    window: dict = field(default_factory=dict)

    def get(self, i: int, j: int):
        r = (i - 1) % self.N + 1
        j -= i - r
        if not r <= j < r + self.N:
            return mpq(0)
        return self.window.get((r, j), mpq(0))

    def set(self, i: int, j: int, v) -> None:
        r = (i - 1) % self.N + 1
        j -= i - r
        if not r <= j < r + self.N:
            raise MalformedInput("entry outside the window")
        v = mpq(v)
        if v:
            self.window[(r, j)] = v
        else:
            self.window.pop((r, j), None)

    def dagger(self) -> "StripMatrix":
        N = self.N
        out = StripMatrix(N, self.btype)
        for i in range(1, N + 1):
            for j in range(i, i + N):
                v = _eps(i, N) * _eps(j, N) * self.get(N - j + 1, N - i + 1)
                out.set(i, j, v)
        return out

    def square(self) -> "StripMatrix":
        N = self.N
        out = StripMatrix(N, self.btype)
        for i in range(1, N + 1):
            for j in range(i, i + N):
                out.set(i, j, sum((self.get(i, k) * self.get(k, j) for k in range(i, j + 1)), mpq(0)))
        return out

    def s(self, i: int):
        N = self.N
        return sum((self.get(i, j) * self.get(j, i + N) for j in range(i, i + N + 1)), mpq(0))

    def rm(self, i: int, j: int) -> int:
        if j < i:
            return 0
        return rank([[self.get(r, c) for c in range(i, j + 1)] for r in range(i, j + 1)])

    def in_type(self) -> bool:
        if self.btype == "p":
            return True
        sign = -1 if self.btype == "i" else 1
        d = self.dagger()
        return all(self.get(i, j) == sign * d.get(i, j)
                   for i in range(1, self.N + 1) for j in range(i, i + self.N))


def _strip_partner(pi: Involution, i: int) -> int:
    j = pi(i)
    return j if j > i else j + pi.N


def underline(pi: Involution, t: Sequence | None = None, a: str | None = None) -> StripMatrix:
    """The strip matrix of pi times a diagonal t, symmetrized into type a."""
    a = a or pi.btype
    N = pi.N
    t = [mpq(1)] * N if t is None else [mpq(x) for x in t]
    M = StripMatrix(N, a)
    for i in range(1, N + 1):
        if pi(i) != i:
            M.set(i, _strip_partner(pi, i), t[pi(i) - 1])
    if a in ("i", "c"):
        sign = -1 if a == "i" else 1
        d = M.dagger()
        S = StripMatrix(N, a)
        for i in range(1, N + 1):
            for j in range(i, i + N):
                S.set(i, j, (M.get(i, j) + sign * d.get(i, j)) / 2)
        M = S
    return M


def restricted_diagonal(M: StripMatrix, pi: Involution) -> list:
    """The diagonal t' with M = pi_ t', read off the chord entries of M."""
    t = [mpq(0)] * pi.N
    for i in range(1, pi.N + 1):
        if pi(i) != i:
            t[pi(i) - 1] = M.get(i, _strip_partner(pi, i))
    return t


def classes(k: int, N: int, a: str) -> set:
    r = (k - 1) % N + 1
    return {r} if a == "p" else {r, N + 1 - r}


@dataclass
class DefeqReport:
    pattern: str
    btype: str
    samples: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_obj(self):
        return {"pattern": self.pattern, "type": self.btype, "samples": self.samples,
                "violations": self.violations, "ok": self.ok}


def rank_violations(M: StripMatrix, ref: StripMatrix) -> list:
    N = M.N
    bad = []
    for i in range(1, N + 1):
        for j in range(i, i + 2 * N):
            if M.rm(i, j) > ref.rm(i, j):
                bad.append((i, j))
    return bad


def verify_defeq(pi, a: str | None = None, samples: int = 3, seed: int = 0) -> DefeqReport:
    if isinstance(pi, LinkPattern):
        a = a or pi.btype
        inv = lift_involution(pi)
    else:
        inv = pi
        a = a or inv.btype
    N = inv.N
    rng = random.Random(seed)
    ref = underline(inv, None, "p")
    viol = []
    for s in range(samples):
        t = [rng.choice([v for v in range(-9, 10) if v]) for _ in range(N)]
        M = underline(inv, t, a)
        if not M.in_type():
            viol.append(f"sample {s}: outside the type")
        if any(M.get(i, i) for i in range(1, N + 1)):
            viol.append(f"sample {s}: nonzero diagonal")
        if M.square().window:
            viol.append(f"sample {s}: square is nonzero")
        tr = restricted_diagonal(M, inv)
        for k in range(1, N + 1):
            if M.s(k) not in (tr[k - 1] * tr[inv(k) - 1], -tr[k - 1] * tr[inv(k) - 1]):
                viol.append(f"sample {s}: s_{k} is not a signed product of t")
            for l in classes(k, N, a) | classes(inv(k), N, a):
                if M.s(k) != M.s(l):
                    viol.append(f"sample {s}: s_{k} != s_{l}")
        bad = rank_violations(M, ref)
        if bad:
            viol.append(f"sample {s}: rank exceeds at {bad[:3]}")
    return DefeqReport(str(inv), a, samples, viol)


def one_less_shapes(a: str, N: int) -> set:
    """Involutions one local move away from a link-pattern lift.

    The move swaps a mirror pair of chords a-b, a'-b' into a-b', a'-b; in
    type i a single mirror chord a-a' may also be opened into two fixed points.
    """
    out = set()
    for lift in link_pattern_lifts(a, N):
        imgs = list(lift.images)
        for x, y in lift.pairs():
            xm, ym = N + 1 - x, N + 1 - y
            if y == xm:
                if a == "i":
                    t = imgs[:]
                    t[x - 1], t[y - 1] = x, y
                    out.add(Involution(N, tuple(t), a))
                continue
            if x > xm or lift(xm) != ym:
                continue
            t = imgs[:]
            t[x - 1], t[ym - 1] = ym, x
            t[xm - 1], t[y - 1] = y, xm
            out.add(Involution(N, tuple(t), a))
    return out


def dimoneless_check(a: str, N: int, dims: dict | None = None) -> dict:
    dims = dims or component_dims(a, N)
    target = expected_max_dim(a, N) - 1
    found = {p for p, d in dims.items() if d == target}
    shapes = one_less_shapes(a, N)
    return {"type": a, "N": N, "dimension": target,
            "observed": sorted(str(p) for p in found),
            "predicted": sorted(str(p) for p in shapes),
            "ok": found == shapes}

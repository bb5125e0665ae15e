"""Acceptance criteria 1-13 as plain functions.

Each check returns a Criterion with a pass flag and a JSON-able detail
dict.  Both the ``reproduce`` command and the test-suite call these.
"""

from __future__ import annotations

import json
import random
import re
import time
from dataclasses import dataclass, field
from importlib import resources

from gmpy2 import mpq

from . import orbits, qkzsolve, rkops, sumrule, transfer
from .linkpat import PatternSpace
from .polyring import Poly, VarTable, parse_poly

# instances solved by the suite, (type, largest L)
SOLVED = (("p", 4), ("i", 4), ("c", 4), ("o", 3), ("m", 3))
REFERENCE = (("i", 2), ("i", 3), ("c", 3), ("c", 4), ("o", 2), ("m", 2))

# printed canonical forms, rows as nonzero (row, column, value) triples
PRINTED_PI_LESS = {
    ("i", "(351624)"): [(1, 3, 1), (2, 5, 1), (4, 6, -1)],
    ("c", "(563412)"): [(1, 5, 1), (2, 6, -1)],
}


@dataclass
class Criterion:
    number: int
    title: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.ok else 'FAIL'}  {self.title}  ({self.seconds:.1f} s)"

    def to_json_obj(self):
        return {"criterion": self.number, "title": self.title, "ok": self.ok,
                "seconds": round(self.seconds, 3), "detail": self.detail}


def solved_instances():
    for ty, top in SOLVED:
        for L in range(1, top + 1):
            yield ty, L


def reference_entries() -> list:
    text = resources.files("brauerloop").joinpath("data/reference_polys.json").read_text()
    return json.loads(text)


def reference_poly(entry, vt: VarTable) -> Poly:
    s = "(" + str(rkops.shift_poly(vt, entry["type"])) + ")"
    return parse_poly(re.sub(r"\bs\b|s(?=[\s)^+\-*]|$)", s, entry["poly_s"]), vt)


def _timed(number, title, fn) -> Criterion:
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, not a crashed run
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return Criterion(number, title, bool(ok), detail, time.perf_counter() - t)


# ----------------------------------------------------------------- criteria

def c1_reference():
    limits = {2: 1.0, 3: 60.0, 4: 120.0}
    detail = {"mismatch": [], "timing": {}}
    entries = reference_entries()
    for ty, L in REFERENCE:
        t = time.perf_counter()
        sol = qkzsolve.solve(ty, L, "recur")
        dt = time.perf_counter() - t
        detail["timing"][f"{ty}{L}"] = round(dt, 3)
        if dt > limits[L]:
            detail.setdefault("slow", []).append(f"{ty}{L}")
        for e in entries:
            if e["type"] == ty and len(e["pattern"]) == L:
                if sol[e["pattern"]] != reference_poly(e, sol.vt):
                    detail["mismatch"].append(f"{ty}:{e['pattern']}")
    detail["entries"] = len(entries)
    return not detail["mismatch"] and "slow" not in detail, detail


def c2_strategies():
    detail = {}
    for ty, L in REFERENCE:
        t = time.perf_counter()
        same = qkzsolve.solve(ty, L, "linear") == qkzsolve.solve(ty, L, "recur")
        detail[f"{ty}{L}"] = {"equal": same, "seconds": round(time.perf_counter() - t, 2)}
    return all(v["equal"] for v in detail.values()), detail


def c3_uniqueness():
    detail = {f"{ty}{L}": qkzsolve.nullspace_dimension(ty, L)
              for ty, L in (("i", 2), ("i", 3), ("c", 3), ("o", 2), ("m", 2))}
    return all(v == 1 for v in detail.values()), detail


def c4_operators():
    t = time.perf_counter()
    bad = {}
    for ty in "picom":
        for L in range(1, 5):
            rep = rkops.verify_operator_identities(PatternSpace(ty, L))
            for k, v in rep.items():
                if v:
                    bad[f"{ty}{L}:{k}"] = v
        for L in range(1, 6):
            rep = rkops.verify_algebra_relations(ty, L)
            for k, v in rep.items():
                if v:
                    bad[f"{ty}{L}:{k}"] = v
    dt = time.perf_counter() - t
    return not bad and dt <= 120, {"failures": bad, "seconds": round(dt, 2)}


def c5_component_rules():
    detail = {}
    for ty, L in solved_instances():
        rep = qkzsolve.verify_solution(qkzsolve.solve(ty, L))
        if not rep["ok"]:
            detail[f"{ty}{L}"] = {k: v for k, v in rep.items() if v and k != "ok"}
    return not detail, {"failures": detail}


def c6_recurrences():
    detail = {}
    for ty, L in solved_instances():
        if L < 2:
            continue
        rep = qkzsolve.verify_recurrences(qkzsolve.solve(ty, L), qkzsolve.solve(ty, L - 1),
                                          qkzsolve.solve(ty, L - 2))
        if not rep["ok"]:
            detail[f"{ty}{L}"] = rep
    return not detail, {"failures": detail}


def hand_z_i2() -> bool:
    sol = qkzsolve.solve("i", 2)
    vt = sol.vt
    A, z1, z2 = (Poly.var(vt, v) for v in ("A", "z1", "z2"))
    target = (A * A * 5 - z1 * z1 * 2 - z2 * z2 * 2) * 2
    return sumrule.compute_zsum(sol) == target


def c7_sumrules():
    detail = {"Z_i2_hand": hand_z_i2()}
    for ty, top in (("p", 4), ("i", 4), ("c", 4), ("o", 3)):
        for L in range(1, top + 1):
            rep = sumrule.sumrule_report(ty, L)
            detail[f"{ty}{L}"] = rep.flags
    ok = detail["Z_i2_hand"] and all(all(v.values()) for k, v in detail.items() if k != "Z_i2_hand")
    return ok, detail


def c8_transfer():
    detail = {}
    for ty in "picom":
        for L in range(1, 4):
            T = transfer.build_transfer(ty, L)
            detail[f"{ty}{L}"] = transfer.verify_transfer(T, qkzsolve.solve(ty, L), seed=L, points=3)
    return all(v["ok"] for v in detail.values()), detail


def c9_degrees():
    t = time.perf_counter()
    d2 = sumrule.commuting_degree(2)
    d4 = sumrule.commuting_degree(4)
    dt = time.perf_counter() - t
    return d2 == 1 and d4 == 11 and dt <= 600, {"n=2": d2, "n=4": d4, "seconds": round(dt, 2)}


def c10_specialization():
    detail = {}
    for ty, L in solved_instances():
        rep = qkzsolve.eps2A_factorization(qkzsolve.solve(ty, L))
        detail[f"{ty}{L}"] = {"ok": rep["ok"], "not_linear": rep["not_linear"],
                              "zero_pattern_ok": rep.get("zero_pattern_ok")}
    return all(v["ok"] for v in detail.values()), detail


def printed_matrix(a: str, label: str) -> list:
    N = len(label) - 2
    M = orbits.zeros(N)
    for i, j, v in PRINTED_PI_LESS[(a, label)]:
        M[i - 1][j - 1] = mpq(v)
    return M


def conjugation_trials(trials: int = 100, seed: int = 0) -> list:
    """Labels that changed under a random typed Borel conjugation."""
    rng = random.Random(seed)
    bad = []
    for k in range(trials):
        a = "ic"[k % 2]
        N = (4, 6, 8)[k % 3]
        pi = rng.choice(orbits.enumerate_involutions(a, N))
        U = orbits.random_typed_borel(N, rng)
        X = orbits.SquareZeroMatrix(orbits.conj(U, orbits.build_pi_less(pi).entries), a)
        if orbits.orbit_label(X) != pi:
            bad.append(f"{a}{N}:{pi}")
    return bad


def c11_orbits():
    detail = {
        "inv_i4": len(orbits.enumerate_involutions("i", 4)),
        "inv_c4": len(orbits.enumerate_involutions("c", 4)),
    }
    detail["printed"] = {
        f"{a}{label}": orbits.build_pi_less(orbits.Involution.parse(label, a)).entries == printed_matrix(a, label)
        for a, label in PRINTED_PI_LESS}
    detail["conjugation_failures"] = conjugation_trials(100)
    detail["maxF"] = {f"{a}{N}": orbits.maxf_report(a, N).to_json_obj()
                      for a in "ic" for N in (4, 6, 8)}
    ok = (detail["inv_i4"] == 6 and detail["inv_c4"] == 3 and all(detail["printed"].values())
          and not detail["conjugation_failures"] and all(v["ok"] for v in detail["maxF"].values()))
    return ok, detail


def c12_sector():
    detail = {}
    for ty, m in (("i", 1), ("c", 1), ("i", 2)):
        rep = sumrule.sector_identity(ty, m)
        detail[f"{ty},m={m}"] = {k: rep[k] for k in ("constant", "exponent", "stated_exponent",
                                                      "matches_stated", "ok")}
    return all(v["ok"] for v in detail.values()), detail


def c13_primitivity():
    detail = {f"{ty}{L}": qkzsolve.joint_gcd_is_trivial(list(qkzsolve.solve(ty, L).components.values()))
              for ty, L in solved_instances()}
    return all(detail.values()), detail


CRITERIA = (
    (1, "reference polynomials reproduced exactly", c1_reference),
    (2, "linear and recursive strategies agree", c2_strategies),
    (3, "coefficient system has a one-dimensional nullspace", c3_uniqueness),
    (4, "operator identities and algebra relations", c4_operators),
    (5, "component relations, factors, symmetries, boundary vanishing", c5_component_rules),
    (6, "bulk and boundary recurrences", c6_recurrences),
    (7, "sum rules: closed forms and localization", c7_sumrules),
    (8, "transfer matrix eigenvector, stochasticity, commutation", c8_transfer),
    (9, "commuting-variety degrees 1 and 11", c9_degrees),
    (10, "e = 2A specialization factors into linear forms", c10_specialization),
    (11, "orbit enumeration, canonical forms, labels, maximal dimensions", c11_orbits),
    (12, "permutation-sector identity up to a power of two", c12_sector),
    (13, "solutions are primitive", c13_primitivity),
)


def run(number: int) -> Criterion:
    for k, title, fn in CRITERIA:
        if k == number:
            return _timed(k, title, fn)
    raise KeyError(number)


def run_all(numbers=None) -> list:
    return [run(k) for k, _, _ in CRITERIA if numbers is None or k in numbers]

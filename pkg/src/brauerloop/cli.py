"""Command-line interface.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage error,
3 internal inconsistency (exact division or interpolation failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from gmpy2 import mpq

from . import acceptance, orbits, qkzsolve, rkops, sumrule, transfer
from .linkpat import PatternSpace, m_pi
from .polyring import PolyError, rat, rat_str

TYPES = ("p", "i", "c", "o", "m")


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=str)


def _emit(args, obj, text: str) -> None:
    if args.json:
        print(_dump(obj))
    else:
        print(text)


def _write(path, data: str) -> None:
    if path:
        Path(path).write_text(data + "\n")


def _need_size(args) -> int:
    if args.size is None:
        raise UsageError("--size is required")
    if args.size < 0:
        raise UsageError("--size must be non-negative")
    return args.size


# ------------------------------------------------------------------ verbs

def cmd_lp(args) -> int:
    L = _need_size(args)
    space = PatternSpace(args.type, L)
    rows = [{"pattern": p.render(), "m_pi": m_pi(p)} for p in space]
    text = "\n".join(f"{r['pattern']}  m={r['m_pi']}" for r in rows) + f"\n{len(rows)} patterns"
    _emit(args, {"type": args.type, "L": L, "count": len(rows), "patterns": rows}, text)
    return 0


def cmd_solve(args) -> int:
    L = _need_size(args)
    sol = qkzsolve.solve(args.type, L, args.method)
    data = sol.to_json()
    _write(args.out, data)
    if args.json:
        print(data)
    else:
        for p in sorted(sol.components):
            print(f"{p.render()}: {sol.components[p]}")
        print(f"degree {sol.degree}, {len(sol.components)} components, normalization: {sol.normalization}")
    return 0


def _load_or_solve(args):
    if args.input:
        return qkzsolve.QkzSolution.from_json(Path(args.input).read_text())
    return qkzsolve.solve(args.type, _need_size(args), args.method)


def cmd_verify(args) -> int:
    sol = _load_or_solve(args)
    ty, L = sol.btype, sol.L
    rep = {"solution": qkzsolve.verify_solution(sol)}
    ops = rkops.verify_operator_identities(PatternSpace(ty, L))
    rep["operators"] = {k: v for k, v in ops.items() if v}
    alg = rkops.verify_algebra_relations(ty, L)
    rep["algebra"] = {k: v for k, v in alg.items() if v}
    low1 = qkzsolve.solve(ty, L - 1, args.method) if L >= 1 else None
    low2 = qkzsolve.solve(ty, L - 2, args.method) if L >= 2 else None
    rep["recurrences"] = qkzsolve.verify_recurrences(sol, low1, low2)
    ok = rep["solution"]["ok"] and not rep["operators"] and not rep["algebra"] and rep["recurrences"]["ok"]
    rep["ok"] = ok
    _write(args.out, _dump(rep))
    lines = [f"{k}: {'ok' if (v.get('ok', not v) if isinstance(v, dict) else v) else 'FAIL'}"
             for k, v in rep.items() if k != "ok"]
    _emit(args, rep, "\n".join(lines) + f"\n{'all checks pass' if ok else 'checks FAILED'}")
    return 0 if ok else 1


def cmd_sumrule(args) -> int:
    L = _need_size(args)
    pf, loc = args.pfaffian, args.localization
    if not (pf or loc):
        pf = loc = True
    rep = sumrule.sumrule_report(args.type, L, pfaffian=pf, localization=loc,
                                 sol=qkzsolve.solve(args.type, L, args.method))
    obj = rep.to_json_obj()
    obj["ok"] = rep.ok
    _write(args.out, _dump(obj))
    text = f"Z = {rep.Z}\n" + "\n".join(f"{k}: {v}" for k, v in rep.flags.items())
    _emit(args, obj, text)
    return 0 if rep.ok else 1


def cmd_transfer(args) -> int:
    L = _need_size(args)
    T = transfer.build_transfer(args.type, L)
    rep = transfer.verify_transfer(T, qkzsolve.solve(args.type, L, args.method), seed=args.seed)
    obj = {"matrix": T.to_json_obj(), "checks": rep}
    _write(args.out, _dump(obj))
    _emit(args, obj, "\n".join(f"{k}: {v}" for k, v in rep.items()))
    return 0 if rep["ok"] else 1


def cmd_orbit(args) -> int:
    if args.type not in ("i", "c"):
        raise UsageError("orbit needs --type i or c")
    if args.matrix:
        X = orbits.SquareZeroMatrix.from_json_obj(json.loads(Path(args.matrix).read_text()))
        if X.btype is None:
            X.btype = args.type
        label = orbits.orbit_label(X)
        obj = {"label": str(label)}
        try:
            pi, U = orbits.canonical_reduce(X)
            obj["conjugator"] = [[rat_str(x) for x in r] for r in U]
        except orbits.IrrationalSquareRoot as exc:
            obj["irrational"] = {"level": exc.level, "value": str(exc.value)}
        _write(args.out, _dump(obj))
        _emit(args, obj, f"orbit {label}")
        return 0
    N = _need_size(args)
    if N % 2:
        raise UsageError("orbit needs even --size")
    dims = orbits.component_dims(args.type, N)
    rep = orbits.maxf_report(args.type, N)
    one = orbits.dimoneless_check(args.type, N, dims)
    obj = {"involutions": {str(p): d for p, d in dims.items()}, "maxF": rep.to_json_obj(),
           "dimoneless": one, "ok": rep.ok and one["ok"]}
    _write(args.out, _dump(obj))
    text = "\n".join(f"{p}  dim {d}" for p, d in dims.items())
    text += f"\nmax {rep.maximum} (expected {rep.expected}) on {', '.join(rep.argmax)}"
    _emit(args, obj, text)
    return 0 if obj["ok"] else 1


def _parse_point(text: str, L: int) -> dict:
    pt = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise UsageError(f"bad point entry {part!r}")
        k, v = part.split("=", 1)
        try:
            pt[k.strip()] = rat(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad value in {part!r}") from exc
    need = [f"z{i}" for i in range(1, L + 1)] + ["A"]
    missing = [k for k in need if k not in pt]
    if missing:
        raise UsageError(f"point lacks {', '.join(missing)}")
    return pt


def cmd_eval(args) -> int:
    L = _need_size(args)
    if not args.point:
        raise UsageError("--point is required")
    pt = _parse_point(args.point, L)
    vals = qkzsolve.evaluate_point(args.type, L, pt, e=pt.get("e", mpq(0)))
    obj = {p.render(): rat_str(v) for p, v in sorted(vals.items())}
    _write(args.out, _dump(obj))
    _emit(args, obj, "\n".join(f"{k}: {v}" for k, v in obj.items()))
    return 0


def cmd_degree(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    d = sumrule.commuting_degree(args.n)
    _emit(args, {"n": args.n, "degree": d}, str(d))
    return 0


def cmd_reproduce(args) -> int:
    if not args.all and not args.criterion:
        raise UsageError("reproduce needs --all or --criterion")
    nums = None if args.all else set(args.criterion)
    results = []
    for k, _, _ in acceptance.CRITERIA:
        if nums is None or k in nums:
            r = acceptance.run(k)
            results.append(r)
            if not args.json:
                print(r.line(), flush=True)
    obj = {"criteria": [r.to_json_obj() for r in results], "ok": all(r.ok for r in results)}
    _write(args.out, _dump(obj))
    if args.json:
        print(_dump(obj))
    return 0 if obj["ok"] else 1


VERBS = {
    "lp": cmd_lp, "solve": cmd_solve, "verify": cmd_verify, "sumrule": cmd_sumrule,
    "transfer": cmd_transfer, "orbit": cmd_orbit, "eval": cmd_eval, "degree": cmd_degree,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brauerloop", description="Exact Brauer loop model toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", choices=TYPES, default="i")
    common.add_argument("--size", type=int)
    common.add_argument("--method", choices=("linear", "recur"), default="recur")
    common.add_argument("--out")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)
    sub.add_parser("lp", parents=[common], help="list link patterns")
    sub.add_parser("solve", parents=[common], help="solve the qKZ system")
    p = sub.add_parser("verify", parents=[common], help="run every exact check on a solution")
    p.add_argument("--input", help="solution JSON instead of solving")
    p = sub.add_parser("sumrule", parents=[common], help="sum rule against closed forms")
    p.add_argument("--pfaffian", action="store_true")
    p.add_argument("--localization", action="store_true")
    sub.add_parser("transfer", parents=[common], help="transfer matrix checks")
    p = sub.add_parser("orbit", parents=[common], help="orbit dimensions or one matrix label")
    p.add_argument("--matrix", help="matrix JSON to label and reduce")
    p = sub.add_parser("eval", parents=[common], help="evaluate components at a rational point")
    p.add_argument("--point", help="e.g. z1=1/2,z2=3,A=1")
    p = sub.add_parser("degree", parents=[common], help="commuting-variety degree")
    p.add_argument("--n", type=int)
    p = sub.add_parser("reproduce", parents=[common], help="acceptance suite")
    p.add_argument("--all", action="store_true")
    p.add_argument("--criterion", type=int, action="append")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return VERBS[args.verb](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (PolyError, orbits.MalformedInput) as exc:
        kind = 2 if isinstance(exc, orbits.MalformedInput) else 3
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return kind


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.  Every subcommand prints one JSON document.

Exit codes: 0 success, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from .box_spline import DirectionTriple, box_spline, translate
from .contact import ContactConfig, build_contact_matrices, contact_classes, sweep, sweep_summary
from .errors import BoxSplineError, NotInSpace, RepresentationFailure
from .hierarchy import HierarchicalDomain, hierarchical_completeness, independence_check, kraft_select, represent
from .mesh import MulticellDomain, lettered_star, smoothness_type, smoothness_type_bfs
from .spline_space import SplineFunction, completeness_check, is_admissible


def _triple(text: str) -> DirectionTriple:
    try:
        return DirectionTriple.parse(text)
    except BoxSplineError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(count: int):
    def parse(text: str):
        try:
            vals = [int(p) for p in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated integers, got {text!r}") from None
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated integers, got {text!r}")
        return tuple(vals)
    return parse


def _point(text: str):
    try:
        parts = [Fraction(p.strip()) for p in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected x,y with rational entries, got {text!r}") from None
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    return tuple(parts)


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _rational(q: Fraction, with_float: bool) -> dict:
    out = {"num": str(q.numerator), "den": str(q.denominator)}
    if with_float:
        out["float"] = float(q)
    return out


def _add_floats(piecewise_json: dict) -> dict:
    for piece in piecewise_json["pieces"]:
        for c in piece["coeffs"]:
            c["float"] = int(c["num"]) / int(c["den"])
    return piecewise_json


# ---------------------------------------------------------------- commands

def cmd_bb(args) -> int:
    f = box_spline(args.n)
    if args.translate is not None:
        f = translate(f, args.translate)
    out = f.to_json()
    out["n"] = list(args.n)
    if args.float:
        _add_floats(out)
    _emit(out)
    return 0


def cmd_eval(args) -> int:
    f = box_spline(args.n)
    if args.translate is not None:
        f = translate(f, args.translate)
    value = f(args.at)
    _emit({"n": list(args.n), "at": [str(c) for c in args.at], "value": str(value), "decimal": repr(float(value))})
    return 0


def cmd_check_domain(args) -> int:
    M = MulticellDomain.from_json(_load_json(args.domain))
    ok, violations = is_admissible(M, args.n)
    dim_span, dim_space, complete = completeness_check(M, args.n, args.d)
    _emit({"n": list(args.n), "admissible": ok, "violations": violations,
           "dim_span": dim_span, "dim_space": dim_space, "complete": complete})
    return 0


def cmd_verify(args) -> int:
    results = sweep(args.max_n, args.contacts, args.jobs)
    if args.dump_csv:
        os.makedirs(args.dump_csv, exist_ok=True)
        for r in results:
            name = next(c for c in contact_classes(args.contacts) if c[0] == r["case"])
            mats = build_contact_matrices(ContactConfig.between(r["n"], name[1], name[2]))
            stem = os.path.join(args.dump_csv, f"{''.join(map(str, r['n']))}_{r['case']}")
            for label, A in (("A_i", mats.A_i), ("A_ii", mats.A_ii)):
                with open(f"{stem}_{label}.csv", "w") as fh:
                    fh.write(A.to_csv() + "\n")
    _emit(results)
    return 0 if all(r["pass"] for r in results) else 1


def cmd_sweep(args) -> int:
    results = sweep(args.max_n, args.contacts, args.jobs)
    per_n = {}
    for r in results:
        row = per_n.setdefault(tuple(r["n"]), {"n": r["n"], "configurations": 0, "passed": 0, "counts": []})
        row["configurations"] += 1
        row["passed"] += int(r["pass"])
        row["counts"].append({"case": r["case"], "contact": r["contact"], "p": r["p"], "q": r["q"]})
    summary = sweep_summary(results)
    _emit({"cases": summary["cases"], "passed": summary["passed"],
           "failed": [{"case": r["case"], "n": r["n"]} for r in summary["failed"]],
           "millis": round(sum(r["millis"] for r in results), 3),
           "per_n": [per_n[k] for k in sorted(per_n)]})
    return 0 if not summary["failed"] else 1


def cmd_hier(args) -> int:
    H = HierarchicalDomain.from_json(_load_json(args.hierarchy))
    K = kraft_select(H, args.n)
    dim_span, dim_space, equal, admissible = hierarchical_completeness(H, args.n)
    out = {"n": list(args.n), "K": K.to_json(), "independent": independence_check(K, args.n),
           "dims": {"span": dim_span, "space": dim_space}, "equal": equal, "admissible_levels": admissible}
    code = 0
    if args.represent:
        s = SplineFunction.from_json(H, _load_json(args.represent))
        try:
            coeffs = represent(s, H, args.n)
            out["represent"] = [[{"shift": list(v), "coeff": _rational(a, args.float)} for v, a in sorted(c.items())]
                                for c in coeffs]
        except (RepresentationFailure, NotInSpace) as exc:
            out["represent"] = {"error": str(exc)}
            code = 1
    _emit(out)
    return code


def cmd_st_table(args) -> int:
    star = lettered_star()
    table, agree = {}, True
    for a, t in star.items():
        row = {}
        for b, u in star.items():
            st = sorted(smoothness_type(t, u)) if a != b else []
            if a != b:
                agree = agree and set(st) == set(smoothness_type_bfs(t, u))
            row[b] = st
        table[a] = row
    _emit({"triangles": {c: t.to_json() for c, t in star.items()}, "table": table, "bfs_agrees": agree})
    return 0 if agree else 1


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxspline", description="Exact type-I box spline toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_n(sp, required=True):
        sp.add_argument("--n", type=_triple, required=required, metavar="N1,N2,N3")
        sp.add_argument("--float", action="store_true", help="add decimal approximations next to exact values")
        return sp

    sp = with_n(sub.add_parser("bb", help="BB coefficients of B_n"))
    sp.add_argument("--translate", type=_ints(2), metavar="VX,VY")
    sp.set_defaults(func=cmd_bb)

    sp = with_n(sub.add_parser("eval", help="exact value of B_n at a point"))
    sp.add_argument("--at", type=_point, required=True, metavar="X,Y")
    sp.add_argument("--translate", type=_ints(2), metavar="VX,VY")
    sp.set_defaults(func=cmd_eval)

    sp = with_n(sub.add_parser("check-domain", help="admissibility and dimension count on a domain"))
    sp.add_argument("--domain", required=True, metavar="FILE")
    sp.add_argument("--d", type=_ints(3), default=None, metavar="D1,D2,D3")
    sp.set_defaults(func=cmd_check_domain)

    for name, func, helptext in (("verify", cmd_verify, "per-case contact verification report"),
                                 ("sweep", cmd_sweep, "contact verification summary per n")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--max-n", type=_triple, required=True, metavar="N1,N2,N3")
        sp.add_argument("--contacts", choices=("edge", "vertex", "all"), default="all")
        sp.add_argument("--jobs", type=int, default=None, metavar="K")
        if name == "verify":
            sp.add_argument("--dump-csv", metavar="DIR", help="write A_i and A_ii of every case as CSV")
        sp.set_defaults(func=func)

    sp = with_n(sub.add_parser("hier", help="Kraft basis and completeness on a hierarchy"))
    sp.add_argument("--hierarchy", required=True, metavar="FILE")
    sp.add_argument("--represent", metavar="FILE", help="spline JSON to decompose level by level")
    sp.set_defaults(func=cmd_hier)

    sp = sub.add_parser("st-table", help="smoothness types of the lettered star")
    sp.set_defaults(func=cmd_st_table)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"boxspline: {exc}", file=sys.stderr)
        return 2
    except BoxSplineError as exc:
        print(f"boxspline: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

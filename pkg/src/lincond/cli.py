"""Command-line front end.

Exit codes: 0 success, 1 when a check answers "no" (unsatisfiable,
unrealizable), 2 for usage and validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import affine, classify
from .algebra import AlgebraError, CloneCapExceeded, classify_operation, generate_term_operations, load_algebra
from .identities import IdentitySyntaxError, canonicalize, find_interpretations, format_system, parse_system

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_system(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_system(text)


def _emit(args, payload: dict, text: str):
    out = json.dumps(payload, indent=2) if args.format == "json" else text
    print(out)


def cmd_clone(args) -> int:
    alg = load_algebra(args.algebra)
    clone = generate_term_operations(alg, args.arity, args.cap)
    rows = []
    for op in clone:
        row = {"term": op.describe(), "table": list(op.table)}
        if args.classify:
            c = classify_operation(op)
            row["flags"] = {
                "projection": c.projection_index + 1 if c.is_projection else None,
                "idempotent": c.is_idempotent,
                "majority": c.is_majority,
                "nu": c.is_nu,
                "wnu": c.is_wnu,
            }
            row["summary"] = c.flags()
        rows.append(row)
    lines = [f"{len(clone)} operations"]
    for row in rows:
        lines.append(f"  {row['term']}" + (f"    {row['summary']}" if args.classify else ""))
    payload = {"algebra": alg.name, "arity": args.arity, "count": len(clone), "rounds": clone.rounds,
               "members": rows}
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_check(args) -> int:
    system = _read_system(args.system)
    alg = load_algebra(args.algebra)
    found = find_interpretations(alg, system, idempotent_only=args.idempotent_only, limit=args.limit)
    if not found:
        _emit(args, {"algebra": alg.name, "satisfiable": False, "witnesses": []}, "unsatisfiable")
        return EXIT_NO
    witnesses = [classify.interpretation_json(i) for i in found]
    lines = [f"satisfiable in {alg.name}: {len(found)} interpretation(s) shown"]
    for i in found:
        lines.append("  " + ", ".join(f"{s}={d}" for s, d in i.describe().items()))
    _emit(args, {"algebra": alg.name, "satisfiable": True, "witnesses": witnesses}, "\n".join(lines))
    return EXIT_OK


def _verdict_text(v) -> str:
    if isinstance(v, affine.Realizable):
        parts = [f"{s}=({', '.join(map(str, op.coefficients))})" for s, op in v.witness]
        return f"realizable mod {v.modulus}: " + " ".join(parts)
    lines = ["unrealizable in every full idempotent module reduct over a finite ring",
             f"  invariant factors A:     {list(v.invariant_factors_a)}",
             f"  invariant factors [A|b]: {list(v.invariant_factors_ab)}"]
    for r in v.primes_tested:
        lines.append(f"  p={r.p}: rank A={r.rank_a}, rank [A|b]={r.rank_ab}")
    if v.brute_bound:
        lines.append(f"  brute search over moduli 2..{v.brute_bound}: no witness")
    return "\n".join(lines)


def cmd_affine(args) -> int:
    system = _read_system(args.system)
    if args.modulus is not None:
        if args.modulus < 2:
            raise UsageError("--modulus must be >= 2")
        v = affine.verdict_mod(system, args.modulus)
        if v is None:
            _emit(args, {"status": "unsatisfiable", "modulus": args.modulus},
                  f"no idempotent affine witness mod {args.modulus}")
            return EXIT_NO
    else:
        v = affine.finite_ring_verdict(system, args.brute_bound)
    _emit(args, v.to_json(), _verdict_text(v))
    return EXIT_OK if isinstance(v, affine.Realizable) else EXIT_NO


def _report_text(rep: classify.SurvivorReport) -> str:
    lines = [f"{rep.signature_class}: {len(rep.survivors)} survivor(s) "
             f"({rep.pairs_examined} interpretation pairs, {rep.theories_examined} theories, "
             f"{rep.unrealizable_theories} unrealizable)"]
    for s in rep.survivors:
        lines.append(f"  [{s.label or 'UNEXPECTED'}]")
        lines.extend(f"    {i}" for i in s.system.identities)
        if s.example3 is not None:
            lines.append(f"    C x D: {s.example3.to_json()['status']}")
    return "\n".join(lines)


def cmd_classify(args) -> int:
    if args.full:
        report = classify.full_report(args.vars)
        payload = report.to_json()
        text = "\n".join(_report_text(r) for r in report.classes.values())
        text += "\nfinal candidates: " + ", ".join(str(x) for x in report.final_labels())
        for f in report.findings:
            text += f"\nFINDING: {f}"
    else:
        rep = classify.classify_signature(args.signature_class, num_vars=args.vars)
        payload = rep.to_json()
        text = _report_text(rep)
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_fmt(args) -> int:
    system = _read_system(args.system)
    if args.canonical:
        system = canonicalize(system)
    sys.stdout.write(format_system(system))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lincond", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_format(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        return p

    p = with_format(sub.add_parser("clone", help="generate a k-ary term-operation clone"))
    p.add_argument("algebra", help="built-in name (B, A2, A3, C, D, CxD) or JSON file")
    p.add_argument("--arity", type=int, default=3)
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--classify", action="store_true", help="show projection/majority/WNU flags")
    p.set_defaults(func=cmd_clone)

    p = with_format(sub.add_parser("check", help="find interpretations of a system in an algebra"))
    p.add_argument("system")
    p.add_argument("algebra")
    p.add_argument("--idempotent-only", dest="idempotent_only", action="store_true", default=True)
    p.add_argument("--all-operations", dest="idempotent_only", action="store_false",
                   help="also try non-idempotent term operations")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_check)

    p = with_format(sub.add_parser("affine", help="realizability in idempotent module reducts"))
    p.add_argument("system")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--modulus", type=int)
    mode.add_argument("--all-rings", action="store_true", default=True)
    p.add_argument("--brute-bound", type=int, default=affine.DEFAULT_BRUTE_BOUND)
    p.set_defaults(func=cmd_affine)

    p = with_format(sub.add_parser("classify", help="run the three-filter classification"))
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--class", dest="signature_class", choices=sorted(classify.SIGNATURE_CLASSES))
    mode.add_argument("--full", action="store_true")
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fmt", help="pretty-print a system")
    p.add_argument("system")
    p.add_argument("--canonical", action="store_true")
    p.set_defaults(func=cmd_fmt)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, AlgebraError, IdentitySyntaxError, CloneCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

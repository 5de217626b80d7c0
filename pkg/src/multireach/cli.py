"""multireach command line.

Exit codes: 0 decided (or command succeeded), 1 witness rejected by verify,
2 parse error, 3 Unsupported (and NoWithinBudget with --strict), 4 internal
invariant breach.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from decimal import Decimal, localcontext
from fractions import Fraction

from . import hilbert, lrs, planar, reduction
from .instances import Instance, canonical_dumps, load_instance, parse_matrix, read_instance
from .planar import NO_WITHIN_BUDGET, UNSUPPORTED, InvariantBreach, Verdict
from .poly import ParseError
from .semialg.points import RationalPoint

EXIT_OK, EXIT_REJECTED, EXIT_PARSE, EXIT_UNDECIDED, EXIT_BREACH = 0, 1, 2, 3, 4


class UsageError(ParseError):
    pass


def _fractions(text: str, where: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: expected comma-separated rationals", text) from exc


def _ints(text: str, where: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ParseError(f"{where}: expected comma-separated integers", text) from exc


# ---------------------------------------------------------------------------
# analyze

def analyze_instance(inst: Instance, visits: int | None = None, budget: int | None = None,
                     bound_provider=None) -> Verdict:
    if inst.kind not in ("planar", "rotation"):
        return Verdict(UNSUPPORTED, certificate=f"analyze handles planar and rotation instances, not {inst.kind}")
    m = visits or inst.visits
    B = budget or inst.budget
    S, T, M = inst.source, inst.target, inst.matrix
    ec = planar.classify_matrix(M)
    if ec.kind == "ComplexPair" and not ec.degenerate and ec.det == 1:
        from .rotation import decide_rotation_multi

        return decide_rotation_multi(S, T, M, m, budget=B, bound_provider=bound_provider)
    try:
        planar.halfplane_coefficients(T)
        return planar.decide_halfplane_multi(S, T, M, m, budget=B, bound_provider=bound_provider)
    except ValueError:
        pass
    try:
        c = planar.line_coefficients(T)
    except ValueError:
        return Verdict(UNSUPPORTED, certificate="targets other than a halfplane or a line need a rotation matrix")
    if c[2] == 0 and m >= 2:
        return planar.homogeneous_line_fastpath(S, T, M, m)
    return Verdict(UNSUPPORTED, certificate="line targets off the origin need a rotation matrix or m = 1")


def _cmd_analyze(args) -> int:
    inst = read_instance(args.file)
    provider = None
    if args.bound_oracle:
        from .rotation import executable_oracle

        provider = executable_oracle(args.bound_oracle)
    verdict = analyze_instance(inst, args.visits, args.budget, provider)
    if args.format == "json":
        print(json.dumps(verdict.to_json(), indent=2, sort_keys=True))
    else:
        line = str(verdict)
        if verdict.outcome == NO_WITHIN_BUDGET:
            line = f"{verdict.outcome}({verdict.budget})"
        print(line)
        if verdict.certificate:
            print(f"  {verdict.certificate}")
    if verdict.outcome == UNSUPPORTED:
        print(f"unsupported: {verdict.certificate}", file=sys.stderr)
        return EXIT_UNDECIDED
    if verdict.outcome == NO_WITHIN_BUDGET and args.strict:
        return EXIT_UNDECIDED
    return EXIT_OK


# ---------------------------------------------------------------------------
# hilbert / verify

def _cmd_hilbert(args) -> int:
    D = hilbert.DiophantineInstance.parse(args.poly, args.vars)
    if args.identifications:
        for ident in hilbert.enumerate_identifications(D.F):
            tag = "zero" if ident.identically_zero else "nonzero"
            print(f"{list(ident.subset)}\t{tag}\t{ident}")
        return EXIT_OK
    G = hilbert.build_instance(D)
    text = canonical_dumps(G.to_json())
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _gadget_from(obj) -> hilbert.GadgetInstance:
    D = hilbert.DiophantineInstance.parse(obj["source_polynomial"], int(obj["n"]))
    G = hilbert.build_instance(D)
    if G.M.to_json() != obj["matrix"]:
        raise ParseError("gadget matrix does not match its source polynomial")
    return G


def _cmd_verify(args) -> int:
    with open(args.file) as fh:
        raw = json.loads(fh.read())
    inst = load_instance(raw)
    if inst.kind == "gadget":
        G = _gadget_from(raw)
        if args.ys:
            ys = _ints(args.ys, "--ys")
            p, rs = G.point_for(ys), [y - 1 for y in ys]
        else:
            if not args.point or not args.visits:
                raise UsageError("gadget verify needs --ys, or --point and --visits")
            p, rs = _fractions(args.point, "--point"), _ints(args.visits, "--visits")
        ok = hilbert.verify_witness(G, p, rs)
    elif inst.kind in ("planar", "rotation"):
        if not args.point or not args.visits:
            raise UsageError("verify needs --point x,y and --visits")
        x, y = _fractions(args.point, "--point")
        ok = _verify_planar(inst, RationalPoint(x, y), _ints(args.visits, "--visits"))
    else:
        raise UsageError(f"nothing to verify for kind {inst.kind}")
    print("accepted" if ok else "rejected")
    return EXIT_OK if ok else EXIT_REJECTED


def _verify_planar(inst: Instance, point, steps) -> bool:
    from .rotation import verify_rotation_witness

    if len(set(steps)) != len(steps) or any(s < 1 for s in steps):
        return False
    return verify_rotation_witness(inst.source, inst.target, inst.matrix, point, steps)


# ---------------------------------------------------------------------------
# reduce / lrs

def _cmd_reduce(args) -> int:
    if args.file:
        inst = read_instance(args.file)
        if inst.kind != "reduction":
            raise UsageError("reduce needs a reduction instance")
        M, disjuncts = inst.matrix, inst.extra["condition"]
    else:
        if not args.matrix or not (args.eq or args.gt):
            raise UsageError("reduce needs a file, or --matrix with --eq/--gt")
        M = parse_matrix(args.matrix)
        disjuncts = [{"eq": args.eq, "gt": args.gt or []}]
    cond = reduction.MatrixCondition.parse(M.n, disjuncts)
    out = [inst.to_json() for inst in reduction.compile_to_polytope(cond, M)]
    if args.check:
        ok = reduction.brute_force_equivalence(cond, M, args.check)
        print(f"# brute-force check to n = {args.check}: {'agrees' if ok else 'DISAGREES'}", file=sys.stderr)
        if not ok:
            return EXIT_BREACH
    sys.stdout.write(canonical_dumps(out))
    return EXIT_OK


def _recurrence(text: str, where: str) -> lrs.RecurrenceRelation:
    """"a1,...,ad;u1,...,ud" for u_n = a1 u_{n-1} + ... + ad u_{n-d}."""
    if ";" not in text:
        raise ParseError(f"{where}: expected 'coefficients;initial terms'", text)
    a, u = text.split(";", 1)
    return lrs.RecurrenceRelation(_fractions(a, where), _fractions(u, where))


def _cmd_lrs(args) -> int:
    if args.op == "companion":
        r = _recurrence(args.a, "--a")
        out = {"recurrence": r.to_json(), "companion": lrs.companion_matrix(r).to_json()}
    elif args.op in ("sum", "product"):
        if not args.b:
            raise UsageError(f"{args.op} needs --b")
        r = lrs.lrs_combine(_recurrence(args.a, "--a"), _recurrence(args.b, "--b"), args.op)
        if args.minimize:
            r = lrs.minimize(r)
        out = {"recurrence": r.to_json(), "terms": [str(v) for v in r.terms(args.terms)]}
    elif args.op == "entry":
        M = parse_matrix(args.matrix)
        r = lrs.entry_recurrence(M, args.i, args.j, minimal=args.minimize)
        out = {"recurrence": r.to_json(), "terms": [str(v) for v in r.terms(args.terms)]}
    elif args.op == "binomial":
        r = lrs.binomial_recurrence(args.degree)
        out = {"recurrence": r.to_json(), "matrix": lrs.md_matrix(args.degree).to_json()}
    else:
        raise UsageError(f"unknown lrs operation {args.op}")
    sys.stdout.write(canonical_dumps(out))
    return EXIT_OK


# ---------------------------------------------------------------------------
# orbit

def _decimal(q: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def _cmd_orbit(args) -> int:
    M = parse_matrix(args.matrix)
    p = _fractions(args.point, "--point")
    if len(p) != M.n:
        raise ParseError(f"--point has {len(p)} coordinates, matrix is {M.n}x{M.n}")
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    names = ["x", "y"] if M.n == 2 else [f"x{i + 1}" for i in range(M.n)]
    print(f"# exact rational orbit p M^n rounded to {args.digits} significant digits")
    print(",".join(["n"] + names))
    v = p
    for n in range(1, args.steps + 1):
        v = M.rmul_vector(v)
        print(",".join([str(n)] + [_decimal(c, args.digits) for c in v]))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multireach", description="Multiple reachability for linear dynamical systems")
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--threads", type=int, default=1, help="accepted for compatibility; search is sequential")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decide an instance file")
    a.add_argument("file")
    a.add_argument("--visits", type=int)
    a.add_argument("--budget", type=int)
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--strict", action="store_true", help="exit 3 on NoWithinBudget")
    a.add_argument("--bound-oracle", help="executable: reads a Laurent system as JSON, prints a height bound")
    a.set_defaults(func=_cmd_analyze)

    h = sub.add_parser("hilbert", help="build the gadget instance of a Diophantine equation")
    h.add_argument("--poly", required=True)
    h.add_argument("--vars", type=int)
    h.add_argument("--output", "-o")
    h.add_argument("--identifications", action="store_true", help="list variable identifications instead")
    h.set_defaults(func=_cmd_hilbert)

    v = sub.add_parser("verify", help="re-check a witness against an instance file")
    v.add_argument("file")
    v.add_argument("--point")
    v.add_argument("--visits")
    v.add_argument("--ys", help="gadget: the Diophantine solution y1,...,yn")
    v.set_defaults(func=_cmd_verify)

    r = sub.add_parser("reduce", help="compile a matrix-power condition to point-to-polytope instances")
    r.add_argument("file", nargs="?")
    r.add_argument("--matrix")
    r.add_argument("--eq")
    r.add_argument("--gt", action="append")
    r.add_argument("--check", type=int, default=0, help="brute-force the equivalence up to this n")
    r.set_defaults(func=_cmd_reduce)

    lr = sub.add_parser("lrs", help="linear recurrence operations")
    lr.add_argument("op", choices=("companion", "sum", "product", "entry", "binomial"))
    lr.add_argument("--a", help="'a1,...,ad;u1,...,ud'")
    lr.add_argument("--b")
    lr.add_argument("--matrix")
    lr.add_argument("--i", type=int, default=1)
    lr.add_argument("--j", type=int, default=1)
    lr.add_argument("--degree", type=int, default=1)
    lr.add_argument("--terms", type=int, default=10)
    lr.add_argument("--minimize", action="store_true")
    lr.set_defaults(func=_cmd_lrs)

    o = sub.add_parser("orbit", help="print orbit points as CSV")
    o.add_argument("--matrix", required=True)
    o.add_argument("--point", required=True)
    o.add_argument("--steps", type=int, default=10)
    o.add_argument("--digits", type=int, default=30)
    o.set_defaults(func=_cmd_orbit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except InvariantBreach as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except (ParseError, json.JSONDecodeError, KeyError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

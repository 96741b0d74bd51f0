"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check fails
(the first failing witness is printed), 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from gmpy2 import mpq

from . import io, verify
from .complex_ops import HypothesisError, random_section
from .resolution import TheoremContradiction, solve
from .symbol import CompatibilityError
from .verify import Report, UsageError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _covector(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("--v needs six comma-separated rationals")
    try:
        return tuple(mpq(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational in {text!r}") from None


def _levels(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kmonogenic", description="Exact checks for the k-monogenic complex on R^6.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="dimension table of V_l and scriptV_l")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["algebra", "complex", "adjoint", "commutator", "estimate"])
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--l", type=_levels, default=[1, 2, 3], help="estimate levels, e.g. 1 or 1,2,3")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exploratory", action="store_true", help="allow estimate sampling for k = 4, 5")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("symbol", help="symbol exactness and preimage checks")
    p.add_argument("task", choices=["exactness", "preimage"])
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--v", type=_covector, default=None, help="covector v0,...,v5")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--method", choices=["certified", "exact", "float"], default="certified")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("solve", help="solve D_l u = f for a section file f at level l+1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--level", type=int, required=True, help="l in D_l u = f")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--exploratory", action="store_true", help="allow k = 4, 5")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("random-field", help="write a seeded random contraction-free section")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-")
    return ap


def _emit(rep: Report, as_json: bool) -> int:
    sys.stdout.write(rep.to_json() if as_json else rep.to_text())
    if rep.passed:
        return EXIT_OK
    bad = rep.first_failure()
    print(f"first failure: {bad.name} {bad.witness}".rstrip(), file=sys.stderr)
    return EXIT_FAIL


def _dims(args) -> int:
    rows = verify.dims_table(args.k)
    if args.json:
        print(json.dumps({"k": args.k, "rows": rows}, indent=2))
    else:
        print(f"k = {args.k}")
        print(" l   dim V_l   dim scriptV_l")
        for r in rows:
            print(f"{r['l']:2d} {r['V']:9d} {r['scriptV']:15d}")
    return EXIT_OK


def _verify(args) -> int:
    s = args.suite
    if args.degree is not None and args.degree < 0 or args.trials is not None and args.trials < 1:
        raise UsageError("--degree must be >= 0 and --trials >= 1")
    if s == "algebra":
        rep = verify.suite_algebra(args.k, args.trials or 20, args.seed)
    elif s == "complex":
        rep = verify.suite_complex(args.k, 3 if args.degree is None else args.degree, args.trials or 10, args.seed)
    elif s == "adjoint":
        rep = verify.suite_adjoint(args.k, 2 if args.degree is None else args.degree, args.trials or 20, args.seed)
    elif s == "commutator":
        if args.k < 1:
            raise UsageError("k must be positive")
        rep = verify.suite_commutator(3 if args.degree is None else args.degree)
    else:
        rep = verify.suite_estimate(
            args.k, args.l, 2 if args.degree is None else args.degree, args.trials or 50, args.seed, args.exploratory
        )
    return _emit(rep, args.json)


def _symbol(args) -> int:
    if args.task == "exactness":
        rep = verify.suite_exactness(args.k, args.v, args.samples or 25, args.seed, args.method)
    else:
        rep = verify.suite_preimage(args.k, args.level, args.v, args.samples or 1, args.trials, args.seed)
    return _emit(rep, args.json)


def _solve(args) -> int:
    if not 0 <= args.level <= 2:
        raise UsageError(f"--level must be 0, 1 or 2, got {args.level}")
    try:
        f = io.read(args.input)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    if f.profile.k != args.k or f.profile.l != args.level + 1:
        raise UsageError(
            f"input is at (k={f.profile.k}, l={f.profile.l}); D_{args.level} needs (k={args.k}, l={args.level + 1})"
        )
    if f.tag != "scriptV":
        raise UsageError("input must be tagged scriptV")
    try:
        res = solve(args.level, f, exploratory=args.exploratory)
    except HypothesisError as exc:
        raise UsageError(f"refused: {exc}; pass --exploratory for k = 4, 5") from None
    except CompatibilityError as exc:
        rep = Report(f"solve --k {args.k} --level {args.level}", None)
        witness = ""
        if exc.residual is not None and not exc.residual.is_zero():
            key = min(exc.residual.components)
            poly = exc.residual.components[key]
            exp = min(poly.terms)
            witness = f"residual component {key} monomial {list(exp)} coefficient {poly.terms[exp]}"
        rep.add(f"compatibility D_{args.level + 1} f = 0", False, witness or str(exc))
        return _emit(rep, args.json)
    except TheoremContradiction as exc:
        rep = Report(f"solve --k {args.k} --level {args.level}", None)
        rep.add("compatible right-hand side is solvable", False, str(exc))
        return _emit(rep, args.json)
    io.write(res.u, args.output)
    rep = Report(f"solve --k {args.k} --level {args.level}", None)
    rep.add("compatibility checked", True, f"D_{args.level + 1} f = 0" + (" (vacuous: scriptV_4 = 0)" if args.level == 2 else ""))
    rep.add(f"D_{args.level} u = f exactly", res.residual_zero)
    rep.add("minimal Gaussian norm selected", res.min_norm_selected)
    rep.add("solution degree", True, f"deg u = {res.degree}, deg f = {f.degree()}")
    rep.add("weighted norm ||u||^2", True, f"{res.norm2.numerator}/{res.norm2.denominator}")
    if res.exploratory:
        rep.add("outside theorem hypothesis k >= 6", True, "exploratory run")
    return _emit(rep, args.json)


def _random_field(args) -> int:
    if args.k < 1 or not 0 <= args.level <= min(4, args.k) or args.degree < 0:
        raise UsageError(f"invalid profile k={args.k}, level={args.level}, degree={args.degree}")
    f = random_section(args.k, args.level, args.degree, verify.seeded(args.seed, "field", args.k, args.level))
    text = io.dumps(f)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return EXIT_OK


_HANDLERS = {"dims": _dims, "verify": _verify, "symbol": _symbol, "solve": _solve, "random-field": _random_field}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except (UsageError, io.SectionFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

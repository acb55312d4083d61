"""Command-line entry point: ``flatf compute|verify|axioms|basis``.

Exit codes: 0 when everything passes, 1 for a failed check or an impossible
computation, 2 for usage and input errors.  Logs go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import engine, verifier
from .io import (HashMismatchError, SchemaError, cached_gbasis, canonical_json, load_problem,
                 load_result, resolve_cache_dir, result_to_dict, write_text)
from .poly import PolyParseError, format_poly
from .polyvector import ChargeError
from .quotient import NotFiniteError, NotInSpanError, QuotientError, compute_basis

log = logging.getLogger("flatf")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CHECKS = {
    "fqm11": lambda s: verifier.check_fqm11(s),
    "flatf": lambda s: verifier.check_flat_f(s),
    "unit": lambda s: verifier.check_unit(s),
}
DEFAULT_CHECKS = ("fqm11", "flatf")


class UsageError(Exception):
    pass


def _prepare(args):
    pf = load_problem(args.problem)
    cache = resolve_cache_dir(getattr(args, "cache_dir", None), pf.cache_dir)
    gb = cached_gbasis(pf, cache)
    return pf, compute_basis(pf.problem, gb)


def cmd_compute(args) -> int:
    t0 = time.perf_counter()
    pf, basis = _prepare(args)
    level = args.max_level if args.max_level is not None else pf.max_level
    if level < 2:
        raise UsageError("--max-level must be at least 2")
    structure = engine.run(pf.problem, level, basis, problem_hash=pf.hash)
    out = Path(args.out) if args.out else Path(args.problem).with_suffix(".out.json")
    write_text(out, canonical_json(result_to_dict(pf, structure, basis)))
    elapsed = time.perf_counter() - t0
    flag = "complete" if basis.complete else f"not certified ({basis.reason})"
    print(f"dim J_S = {basis.dim} ({flag}); level {level}; {elapsed:.2f} s; wrote {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = [c.strip() for c in args.checks.split(",") if c.strip()] if args.checks else list(DEFAULT_CHECKS)
    unknown = [c for c in names if c not in CHECKS]
    if unknown or not names:
        raise UsageError(f"unknown check(s) {unknown}; choose from {sorted(CHECKS)}")
    structure, _ = load_result(args.result)
    reports = [CHECKS[c](structure) for c in names]
    for r in reports:
        print(r.line())
    if args.json:
        print(canonical_json([r.to_dict() for r in reports]), end="")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_axioms(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    pf = load_problem(args.problem)
    report = verifier.check_dgbv_axioms(pf.problem.potential, pf.problem.charges, args.trials, args.seed,
                                        names=pf.variables)
    report.stats["problem_hash"] = pf.hash
    print(report.line())
    if args.json:
        print(canonical_json(report.to_dict()), end="")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_basis(args) -> int:
    pf, basis = _prepare(args)
    for k, r in enumerate(basis.reps):
        mark = "  (identity)" if k == basis.identity else ""
        print(f"u[{k}] = {format_poly(r, pf.variables)}{mark}")
    print(f"dim = {basis.dim}")
    print(f"complete = {str(basis.complete).lower()}" + (f" ({basis.reason})" if basis.reason else ""))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flatf", description="Flat F-manifold structures from a potential.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="run the recursion and write a result file")
    c.add_argument("problem")
    c.add_argument("--out")
    c.add_argument("--max-level", type=int)
    c.add_argument("--cache-dir")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="check a result file")
    v.add_argument("result")
    v.add_argument("--checks", help="comma-separated subset of " + ",".join(sorted(CHECKS)))
    v.add_argument("--json", action="store_true", help="also print the reports as JSON")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("axioms", help="random exact tests of the algebra axioms")
    a.add_argument("problem")
    a.add_argument("--trials", type=int, default=100)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--json", action="store_true", help="also print the report as JSON")
    a.set_defaults(func=cmd_axioms)

    b = sub.add_parser("basis", help="print the quotient basis and its completeness flag")
    b.add_argument("problem")
    b.add_argument("--cache-dir")
    b.set_defaults(func=cmd_basis)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    try:
        return args.func(args)
    except (NotInSpanError, NotFiniteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, SchemaError, HashMismatchError, PolyParseError, ChargeError, QuotientError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

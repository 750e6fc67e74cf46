"""Command-line surface: machine-readable tables from every module.

Commands print their payload to stdout (JSON or CSV, selected by
--format) and everything else to stderr: timing, progress, warnings.
Payloads are byte-deterministic for fixed inputs, whatever --jobs says.

Exit codes: 0 success; 2 usage or validation error; 3 a term budget ran
out or a parameter is outside the supported range; 4 a self-check failed
on something about to be emitted (exact identity, modular identity, or
the empirical window k+n <= a_k <= 2(k+n), whose violation would be a
genuine discovery and is reported loudly).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from .arith import verify_solution
from .chains import (
    ChainCertificationError,
    expand_chain,
    representation_count_certificate,
)
from .congruence import (
    EMBEDDED_US,
    ITERATIVE_MODULUS_LIMIT,
    TABLE_ROWS,
    UnsupportedModulusError,
    check_row,
    family_modulus,
    solve_congruence,
    table_row,
)
from .crt import CertificationError, certify_multiplicity, scan_subsets
from .greedy import (
    DEFAULT_MAX_K,
    FeasibilityError,
    greedy_for_n,
    greedy_representation,
    sweep,
)
from .search import VerificationError, run_search

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4

_VERIFY_ERRORS = (
    VerificationError,
    ChainCertificationError,
    CertificationError,
    FeasibilityError,
    ArithmeticError,
)


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence]) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _note(msg: str) -> None:
    print(f"# {msg}", file=sys.stderr, flush=True)


def _fmt(args: argparse.Namespace) -> str:
    return args.format or args.default_format


def _cmd_enumerate(args: argparse.Namespace) -> int:
    if args.k < 2:
        raise ValueError("k must be at least 2")

    def progress(done: int, total: int, found: int) -> None:
        _note(f"enumerate k={args.k}: {done}/{total} tasks, {found} found")

    result = run_search(
        args.k, jobs=args.jobs, checkpoint=args.checkpoint, progress=progress
    )
    for sol in result.solutions:
        if not verify_solution(sol):
            raise VerificationError(f"about to emit a non-solution: {sol}")
    if _fmt(args) == "csv":
        _emit_csv(
            ("n", "a"),
            [(s.n, " ".join(map(str, s.terms))) for s in result.solutions],
        )
    else:
        _emit_json(
            {
                "command": "enumerate",
                "parameters": {"k": args.k, "jobs": args.jobs},
                "count": len(result.solutions),
                "rows": [
                    {"n": s.n, "a": list(s.terms)} for s in result.solutions
                ],
                "tasks": result.tasks,
                "nodes": result.nodes,
                "prune_counters": result.prune_counters,
            }
        )
    return EXIT_OK


def _cmd_greedy(args: argparse.Namespace) -> int:
    if (args.n is None) == (args.x is None):
        raise ValueError("give exactly one of --n or --x")
    if args.max_k < 1:
        raise ValueError("--max-k must be positive")
    parameters: dict = {"max_k": args.max_k}
    if args.n is not None:
        parameters["n"] = args.n
        got = greedy_for_n(args.n, args.max_k)
        terms = got[1].terms if got else None
    else:
        try:
            x = Fraction(args.x)
        except ZeroDivisionError:
            raise ValueError("zero denominator") from None
        parameters["x"] = str(x)
        terms = greedy_representation(x, args.max_k)
    terminated = terms is not None
    if _fmt(args) == "csv":
        row = (
            (len(terms), "true", " ".join(map(str, terms)))
            if terminated
            else ("", "false", "")
        )
        _emit_csv(("k", "terminated", "terms"), [row])
    else:
        _emit_json(
            {
                "command": "greedy",
                "parameters": parameters,
                "status": "ok" if terminated else "budget exhausted",
                "terminated": terminated,
                "k": len(terms) if terminated else None,
                "terms": list(terms) if terminated else None,
            }
        )
    if not terminated:
        _note(f"budget of {args.max_k} terms exhausted before the remainder hit 0")
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.n_min < 2:
        raise ValueError("n_min must be at least 2")
    if args.n_max < args.n_min:
        raise ValueError("n_max must be at least n_min")
    if args.max_k < 1:
        raise ValueError("--max-k must be positive")
    if args.jobs < 1:
        raise ValueError("--jobs must be positive")
    rows = sweep(args.n_min, args.n_max, args.max_k, jobs=args.jobs)
    violations = [
        r
        for r in rows
        if r.terminated and not r.k + r.n <= r.last_term <= 2 * (r.k + r.n)
    ]
    exhausted = [r for r in rows if not r.terminated]
    if _fmt(args) == "csv":
        out = []
        for r in rows:
            rec = [r.n, r.k, r.last_term, "true" if r.terminated else "false"]
            if args.figures:
                if r.terminated:
                    rec += [
                        repr(r.last_term / (2 * (r.k + r.n))),
                        repr(r.k / r.n),
                    ]
                else:
                    rec += ["", ""]
            out.append(rec)
        header = ["n", "k", "a_k", "terminated"]
        if args.figures:
            header += ["ak_ratio", "k_ratio"]
        _emit_csv(header, out)
    else:
        recs = []
        for r in rows:
            rec = {
                "n": r.n,
                "k": r.k,
                "a_k": r.last_term,
                "terminated": r.terminated,
            }
            if args.figures:
                rec["ak_ratio"] = (
                    r.last_term / (2 * (r.k + r.n)) if r.terminated else None
                )
                rec["k_ratio"] = r.k / r.n if r.terminated else None
            recs.append(rec)
        _emit_json(
            {
                "command": "sweep",
                "parameters": {
                    "n_min": args.n_min,
                    "n_max": args.n_max,
                    "max_k": args.max_k,
                    "jobs": args.jobs,
                },
                "rows": recs,
            }
        )
    for r in violations:
        _note(f"window violation: n={r.n} k={r.k} a_k={r.last_term}")
    if violations:
        return EXIT_VERIFY
    if exhausted:
        _note(f"{len(exhausted)} rows hit the {args.max_k}-term budget")
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_table1(args: argparse.Namespace) -> int:
    if args.u_max < 0:
        raise ValueError("--u-max must be non-negative")
    rows = []
    skipped = []
    for u in range(args.u_max + 1):
        if family_modulus(u) < ITERATIVE_MODULUS_LIMIT:
            row = solve_congruence(u)
            if row is not None:
                rows.append((row.u, row.k0, row.r, "computed"))
        elif u in EMBEDDED_US:
            row = table_row(u)
            try:
                check_row(row)
            except ValueError as exc:
                raise VerificationError(str(exc)) from exc
            rows.append((row.u, row.k0, row.r, "verified-constant"))
        else:
            skipped.append(u)
    if _fmt(args) == "csv":
        _emit_csv(("u", "k0", "r", "status"), rows)
    else:
        _emit_json(
            {
                "command": "table1",
                "parameters": {"u_max": args.u_max},
                "rows": [
                    {"u": u, "k0": k0, "r": r, "status": status}
                    for u, k0, r, status in rows
                ],
            }
        )
    if skipped:
        _note(
            f"{len(skipped)} values of u ({skipped[0]}..{skipped[-1]}) are past "
            "the order-computation policy and have no embedded row; skipped, "
            "not claimed unsolvable"
        )
    return EXIT_OK


def _cmd_multiplicity(args: argparse.Namespace) -> int:
    if not 1 <= args.subset_size <= len(TABLE_ROWS):
        raise ValueError(f"--subset-size must be in 1..{len(TABLE_ROWS)}")
    found = scan_subsets(TABLE_ROWS, args.subset_size)
    recs = []
    for us, cls in found:
        cert = certify_multiplicity(cls, [table_row(u) for u in us])
        recs.append(
            {
                "us": list(us),
                "residue": cls.residue,
                "modulus": cls.modulus,
                "k": cls.least_member_at_least(2),
                "certificate": cert,
            }
        )
    if _fmt(args) == "csv":
        _emit_csv(
            ("us", "residue", "modulus", "k", "certificate"),
            [
                (
                    " ".join(map(str, r["us"])),
                    r["residue"],
                    r["modulus"],
                    r["k"],
                    r["certificate"],
                )
                for r in recs
            ],
        )
    else:
        _emit_json(
            {
                "command": "multiplicity",
                "parameters": {"subset_size": args.subset_size},
                "count": len(recs),
                "rows": recs,
            }
        )
    return EXIT_OK


def _cmd_chain(args: argparse.Namespace) -> int:
    if args.a_start < 3:
        raise ValueError("a_start must be at least 3")
    if args.depth < 1:
        raise ValueError("depth must be at least 1")
    if args.max_k < 1:
        raise ValueError("--max-k must be positive")
    chain = expand_chain(args.a_start, args.depth, args.max_k)
    certificate = (
        representation_count_certificate(chain) if chain.steps else None
    )
    if _fmt(args) == "csv":
        _emit_csv(
            ("i", "k_i", "last_term"),
            [(s.index, s.k, s.last_term) for s in chain.steps],
        )
    else:
        recs = []
        for s in chain.steps:
            rec = {
                "i": s.index,
                "source": s.source,
                "k": s.k,
                "first_term": s.first_term,
                "last_term": s.last_term,
                "digest": s.digest,
            }
            if s.terms is not None:
                rec["terms"] = list(s.terms)
            recs.append(rec)
        _emit_json(
            {
                "command": "chain",
                "parameters": {
                    "a_start": args.a_start,
                    "depth": args.depth,
                    "max_k": args.max_k,
                },
                "exhausted": chain.exhausted,
                "certificate": certificate,
                "rows": recs,
            }
        )
    if chain.exhausted:
        _note(
            f"budget of {args.max_k} terms exhausted at step "
            f"{len(chain.steps) + 1} of {args.depth}"
        )
        return EXIT_BUDGET
    return EXIT_OK


def _add_format(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument(
        "--format",
        choices=("json", "csv"),
        default=None,
        help=f"payload format (default: {default})",
    )
    p.set_defaults(default_format=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyadicrep",
        description="Exact computations around n/2^n = sum of a_i/2^a_i.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "enumerate", help="all solutions with exactly k terms, sorted"
    )
    p.add_argument("k", type=int, help="number of terms (k >= 2)")
    p.add_argument(
        "--jobs", type=int, default=os.cpu_count() or 1, help="worker processes"
    )
    p.add_argument(
        "--checkpoint",
        metavar="PATH",
        help="state file for resumable long runs (k >= 7)",
    )
    _add_format(p, "json")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("greedy", help="greedy expansion of n/2^n or of x")
    p.add_argument("--n", type=int, help="expand n/2^n (n >= 2)")
    p.add_argument("--x", metavar="P/Q", help="expand the fraction P/Q, 0 < x < 2")
    p.add_argument(
        "--max-k", type=int, default=DEFAULT_MAX_K, help="term budget"
    )
    _add_format(p, "json")
    p.set_defaults(func=_cmd_greedy)

    p = sub.add_parser(
        "sweep", help="greedy stats for every n in [n_min, n_max]"
    )
    p.add_argument("n_min", type=int)
    p.add_argument("n_max", type=int)
    p.add_argument(
        "--max-k", type=int, default=DEFAULT_MAX_K, help="per-n term budget"
    )
    p.add_argument(
        "--jobs", type=int, default=os.cpu_count() or 1, help="worker processes"
    )
    p.add_argument(
        "--figures",
        action="store_true",
        help="append the derived columns a_k/(2(k+n)) and k/n",
    )
    _add_format(p, "csv")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser(
        "table1", help="progression rows (u, k0, r) of the solution families"
    )
    p.add_argument(
        "--u-max",
        type=int,
        default=26,
        help="largest u to report (rows past the order-computation policy "
        "appear only where constants are embedded)",
    )
    _add_format(p, "csv")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser(
        "multiplicity",
        help="compatible row subsets and certified solution-count lower bounds",
    )
    p.add_argument("--subset-size", type=int, default=4)
    _add_format(p, "json")
    p.set_defaults(func=_cmd_multiplicity)

    p = sub.add_parser(
        "chain", help="iterated greedy expansion of the last term"
    )
    p.add_argument("a_start", type=int, help="starting term index (>= 3)")
    p.add_argument("depth", type=int, help="number of expansion steps")
    p.add_argument(
        "--max-k", type=int, default=DEFAULT_MAX_K, help="per-step term budget"
    )
    _add_format(p, "csv")
    p.set_defaults(func=_cmd_chain)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        return args.func(args)
    except _VERIFY_ERRORS as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except UnsupportedModulusError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        _note(f"elapsed: {time.perf_counter() - t0:.3f}s")


if __name__ == "__main__":
    sys.exit(main())

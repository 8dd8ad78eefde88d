"""Command-line entry point.

Exit codes: 0 ok, 2 validation failure, 3 I/O or parse error, 4 truncated search.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InconsistentData, InvariantViolation
from .formats import (
    FormatError,
    format_grid,
    load_input,
    matrix_to_json,
    problem_to_json,
    read_json,
)
from .fusion_data import DecompositionProblem, TwoCategoryData, build_problem, validate
from .oracle import brute_force_decompositions
from .solver import SolverConfig, check_decomposition, default_thread_count, search_all

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_TRUNCATED = 4

log = logging.getLogger("center_scope")


def _write_json(doc, path: str | None) -> None:
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _problem_from(args) -> DecompositionProblem:
    data = load_input(args.input, sort_by_dimension=getattr(args, "sort_by_dimension", False))
    if isinstance(data, TwoCategoryData):
        report = validate(data)
        if not report.ok:
            raise _Invalid(str(report))
        return build_problem(data)
    return data


class _Invalid(Exception):
    pass


def cmd_validate(args) -> int:
    data = load_input(args.input, sort_by_dimension=args.sort_by_dimension)
    if not isinstance(data, TwoCategoryData):
        print("direct problem file: nothing to validate beyond parsing")
        return EXIT_OK
    report = validate(data)
    print(report)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_gram(args) -> int:
    p = _problem_from(args)
    doc = problem_to_json(p)
    _write_json(doc, args.output)
    if args.output not in (None, "-"):
        print(f"M ({p.size}x{p.size}):")
        print(format_grid(p.M))
        print(f"D = {p.D}")
    return EXIT_OK


def _parse_subset(text: str | None):
    if text is None:
        return None
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def cmd_decompose(args) -> int:
    p = _problem_from(args)
    cfg = SolverConfig(
        psd_mode=args.psd_mode,
        eig_tolerance=args.eig_tol,
        max_solutions=args.max_solutions,
        max_columns=args.max_columns,
        time_limit=args.timeout,
        thread_count=args.threads,
        forbid_zero_dots=args.forbid_zero_dots,
        reduce=not args.no_reduce,
        minor_subset=_parse_subset(args.minor_subset),
    )
    out = search_all(p, cfg)
    rp = out.reduced
    doc = {
        "input": str(args.input),
        "config": {
            "psd_mode": cfg.psd_mode,
            "eig_tolerance": cfg.eig_tolerance,
            "max_solutions": cfg.max_solutions,
            "max_columns": cfg.max_columns,
            "time_limit": cfg.time_limit,
            "forbid_zero_dots": cfg.forbid_zero_dots,
            "reduce": cfg.reduce,
        },
        "reduction": {
            "rank": rp.rank,
            "permutation": list(rp.permutation),
            "subset": list(rp.subset),
            "M_prime": matrix_to_json(rp.M_prime),
            "R": matrix_to_json(rp.R),
        },
        "truncated": out.truncated,
        "solution_count": len(out.solutions),
        "column_counts": [s.column_count for s in out.solutions],
        "solutions": [
            {
                "column_count": s.column_count,
                "A": matrix_to_json(s.A),
                "blocks": {name: matrix_to_json(b) for name, b in zip(s.names, s.blocks)},
                "dots": [[x.to_json() for x in col] for col in s.dots],
            }
            for s in out.solutions
        ],
        "stats": {"nodes": out.nodes, "admissible_columns": out.admissible_count},
        "timing": {"wall_time": round(out.elapsed, 3)},
    }
    if args.output:
        _write_json(doc, args.output)

    counts = sorted(set(doc["column_counts"]))
    noun = "solution" if len(out.solutions) == 1 else "solutions"
    cols = ", ".join(str(c) for c in counts) or "-"
    print(
        f"{len(out.solutions)} {noun}, {cols} columns"
        f" ({out.nodes} nodes, {out.elapsed:.2f}s{', truncated' if out.truncated else ''})"
    )
    if not args.quiet:
        for k, s in enumerate(out.solutions):
            print(f"\nsolution {k + 1}: {s.column_count} columns")
            for name, block in zip(s.names, s.blocks):
                print(f"{name}:")
                print(format_grid(block))
    return EXIT_TRUNCATED if out.truncated else EXIT_OK


def _load_candidate(path: str) -> np.ndarray:
    doc = read_json(path)
    if isinstance(doc, dict):
        if "A" in doc:
            doc = doc["A"]
        elif doc.get("solutions"):
            doc = doc["solutions"][0]["A"]
        else:
            raise FormatError("$", "expected a matrix, {'A': ...} or a results file")
    try:
        A = np.array(doc, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise FormatError("$", f"not an integer matrix ({exc})") from exc
    if A.ndim != 2:
        raise FormatError("$", "candidate must be a 2-d matrix")
    return A


def cmd_verify(args) -> int:
    p = _problem_from(args)
    A = _load_candidate(args.candidate)
    if A.shape[0] != p.size:
        raise FormatError(args.candidate, f"candidate has {A.shape[0]} rows, problem has {p.size}")
    problems = check_decomposition(A, p, args.forbid_zero_dots)
    if problems:
        print("false")
        for line in problems:
            print(f"  {line}")
        return EXIT_INVALID
    print("true")
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = read_json(args.input)
    M = doc["M"] if isinstance(doc, dict) else doc
    sols = brute_force_decompositions(np.array(M, dtype=np.int64))
    _write_json({"count": len(sols), "decompositions": [[list(c) for c in s] for s in sols]}, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="center-scope",
        description="Enumerate algebraic decompositions of induction Gram matrices.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check fusion data invariants")
    p.add_argument("input")
    p.add_argument("--sort-by-dimension", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gram", help="write the direct problem file (M, v, D)")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--sort-by-dimension", action="store_true")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("decompose", help="enumerate algebraic decompositions")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--psd-mode", choices=("numeric", "exact"), default="numeric")
    p.add_argument("--eig-tol", type=float, default=-1e-3)
    p.add_argument("--max-solutions", type=int)
    p.add_argument("--max-columns", type=int)
    p.add_argument("--threads", type=int, default=default_thread_count())
    p.add_argument("--timeout", type=float, help="seconds")
    p.add_argument("--minor-subset", help="comma-separated original indices for M'")
    p.add_argument("--forbid-zero-dots", action="store_true")
    p.add_argument("--no-reduce", action="store_true", help="search directly on M")
    p.add_argument("--sort-by-dimension", action="store_true")
    p.add_argument("-q", "--quiet", action="store_true", help="summary line only")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="check a candidate induction matrix")
    p.add_argument("input", help="fusion data or problem file")
    p.add_argument("candidate", help="matrix, {'A': matrix} or a decompose results file")
    p.add_argument("--forbid-zero-dots", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force decompositions of a small matrix")
    p.add_argument("input", help="JSON matrix or problem file")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _Invalid as exc:
        print(str(exc))
        return EXIT_INVALID
    except InconsistentData as exc:
        print(f"inconsistent data: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

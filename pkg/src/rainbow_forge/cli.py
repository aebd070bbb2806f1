"""Command-line interface.

Subcommands: ``gen`` (write an instance file for any generator),
``solve`` (run a solver, write a report), ``bounds`` (tabulate the
bound formulas over parameter ranges), ``verify`` (re-check a stored
report against its instance) and ``sweep`` (generator x solver grids
with persisted records).

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 solver
budget exhaustion, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from math import comb
from pathlib import Path

from . import bounds as bounds_mod
from .constructions import (
    ach_instance,
    blowup_compose,
    certify_blocking_family,
    cycle_instance,
    dummy_lift,
    k4_union_instance,
    random_instance,
)
from .core import Instance, is_rainbow_matching, validate_instance
from .fileformat import (
    InstanceValidationError,
    ParseError,
    ReportDoc,
    parse_instance,
    parse_report,
    serialize_instance,
    serialize_report,
)
from .setpairs import bollobas_sum, extract_setpairs, is_cross_intersecting
from .solvers import (
    CERT_EXACT,
    CERT_HEURISTIC,
    CERT_LOCAL,
    exact_max_rainbow,
    find_extension,
    find_swap,
    good_edges,
)
from .sweep import SOLVERS, SWEEP_CONSTRUCTIONS, CellSpec, cell_is_valid, run_solver, run_sweep

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4

CONSTRUCTIONS = ("cycle", "k4", "ach", "blowup", "dummy", "random")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the exit codes
        raise UsageError(message)


def _parse_span(spec: str) -> list[int]:
    """Accept "7", "3,5,7" and inclusive ranges "2..8"."""
    values: list[int] = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            lo, hi = chunk.split("..", 1)
            values.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            values.append(int(chunk))
    if not values:
        raise UsageError(f"empty range specification {spec!r}")
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="rainbow-forge", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("--construction", required=True, choices=CONSTRUCTIONS)
    gen.add_argument("--r", type=int, help="uniformity (ach, random)")
    gen.add_argument("--n", type=int, help="number of matchings")
    gen.add_argument("--m", type=int, help="dummy edge count (dummy)")
    gen.add_argument("--size", type=int, help="matching size (random; default n)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--in", dest="inputs", action="append", default=[],
                     help="input instance file (dummy: one; blowup: repeatable)")
    gen.add_argument("--blocked", type=int, action="append", default=[],
                     help="blocked size per blowup part, same order as --in")
    gen.add_argument("--out", default="-", help="output file, '-' for stdout")
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", help="run a solver on an instance file")
    solve.add_argument("--in", dest="input", required=True)
    solve.add_argument("--solver", required=True, choices=SOLVERS)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--node-budget", type=int, default=None)
    solve.add_argument("--retries", type=int, default=20)
    solve.add_argument("--out", default="-", help="report file, '-' for stdout")
    solve.set_defaults(func=_cmd_solve)

    bnd = sub.add_parser("bounds", help="tabulate bound formulas over (r, n) ranges")
    bnd.add_argument("--r", required=True, help="range, e.g. 3 or 3..5 or 3,4")
    bnd.add_argument("--n", required=True, help="range, e.g. 1000 or 100..120")
    bnd.add_argument("--format", choices=("text", "csv"), default="text")
    bnd.add_argument("--out", default="-")
    bnd.set_defaults(func=_cmd_bounds)

    ver = sub.add_parser("verify", help="re-check a stored solve report")
    ver.add_argument("--in", dest="input", required=True, help="instance file")
    ver.add_argument("--report", required=True, help="report file")
    ver.add_argument("--node-budget", type=int, default=None,
                     help="budget for re-solving exact certificates")
    ver.set_defaults(func=_cmd_verify)

    swp = sub.add_parser("sweep", help="run a generator x solver grid")
    swp.add_argument("--construction", required=True,
                     help=f"comma list from {','.join(SWEEP_CONSTRUCTIONS)}")
    swp.add_argument("--r", required=True, help="range of uniformities")
    swp.add_argument("--n", required=True, help="range of matching counts")
    swp.add_argument("--solver", required=True, help=f"comma list from {','.join(SOLVERS)}")
    swp.add_argument("--seed", type=int, default=0)
    swp.add_argument("--size", type=int, default=None, help="matching size for random cells")
    swp.add_argument("--node-budget", type=int, default=None)
    swp.add_argument("--retries", type=int, default=20)
    swp.add_argument("--jobs", type=int, default=1)
    swp.add_argument("--out", required=True, help="results directory")
    swp.set_defaults(func=_cmd_sweep)
    return parser


def _write_out(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        p = Path(path)
        if p.parent != Path(""):
            p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)


def _load_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text())


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def _cmd_gen(args) -> int:
    c = args.construction
    if c == "cycle":
        _require(args.n is not None, "cycle needs --n")
        inst = cycle_instance(args.n)
    elif c == "k4":
        _require(args.n is not None, "k4 needs --n (odd)")
        inst = k4_union_instance(args.n)
    elif c == "ach":
        _require(args.r is not None and args.n is not None, "ach needs --r and --n")
        inst = ach_instance(args.r, args.n)
    elif c == "random":
        _require(args.r is not None and args.n is not None, "random needs --r and --n")
        inst = random_instance(args.r, args.n, args.size if args.size is not None else args.n, args.seed)
    elif c == "dummy":
        _require(len(args.inputs) == 1, "dummy needs exactly one --in")
        _require(args.m is not None, "dummy needs --m")
        inst = dummy_lift(_load_instance(args.inputs[0]), args.m)
    elif c == "blowup":
        _require(len(args.inputs) >= 1, "blowup needs at least one --in")
        _require(len(args.blocked) == len(args.inputs),
                 "blowup needs one --blocked per --in, in the same order")
        parts = [
            certify_blocking_family(_load_instance(path), t)
            for path, t in zip(args.inputs, args.blocked)
        ]
        inst = blowup_compose(parts)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown construction {c!r}")
    _write_out(args.out, serialize_instance(inst))
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst = _load_instance(args.input)
    doc = run_solver(
        inst,
        args.solver,
        seed=args.seed,
        node_budget=args.node_budget,
        retries=args.retries,
        instance_ref=args.input,
    )
    _write_out(args.out, serialize_report(doc))
    # files and the API are 0-based; human-facing summaries number colours 1..n
    colours = ",".join(str(c + 1) for c, _ in doc.assignment.assignment)
    print(
        f"{args.solver}: size {doc.size} ({doc.certificate}), colours {{{colours}}}",
        file=sys.stderr,
    )
    if args.solver == "exact" and doc.certificate == CERT_HEURISTIC:
        print("node budget exhausted; result is heuristic", file=sys.stderr)
        return EXIT_BUDGET
    if doc.certificate == "failure":
        print(f"sample-and-extend failed at stage {doc.failure['stage']}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


_BOUND_COLUMNS = (
    "lower_bound_g_prime",
    "upper_bound_g",
    "bounds_h_lower",
    "bounds_h_upper",
    "weak_asymptotic_bound",
    "ach_bound",
)


def _bound_row(r: int, n: int) -> dict[str, object]:
    lower_h, upper_h = bounds_mod.bounds_h(r, n)
    values = {
        "lower_bound_g_prime": bounds_mod.lower_bound_g_prime(r, n),
        "upper_bound_g": bounds_mod.upper_bound_g(r, n),
        "bounds_h_lower": lower_h,
        "bounds_h_upper": upper_h,
        "weak_asymptotic_bound": bounds_mod.weak_asymptotic_bound(r, n),
        "ach_bound": bounds_mod.ach_bound(r, n),
    }
    row: dict[str, object] = {"r": r, "n": n}
    for name, bv in values.items():
        row[name] = str(bv.value) + ("" if bv.domain_ok else " [!]")
        row[name + "_domain"] = "ok" if bv.domain_ok else bv.domain_reason
    return row


def _cmd_bounds(args) -> int:
    rows = [_bound_row(r, n) for r in _parse_span(args.r) for n in _parse_span(args.n)]
    if args.format == "csv":
        buf = io.StringIO()
        columns = ["r", "n"]
        for name in _BOUND_COLUMNS:
            columns += [name, name + "_domain"]
        writer = csv.DictWriter(buf, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
        _write_out(args.out, buf.getvalue())
    else:
        columns = ["r", "n", *_BOUND_COLUMNS]
        table = [[str(row[c]) for c in columns] for row in rows]
        widths = [max(len(c), *(len(line[i]) for line in table)) for i, c in enumerate(columns)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
        for line in table:
            lines.append("  ".join(v.ljust(w) for v, w in zip(line, widths)))
        lines.append("[!] marks values outside their validity domain")
        _write_out(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_verify(args) -> int:
    inst = _load_instance(args.input)
    doc = parse_report(Path(args.report).read_text())
    failures: list[str] = []
    checks: list[str] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        if ok:
            checks.append(f"ok: {name}")
        else:
            failures.append(f"FAIL: {name}" + (f" ({detail})" if detail else ""))

    report_violations = validate_instance(inst)
    check("instance valid", not report_violations, "; ".join(map(str, report_violations)))

    rm = doc.assignment
    try:
        valid = is_rainbow_matching(inst, rm)
    except ValueError as exc:
        valid = False
        check("assignment is a rainbow matching", False, str(exc))
    else:
        check("assignment is a rainbow matching", valid)
    check("recorded size matches assignment", doc.size == rm.size,
          f"recorded {doc.size}, assignment has {rm.size}")

    if valid and doc.certificate == CERT_EXACT:
        re_solved = exact_max_rainbow(inst, node_budget=args.node_budget)
        if re_solved.certificate != CERT_EXACT:
            check("exact certificate reproducible", False, "re-solve budget exhausted")
        else:
            check("exact certificate reproducible", re_solved.size == doc.size,
                  f"re-solved maximum {re_solved.size} != recorded {doc.size}")
    if valid and doc.certificate == CERT_LOCAL:
        ext = find_extension(inst, rm)
        check("no extension move", ext is None, f"colour {ext[0]} edge {ext[1]}" if ext else "")
        swp = None
        if ext is None:
            swp = find_swap(inst, rm)
            check("no swap move", swp is None, str(swp) if swp else "")
        if ext is None and swp is None:
            gib = bounds_mod.check_gibounds(inst.r, inst.n, inst.min_matching_size(), rm.size)
            check("good-edge counting inequality", gib.holds, f"lhs {gib.lhs} > rhs {gib.rhs}")
            table = good_edges(inst, rm)
            cap = comb(2 * inst.r, inst.r)
            for _, e in sorted(rm.assignment):
                ell = sum(1 for colour in table.good if e in table.good[colour])
                if ell == 0:
                    continue
                check(f"edge {e} good for at most C(2r,r)/2 colours", 2 * ell <= cap,
                      f"{ell} > {cap // 2}")
                system = extract_setpairs(inst, rm, e)
                ok, witness = is_cross_intersecting(system)
                check(f"edge {e} set-pair system cross-intersecting", ok,
                      f"violation at pair {witness}" if witness else "")
                total = bollobas_sum(system)
                check(f"edge {e} set-pair sum <= 1", total <= 1, f"sum {total}")

    for line in checks:
        print(line)
    for line in failures:
        print(line)
    return EXIT_VERIFY if failures else EXIT_OK


def _cmd_sweep(args) -> int:
    constructions = [c.strip() for c in args.construction.split(",") if c.strip()]
    for c in constructions:
        _require(c in SWEEP_CONSTRUCTIONS, f"sweep cannot generate {c!r}")
    solvers = [s.strip() for s in args.solver.split(",") if s.strip()]
    for s in solvers:
        _require(s in SOLVERS, f"unknown solver {s!r}")
    cells = []
    for construction in constructions:
        for r in _parse_span(args.r):
            for n in _parse_span(args.n):
                for solver in solvers:
                    spec = CellSpec(
                        construction=construction,
                        r=r,
                        n=n,
                        solver=solver,
                        seed=args.seed,
                        size=args.size,
                        node_budget=args.node_budget,
                        retries=args.retries,
                    )
                    if cell_is_valid(spec):
                        cells.append(spec)
    _require(bool(cells), "no valid grid cells for the given ranges")
    sweep_dir, records = run_sweep(cells, args.out, jobs=args.jobs)
    print(f"{len(records)} cells -> {sweep_dir}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, InstanceValidationError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:  # console-script hook
    sys.exit(main())


if __name__ == "__main__":
    entry()

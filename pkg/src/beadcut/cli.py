"""Command-line front end.

Exit status is 0 on success, 1 when the input or a precondition is at fault
and 2 when a solver hits an internal invariant violation (a state dump is
then written to stderr as JSON).
"""

import argparse
import json
import logging
import sys

from .errors import InternalInvariantError, PreconditionError
from .grid import (
    LatticeCutSet,
    divide_by_columns,
    grid_envy_report,
    project_columns,
    solve_grid,
    verify_lattice_cuts,
)
from .instances import (
    DivisionResult,
    GeneratorConfig,
    Instance,
    PREFERENCE_CLASSES,
    dumps,
    generate,
    instance_to_dict,
    load_json,
    parse_instance,
)
from .model import Allocation, as_fraction, envy_report
from .oracle import default_budget, oracle1d, oracle2d
from .render import render_result, value_table
from .rounding import divide_binary, divide_general

logger = logging.getLogger("beadcut")


def _read(path):
    if path in (None, "-"):
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _eps(args):
    if args.eps is None:
        if args.solver == "sperner":
            raise PreconditionError("--solver sperner requires --eps")
        return None
    if args.solver != "sperner":
        raise PreconditionError("--eps only applies with --solver sperner")
    try:
        eps = as_fraction(args.eps)
    except (ValueError, ZeroDivisionError):
        raise PreconditionError(f"--eps {args.eps!r} is not a rational number")
    if eps <= 0:
        raise PreconditionError("--eps must be positive")
    return eps


def _instance(args, kind):
    instance = parse_instance(_read(args.input))
    if instance.kind != kind:
        raise PreconditionError(f"{args.command} needs a {kind} instance, got {instance.kind}")
    return instance


def _trace_dict(trace):
    return {
        "continuousCuts": [str(x) for x in trace.continuous_cuts],
        "perCutShift": [str(x) for x in trace.per_cut_shift],
        "envyBefore": str(trace.envy_before),
        "envyAfter": str(trace.envy_after),
    }


def _emit(args, result):
    _write(args.output, dumps(result.to_dict()))
    if getattr(args, "figure", None):
        _write(args.figure, render_result(result))
    if getattr(args, "table", None):
        _write(args.table, value_table(result))


def cmd_divide_1d(args):
    instance = _instance(args, "necklace")
    alloc, trace = divide_general(instance.problem, backend=args.solver, eps=_eps(args))
    report = envy_report(instance.problem, alloc)
    extra = {"solver": args.solver, "rounding": _trace_dict(trace)}
    _emit(args, DivisionResult.from_report(instance, alloc.cuts, report, extra))


def cmd_divide_binary(args):
    instance = _instance(args, "necklace")
    alloc = divide_binary(instance.problem)
    report = envy_report(instance.problem, alloc)
    _emit(args, DivisionResult.from_report(instance, alloc.cuts, report, {"solver": "exact"}))


def cmd_divide_2d(args):
    instance = _instance(args, "grid")
    grid = instance.problem
    eps = _eps(args)
    if args.cuts == "vertical":
        alloc, trace = divide_by_columns(grid, backend=args.solver, eps=eps)
        cuts = LatticeCutSet.vertical(alloc.cuts, grid.rows, grid.cols)
        report = grid_envy_report(grid, cuts.cuts, alloc.assignment)
        extra = {"solver": args.solver, "cutStyle": "vertical",
                 "columnBound": str(project_columns(grid).max_bead_value),
                 "rounding": _trace_dict(trace)}
    else:
        if args.solver != "exact":
            raise PreconditionError("lattice cuts are built from the exact backend only")
        try:
            solution = solve_grid(grid)
        except InternalInvariantError as exc:
            if exc.state is not None:
                exc.state = {"instance": instance_to_dict(instance), **exc.state}
            raise
        cuts, report = solution.cuts, solution.report
        extra = {
            "solver": "exact",
            "cutStyle": "lattice",
            "continuousCuts": [str(x) for x in solution.continuous_cuts],
            "slidingEvents": [
                {"kind": e.kind, "owner": instance.players[e.owner],
                 "squares": [list(sq) for sq in e.squares],
                 "fractionalEdges": [e.count_before, e.count_after]}
                for e in solution.events
            ],
        }
    _emit(args, DivisionResult.from_report(instance, cuts, report, extra))


def cmd_project_2d(args):
    instance = _instance(args, "grid")
    necklace = project_columns(instance.problem)
    _write(args.output, dumps(instance_to_dict(Instance(instance.players, necklace))))


def cmd_oracle(args):
    instance = parse_instance(_read(args.input))
    budget = args.budget if args.budget is not None else default_budget()
    if instance.kind == "necklace":
        res = oracle1d(instance.problem, budget=budget)
        cuts = res.best_allocation.cuts
    else:
        res = oracle2d(instance.problem, budget=budget)
        cuts = res.best_allocation
    best = DivisionResult.from_report(instance, cuts, res.report).to_dict()
    best.pop("instance")
    doc = {
        "kind": "oracle-result",
        "envyFreeExists": res.envy_free_exists,
        "minMaxEnvy": str(res.min_max_envy),
        "searchSpaceSize": res.search_space_size,
        "best": best,
    }
    _write(args.output, dumps(doc))


def verify_document(doc):
    """Re-check a result document; returns the verify-result dict."""
    result = DivisionResult.from_dict(doc)
    problem = result.instance.problem
    out = {"kind": "verify-result", "diagnostics": []}
    if result.instance.kind == "grid":
        check = verify_lattice_cuts(problem, result.cuts)
        out.update(valid=check.valid, nonIntersecting=check.valid,
                   barelyConnected=check.barely_connected,
                   stronglyConnected=check.strongly_connected,
                   weaklyConnected=check.weakly_connected)
        out["diagnostics"] = list(check.diagnostics)
        if check.valid and result.assignment is not None:
            report = grid_envy_report(problem, result.cuts.cuts, result.assignment)
        else:
            report = None
    else:
        try:
            alloc = Allocation(result.cuts, result.assignment or tuple(range(len(result.cuts) + 1)))
            report = envy_report(problem, alloc)
            out["valid"] = True
        except PreconditionError as exc:
            out["valid"] = False
            out["diagnostics"].append(str(exc))
            report = None
        if result.assignment is None:
            report = None
    if report is not None:
        out["maxEnvy"] = str(report.max_envy)
        if result.max_envy is not None:
            same = report.max_envy == result.max_envy and report.value_matrix == result.value_matrix
            out["matchesRecorded"] = same
            if not same:
                out["valid"] = False
                out["diagnostics"].append(
                    f"recorded max envy {result.max_envy} but recomputed {report.max_envy}"
                )
    return out


def cmd_verify(args):
    out = verify_document(load_json(_read(args.input)))
    _write(args.output, dumps(out))
    return 0 if out["valid"] else 1


def cmd_generate(args):
    config = GeneratorConfig(seed=args.seed, preference_class=args.preference_class,
                             n=args.n, k=args.k, l=args.l, s=as_fraction(args.s))
    _write(args.output, dumps(instance_to_dict(generate(config))))


def cmd_render(args):
    result = DivisionResult.from_dict(load_json(_read(args.input)))
    if result.assignment is None and result.instance.kind == "necklace":
        raise PreconditionError("rendering a necklace division needs an assignment")
    _write(args.output, render_result(result))
    if args.table:
        if result.value_matrix is None:
            raise PreconditionError("--table needs a document with a value matrix")
        _write(args.table, value_table(result))


def build_parser():
    parser = argparse.ArgumentParser(prog="beadcut", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_args(p, output_help="result document (default: stdout)"):
        p.add_argument("--input", "-i", default="-", help="input document (default: stdin)")
        p.add_argument("--output", "-o", default="-", help=output_help)

    def solver_args(p):
        p.add_argument("--solver", choices=("exact", "sperner"), default="exact")
        p.add_argument("--eps", help="envy tolerance for the sperner solver, e.g. 1/16")

    def report_args(p):
        p.add_argument("--figure", help="also write an SVG drawing of the division")
        p.add_argument("--table", help="also write the value matrix as TSV")

    p = sub.add_parser("divide-1d", help="rounded envy-free division of a necklace")
    io_args(p)
    solver_args(p)
    report_args(p)
    p.set_defaults(func=cmd_divide_1d)

    p = sub.add_parser("divide-binary", help="1-envy-free division for 0/1 valuations")
    io_args(p)
    report_args(p)
    p.set_defaults(func=cmd_divide_binary)

    p = sub.add_parser("divide-2d", help="envy-free division of a monolithic grid")
    io_args(p)
    solver_args(p)
    report_args(p)
    p.add_argument("--cuts", choices=("lattice", "vertical"), default="lattice",
                   help="lattice: non-crossing staircase cuts; vertical: column projection")
    p.set_defaults(func=cmd_divide_2d)

    p = sub.add_parser("project-2d", help="project a grid onto its column necklace")
    io_args(p, "necklace instance (default: stdout)")
    p.set_defaults(func=cmd_project_2d)

    p = sub.add_parser("oracle", help="exhaustive minimum-envy search")
    io_args(p)
    p.add_argument("--budget", type=int, help="maximum allocations to enumerate "
                   "(default: $BEADCUT_BUDGET or 10^7)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="re-check a result document")
    io_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="seeded random instance")
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--class", dest="preference_class", choices=PREFERENCE_CLASSES,
                   default="general")
    p.add_argument("--n", type=int, required=True, help="players")
    p.add_argument("--k", type=int, required=True, help="beads, or grid rows")
    p.add_argument("--l", type=int, help="grid columns (omit for a necklace)")
    p.add_argument("--s", default="1", help="value bound")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="draw a result document as SVG")
    io_args(p, "SVG file (default: stdout)")
    p.add_argument("--table", help="also write the value matrix as TSV")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        status = args.func(args)
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        if exc.state is not None:
            print(json.dumps({"slidingState": exc.state}, indent=2), file=sys.stderr)
        return 2
    except (PreconditionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return status or 0


if __name__ == "__main__":
    sys.exit(main())

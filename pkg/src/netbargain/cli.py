"""Command-line interface.

Commands:
  solve   compute balanced splits for an instance (or certify none exist)
  check   validate a solution document and report stability/balance
  reduce  emit the unit-capacity expansion of an instance plus its labeling
  coop    cooperative-game analyses: core, prekernel, powers, gadgets
  repro   run a pinned reference case end to end

Exit codes: 0 success / balanced found; 1 failed certification or internal
check; 2 no balanced solution exists (certified); 3 inconclusive; 4 input
error; 5 size-guard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import casebook
from .balancing import (
    STATUS_FOUND,
    STATUS_INCONCLUSIVE,
    STATUS_NONE,
    SolverConfig,
    solve_balanced_unit,
)
from .coop import (
    check_correspondence,
    coalition_table,
    detect_bad_vertices,
    in_core,
    in_prekernel,
    power_matrix,
)
from .matching import max_weight_c_matching
from .model import (
    ParseError,
    SizeGuardError,
    ValidationError,
    allocation_of,
    dump_allocation,
    dump_instance,
    dump_solution,
    load_allocation,
    load_instance,
    load_solution,
)
from .reduction import build_auxiliary, to_splits
from .semantics import is_balanced

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_NONE_EXISTS = 2
EXIT_INCONCLUSIVE = 3
EXIT_INPUT = 4
EXIT_GUARD = 5

TOLERANCE_ENV = "NETBARGAIN_TOL"


def _write_output(path: str | None, text: str) -> None:
    """Write atomically when a path is given, otherwise print."""
    if path is None:
        print(text)
        return
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_text(text + ("\n" if not text.endswith("\n") else ""))
    os.replace(tmp, target)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    tolerance = args.tol
    if tolerance is None:
        tolerance = float(os.environ.get(TOLERANCE_ENV, "1e-9"))
    return SolverConfig(
        mode=args.mode,
        tolerance=tolerance,
        max_iterations=args.max_iters,
        damping=args.damping,
    )


def cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance(_read(args.instance))
    config = _solver_config(args)
    matching, weight = max_weight_c_matching(instance)
    bundle = build_auxiliary(instance, matching)
    if bundle.aux_matching.weight(bundle.aux_instance) != weight:
        print("internal check failed: expansion does not preserve the matching weight")
        return EXIT_FAILED
    outcome = solve_balanced_unit(bundle.aux_instance, bundle.aux_matching, config)

    if outcome.status == STATUS_NONE:
        certificate = {
            "status": STATUS_NONE,
            "matching": [list(e) for e in matching.sorted_edges],
            "matching_weight": str(weight),
            "certificate": outcome.certificate.to_document(),
            "detail": outcome.detail,
        }
        _write_output(args.output, json.dumps(certificate, indent=2))
        print("no balanced solution exists (relaxation gap certified)", file=sys.stderr)
        return EXIT_NONE_EXISTS
    if outcome.status == STATUS_INCONCLUSIVE:
        print(f"solver inconclusive: {outcome.detail}", file=sys.stderr)
        return EXIT_INCONCLUSIVE

    solution = to_splits(bundle, outcome.allocation)
    report = is_balanced(instance, solution)
    if not report.balanced:
        print("internal check failed: produced splits are not balanced", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    _write_output(args.output, dump_solution(solution))
    summary = f"balanced solution on {len(matching.edges)} matched edges, weight {weight}"
    print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    instance = load_instance(_read(args.instance))
    solution = load_solution(_read(args.solution), instance)
    report = is_balanced(instance, solution)
    if args.format == "json":
        _write_output(args.output, json.dumps(report.to_document(), indent=2))
    else:
        lines = [f"stable: {report.stable}", f"balanced: {report.balanced}"]
        for row in report.edges:
            lines.append(
                f"  edge {row.u}-{row.v}: z[{row.u},{row.v}]={row.z_uv}"
                f" alpha[{row.u}]={row.alpha_u}"
                f" z[{row.v},{row.u}]={row.z_vu} alpha[{row.v}]={row.alpha_v}"
                f" asymmetry={row.surplus_asymmetry}"
            )
        for violation in report.stability_violations:
            lines.append(f"  stability violation: {violation}")
        for violation in report.balance_violations:
            lines.append(f"  balance violation: {violation}")
        _write_output(args.output, "\n".join(lines))
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    instance = load_instance(_read(args.instance))
    matching, _ = max_weight_c_matching(instance)
    bundle = build_auxiliary(instance, matching)
    _write_output(args.output, dump_instance(bundle.aux_instance))
    sidecar = {
        "original_matching": [list(e) for e in matching.sorted_edges],
        "expansion_matching": [list(e) for e in bundle.aux_matching.sorted_edges],
        "sigma": {u: list(vs) for u, vs in sorted(bundle.sigma.items()) if vs},
        "copy_map": {
            u: {str(i): bundle.copy_id(u, i) for i in range(1, instance.capacity[u] + 1)}
            for u in instance.vertex_ids
        },
    }
    _write_output(args.sidecar, json.dumps(sidecar, indent=2))
    return EXIT_OK


def cmd_coop(args: argparse.Namespace) -> int:
    instance = load_instance(_read(args.instance))
    table = coalition_table(instance)
    out: dict = {}
    if args.table:
        out["coalition_values"] = {
            ",".join(table.members(mask)): str(table.values[mask])
            for mask in range(1, len(table.values))
        }

    solution = None
    if args.solution:
        solution = load_solution(_read(args.solution), instance)
    allocation = None
    if args.allocation:
        allocation = load_allocation(_read(args.allocation))
    elif solution is not None:
        allocation = allocation_of(solution)

    if allocation is not None:
        core = in_core(instance, allocation, table)
        prekernel = in_prekernel(instance, allocation, table)
        out["core"] = {"member": core.in_core, "violation": core.violation}
        out["prekernel"] = {
            "member": prekernel.in_prekernel,
            "violation": prekernel.details,
        }
        out["powers"] = [
            {
                "u": e.u,
                "v": e.v,
                "value": str(e.value),
                "witness": list(e.witness),
            }
            for e in power_matrix(instance, allocation, table).entries
        ]
    if solution is not None:
        gadgets = detect_bad_vertices(instance, solution)
        out["gadgets"] = {
            "bad_vertices": list(gadgets.bad_vertices),
            "tie_warnings": list(gadgets.tie_warnings),
            "findings": [
                {
                    "vertex": f.vertex,
                    "matched_neighbor": f.matched_neighbor,
                    "best_outside": f.best_outside,
                    "weakest_partner": f.weakest_partner,
                    "type1": f.type1,
                    "type1_path": list(f.type1_path) if f.type1_path else None,
                    "type2": f.type2,
                    "type2_path": list(f.type2_path) if f.type2_path else None,
                }
                for f in gadgets.findings
            ],
        }
    if solution is not None and allocation is not None:
        try:
            report = check_correspondence(instance, allocation, solution, table)
            out["correspondence"] = {
                "verdict": report.verdict,
                "conditions_met": report.conditions_met,
                "acyclic": report.acyclic,
                "bad_vertices": list(report.bad_vertices),
                "balanced": report.balanced,
                "in_prekernel": report.in_prekernel,
                "equivalence_holds": report.equivalence_holds,
                "power_bound_ok": report.power_bound_ok,
            }
        except ValidationError as exc:
            out["correspondence"] = {"verdict": f"preconditions not met: {exc}"}

    if args.format == "json":
        _write_output(args.output, json.dumps(out, indent=2))
    else:
        lines = []
        for key, value in out.items():
            lines.append(f"{key}: {json.dumps(value, indent=2)}")
        _write_output(args.output, "\n".join(lines) if lines else "nothing to report")
    return EXIT_OK


def cmd_repro(args: argparse.Namespace) -> int:
    if args.case == "lemma1":
        transcript = casebook.certify_gap_case()
    else:
        transcript = casebook.certify_expansion_case()
    _write_output(args.output, transcript.render())
    if args.output is not None:
        print(transcript.render())
    return EXIT_OK if transcript.ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netbargain",
        description="Exact toolkit for network bargaining games with vertex capacities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="compute balanced splits, or certify none exist")
    solve.add_argument("instance", help="instance document (JSON)")
    solve.add_argument("-o", "--output", default=None, help="solution/certificate path")
    solve.add_argument(
        "--mode",
        choices=["numeric-then-exact", "exact-enumeration"],
        default="numeric-then-exact",
    )
    solve.add_argument("--tol", type=float, default=None, help=f"numeric residual bound (default 1e-9, or ${TOLERANCE_ENV})")
    solve.add_argument("--max-iters", type=int, default=100_000)
    solve.add_argument("--damping", type=float, default=0.5)
    solve.set_defaults(fn=cmd_solve)

    check = sub.add_parser("check", help="report stability and balance of a solution")
    check.add_argument("instance")
    check.add_argument("solution")
    check.add_argument("-o", "--output", default=None)
    check.add_argument("--format", choices=["text", "json"], default="text")
    check.set_defaults(fn=cmd_check)

    reduce_ = sub.add_parser("reduce", help="emit the unit-capacity expansion")
    reduce_.add_argument("instance")
    reduce_.add_argument("-o", "--output", default=None, help="expansion instance path")
    reduce_.add_argument("--sidecar", default=None, help="labeling/copy-map path")
    reduce_.set_defaults(fn=cmd_reduce)

    coop = sub.add_parser("coop", help="cooperative matching-game analyses")
    coop.add_argument("instance")
    coop.add_argument("--allocation", default=None, help="allocation document")
    coop.add_argument("--solution", default=None, help="solution document")
    coop.add_argument("--table", action="store_true", help="include the coalition-value table")
    coop.add_argument("-o", "--output", default=None)
    coop.add_argument("--format", choices=["text", "json"], default="text")
    coop.set_defaults(fn=cmd_coop)

    repro = sub.add_parser("repro", help="run a pinned reference case")
    repro.add_argument("case", choices=["lemma1", "example1"])
    repro.add_argument("-o", "--output", default=None)
    repro.set_defaults(fn=cmd_repro)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ValidationError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    raise SystemExit(main())

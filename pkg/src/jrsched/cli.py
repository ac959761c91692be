"""Command-line front-end.

Machine-readable JSON goes to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 infeasible input or failed validation, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from typing import Callable

from . import bounds
from .adversaries import KINDS, AdversarySpec, adversary_run, default_policy
from .generate import FAMILIES, TIGHT_NAMES, GeneratorSpec, gen_instance
from .model import (
    Instance,
    InstanceError,
    Objective,
    Solution,
    SolutionError,
    SolverError,
    check_feasible,
    emit_instance,
    emit_solution,
    instance_from_document,
    parse_instance,
    replenishment_cost,
    scheduling_cost,
    solution_from_document,
    solution_to_document,
)
from .offline_dp import dp_equalp, dp_fmax_s1, dp_wjcj_unit, fmax_unit_distinct
from .online import (
    ImmediatePolicy,
    MaxFlowGridPolicy,
    OnlinePolicy,
    SumCompletionPolicy,
    SumFlowPolicy,
    delay_releases,
    run_online,
    trace_to_jsonl,
)
from .oracle import OracleLimits, exact_solve, exact_solve_fine_grid

_OBJECTIVE_NAMES = {obj.value: obj for obj in Objective}

_POLICIES: dict[str, Callable[[int], OnlinePolicy]] = {
    "sum-cj": SumCompletionPolicy,
    "sum-fj": SumFlowPolicy,
    "max-flow": MaxFlowGridPolicy,
    "immediate": lambda order_cost: ImmediatePolicy(),
}


class _CliError(Exception):
    """Data-level failure: reported on stderr, exit status 1."""


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}") from None


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")


def _load_instance(path: str) -> Instance:
    try:
        return parse_instance(_read_text(path))
    except InstanceError as exc:
        raise _CliError(str(exc)) from None


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(
        family=args.family,
        seed=args.seed,
        n=args.n,
        num_resources=args.s,
        joint_cost=args.joint_cost,
        item_cost_max=args.item_cost_max,
        max_release=args.max_release,
        max_processing=args.max_processing,
        max_weight=args.max_weight,
        tight_name=args.tight_name,
    )
    try:
        instance = gen_instance(spec)
    except InstanceError as exc:
        raise _CliError(str(exc)) from None
    _write_output(emit_instance(instance), args.output)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = _load_instance(args.input)
    limits = OracleLimits(max_jobs=args.max_jobs, max_grid_subsets=args.max_grid_subsets)
    objective = _OBJECTIVE_NAMES[args.objective] if args.objective else None
    try:
        if args.algo == "oracle":
            if objective is None:
                raise _CliError("--objective is required for the oracle")
            solution = exact_solve(instance, objective, limits)
        elif args.algo == "oracle-fine":
            if objective is None:
                raise _CliError("--objective is required for the oracle")
            solution = exact_solve_fine_grid(instance, objective, limits)
        elif args.algo == "dp-wjcj-unit":
            solution = dp_wjcj_unit(instance)
        elif args.algo == "dp-equalp":
            if objective is None:
                raise _CliError("--objective is required for dp-equalp")
            solution = dp_equalp(instance, objective)
        elif args.algo == "dp-fmax-s1":
            solution = dp_fmax_s1(instance)
        else:
            solution = fmax_unit_distinct(instance)
    except SolverError as exc:
        raise _CliError(str(exc)) from None
    _write_output(emit_solution(solution), args.output)
    return 0


def _cmd_online(args: argparse.Namespace) -> int:
    instance = _load_instance(args.input)
    if args.lead_one:
        instance = delay_releases(instance, 1)
    policy = _POLICIES[args.policy](args.order_cost)
    try:
        solution, trace = run_online(instance, policy, end_signal=not args.no_end_signal)
    except SolverError as exc:
        raise _CliError(str(exc)) from None
    if args.trace:
        _write_output(trace_to_jsonl(trace, solution), args.trace)
    document = {
        "policy": args.policy,
        "K": args.order_cost,
        "solution": solution_to_document(solution),
        "blocks": [
            {"t": b.time, "b": b.size, "y": b.arrived_before, "z": b.arrived_at}
            for b in trace.blocks
        ],
    }
    _write_output(json.dumps(document, indent=2, sort_keys=True), args.output)
    return 0


def _cmd_adversary(args: argparse.Namespace) -> int:
    try:
        spec = AdversarySpec(args.kind, args.order_cost, args.w2)
    except ValueError as exc:
        raise _CliError(str(exc)) from None
    policy = _POLICIES[args.policy](args.order_cost) if args.policy else default_policy(spec)
    outcome = adversary_run(spec, policy)
    document = {
        "kind": args.kind,
        "K": args.order_cost,
        "policy": policy.name,
        "instance": json.loads(emit_instance(outcome.instance)),
        "online": solution_to_document(outcome.online),
        "offline": solution_to_document(outcome.offline),
        "ratio": outcome.ratio,
    }
    _write_output(json.dumps(document, indent=2, sort_keys=True), args.output)
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    if args.curve:
        try:
            point = bounds.ratio_curve(args.curve, args.order_cost, args.w2)
        except SolverError as exc:
            raise _CliError(str(exc)) from None
        document = {
            "kind": args.curve,
            "K": point.order_cost,
            "t": point.t,
            "c1": point.c1,
            "c2": point.c2,
            "bound": point.bound,
            "limit": point.limit,
        }
    else:
        if not args.input:
            raise _CliError("bounds needs --input or --curve")
        instance = _load_instance(args.input)
        try:
            document = {
                "lb_ceiling": bounds.lb_ceiling(instance),
                "lb_sqrt": bounds.lb_sqrt(instance),
            }
        except SolverError as exc:
            raise _CliError(str(exc)) from None
    _write_output(json.dumps(document, indent=2, sort_keys=True), args.output)
    return 0


def _offline_total_for_ratio(instance: Instance, policy_name: str, limits: OracleLimits) -> int:
    if policy_name == "max-flow":
        return bounds.lb_ceiling(instance)
    objective = (
        Objective.TOTAL_COMPLETION if policy_name == "sum-cj" else Objective.TOTAL_FLOW
    )
    return exact_solve(instance, objective, limits).total


def _cmd_ratio(args: argparse.Namespace) -> int:
    lo, _, hi = args.seeds.partition(":")
    try:
        seed_range = range(int(lo), int(hi))
    except ValueError:
        raise _CliError(f"bad --seeds range {args.seeds!r}, expected LO:HI") from None
    if args.policy == "max-flow" and args.family != "regular":
        raise _CliError("ratio sweeps for max-flow support the regular family only")
    limits = OracleLimits(max_jobs=args.max_jobs, max_grid_subsets=args.max_grid_subsets)
    base = GeneratorSpec(
        family=args.family,
        n=args.n,
        num_resources=1,
        joint_cost=args.order_cost,
        item_cost_max=0,
        max_release=args.max_release,
        max_processing=1,
        max_weight=1,
    )
    rows = []
    for seed in seed_range:
        instance = gen_instance(replace(base, seed=seed))
        policy = _POLICIES[args.policy](args.order_cost)
        solution, _ = run_online(instance, policy)
        offline = _offline_total_for_ratio(instance, args.policy, limits)
        rows.append(
            {
                "seed": seed,
                "n": len(instance.jobs),
                "K": args.order_cost,
                "online": solution.total,
                "offline": offline,
                "ratio": solution.total / offline,
            }
        )
    if args.csv:
        buffer = io.StringIO()
        writer = csv.DictWriter(
            buffer,
            fieldnames=["seed", "n", "K", "online", "offline", "ratio"],
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
        _write_output(buffer.getvalue(), args.output)
    else:
        _write_output(json.dumps(rows, indent=2, sort_keys=True), args.output)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        document = json.loads(_read_text(args.input))
    except json.JSONDecodeError as exc:
        raise _CliError(f"malformed document: {exc}") from None
    if not isinstance(document, dict) or "instance" not in document or "solution" not in document:
        raise _CliError('validate expects {"instance": ..., "solution": ...}')
    try:
        instance = instance_from_document(document["instance"])
        solution = solution_from_document(document["solution"])
    except (InstanceError, SolutionError) as exc:
        raise _CliError(str(exc)) from None
    report = check_feasible(instance, solution)
    problems = [
        {"kind": v.kind, "jobs": list(v.jobs), "detail": v.detail} for v in report.violations
    ]
    recomputed_sched = None
    if not any(v.kind == "unscheduled" for v in report.violations):
        recomputed_sched = scheduling_cost(instance, solution.schedule, solution.objective)
        if recomputed_sched != solution.scheduling_cost:
            problems.append(
                {
                    "kind": "cost-mismatch",
                    "jobs": [],
                    "detail": f"declared scheduling cost {solution.scheduling_cost},"
                    f" recomputed {recomputed_sched}",
                }
            )
    recomputed_repl = replenishment_cost(instance, solution.replenishments)
    if recomputed_repl != solution.replenishment_cost:
        problems.append(
            {
                "kind": "cost-mismatch",
                "jobs": [],
                "detail": f"declared replenishment cost {solution.replenishment_cost},"
                f" recomputed {recomputed_repl}",
            }
        )
    _write_output(
        json.dumps({"feasible": not problems, "violations": problems}, indent=2, sort_keys=True),
        args.output,
    )
    return 0 if not problems else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jrsched",
        description="Solvers for single-machine scheduling with jointly replenished resources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p: argparse.ArgumentParser) -> None:
        p.add_argument("-o", "--output", default=None, help="output path (default stdout)")

    p = sub.add_parser("gen", help="generate an instance document")
    p.add_argument("--family", choices=FAMILIES, default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--joint-cost", type=int, default=1)
    p.add_argument("--item-cost-max", type=int, default=2)
    p.add_argument("--max-release", type=int, default=10)
    p.add_argument("--max-processing", type=int, default=3)
    p.add_argument("--max-weight", type=int, default=1)
    p.add_argument("--tight-name", choices=TIGHT_NAMES, default="single-job")
    add_output(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="solve an instance offline")
    p.add_argument(
        "--algo",
        required=True,
        choices=["oracle", "oracle-fine", "dp-wjcj-unit", "dp-equalp", "dp-fmax-s1", "fmax-unit-distinct"],
    )
    p.add_argument("--objective", choices=sorted(_OBJECTIVE_NAMES), default=None)
    p.add_argument("--input", required=True, help="instance document path, - for stdin")
    p.add_argument("--max-jobs", type=int, default=8)
    p.add_argument("--max-grid-subsets", type=int, default=2**20)
    add_output(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("online", help="simulate an online policy")
    p.add_argument("--policy", required=True, choices=sorted(_POLICIES))
    p.add_argument("--K", dest="order_cost", type=int, required=True, help="order cost")
    p.add_argument("--input", required=True)
    p.add_argument("--lead-one", action="store_true", help="shift releases by one (ordering lead time)")
    p.add_argument("--no-end-signal", action="store_true", help="hide the end-of-stream signal")
    p.add_argument("--trace", default=None, help="write the decision trace here (JSON lines)")
    add_output(p)
    p.set_defaults(func=_cmd_online)

    p = sub.add_parser("adversary", help="play a lower-bound adversary against a policy")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--K", dest="order_cost", type=int, required=True)
    p.add_argument("--w2", type=int, default=None)
    p.add_argument("--policy", choices=sorted(_POLICIES), default=None)
    add_output(p)
    p.set_defaults(func=_cmd_adversary)

    p = sub.add_parser("bounds", help="instance lower bounds or ratio curves")
    p.add_argument("--input", default=None)
    p.add_argument("--curve", choices=KINDS[:3] + KINDS[4:], default=None)
    p.add_argument("--K", dest="order_cost", type=int, default=1)
    p.add_argument("--w2", type=float, default=None)
    add_output(p)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("ratio", help="online/offline ratio sweep over seeded instances")
    p.add_argument("--policy", required=True, choices=["sum-cj", "sum-fj", "max-flow"])
    p.add_argument("--K", dest="order_cost", type=int, required=True)
    p.add_argument("--family", choices=FAMILIES, default="random")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--seeds", default="0:20", help="seed range LO:HI")
    p.add_argument("--max-release", type=int, default=8)
    p.add_argument("--max-jobs", type=int, default=8)
    p.add_argument("--max-grid-subsets", type=int, default=2**20)
    p.add_argument("--csv", action="store_true")
    add_output(p)
    p.set_defaults(func=_cmd_ratio)

    p = sub.add_parser("validate", help="check a solution document against its instance")
    p.add_argument("--input", required=True, help='combined {"instance":..., "solution":...} document')
    add_output(p)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())

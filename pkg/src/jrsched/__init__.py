"""Solvers for single-machine scheduling with jointly replenished resources.

Offline: an exact enumeration oracle plus four polynomial dynamic programs.
Online: a discrete-time simulator that enforces irrevocable decisions, three
shipped policies, adaptive adversaries, and lower-bound evaluators.
"""

from .adversaries import KINDS, AdversaryOutcome, AdversarySpec, adversary_run
from .bounds import RatioCurvePoint, lb_ceiling, lb_sqrt, ratio_curve
from .generate import GeneratorSpec, gen_instance
from .model import (
    FeasibilityReport,
    Instance,
    InstanceError,
    Job,
    Objective,
    ReplenishmentStructure,
    Schedule,
    Solution,
    SolutionError,
    SolverError,
    Violation,
    check_feasible,
    emit_instance,
    emit_solution,
    evaluate_solution,
    normalize_replenishments,
    parse_instance,
    parse_solution,
    ready_at,
    replenishment_cost,
    scheduling_cost,
)
from .offline_dp import dp_equalp, dp_fmax_s1, dp_wjcj_unit, fmax_unit_distinct
from .online import (
    Decision,
    ImmediatePolicy,
    MaxFlowGridPolicy,
    Observation,
    OnlinePolicy,
    SimulationError,
    SumCompletionPolicy,
    SumFlowPolicy,
    Trace,
    delay_releases,
    run_online,
    triangular,
)
from .oracle import OracleLimitError, OracleLimits, exact_solve, exact_solve_fine_grid

__all__ = [
    "AdversaryOutcome",
    "AdversarySpec",
    "Decision",
    "FeasibilityReport",
    "GeneratorSpec",
    "ImmediatePolicy",
    "Instance",
    "InstanceError",
    "Job",
    "KINDS",
    "MaxFlowGridPolicy",
    "Objective",
    "Observation",
    "OnlinePolicy",
    "OracleLimitError",
    "OracleLimits",
    "RatioCurvePoint",
    "ReplenishmentStructure",
    "Schedule",
    "SimulationError",
    "Solution",
    "SolutionError",
    "SolverError",
    "SumCompletionPolicy",
    "SumFlowPolicy",
    "Trace",
    "Violation",
    "adversary_run",
    "check_feasible",
    "delay_releases",
    "dp_equalp",
    "dp_fmax_s1",
    "dp_wjcj_unit",
    "emit_instance",
    "emit_solution",
    "evaluate_solution",
    "exact_solve",
    "exact_solve_fine_grid",
    "fmax_unit_distinct",
    "gen_instance",
    "lb_ceiling",
    "lb_sqrt",
    "normalize_replenishments",
    "parse_instance",
    "parse_solution",
    "ratio_curve",
    "ready_at",
    "replenishment_cost",
    "run_online",
    "scheduling_cost",
    "triangular",
]

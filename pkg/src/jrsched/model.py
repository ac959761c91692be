"""Problem model for single-machine scheduling with jointly replenished resources.

A job has a release date, a processing time, a weight, and a non-empty set of
required resource types.  It may start at time t only if every required
resource was ordered at some moment between its release date and t.  Each
order (replenishment) of a resource subset costs the joint cost plus one item
cost per resource in the subset, independent of quantity.  A solution pairs a
schedule with a replenishment structure; its cost is the scheduling criterion
plus the total ordering cost.

All quantities are integers and all cost arithmetic is exact.  Every value in
this module is immutable after construction and every operation is a pure
function, so concurrent use on shared inputs is safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Iterable, Mapping


class InstanceError(ValueError):
    """Malformed or inconsistent problem instance."""


class SolutionError(ValueError):
    """Malformed or internally inconsistent solution."""


class SolverError(RuntimeError):
    """A solver was applied outside its supported problem class."""


class Objective(Enum):
    """Scheduling criterion added to the replenishment cost."""

    WEIGHTED_COMPLETION = "total_weighted_completion"
    TOTAL_COMPLETION = "total_completion"
    TOTAL_FLOW = "total_flow"
    WEIGHTED_FLOW = "total_weighted_flow"
    MAX_FLOW = "max_flow"

    @classmethod
    def from_name(cls, name: str) -> "Objective":
        for obj in cls:
            if obj.value == name:
                return obj
        raise SolutionError(f"unknown objective {name!r}")


@dataclass(frozen=True, slots=True)
class Job:
    """One job: identifier, release date, processing time, weight, resources."""

    id: int
    release: int
    processing: int
    resources: frozenset[int]
    weight: int = 1

    def validate(self, num_resources: int) -> None:
        if self.release < 0:
            raise InstanceError(f"job {self.id}: negative release {self.release}")
        if self.processing < 1:
            raise InstanceError(f"job {self.id}: processing must be >= 1, got {self.processing}")
        if self.weight < 1:
            raise InstanceError(f"job {self.id}: weight must be >= 1, got {self.weight}")
        if not self.resources:
            raise InstanceError(f"job {self.id}: empty resource set")
        for r in self.resources:
            if not 1 <= r <= num_resources:
                raise InstanceError(
                    f"job {self.id}: resource index {r} out of range 1..{num_resources}"
                )


@dataclass(frozen=True)
class Instance:
    """A problem instance: resource costs plus the job list.

    ``item_costs[i-1]`` is the per-order cost of resource i; ``joint_cost``
    is paid once per order regardless of the subset ordered.
    """

    num_resources: int
    joint_cost: int
    item_costs: tuple[int, ...]
    jobs: tuple[Job, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "item_costs", tuple(self.item_costs))
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if self.num_resources < 1:
            raise InstanceError(f"num_resources must be >= 1, got {self.num_resources}")
        if self.joint_cost < 0:
            raise InstanceError(f"joint_cost must be >= 0, got {self.joint_cost}")
        if len(self.item_costs) != self.num_resources:
            raise InstanceError(
                f"item_costs has length {len(self.item_costs)}, expected {self.num_resources}"
            )
        for i, cost in enumerate(self.item_costs, start=1):
            if cost < 0:
                raise InstanceError(f"item cost for resource {i} is negative")
        seen: set[int] = set()
        for job in self.jobs:
            if job.id in seen:
                raise InstanceError(f"job {job.id}: duplicate id")
            seen.add(job.id)
            job.validate(self.num_resources)

    @cached_property
    def job_map(self) -> dict[int, Job]:
        return {job.id: job for job in self.jobs}

    def job(self, job_id: int) -> Job:
        try:
            return self.job_map[job_id]
        except KeyError:
            raise InstanceError(f"unknown job id {job_id}") from None

    @cached_property
    def release_grid(self) -> tuple[int, ...]:
        """Sorted distinct release dates."""
        return tuple(sorted({job.release for job in self.jobs}))

    @cached_property
    def total_processing(self) -> int:
        return sum(job.processing for job in self.jobs)

    @cached_property
    def horizon(self) -> int:
        """Last grid point extended by the total processing time."""
        if not self.jobs:
            return 0
        return self.release_grid[-1] + self.total_processing

    @cached_property
    def last_release(self) -> int:
        return self.release_grid[-1] if self.jobs else -1

    def order_cost(self, resources: Iterable[int]) -> int:
        """Cost of one order of the given resource subset."""
        cost = self.joint_cost
        for r in resources:
            if not 1 <= r <= self.num_resources:
                raise InstanceError(f"resource index {r} out of range 1..{self.num_resources}")
            cost += self.item_costs[r - 1]
        return cost

    @property
    def single_resource_order_cost(self) -> int:
        """Joint plus item cost when there is exactly one resource type."""
        if self.num_resources != 1:
            raise SolverError("instance has more than one resource type")
        return self.joint_cost + self.item_costs[0]


@dataclass(frozen=True)
class ReplenishmentStructure:
    """Time-ordered replenishment events, each a (time, resource subset) pair."""

    events: tuple[tuple[int, frozenset[int]], ...] = ()

    def __post_init__(self) -> None:
        normalized = tuple((t, frozenset(rs)) for t, rs in self.events)
        object.__setattr__(self, "events", normalized)
        prev = None
        for t, rs in normalized:
            if t < 0:
                raise SolutionError(f"replenishment at negative time {t}")
            if not rs:
                raise SolutionError(f"replenishment at {t} orders an empty resource set")
            if prev is not None and t <= prev:
                raise SolutionError("replenishment times must be strictly increasing")
            prev = t

    def times(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.events)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class Schedule:
    """Start time per job id.  Overlap checks live in :func:`check_feasible`."""

    starts: dict[int, int]

    def start_of(self, job_id: int) -> int:
        try:
            return self.starts[job_id]
        except KeyError:
            raise SolutionError(f"job {job_id} has no start time") from None


@dataclass(frozen=True)
class Solution:
    """Schedule plus replenishment structure with an exact cost breakdown."""

    schedule: Schedule
    replenishments: ReplenishmentStructure
    objective: Objective
    scheduling_cost: int
    replenishment_cost: int
    total: int

    def __post_init__(self) -> None:
        if self.total != self.scheduling_cost + self.replenishment_cost:
            raise SolutionError(
                f"total {self.total} != scheduling {self.scheduling_cost}"
                f" + replenishment {self.replenishment_cost}"
            )


def ready_at(
    instance: Instance, structure: ReplenishmentStructure, job_id: int, t: int
) -> bool:
    """True iff every resource the job needs was ordered in [release, t]."""
    job = instance.job(job_id)
    if t < job.release:
        return False
    missing = set(job.resources)
    for event_time, resources in structure.events:
        if job.release <= event_time <= t:
            missing -= resources
            if not missing:
                return True
    return not missing


def replenishment_cost(instance: Instance, structure: ReplenishmentStructure) -> int:
    """Total ordering cost of the structure; empty structure costs 0."""
    return sum(instance.order_cost(rs) for _, rs in structure.events)


def scheduling_cost(instance: Instance, schedule: Schedule, objective: Objective) -> int:
    """Exact value of the selected criterion; every job must be scheduled."""
    if not instance.jobs:
        return 0
    total = 0
    max_flow = 0
    for job in instance.jobs:
        completion = schedule.start_of(job.id) + job.processing
        if objective is Objective.WEIGHTED_COMPLETION:
            total += job.weight * completion
        elif objective is Objective.TOTAL_COMPLETION:
            total += completion
        elif objective is Objective.TOTAL_FLOW:
            total += completion - job.release
        elif objective is Objective.WEIGHTED_FLOW:
            total += job.weight * (completion - job.release)
        else:
            flow = completion - job.release
            if flow > max_flow:
                max_flow = flow
    if objective is Objective.MAX_FLOW:
        return max_flow
    return total


def evaluate_solution(
    instance: Instance,
    schedule: Schedule,
    replenishments: ReplenishmentStructure,
    objective: Objective,
) -> Solution:
    """Assemble a Solution with its cost breakdown recomputed from scratch."""
    sched = scheduling_cost(instance, schedule, objective)
    repl = replenishment_cost(instance, replenishments)
    return Solution(schedule, replenishments, objective, sched, repl, sched + repl)


@dataclass(frozen=True)
class Violation:
    kind: str
    jobs: tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_feasible(instance: Instance, solution: Solution) -> FeasibilityReport:
    """List every feasibility violation; an empty list means feasible.

    Checks that each job is scheduled at a non-negative start, that job
    intervals are pairwise disjoint, and that each job is ready at its start
    under the replenishment structure.
    """
    violations: list[Violation] = []
    starts = solution.schedule.starts
    for job_id in starts:
        if job_id not in instance.job_map:
            violations.append(
                Violation("unknown-job", (job_id,), f"job {job_id} is not in the instance")
            )
    intervals: list[tuple[int, int, int]] = []
    for job in instance.jobs:
        if job.id not in starts:
            violations.append(
                Violation("unscheduled", (job.id,), f"job {job.id} has no start time")
            )
            continue
        start = starts[job.id]
        if start < 0:
            violations.append(
                Violation("negative-start", (job.id,), f"job {job.id} starts at {start}")
            )
        intervals.append((start, start + job.processing, job.id))
        if not ready_at(instance, solution.replenishments, job.id, start):
            violations.append(
                Violation(
                    "not-ready",
                    (job.id,),
                    f"job {job.id} starts at {start} before all required resources"
                    f" are ordered in [{job.release}, {start}]",
                )
            )
    intervals.sort()
    for (s1, e1, j1), (s2, e2, j2) in zip(intervals, intervals[1:]):
        if s2 < e1:
            violations.append(
                Violation(
                    "overlap",
                    (j1, j2),
                    f"jobs {j1} and {j2} overlap in [{s2}, {min(e1, e2)})",
                )
            )
    return FeasibilityReport(tuple(violations))


def normalize_replenishments(instance: Instance, solution: Solution) -> Solution:
    """Pull every order back to the latest release date at or before it.

    Orders with no release date at or before them serve no job and are
    dropped; orders landing on the same date are merged.  The input solution
    must be feasible; the result is feasible for the same schedule and never
    costs more.
    """
    report = check_feasible(instance, solution)
    if not report.ok:
        raise SolutionError(
            "cannot normalize an infeasible solution: " + report.violations[0].detail
        )
    grid = instance.release_grid
    merged: dict[int, set[int]] = {}
    for event_time, resources in solution.replenishments.events:
        anchor = None
        for tau in grid:
            if tau <= event_time:
                anchor = tau
            else:
                break
        if anchor is None:
            continue
        merged.setdefault(anchor, set()).update(resources)
    events = tuple((t, frozenset(rs)) for t, rs in sorted(merged.items()))
    return evaluate_solution(
        instance, solution.schedule, ReplenishmentStructure(events), solution.objective
    )


# ---------------------------------------------------------------------------
# Document formats (JSON)

def instance_to_document(instance: Instance) -> dict[str, Any]:
    jobs = []
    for job in instance.jobs:
        entry: dict[str, Any] = {
            "id": job.id,
            "release": job.release,
            "processing": job.processing,
            "resources": sorted(job.resources),
        }
        if job.weight != 1:
            entry["weight"] = job.weight
        jobs.append(entry)
    return {
        "s": instance.num_resources,
        "joint_cost": instance.joint_cost,
        "item_costs": list(instance.item_costs),
        "jobs": jobs,
    }


def emit_instance(instance: Instance) -> str:
    return json.dumps(instance_to_document(instance), indent=2, sort_keys=True)


def _require(document: Mapping[str, Any], key: str, context: str) -> Any:
    if key not in document:
        raise InstanceError(f"{context}: missing field {key!r}")
    return document[key]


def instance_from_document(document: Mapping[str, Any]) -> Instance:
    if not isinstance(document, Mapping):
        raise InstanceError("instance document must be a JSON object")
    s = _require(document, "s", "instance")
    joint = _require(document, "joint_cost", "instance")
    item_costs = _require(document, "item_costs", "instance")
    raw_jobs = _require(document, "jobs", "instance")
    jobs = []
    for raw in raw_jobs:
        job_id = _require(raw, "id", "job")
        jobs.append(
            Job(
                id=int(job_id),
                release=int(_require(raw, "release", f"job {job_id}")),
                processing=int(_require(raw, "processing", f"job {job_id}")),
                resources=frozenset(int(r) for r in _require(raw, "resources", f"job {job_id}")),
                weight=int(raw.get("weight", 1)),
            )
        )
    return Instance(
        num_resources=int(s),
        joint_cost=int(joint),
        item_costs=tuple(int(c) for c in item_costs),
        jobs=tuple(jobs),
    )


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document; errors name the job and field."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance document: {exc}") from None
    return instance_from_document(document)


def solution_to_document(solution: Solution) -> dict[str, Any]:
    return {
        "objective": solution.objective.value,
        "starts": {str(job_id): start for job_id, start in sorted(solution.schedule.starts.items())},
        "replenishments": [
            {"time": t, "resources": sorted(rs)} for t, rs in solution.replenishments.events
        ],
        "scheduling_cost": solution.scheduling_cost,
        "replenishment_cost": solution.replenishment_cost,
        "total": solution.total,
    }


def emit_solution(solution: Solution) -> str:
    return json.dumps(solution_to_document(solution), indent=2, sort_keys=True)


def solution_from_document(document: Mapping[str, Any]) -> Solution:
    if not isinstance(document, Mapping):
        raise SolutionError("solution document must be a JSON object")
    try:
        objective = Objective.from_name(str(_require(document, "objective", "solution")))
        starts = {
            int(job_id): int(start)
            for job_id, start in _require(document, "starts", "solution").items()
        }
        events = tuple(
            (int(entry["time"]), frozenset(int(r) for r in entry["resources"]))
            for entry in _require(document, "replenishments", "solution")
        )
        sched = int(_require(document, "scheduling_cost", "solution"))
        repl = int(_require(document, "replenishment_cost", "solution"))
        total = int(_require(document, "total", "solution"))
    except InstanceError as exc:
        raise SolutionError(str(exc)) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise SolutionError(f"malformed solution document: {exc}") from None
    return Solution(
        Schedule(starts), ReplenishmentStructure(events), objective, sched, repl, total
    )


def parse_solution(text: str) -> Solution:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SolutionError(f"malformed solution document: {exc}") from None
    return solution_from_document(document)

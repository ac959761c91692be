"""Discrete-time online simulator with irrevocable decisions, plus policies.

The clock advances over integer times.  Whenever the machine is idle the
policy receives an observation (newly arrived jobs, the pending backlog, and
an end-of-stream flag) and answers with a decision: optionally order a
resource subset now, and start an ordered list of jobs back to back from
now.  Started jobs and placed orders are permanent.  While a block of jobs
runs, the clock jumps to its completion and arrivals accumulate silently.

Shipped policies (single resource, unit jobs):

- :class:`SumCompletionPolicy` -- orders once the backlog's completion cost
  from now on reaches the order cost.
- :class:`SumFlowPolicy` -- same with accumulated waiting plus backlog cost.
- :class:`MaxFlowGridPolicy` -- orders on a precomputed quadratic time grid;
  on one-job-per-step inputs it also flushes the backlog when the stream
  ends.
- :class:`ImmediatePolicy` -- orders and starts every arrival at once.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import (
    Instance,
    Job,
    Objective,
    ReplenishmentStructure,
    Schedule,
    Solution,
    SolverError,
    evaluate_solution,
)


class SimulationError(RuntimeError):
    """An illegal decision or a stalled policy aborted the simulation."""


def triangular(a: int) -> int:
    """Cost of a unit jobs started back to back, measured from their start epoch."""
    return a * (a + 1) // 2


@dataclass(frozen=True, slots=True)
class Observation:
    """What a policy sees at one idle decision point."""

    now: int
    arrivals: tuple[Job, ...]
    machine_busy_until: int
    pending: tuple[Job, ...]
    stream_over: bool


@dataclass(frozen=True, slots=True)
class Decision:
    """Order a resource subset (or None) and start jobs back to back from now."""

    replenish: frozenset[int] | None = None
    start: tuple[int, ...] = ()


WAIT = Decision()


@dataclass(frozen=True, slots=True)
class TraceRecord:
    t: int
    replenish: tuple[int, ...] | None
    start: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Block:
    """Jobs started between one order and the next: t_i, b_i, y_i, z_i."""

    time: int
    size: int
    arrived_before: int
    arrived_at: int


@dataclass(frozen=True)
class Trace:
    """Time-ordered log of the acted decisions plus per-order block stats."""

    records: tuple[TraceRecord, ...]
    blocks: tuple[Block, ...]


class OnlinePolicy:
    """Base class: per-run state lives in the instance, reset() clears it."""

    name = "policy"
    objective = Objective.TOTAL_COMPLETION
    requires_single_resource = True
    requires_unit_jobs = True

    def reset(self) -> None:
        pass

    def decide(self, obs: Observation) -> Decision:
        raise NotImplementedError


_RESOURCE_ONE = frozenset({1})


class SumCompletionPolicy(OnlinePolicy):
    """Order and flush the backlog once its completion cost reaches K."""

    name = "sum-cj"
    objective = Objective.TOTAL_COMPLETION

    def __init__(self, order_cost: int):
        if order_cost < 1:
            raise ValueError("order cost must be >= 1")
        self.order_cost = order_cost

    def decide(self, obs: Observation) -> Decision:
        backlog = len(obs.pending)
        if backlog and obs.now * backlog + triangular(backlog) >= self.order_cost:
            return Decision(_RESOURCE_ONE, tuple(job.id for job in obs.pending))
        return WAIT


class SumFlowPolicy(OnlinePolicy):
    """Order once accumulated waiting plus the backlog cost reaches K."""

    name = "sum-fj"
    objective = Objective.TOTAL_FLOW

    def __init__(self, order_cost: int):
        if order_cost < 1:
            raise ValueError("order cost must be >= 1")
        self.order_cost = order_cost

    def decide(self, obs: Observation) -> Decision:
        backlog = len(obs.pending)
        if not backlog:
            return WAIT
        waited = sum(obs.now - job.release for job in obs.pending)
        if waited + triangular(backlog) >= self.order_cost:
            return Decision(_RESOURCE_ONE, tuple(job.id for job in obs.pending))
        return WAIT


class MaxFlowGridPolicy(OnlinePolicy):
    """Order at quadratically spaced times; flush when the stream ends.

    Designed for inputs where one unit job arrives per time step, so the
    only unknown is how many there are.  The grid is i(i+1)/2 for unit
    order cost and K(i^2+3i)/2 otherwise.
    """

    name = "max-flow"
    objective = Objective.MAX_FLOW

    def __init__(self, order_cost: int):
        if order_cost < 1:
            raise ValueError("order cost must be >= 1")
        self.order_cost = order_cost
        self.grid_index = 1

    def reset(self) -> None:
        self.grid_index = 1

    def _grid_time(self) -> int:
        i = self.grid_index
        if self.order_cost == 1:
            return i * (i + 1) // 2
        return self.order_cost * (i * i + 3 * i) // 2

    def decide(self, obs: Observation) -> Decision:
        if not obs.pending:
            return WAIT
        if obs.now >= self._grid_time() or obs.stream_over:
            while obs.now >= self._grid_time():
                self.grid_index += 1
            return Decision(_RESOURCE_ONE, tuple(job.id for job in obs.pending))
        return WAIT


class ImmediatePolicy(OnlinePolicy):
    """Order and start every pending job as soon as it is seen."""

    name = "immediate"
    objective = Objective.MAX_FLOW

    def decide(self, obs: Observation) -> Decision:
        if obs.pending:
            return Decision(_RESOURCE_ONE, tuple(job.id for job in obs.pending))
        return WAIT


# ---------------------------------------------------------------------------
# Simulation engine


@dataclass
class SimView:
    """Read-only view of the evolving run, offered to adaptive job sources."""

    started: dict[int, int]
    events: list[tuple[int, frozenset[int]]]
    busy_until: int


class JobSource:
    """Where arrivals come from; adaptive sources may watch the view."""

    def reveal(self, t: int, view: SimView) -> list[Job]:
        """All not-yet-delivered jobs with release <= t."""
        raise NotImplementedError

    def finished(self, t: int, view: SimView) -> bool:
        """True when no arrival can occur at any time after t."""
        raise NotImplementedError


class StaticSource(JobSource):
    def __init__(self, jobs: Iterable[Job]):
        self.jobs = sorted(jobs, key=lambda job: (job.release, job.id))
        self.cursor = 0

    def reveal(self, t: int, view: SimView) -> list[Job]:
        out = []
        while self.cursor < len(self.jobs) and self.jobs[self.cursor].release <= t:
            out.append(self.jobs[self.cursor])
            self.cursor += 1
        return out

    def finished(self, t: int, view: SimView) -> bool:
        return self.cursor >= len(self.jobs)


@dataclass
class SimResult:
    jobs: tuple[Job, ...]
    starts: dict[int, int]
    events: tuple[tuple[int, frozenset[int]], ...]
    records: tuple[TraceRecord, ...]


def _ready_under(job: Job, events: list[tuple[int, frozenset[int]]], t: int) -> bool:
    missing = set(job.resources)
    for event_time, resources in events:
        if job.release <= event_time <= t:
            missing -= resources
            if not missing:
                return True
    return not missing


def simulate(
    source: JobSource,
    policy: OnlinePolicy,
    num_resources: int = 1,
    end_signal: bool = True,
    max_time: int | None = None,
) -> SimResult:
    """Drive the policy over the arrival stream until every job has started.

    Decisions are validated before they take effect: orders must name a
    non-empty known resource subset, started jobs must be pending and ready
    under the orders placed so far, and blocks run back to back from now.
    Rejected decisions raise :class:`SimulationError`; nothing is revised.
    """
    policy.reset()
    started: dict[int, int] = {}
    events: list[tuple[int, frozenset[int]]] = []
    records: list[TraceRecord] = []
    pending: list[Job] = []
    seen: dict[int, Job] = {}
    view = SimView(started, events, 0)
    t = 0
    while True:
        if view.busy_until > t:
            t = view.busy_until
        arrived = source.reveal(t, view)
        for job in arrived:
            if job.id in seen:
                raise SimulationError(f"source delivered job {job.id} twice")
            if job.release > t:
                raise SimulationError(f"source delivered job {job.id} before its release")
            seen[job.id] = job
            pending.append(job)
        pending.sort(key=lambda job: (job.release, job.id))
        stream_done = source.finished(t, view)
        if not pending and stream_done:
            break
        if max_time is not None and t > max_time:
            raise SimulationError(f"policy made no progress by time {max_time}")
        arrivals_now = tuple(job for job in arrived if job.release == t)
        observation = Observation(
            now=t,
            arrivals=arrivals_now,
            machine_busy_until=view.busy_until,
            pending=tuple(pending),
            stream_over=end_signal and stream_done and not arrivals_now,
        )
        decision = policy.decide(observation)

        if decision.replenish is not None:
            subset = frozenset(decision.replenish)
            if not subset:
                raise SimulationError(f"t={t}: order names an empty resource subset")
            for r in subset:
                if not 1 <= r <= num_resources:
                    raise SimulationError(f"t={t}: order names unknown resource {r}")
            events.append((t, subset))

        if decision.start:
            pending_ids = {job.id for job in pending}
            clock = t
            for job_id in decision.start:
                if job_id not in pending_ids:
                    raise SimulationError(
                        f"t={t}: job {job_id} is not pending (unknown, unreleased or already started)"
                    )
                pending_ids.discard(job_id)
                job = seen[job_id]
                if not _ready_under(job, events, t):
                    raise SimulationError(
                        f"t={t}: job {job_id} is not ready, a required resource"
                        " was not ordered within its window"
                    )
                started[job_id] = clock
                clock += job.processing
            started_set = set(decision.start)
            pending = [job for job in pending if job.id not in started_set]
            view.busy_until = clock

        if decision.replenish is not None or decision.start:
            records.append(
                TraceRecord(
                    t,
                    tuple(sorted(decision.replenish)) if decision.replenish is not None else None,
                    tuple(decision.start),
                )
            )
        if not decision.start:
            t += 1

    return SimResult(
        jobs=tuple(sorted(seen.values(), key=lambda job: job.id)),
        starts=started,
        events=tuple(events),
        records=tuple(records),
    )


def _block_members(
    jobs: Sequence[Job],
    times: Sequence[int],
    starts: dict[int, int],
) -> list[list[Job]]:
    """Partition started jobs by the order interval their start falls into."""
    members: list[list[Job]] = [[] for _ in times]
    for job in jobs:
        start = starts.get(job.id)
        if start is None:
            continue
        idx = bisect_right(times, start) - 1
        if idx < 0:
            raise SimulationError(f"job {job.id} started before the first order")
        members[idx].append(job)
    return members


def compute_blocks(
    jobs: Sequence[Job],
    events: Sequence[tuple[int, frozenset[int]]],
    starts: dict[int, int],
) -> tuple[Block, ...]:
    """Per-order block statistics: order time, size, and the release split."""
    if not events:
        return ()
    times = [t for t, _ in events]
    blocks = []
    for t, group in zip(times, _block_members(jobs, times, starts)):
        fresh = sum(1 for job in group if job.release == t)
        blocks.append(Block(t, len(group), len(group) - fresh, fresh))
    return tuple(blocks)


def run_online(
    instance: Instance,
    policy: OnlinePolicy,
    end_signal: bool = True,
    max_time: int | None = None,
) -> tuple[Solution, Trace]:
    """Simulate the policy on a fixed instance and price the realized run."""
    if policy.requires_single_resource and instance.num_resources != 1:
        raise SolverError(f"policy {policy.name} requires a single resource type")
    if policy.requires_unit_jobs and any(job.processing != 1 for job in instance.jobs):
        raise SolverError(f"policy {policy.name} requires unit processing times")
    if max_time is None:
        max_time = instance.last_release + instance.total_processing + 2_000_000
    result = simulate(
        StaticSource(instance.jobs),
        policy,
        num_resources=instance.num_resources,
        end_signal=end_signal,
        max_time=max_time,
    )
    solution = evaluate_solution(
        instance,
        Schedule(result.starts),
        ReplenishmentStructure(result.events),
        policy.objective,
    )
    trace = Trace(result.records, compute_blocks(instance.jobs, result.events, result.starts))
    return solution, trace


def delay_releases(instance: Instance, shift: int = 1) -> Instance:
    """Shift every release date; models ordering decided before seeing arrivals."""
    return Instance(
        instance.num_resources,
        instance.joint_cost,
        instance.item_costs,
        tuple(
            Job(job.id, job.release + shift, job.processing, job.resources, job.weight)
            for job in instance.jobs
        ),
    )


# ---------------------------------------------------------------------------
# Trigger certificates

def _idle_before_blocks(
    jobs: Sequence[Job], trace: Trace, starts: dict[int, int]
) -> tuple[list[list[Job]], list[bool]]:
    """Block membership plus, per block, whether [t_i - 1, t_i) was idle."""
    times = [block.time for block in trace.blocks]
    members = _block_members(jobs, times, starts)
    idle = []
    busy_frontier = 0  # latest completion among earlier blocks
    for t, group in zip(times, members):
        idle.append(t >= 1 and busy_frontier <= t - 1)
        for job in group:
            completion = starts[job.id] + job.processing
            if completion > busy_frontier:
                busy_frontier = completion
    return members, idle


def completion_trigger_violations(
    instance: Instance, solution: Solution, trace: Trace, order_cost: int
) -> list[str]:
    """Check the completion policy's idle certificate on every block.

    Whenever the machine was idle just before an order at t, the backlog
    then pending (the block's jobs released before t) must have failed the
    trigger: y*(t-1) + y(y+1)/2 < K.  Exact integer check.
    """
    out = []
    _, idle = _idle_before_blocks(instance.jobs, trace, solution.schedule.starts)
    for block, was_idle in zip(trace.blocks, idle):
        if not was_idle:
            continue
        t = block.time
        y = block.arrived_before
        if y * (t - 1) + triangular(y) >= order_cost:
            out.append(
                f"order at {t}: backlog of {y} already met the completion trigger at {t - 1}"
            )
    return out


def flow_trigger_violations(
    instance: Instance, solution: Solution, trace: Trace, order_cost: int
) -> list[str]:
    """Flow-policy analogue: accumulated waiting at t-1 plus backlog cost < K."""
    out = []
    members, idle = _idle_before_blocks(instance.jobs, trace, solution.schedule.starts)
    for block, group, was_idle in zip(trace.blocks, members, idle):
        if not was_idle:
            continue
        t = block.time
        waited = sum(t - 1 - job.release for job in group if job.release <= t - 1)
        y = block.arrived_before
        if waited + triangular(y) >= order_cost:
            out.append(
                f"order at {t}: waiting backlog already met the flow trigger at {t - 1}"
            )
    return out


# ---------------------------------------------------------------------------
# Trace file format (JSON lines)

def trace_to_jsonl(trace: Trace, solution: Solution) -> str:
    """One record per acted decision, then a summary with blocks and totals."""
    lines = []
    for record in trace.records:
        lines.append(
            json.dumps(
                {
                    "t": record.t,
                    "replenish": list(record.replenish) if record.replenish is not None else None,
                    "start": list(record.start),
                },
                sort_keys=True,
            )
        )
    summary = {
        "blocks": [
            {"t": b.time, "b": b.size, "y": b.arrived_before, "z": b.arrived_at}
            for b in trace.blocks
        ],
        "scheduling_cost": solution.scheduling_cost,
        "replenishment_cost": solution.replenishment_cost,
        "total": solution.total,
    }
    lines.append(json.dumps(summary, sort_keys=True))
    return "\n".join(lines) + "\n"

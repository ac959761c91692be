"""Adaptive adversaries realizing the lower-bound games as concrete runs.

Each adversary watches the policy's actual decisions through the simulator
and reveals further jobs in response, then the realized instance is solved
offline and the run's competitive ratio is reported.

Kinds:

- ``sum_cj_3_2`` / ``sum_fj_3_2``: one job at time 0; when the policy starts
  it at t, a second job arrives at t+1.
- ``weighted_golden``: same shape, the second job carries weight w2.
- ``fmax_regular_4_3``: one job per time step; when the policy first orders
  at t, exactly one more job arrives (t+1 jobs in total).
- ``fmax_general_golden``: one job at time 0; when started at t, t further
  jobs arrive at t+1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance, Job, Objective, ReplenishmentStructure, Schedule, Solution, evaluate_solution
from .offline_dp import dp_fmax_s1
from .online import (
    ImmediatePolicy,
    JobSource,
    MaxFlowGridPolicy,
    OnlinePolicy,
    SimView,
    SumCompletionPolicy,
    SumFlowPolicy,
    Trace,
    compute_blocks,
    simulate,
)
from .oracle import exact_solve

SUM_CJ_3_2 = "sum_cj_3_2"
WEIGHTED_GOLDEN = "weighted_golden"
SUM_FJ_3_2 = "sum_fj_3_2"
FMAX_REGULAR_4_3 = "fmax_regular_4_3"
FMAX_GENERAL_GOLDEN = "fmax_general_golden"

KINDS = (SUM_CJ_3_2, WEIGHTED_GOLDEN, SUM_FJ_3_2, FMAX_REGULAR_4_3, FMAX_GENERAL_GOLDEN)

_OBJECTIVES = {
    SUM_CJ_3_2: Objective.TOTAL_COMPLETION,
    WEIGHTED_GOLDEN: Objective.WEIGHTED_COMPLETION,
    SUM_FJ_3_2: Objective.TOTAL_FLOW,
    FMAX_REGULAR_4_3: Objective.MAX_FLOW,
    FMAX_GENERAL_GOLDEN: Objective.MAX_FLOW,
}


@dataclass(frozen=True)
class AdversarySpec:
    """Which lower-bound game to play and its parameters."""

    kind: str
    order_cost: int
    w2: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}")
        if self.order_cost < 1:
            raise ValueError("order cost must be >= 1")
        if self.kind == WEIGHTED_GOLDEN:
            if self.w2 is None or self.w2 < 1:
                raise ValueError("the weighted adversary needs an integer weight w2 >= 1")


@dataclass(frozen=True)
class AdversaryOutcome:
    instance: Instance
    online: Solution
    offline: Solution
    ratio: float
    trace: Trace


class _ReactiveSource(JobSource):
    """One job at time 0; a payload keyed to when the policy starts it."""

    def __init__(self, payload_weight: int | None, payload_grows: bool):
        self.payload_weight = payload_weight
        self.payload_grows = payload_grows
        self.first = Job(1, 0, 1, frozenset({1}), 1)
        self.first_delivered = False
        self.payload: list[Job] | None = None
        self.delivered: list[Job] = []

    def _build_payload(self, started_at: int) -> list[Job]:
        release = started_at + 1
        if self.payload_grows:
            return [
                Job(2 + i, release, 1, frozenset({1}), 1) for i in range(started_at)
            ]
        return [Job(2, release, 1, frozenset({1}), self.payload_weight or 1)]

    def reveal(self, t: int, view: SimView) -> list[Job]:
        out = []
        if not self.first_delivered and t >= 0:
            self.first_delivered = True
            out.append(self.first)
        if self.payload is None and 1 in view.started:
            self.payload = self._build_payload(view.started[1])
        if self.payload:
            due = [job for job in self.payload if job.release <= t]
            self.payload = [job for job in self.payload if job.release > t]
            out.extend(due)
        self.delivered.extend(out)
        return out

    def finished(self, t: int, view: SimView) -> bool:
        if 1 not in view.started:
            return False
        if self.payload is None:
            # the payload release lies at start+1, strictly after the start
            return False
        return not self.payload


class _RegularStreamSource(JobSource):
    """One job per step until the first order; then exactly one more job."""

    def __init__(self) -> None:
        self.next_release = 1
        self.cap: int | None = None
        self.delivered: list[Job] = []

    def reveal(self, t: int, view: SimView) -> list[Job]:
        if self.cap is None and view.events:
            self.cap = view.events[0][0] + 1
        out = []
        while self.next_release <= t and (self.cap is None or self.next_release <= self.cap):
            job = Job(self.next_release, self.next_release, 1, frozenset({1}), 1)
            out.append(job)
            self.next_release += 1
        self.delivered.extend(out)
        return out

    def finished(self, t: int, view: SimView) -> bool:
        return self.cap is not None and self.next_release > self.cap


def default_policy(spec: AdversarySpec) -> OnlinePolicy:
    if spec.kind in (SUM_CJ_3_2, WEIGHTED_GOLDEN):
        return SumCompletionPolicy(spec.order_cost)
    if spec.kind == SUM_FJ_3_2:
        return SumFlowPolicy(spec.order_cost)
    if spec.kind == FMAX_REGULAR_4_3:
        return MaxFlowGridPolicy(spec.order_cost)
    return ImmediatePolicy()


def adversary_run(
    spec: AdversarySpec, policy: OnlinePolicy | None = None
) -> AdversaryOutcome:
    """Play the adversary against the policy and price both sides exactly.

    The realized instance is finalized once the adversary commits, the
    online run is priced under the kind's objective, the offline optimum is
    computed by the enumeration oracle (min-sum kinds) or the max-flow
    dynamic program, and the realized ratio is returned.
    """
    if policy is None:
        policy = default_policy(spec)
    if spec.kind == FMAX_REGULAR_4_3:
        source: JobSource = _RegularStreamSource()
    else:
        source = _ReactiveSource(
            payload_weight=spec.w2,
            payload_grows=spec.kind == FMAX_GENERAL_GOLDEN,
        )
    result = simulate(
        source,
        policy,
        num_resources=1,
        end_signal=True,
        max_time=200 * spec.order_cost + 10_000,
    )
    instance = Instance(
        num_resources=1,
        joint_cost=spec.order_cost,
        item_costs=(0,),
        jobs=result.jobs,
    )
    objective = _OBJECTIVES[spec.kind]
    online = evaluate_solution(
        instance,
        Schedule(result.starts),
        ReplenishmentStructure(result.events),
        objective,
    )
    if objective is Objective.MAX_FLOW:
        offline = dp_fmax_s1(instance)
    else:
        offline = exact_solve(instance, objective)
    trace = Trace(result.records, compute_blocks(instance.jobs, result.events, result.starts))
    return AdversaryOutcome(instance, online, offline, online.total / offline.total, trace)

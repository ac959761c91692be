"""Exact brute-force optimum for desk-scale instances.

The solver enumerates, for every resource type, the set of time points at
which that resource is ordered.  Enumerating one time set per resource is in
bijection with assigning a resource subset to every candidate time point, and
covers every replenishment structure over those points.  For each structure
the jobs get effective releases (the first moment all their resources are
covered) and the residual one-machine problem is solved by exhaustive
sequencing with earliest-start placement, which is optimal among active
schedules for every supported criterion.

Two enumeration grids are offered: the release dates of the jobs (sufficient
for optimality, used by :func:`exact_solve`) and every integer time up to the
horizon (:func:`exact_solve_fine_grid`, a validation variant whose value must
agree with the coarse grid).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .model import (
    Instance,
    Objective,
    ReplenishmentStructure,
    Schedule,
    Solution,
    SolverError,
    evaluate_solution,
)


@dataclass(frozen=True)
class OracleLimits:
    """Hard caps keeping the enumeration at desk scale."""

    max_jobs: int = 8
    max_grid_subsets: int = 2**20

    def __post_init__(self) -> None:
        if self.max_jobs < 0 or self.max_grid_subsets < 1:
            raise ValueError("oracle limits must be positive")


class OracleLimitError(SolverError):
    """The instance exceeds the configured enumeration caps."""


_MINSUM = (
    Objective.WEIGHTED_COMPLETION,
    Objective.TOTAL_COMPLETION,
    Objective.TOTAL_FLOW,
    Objective.WEIGHTED_FLOW,
)


def _sequence_exact(
    effective: tuple[int, ...],
    jobs_data: tuple[tuple[int, int, int], ...],
    objective: Objective,
) -> tuple[int, tuple[int, ...]]:
    """Best order of all jobs with starts at max(previous completion, effective).

    Returns the exact optimum cost and, among equal-cost orders, the
    lexicographically smallest start vector.  Branches are cut when an
    admissible bound already exceeds the incumbent.
    """
    n = len(effective)
    releases = tuple(r for r, _, _ in jobs_data)
    procs = tuple(p for _, p, _ in jobs_data)
    weights = tuple(w for _, _, w in jobs_data)
    is_max_flow = objective is Objective.MAX_FLOW

    def inc(j: int, completion: int) -> int:
        if objective is Objective.WEIGHTED_COMPLETION:
            return weights[j] * completion
        if objective is Objective.TOTAL_COMPLETION:
            return completion
        if objective is Objective.TOTAL_FLOW:
            return completion - releases[j]
        return weights[j] * (completion - releases[j])

    best_cost: int | None = None
    best_starts: tuple[int, ...] | None = None
    starts = [0] * n
    used = [False] * n

    def descend(remaining: int, now: int, partial: int) -> None:
        nonlocal best_cost, best_starts
        if remaining == 0:
            key = tuple(starts)
            if (
                best_cost is None
                or partial < best_cost
                or (partial == best_cost and key < best_starts)
            ):
                best_cost = partial
                best_starts = key
            return
        if best_cost is not None:
            # Every unscheduled job finishes no earlier than its own
            # effective release plus processing, machine aside.
            bound = partial
            if is_max_flow:
                for j in range(n):
                    if not used[j]:
                        start = now if now > effective[j] else effective[j]
                        flow = start + procs[j] - releases[j]
                        if flow > bound:
                            bound = flow
            else:
                for j in range(n):
                    if not used[j]:
                        start = now if now > effective[j] else effective[j]
                        bound += inc(j, start + procs[j])
            if bound > best_cost:
                return
        for j in range(n):
            if used[j]:
                continue
            start = now if now > effective[j] else effective[j]
            completion = start + procs[j]
            if is_max_flow:
                flow = completion - releases[j]
                new_partial = partial if partial > flow else flow
            else:
                new_partial = partial + inc(j, completion)
            used[j] = True
            starts[j] = start
            descend(remaining - 1, completion, new_partial)
            used[j] = False

    descend(n, 0, 0)
    assert best_cost is not None and best_starts is not None
    return best_cost, best_starts


def _sequence_release_order(
    effective: tuple[int, ...],
    jobs_data: tuple[tuple[int, int, int], ...],
) -> tuple[int, tuple[int, ...]]:
    """Max-flow residual for a single resource: non-decreasing release order.

    With one resource the effective releases are monotone in the release
    dates, so this order is optimal; cross-checked against full sequencing
    in the test suite.
    """
    n = len(effective)
    order = sorted(range(n), key=lambda j: (jobs_data[j][0], j))
    starts = [0] * n
    now = 0
    worst = 0
    for j in order:
        start = now if now > effective[j] else effective[j]
        starts[j] = start
        now = start + jobs_data[j][1]
        flow = now - jobs_data[j][0]
        if flow > worst:
            worst = flow
    return worst, tuple(starts)


def _cover_vector(
    times: tuple[int, ...], needing: tuple[tuple[int, int], ...], n: int
) -> tuple[int, ...] | None:
    """First ordering time at/after each needing job's release, 0 elsewhere.

    Returns None when some needing job is never covered.
    """
    cover = [0] * n
    for idx, release in needing:
        for t in times:
            if t >= release:
                cover[idx] = t
                break
        else:
            return None
    return tuple(cover)


def _resource_candidates(
    points: tuple[int, ...],
    needing: tuple[tuple[int, int], ...],
    item_cost: int,
    n: int,
    size_cap: int | None,
) -> list[tuple[int, int, tuple[int, ...]]]:
    """All usable ordering-time sets for one resource.

    Each entry is (bitmask over points, item-cost term, cover vector).  With
    ``size_cap`` set, only sets of at most that many points are produced;
    orders that cover no job can always be dropped without raising the cost,
    so capping at the number of jobs needing the resource loses nothing.
    """
    m = len(points)
    out = []
    if size_cap is None:
        for mask in range(1 << m):
            times = tuple(points[b] for b in range(m) if mask >> b & 1)
            cover = _cover_vector(times, needing, n)
            if cover is not None:
                out.append((mask, item_cost * len(times), cover))
    else:
        for k in range(0, min(size_cap, m) + 1):
            for combo in itertools.combinations(range(m), k):
                times = tuple(points[b] for b in combo)
                cover = _cover_vector(times, needing, n)
                if cover is None:
                    continue
                mask = 0
                for b in combo:
                    mask |= 1 << b
                out.append((mask, item_cost * k, cover))
    return out


def _enumeration_size(points: int, caps: list[int] | None, s: int) -> int:
    if caps is None:
        return (1 << points) ** s
    size = 1
    for cap in caps:
        size *= sum(math.comb(points, k) for k in range(0, min(cap, points) + 1))
    return size


def _empty_solution(objective: Objective) -> Solution:
    return Solution(Schedule({}), ReplenishmentStructure(()), objective, 0, 0, 0)


def _solve_over_points(
    instance: Instance,
    objective: Objective,
    limits: OracleLimits,
    points: tuple[int, ...],
    size_capped: bool,
) -> Solution:
    jobs = instance.jobs
    n = len(jobs)
    if n == 0:
        return _empty_solution(objective)
    if n > limits.max_jobs:
        raise OracleLimitError(f"instance has {n} jobs, limit is {limits.max_jobs}")
    if not points:
        raise SolverError("no candidate replenishment times for a non-empty job set")
    s = instance.num_resources

    needing: list[tuple[tuple[int, int], ...]] = []
    caps: list[int] = []
    for i in range(1, s + 1):
        need = tuple((idx, job.release) for idx, job in enumerate(jobs) if i in job.resources)
        needing.append(need)
        caps.append(len(need))
    size = _enumeration_size(len(points), caps if size_capped else None, s)
    if size > limits.max_grid_subsets:
        raise OracleLimitError(
            f"{size} replenishment structures exceed the cap {limits.max_grid_subsets}"
        )

    candidates = [
        _resource_candidates(
            points, needing[i], instance.item_costs[i], n, caps[i] if size_capped else None
        )
        for i in range(s)
    ]

    jobs_data = tuple((job.release, job.processing, job.weight) for job in jobs)
    releases = tuple(job.release for job in jobs)
    procs = tuple(job.processing for job in jobs)
    weights = tuple(job.weight for job in jobs)
    single = s == 1
    joint = instance.joint_cost
    use_edd = objective is Objective.MAX_FLOW and single

    def sched_lower_bound(eff: tuple[int, ...]) -> int:
        if objective is Objective.WEIGHTED_COMPLETION:
            return sum(w * (e + p) for w, e, p in zip(weights, eff, procs))
        if objective is Objective.TOTAL_COMPLETION:
            return sum(e + p for e, p in zip(eff, procs))
        if objective is Objective.TOTAL_FLOW:
            return sum(e + p - r for e, p, r in zip(eff, procs, releases))
        if objective is Objective.WEIGHTED_FLOW:
            return sum(w * (e + p - r) for w, e, p, r in zip(weights, eff, procs, releases))
        return max(e + p - r for e, p, r in zip(eff, procs, releases))

    residual_memo: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}

    def residual(eff: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
        hit = residual_memo.get(eff)
        if hit is None:
            if use_edd:
                hit = _sequence_release_order(eff, jobs_data)
            else:
                hit = _sequence_exact(eff, jobs_data, objective)
            residual_memo[eff] = hit
        return hit

    best_total: int | None = None
    best_key: tuple | None = None
    best_combo: tuple | None = None
    best_starts: tuple[int, ...] | None = None

    def combo_key(combo: tuple, starts: tuple[int, ...]) -> tuple:
        union = 0
        for mask, _, _ in combo:
            union |= mask
        times = tuple(points[b] for b in range(len(points)) if union >> b & 1)
        subsets = tuple(
            tuple(i + 1 for i in range(s) if combo[i][0] >> b & 1)
            for b in range(len(points))
            if union >> b & 1
        )
        return (times, starts, subsets)

    for combo in itertools.product(*candidates):
        union = 0
        repl = 0
        for mask, cost_term, _ in combo:
            union |= mask
            repl += cost_term
        repl += joint * union.bit_count()
        eff = combo[0][2]
        for entry in combo[1:]:
            eff = tuple(map(max, eff, entry[2]))
        if best_total is not None and repl + sched_lower_bound(eff) > best_total:
            continue
        sched_cost, starts = residual(eff)
        total = repl + sched_cost
        if best_total is None or total < best_total:
            best_total = total
            best_key = combo_key(combo, starts)
            best_combo = combo
            best_starts = starts
        elif total == best_total:
            key = combo_key(combo, starts)
            if key < best_key:
                best_key = key
                best_combo = combo
                best_starts = starts

    if best_total is None:
        raise SolverError("no feasible replenishment structure exists")

    times, _, subsets = combo_key(best_combo, best_starts)
    events = tuple((t, frozenset(rs)) for t, rs in zip(times, subsets))
    schedule = Schedule({job.id: start for job, start in zip(jobs, best_starts)})
    return evaluate_solution(instance, schedule, ReplenishmentStructure(events), objective)


def exact_solve(
    instance: Instance, objective: Objective, limits: OracleLimits | None = None
) -> Solution:
    """Globally optimal solution with orders restricted to the release dates.

    Restricting orders to release dates loses no optimality: moving an order
    back to the latest release at or before it keeps every served job ready.
    Ties between equal-cost optima are broken toward the lexicographically
    smallest (order times, start times) pair for reproducible results.
    """
    if limits is None:
        limits = OracleLimits()
    return _solve_over_points(instance, objective, limits, instance.release_grid, False)


def exact_solve_fine_grid(
    instance: Instance, objective: Objective, limits: OracleLimits | None = None
) -> Solution:
    """Optimum with orders allowed at every integer time up to the horizon.

    Validation variant: its value must equal :func:`exact_solve` on every
    instance where both run.  Meant for very small instances only; the
    enumeration cap guards against blow-up.
    """
    if limits is None:
        limits = OracleLimits()
    if not instance.jobs:
        return _empty_solution(objective)
    points = tuple(range(0, instance.horizon + 1))
    return _solve_over_points(instance, objective, limits, points, True)

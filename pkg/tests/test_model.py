import json

import pytest

from jrsched import (
    Instance,
    InstanceError,
    Job,
    Objective,
    ReplenishmentStructure,
    Schedule,
    Solution,
    SolutionError,
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
from conftest import R1, random_instance, walkthrough_instance


def events(*pairs):
    return ReplenishmentStructure(tuple((t, frozenset(rs)) for t, rs in pairs))


WALKTHROUGH_DOC = json.dumps(
    {
        "s": 1,
        "joint_cost": 1,
        "item_costs": [1],
        "jobs": [
            {"id": 1, "release": 0, "processing": 4, "resources": [1]},
            {"id": 2, "release": 3, "processing": 1, "resources": [1]},
            {"id": 3, "release": 7, "processing": 1, "resources": [1]},
        ],
    }
)


class TestParseInstance:
    def test_walkthrough_document(self):
        inst = parse_instance(WALKTHROUGH_DOC)
        assert len(inst.jobs) == 3
        assert inst.release_grid == (0, 3, 7)
        assert inst.horizon == 7 + 6
        assert inst.jobs[0].weight == 1  # default

    def test_empty_job_list(self):
        inst = parse_instance('{"s": 1, "joint_cost": 2, "item_costs": [3], "jobs": []}')
        assert inst.release_grid == ()
        assert inst.last_release == -1

    def test_empty_resource_set(self):
        doc = {"s": 1, "joint_cost": 0, "item_costs": [0],
               "jobs": [{"id": 7, "release": 0, "processing": 1, "resources": []}]}
        with pytest.raises(InstanceError, match="job 7.*empty resource set"):
            parse_instance(json.dumps(doc))

    def test_negative_release(self):
        doc = {"s": 1, "joint_cost": 0, "item_costs": [0],
               "jobs": [{"id": 1, "release": -2, "processing": 1, "resources": [1]}]}
        with pytest.raises(InstanceError, match="job 1.*release"):
            parse_instance(json.dumps(doc))

    def test_zero_processing(self):
        doc = {"s": 1, "joint_cost": 0, "item_costs": [0],
               "jobs": [{"id": 1, "release": 0, "processing": 0, "resources": [1]}]}
        with pytest.raises(InstanceError, match="job 1.*processing"):
            parse_instance(json.dumps(doc))

    def test_resource_out_of_range(self):
        doc = {"s": 1, "joint_cost": 0, "item_costs": [0],
               "jobs": [{"id": 4, "release": 0, "processing": 1, "resources": [2]}]}
        with pytest.raises(InstanceError, match="job 4.*resource index 2"):
            parse_instance(json.dumps(doc))

    def test_duplicate_ids(self):
        doc = {"s": 1, "joint_cost": 0, "item_costs": [0],
               "jobs": [{"id": 1, "release": 0, "processing": 1, "resources": [1]},
                        {"id": 1, "release": 1, "processing": 1, "resources": [1]}]}
        with pytest.raises(InstanceError, match="duplicate"):
            parse_instance(json.dumps(doc))

    def test_item_costs_length(self):
        with pytest.raises(InstanceError, match="item_costs"):
            parse_instance('{"s": 2, "joint_cost": 0, "item_costs": [0], "jobs": []}')

    def test_malformed_json(self):
        with pytest.raises(InstanceError, match="malformed"):
            parse_instance("{nope")

    def test_roundtrip(self, rng):
        for _ in range(25):
            inst = random_instance(rng, rng.randint(0, 6), s=2, max_processing=3, max_weight=4)
            assert parse_instance(emit_instance(inst)) == inst


class TestReadyAt:
    def test_walkthrough_late_structure(self):
        inst = walkthrough_instance()
        q = events((3, {1}), (7, {1}))
        assert ready_at(inst, q, 1, 3)
        assert not ready_at(inst, q, 1, 2)

    def test_order_before_release_does_not_serve(self):
        inst = Instance(1, 0, (0,), (Job(1, 5, 1, R1),))
        q = events((3, {1}))
        assert not ready_at(inst, q, 1, 10)

    def test_before_release_never_ready(self):
        inst = walkthrough_instance()
        q = events((0, {1}), (3, {1}), (7, {1}))
        assert not ready_at(inst, q, 3, 6)

    def test_unknown_job(self):
        with pytest.raises(InstanceError, match="unknown job"):
            ready_at(walkthrough_instance(), events(), 99, 0)

    def test_monotone_in_time(self, rng):
        for _ in range(40):
            inst = random_instance(rng, 4, s=2, max_processing=2)
            grid = inst.release_grid or (0,)
            q = events(*(((t, set(rng.sample(range(1, 3), rng.randint(1, 2))))
                          for t in grid)))
            job = rng.choice(inst.jobs)
            became_ready = None
            for t in range(0, inst.horizon + 2):
                if ready_at(inst, q, job.id, t):
                    became_ready = t
                    break
            if became_ready is not None:
                assert all(
                    ready_at(inst, q, job.id, t)
                    for t in range(became_ready, inst.horizon + 2)
                )


class TestCosts:
    def test_replenishment_cost_three_orders(self):
        inst = Instance(1, 1, (2,), (Job(1, 0, 1, R1),))
        q = events((0, {1}), (3, {1}), (7, {1}))
        assert replenishment_cost(inst, q) == 9

    def test_replenishment_cost_empty(self):
        assert replenishment_cost(walkthrough_instance(), events()) == 0

    def test_replenishment_cost_joint_subset(self):
        inst = Instance(2, 2, (3, 4), (Job(1, 0, 1, frozenset({1, 2})),))
        assert replenishment_cost(inst, events((5, {1, 2}))) == 9

    def test_replenishment_cost_bad_resource(self):
        with pytest.raises(InstanceError, match="out of range"):
            replenishment_cost(walkthrough_instance(), events((0, {2})))

    def test_walkthrough_completion_sums(self):
        inst = walkthrough_instance()
        assert scheduling_cost(inst, Schedule({1: 0, 2: 4, 3: 7}), Objective.TOTAL_COMPLETION) == 17
        assert scheduling_cost(inst, Schedule({1: 3, 2: 7, 3: 8}), Objective.TOTAL_COMPLETION) == 24

    def test_walkthrough_max_flow(self):
        inst = walkthrough_instance()
        assert scheduling_cost(inst, Schedule({1: 3, 2: 7, 3: 8}), Objective.MAX_FLOW) == 7

    def test_unscheduled_job_rejected(self):
        with pytest.raises(SolutionError, match="job 3"):
            scheduling_cost(walkthrough_instance(), Schedule({1: 0, 2: 4}), Objective.TOTAL_FLOW)

    def test_flow_equals_completion_minus_release(self, rng):
        for _ in range(30):
            inst = random_instance(rng, rng.randint(1, 6), s=2, max_processing=3, max_weight=4)
            t = 0
            starts = {}
            for job in inst.jobs:
                starts[job.id] = max(t, job.release)
                t = starts[job.id] + job.processing
            sched = Schedule(starts)
            shift = sum(job.weight * job.release for job in inst.jobs)
            assert (
                scheduling_cost(inst, sched, Objective.WEIGHTED_FLOW)
                == scheduling_cost(inst, sched, Objective.WEIGHTED_COMPLETION) - shift
            )
            shift1 = sum(job.release for job in inst.jobs)
            assert (
                scheduling_cost(inst, sched, Objective.TOTAL_FLOW)
                == scheduling_cost(inst, sched, Objective.TOTAL_COMPLETION) - shift1
            )


class TestSolution:
    def test_total_must_add_up(self):
        with pytest.raises(SolutionError, match="total"):
            Solution(Schedule({}), events(), Objective.TOTAL_COMPLETION, 3, 4, 8)

    def test_structure_requires_increasing_times(self):
        with pytest.raises(SolutionError, match="strictly increasing"):
            events((3, {1}), (3, {1}))

    def test_structure_rejects_empty_subset(self):
        with pytest.raises(SolutionError, match="empty resource set"):
            events((3, set()))

    def test_solution_roundtrip(self):
        inst = walkthrough_instance()
        sol = evaluate_solution(
            inst, Schedule({1: 0, 2: 4, 3: 7}), events((0, {1}), (3, {1}), (7, {1})),
            Objective.TOTAL_COMPLETION,
        )
        assert parse_solution(emit_solution(sol)) == sol


class TestCheckFeasible:
    def test_walkthrough_feasible(self):
        inst = walkthrough_instance()
        sol = evaluate_solution(
            inst, Schedule({1: 0, 2: 4, 3: 7}), events((0, {1}), (3, {1}), (7, {1})),
            Objective.TOTAL_COMPLETION,
        )
        assert check_feasible(inst, sol).ok

    def test_not_ready(self):
        inst = Instance(1, 0, (0,), (Job(2, 3, 1, R1),))
        sol = evaluate_solution(inst, Schedule({2: 2}), events((3, {1})), Objective.TOTAL_FLOW)
        report = check_feasible(inst, sol)
        assert [v.kind for v in report.violations] == ["not-ready"]
        assert report.violations[0].jobs == (2,)

    def test_overlap(self):
        inst = Instance(1, 0, (0,), (Job(1, 0, 1, R1), Job(2, 0, 1, R1)))
        sol = evaluate_solution(
            inst, Schedule({1: 0, 2: 0}), events((0, {1})), Objective.TOTAL_COMPLETION
        )
        report = check_feasible(inst, sol)
        assert any(v.kind == "overlap" and v.jobs == (1, 2) for v in report.violations)

    def test_unscheduled_reported(self):
        inst = walkthrough_instance()
        sol = Solution(Schedule({1: 0}), events((0, {1})), Objective.MAX_FLOW, 4, 2, 6)
        kinds = {v.kind for v in check_feasible(inst, sol).violations}
        assert "unscheduled" in kinds


class TestNormalize:
    def test_event_moved_to_grid(self):
        inst = walkthrough_instance()
        sol = evaluate_solution(
            inst, Schedule({1: 5, 2: 9, 3: 10}), events((5, {1}), (7, {1})),
            Objective.TOTAL_COMPLETION,
        )
        normalized = normalize_replenishments(inst, sol)
        assert normalized.replenishments.times() == (3, 7)
        assert check_feasible(inst, normalized).ok

    def test_event_before_first_release_dropped(self):
        inst = Instance(1, 1, (1,), (Job(1, 3, 1, R1),))
        sol = evaluate_solution(
            inst, Schedule({1: 3}), events((2, {1}), (3, {1})), Objective.TOTAL_FLOW
        )
        normalized = normalize_replenishments(inst, sol)
        assert normalized.replenishments.times() == (3,)
        assert normalized.replenishment_cost < sol.replenishment_cost

    def test_on_grid_unchanged(self):
        inst = walkthrough_instance()
        sol = evaluate_solution(
            inst, Schedule({1: 0, 2: 4, 3: 7}), events((0, {1}), (3, {1}), (7, {1})),
            Objective.TOTAL_COMPLETION,
        )
        assert normalize_replenishments(inst, sol) == sol

    def test_infeasible_rejected(self):
        inst = walkthrough_instance()
        sol = evaluate_solution(inst, Schedule({1: 0, 2: 4, 3: 7}), events(), Objective.MAX_FLOW)
        with pytest.raises(SolutionError, match="infeasible"):
            normalize_replenishments(inst, sol)

    def test_never_costs_more_and_stays_feasible(self, rng):
        for _ in range(40):
            inst = random_instance(rng, rng.randint(1, 5), s=2, max_processing=3)
            # schedule everything after a full order at the last release
            t = max(job.release for job in inst.jobs)
            starts = {}
            clock = t
            for job in sorted(inst.jobs, key=lambda j: j.id):
                starts[job.id] = clock
                clock += job.processing
            extra = tuple(
                (t + 1 + i, frozenset({rng.randint(1, 2)})) for i in range(rng.randint(0, 2))
            )
            sol = evaluate_solution(
                inst,
                Schedule(starts),
                ReplenishmentStructure(((t, frozenset({1, 2})),) + extra),
                Objective.TOTAL_FLOW,
            )
            assert check_feasible(inst, sol).ok
            normalized = normalize_replenishments(inst, sol)
            assert normalized.replenishment_cost <= sol.replenishment_cost
            assert check_feasible(inst, normalized).ok
            assert all(t in inst.release_grid for t in normalized.replenishments.times())

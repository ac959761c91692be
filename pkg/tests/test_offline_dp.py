import pytest

from jrsched import (
    Instance,
    Job,
    Objective,
    SolverError,
    check_feasible,
    dp_equalp,
    dp_fmax_s1,
    dp_wjcj_unit,
    exact_solve,
    fmax_unit_distinct,
    replenishment_cost,
    scheduling_cost,
)
from jrsched.offline_dp import equal_flow_cover
from conftest import R1, random_instance, walkthrough_instance


def assert_well_formed(inst, sol):
    assert check_feasible(inst, sol).ok
    assert sol.scheduling_cost == scheduling_cost(inst, sol.schedule, sol.objective)
    assert sol.replenishment_cost == replenishment_cost(inst, sol.replenishments)
    assert all(t in inst.release_grid for t in sol.replenishments.times())


class TestWeightedUnit:
    def test_two_jobs_heavier_first(self):
        inst = Instance(1, 0, (2,), (Job(1, 0, 1, R1, 3), Job(2, 0, 1, R1, 1)))
        sol = dp_wjcj_unit(inst)
        assert sol.total == 7
        assert sol.schedule.starts == {1: 0, 2: 1}
        assert sol.replenishments.times() == (0,)

    def test_empty(self):
        assert dp_wjcj_unit(Instance(1, 1, (1,), ())).total == 0

    def test_rejects_long_jobs(self):
        inst = Instance(1, 1, (1,), (Job(1, 0, 2, R1),))
        with pytest.raises(SolverError, match="unit"):
            dp_wjcj_unit(inst)

    def test_multi_resource_jobs(self):
        both = frozenset({1, 2})
        inst = Instance(
            2, 1, (1, 3),
            (Job(1, 0, 1, both, 2), Job(2, 1, 1, frozenset({2}), 1), Job(3, 0, 1, R1, 1)),
        )
        sol = dp_wjcj_unit(inst)
        assert sol.total == exact_solve(inst, Objective.WEIGHTED_COMPLETION).total
        assert_well_formed(inst, sol)

    def test_matches_oracle(self, rng):
        for trial in range(60):
            inst = random_instance(
                rng, rng.randint(1, 7), s=rng.randint(1, 2), max_weight=3
            )
            sol = dp_wjcj_unit(inst)
            assert sol.total == exact_solve(inst, Objective.WEIGHTED_COMPLETION).total
            assert_well_formed(inst, sol)

    def test_state_count_within_polynomial_bound(self, rng):
        for _ in range(20):
            n = rng.randint(2, 7)
            s = rng.randint(1, 2)
            inst = random_instance(rng, n, s=s, max_weight=3)
            stats = {}
            dp_wjcj_unit(inst, stats)
            bound = n ** (3 * s + 2)
            assert all(count <= bound for count in stats["states_per_layer"])


class TestEqualProcessing:
    def test_two_jobs_single_order(self):
        inst = Instance(1, 3, (0,), (Job(1, 0, 2, R1), Job(2, 1, 2, R1)))
        sol = dp_equalp(inst, Objective.TOTAL_COMPLETION)
        assert sol.total == 11
        assert sol.replenishments.times() == (1,)
        assert sol.schedule.starts == {1: 1, 2: 3}

    def test_single_job_max_flow(self):
        inst = Instance(1, 4, (0,), (Job(1, 0, 2, R1),))
        sol = dp_equalp(inst, Objective.MAX_FLOW)
        assert sol.total == 6
        assert sol.schedule.starts == {1: 0}

    def test_block_may_need_order_at_run_end(self):
        # an order between release dates (at a block completion) is the only
        # way to reach the optimum here; the returned structure is still
        # reported on the release grid
        inst = Instance(1, 1, (0,), (Job(1, 0, 2, R1), Job(2, 1, 2, R1)))
        sol = dp_equalp(inst, Objective.TOTAL_COMPLETION)
        assert sol.total == 8
        assert_well_formed(inst, sol)

    def test_rejects_mixed_processing(self):
        inst = Instance(1, 1, (1,), (Job(1, 0, 2, R1), Job(2, 0, 3, R1)))
        with pytest.raises(SolverError, match="common"):
            dp_equalp(inst, Objective.TOTAL_COMPLETION)

    def test_rejects_weights_for_completion(self):
        inst = Instance(1, 1, (1,), (Job(1, 0, 2, R1, 2),))
        with pytest.raises(SolverError, match="unit weights"):
            dp_equalp(inst, Objective.TOTAL_COMPLETION)

    def test_rejects_unsupported_objective(self):
        inst = Instance(1, 1, (1,), (Job(1, 0, 2, R1),))
        with pytest.raises(SolverError, match="objective"):
            dp_equalp(inst, Objective.WEIGHTED_COMPLETION)

    def test_empty(self):
        assert dp_equalp(Instance(1, 1, (1,), ()), Objective.MAX_FLOW).total == 0

    @pytest.mark.parametrize("objective", [Objective.TOTAL_COMPLETION, Objective.MAX_FLOW])
    def test_matches_oracle(self, rng, objective):
        for trial in range(25):
            inst = random_instance(
                rng, rng.randint(1, 6), s=rng.randint(1, 2),
                equal_processing=rng.randint(1, 3),
            )
            sol = dp_equalp(inst, objective)
            assert sol.total == exact_solve(inst, objective).total
            assert_well_formed(inst, sol)


class TestMaxFlowSingleResource:
    def test_walkthrough(self):
        sol = dp_fmax_s1(walkthrough_instance(1, 1))
        assert sol.total == 9
        assert sol.replenishments.times() == (0, 7)
        assert sol.schedule.starts == {1: 0, 2: 7, 3: 8}
        assert sol.scheduling_cost == 5

    def test_single_job(self):
        inst = Instance(1, 5, (0,), (Job(1, 0, 3, R1),))
        assert dp_fmax_s1(inst).total == 8

    def test_equal_release_dates_grouped(self):
        inst = Instance(1, 2, (0,), (Job(1, 0, 2, R1), Job(2, 0, 1, R1), Job(3, 4, 1, R1)))
        sol = dp_fmax_s1(inst)
        assert sol.total == exact_solve(inst, Objective.MAX_FLOW).total
        assert_well_formed(inst, sol)

    def test_rejects_multi_resource(self):
        inst = Instance(2, 1, (1, 1), (Job(1, 0, 1, R1),))
        with pytest.raises(SolverError, match="single-resource"):
            dp_fmax_s1(inst)

    def test_empty(self):
        assert dp_fmax_s1(Instance(1, 9, (1,), ())).total == 0

    def test_matches_oracle(self, rng):
        for trial in range(60):
            inst = random_instance(rng, rng.randint(1, 7), s=1, max_processing=5)
            sol = dp_fmax_s1(inst)
            assert sol.total == exact_solve(inst, Objective.MAX_FLOW).total
            assert_well_formed(inst, sol)


class TestUnitDistinct:
    def test_cover_for_fixed_flow(self):
        assert equal_flow_cover([1, 2, 3, 5, 7, 8], 3) == [2, 5, 8]

    def test_six_jobs(self):
        inst = Instance(
            1, 1, (1,), tuple(Job(i + 1, r, 1, R1) for i, r in enumerate((1, 2, 3, 5, 7, 8)))
        )
        sol = fmax_unit_distinct(inst)
        assert sol.total == 8
        assert sol.replenishments.times() == (3, 8)
        assert sol.scheduling_cost == 4

    def test_single_job(self):
        inst = Instance(1, 4, (2,), (Job(1, 5, 1, R1),))
        sol = fmax_unit_distinct(inst)
        assert sol.total == 7  # order cost 6 plus flow 1
        assert sol.schedule.starts == {1: 5}

    def test_sparse_releases_need_wide_flow(self):
        # the best equal flow (10) exceeds the job count here
        inst = Instance(
            1, 2, (5,), tuple(Job(i + 1, r, 1, R1) for i, r in enumerate((8, 9, 3, 5, 12)))
        )
        sol = fmax_unit_distinct(inst)
        assert sol.total == 17
        assert len(sol.replenishments) == 1

    def test_rejects_duplicate_releases(self):
        inst = Instance(1, 1, (1,), (Job(1, 0, 1, R1), Job(2, 0, 1, R1)))
        with pytest.raises(SolverError, match="distinct"):
            fmax_unit_distinct(inst)

    def test_rejects_long_jobs(self):
        inst = Instance(1, 1, (1,), (Job(1, 0, 2, R1),))
        with pytest.raises(SolverError, match="unit"):
            fmax_unit_distinct(inst)

    def test_empty(self):
        assert fmax_unit_distinct(Instance(1, 1, (1,), ())).total == 0

    def test_matches_reference_solvers(self, rng):
        for trial in range(60):
            inst = random_instance(
                rng, rng.randint(1, 7), s=1, max_release=14, distinct_releases=True
            )
            fast = fmax_unit_distinct(inst)
            assert fast.total == dp_fmax_s1(inst).total
            assert fast.total == exact_solve(inst, Objective.MAX_FLOW).total
            assert_well_formed(inst, fast)

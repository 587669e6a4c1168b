"""暴力搜索、σ 界、稳定性、ρ 扫描与对比报告。"""

import random
from fractions import Fraction

import pytest

from app.cli.generator import generate_workload
from app.core.exceptions import (
    ErrorCode,
    OracleSizeException,
    ParameterException,
    TaskDataException,
    TimelineInvalidException,
    UndefinedSigmaException,
)
from app.schemas.common import PolicyEnum
from app.schemas.workload import ClusterConfig, JobSpec
from app.services import simulator
from app.services.johnson import closed_form_makespan, durations_of, johnson_order
from app.services.oracle import (
    brute_force_best_order,
    budget_sweep,
    compare_report,
    ratio_sweep,
    sigma_bound,
    split_makespan,
    stability_check,
    worst_case_instance,
)
from app.services.schedulers import (
    mk_jr_schedule,
    ordered_schedule,
    pinned_or_searched_pools,
    uaas_schedule,
)
from app.services.simulator import TimelineViolation, simulate_fifo, verify_timeline
from app.utils.workload_io import load_workload

from tests.conftest import make_job, make_workload


def _full_demand_workload(seed, n, slots=6):
    return generate_workload(
        seed=seed, n=n,
        duration_range=("0", "15"), demand_range=(slots, slots),
        cluster=ClusterConfig(map_slots=slots, reduce_slots=slots),
        max_denominator=6,
    )


def _task_job(job_id, map_tasks, reduce_tasks, map_demand=1, reduce_demand=1):
    return JobSpec(
        id=job_id, map_demand=map_demand, reduce_demand=reduce_demand,
        map_tasks=map_tasks, reduce_tasks=reduce_tasks,
    )


class TestBruteForce:
    def test_table1(self, table1):
        uaas = uaas_schedule(table1)
        sequence, best = brute_force_best_order(durations_of(uaas.pools[0].jobs))
        assert best == Fraction(107, 3)
        assert closed_form_makespan(sequence).makespan == best

    def test_agrees_with_uaas_on_random_instances(self):
        rng = random.Random(42)
        for trial in range(500):
            w = _full_demand_workload(trial, rng.randint(2, 8))
            uaas = uaas_schedule(w)
            _, best = brute_force_best_order(durations_of(uaas.pools[0].jobs))
            assert best == uaas.predicted_makespan

    def test_ties_pick_lexicographically_first(self):
        jobs = [("A", Fraction(1), Fraction(1)), ("B", Fraction(1), Fraction(1)), ("C", Fraction(1), Fraction(1))]
        sequence, best = brute_force_best_order(jobs)
        assert sequence.job_ids == ("A", "B", "C")
        assert best == 4

    def test_size_limit(self):
        jobs = [(f"J{i}", Fraction(1), Fraction(1)) for i in range(11)]
        with pytest.raises(OracleSizeException) as exc:
            brute_force_best_order(jobs)
        assert exc.value.error_code == ErrorCode.ORACLE_SIZE_EXCEEDED
        assert exc.value.context == {"job_count": 11, "limit": 10}

    def test_custom_limit(self):
        jobs = [(f"J{i}", Fraction(1), Fraction(2)) for i in range(4)]
        with pytest.raises(OracleSizeException):
            brute_force_best_order(jobs, limit=3)

    def test_limit_cannot_exceed_ten(self):
        jobs = [(f"J{i}", Fraction(1), Fraction(1)) for i in range(11)]
        with pytest.raises(OracleSizeException) as exc:
            brute_force_best_order(jobs, limit=12)
        assert exc.value.context == {"job_count": 11, "limit": 10}

    def test_empty(self):
        sequence, best = brute_force_best_order([])
        assert len(sequence) == 0
        assert best == 0

    def test_rational_durations(self):
        jobs = [("A", Fraction(1, 3), Fraction(5, 7)), ("B", Fraction(9, 4), Fraction(1, 6))]
        sequence, best = brute_force_best_order(jobs)
        assert best == closed_form_makespan(johnson_order(jobs)).makespan
        assert sequence.job_ids == ("A", "B")


class TestSigma:
    def test_table1(self, table1):
        report = sigma_bound(table1)
        assert report.optimal_makespan == Fraction(107, 3)
        assert report.sigma == Fraction(153, 107)
        assert report.bound == Fraction(260, 107)
        assert report.prefix_sigma == Fraction(197, 107)
        assert report.max_prefix_map == 31
        assert report.max_single_reduce == 20
        assert report.mk_jr_makespan == 47
        assert report.mk_jr_within_bound
        assert report.mk_jr_within_prefix_bound

    @pytest.mark.parametrize("c0", [2, 10, 100, 1000, Fraction(7, 2)])
    def test_worst_case_formula(self, c0):
        c0 = Fraction(c0)
        report = sigma_bound(worst_case_instance(c0))
        assert report.sigma == (2 * c0 + 1) / (c0 + 2)
        assert report.optimal_makespan == c0 + 2
        assert report.bound < 3

    def test_worst_case_values(self):
        assert sigma_bound(worst_case_instance(2)).sigma == Fraction(5, 4)
        report = sigma_bound(worst_case_instance(100))
        assert report.sigma == Fraction(201, 102)
        assert report.bound == Fraction(303, 102)

    def test_bound_approaches_three(self):
        bounds = [sigma_bound(worst_case_instance(c0)).bound for c0 in (2, 10, 100, 1000)]
        assert bounds == sorted(bounds)
        assert len(set(bounds)) == len(bounds)
        assert 3 - bounds[-1] < Fraction(1, 100)

    def test_worst_case_fixture(self, fixtures_dir):
        report = sigma_bound(load_workload(fixtures_dir / "worstcase_c0.json"))
        assert report.sigma == Fraction(15, 9)

    @pytest.mark.parametrize("c0", [1, 0, "1/2", "abc"])
    def test_worst_case_rejects_small_c0(self, c0):
        with pytest.raises(ParameterException):
            worst_case_instance(c0)

    def test_single_job(self):
        report = sigma_bound(make_workload([make_job("A", 2, 3)]))
        assert report.sigma == 1
        assert report.optimal_makespan == 5

    def test_zero_optimum(self):
        with pytest.raises(UndefinedSigmaException):
            sigma_bound(make_workload([make_job("A", 0, 0)]))

    def test_bound_holds_on_random_instances(self):
        rng = random.Random(2718)
        for trial in range(1000):
            w = _full_demand_workload(10_000 + trial, rng.randint(1, 8), slots=rng.choice([1, 2, 4]))
            if uaas_schedule(w).predicted_makespan == 0:
                continue
            report = sigma_bound(w)
            assert report.mk_jr_makespan <= report.bound * report.optimal_makespan
            assert report.mk_jr_within_bound

    def test_full_demand_mk_jr_is_optimal(self):
        for seed in range(200):
            w = _full_demand_workload(seed, 2 + seed % 7)
            schedule = mk_jr_schedule(w)
            timeline = simulate_fifo(schedule)
            assert verify_timeline(timeline, schedule, w.cluster) == []
            assert timeline.makespan == uaas_schedule(w).predicted_makespan


class TestStability:
    def test_two_job_scale(self, twojob5):
        report = stability_check(twojob5, [Fraction(5, 4)])
        entry = report.entries[0]
        assert entry.cluster_after.label() == "8x8"
        assert entry.uaas_order_before == entry.uaas_order_after == ("J2", "J1")
        assert entry.uaas_makespan_after == Fraction(47, 2)
        assert entry.makespan_scaled_exactly
        assert entry.mk_jr_order_before == ("J1", "J2")
        assert entry.mk_jr_order_after == ("J2", "J1")
        assert entry.mk_jr_order_changed
        assert entry.mk_jr_makespan_before == 35
        assert entry.mk_jr_makespan_after == Fraction(129, 4)
        assert report.uaas_stable

    def test_node_change_is_equivalent(self, twojob5):
        by_nodes = stability_check(twojob5, nodes=(5, 4)).entries[0]
        assert by_nodes.rho0 == Fraction(5, 4)
        assert by_nodes.uaas_makespan_after == Fraction(47, 2)

    @pytest.mark.parametrize(
        ("factors", "nodes"),
        [([3], None), ([0], None), ([-1], None), ([], None), ([], (0, 4))],
    )
    def test_invalid_scaling(self, twojob5, factors, nodes):
        with pytest.raises(ParameterException):
            stability_check(twojob5, factors, nodes)

    def test_random_workloads(self):
        rng = random.Random(31337)
        for trial in range(200):
            cluster = ClusterConfig(map_slots=6 * rng.randint(1, 3), reduce_slots=6 * rng.randint(1, 3))
            w = generate_workload(
                seed=trial, n=rng.randint(1, 7),
                duration_range=("1/4", "20"), demand_range=(1, 6),
                cluster=cluster,
            )
            report = stability_check(w, [Fraction(1, 2), 2, 3])
            assert report.uaas_stable
            for entry in report.entries:
                assert entry.uaas_makespan_after == entry.uaas_makespan_before * entry.rho0


class TestRatioSweep:
    def test_two_job_budget_20(self, twojob_tasks):
        result = ratio_sweep(twojob_tasks, 20)
        assert result.order == ("J2", "J1")
        assert len(result.points) == 19
        assert (result.best.map_slots, result.best.reduce_slots) == (16, 4)
        assert result.best.makespan == Fraction(109, 8)

        at_best = twojob_tasks.with_cluster(ClusterConfig(map_slots=16, reduce_slots=4))
        simulated = simulate_fifo(ordered_schedule(at_best, ["J2", "J1"])).makespan
        assert simulated == result.best.makespan

    def test_even_split_matches_closed_form(self, twojob_tasks):
        result = ratio_sweep(twojob_tasks, 20)
        even = next(point for point in result.points if point.map_slots == 10)
        assert even.makespan == Fraction(94, 5)
        assert even.rho == 1

    def test_map_heavy_workload(self):
        w = make_workload([_task_job("A", ["2", "2"], ["0"])], 1, 1)
        result = ratio_sweep(w, 6)
        assert result.best.map_slots == 5

    def test_symmetric_workload(self):
        w = make_workload([_task_job("A", ["2", "2"], ["2", "2"])], 1, 1)
        result = ratio_sweep(w, 10)
        assert (result.best.map_slots, result.best.reduce_slots) == (5, 5)
        assert result.best.makespan == Fraction(8, 5)

    def test_explicit_order(self, twojob_tasks):
        result = ratio_sweep(twojob_tasks, 20, order=["J1", "J2"])
        assert result.order == ("J1", "J2")
        even = next(point for point in result.points if point.map_slots == 10)
        assert even.makespan == Fraction(193, 10)

    def test_sweep_matches_closed_form_on_random_instances(self):
        rng = random.Random(99)
        for trial in range(100):
            jobs = [
                _task_job(
                    f"J{i}",
                    [Fraction(rng.randint(1, 9)) for _ in range(rng.randint(1, 4))],
                    [Fraction(rng.randint(0, 9)) for _ in range(rng.randint(1, 4))],
                )
                for i in range(rng.randint(1, 5))
            ]
            w = make_workload(jobs, 1, 1)
            order = w.job_ids
            rng.shuffle(order)
            total = rng.randint(2, 12)
            for point in ratio_sweep(w, total, order=order).points:
                at_split = w.with_cluster(ClusterConfig(map_slots=point.map_slots, reduce_slots=point.reduce_slots))
                assert point.makespan == ordered_schedule(at_split, order).predicted_makespan

    def test_requires_task_times(self, table1):
        with pytest.raises(TaskDataException):
            ratio_sweep(table1, 20)

    def test_rejects_small_budget(self, twojob_tasks):
        with pytest.raises(ParameterException):
            ratio_sweep(twojob_tasks, 1)

    def test_rejects_partial_order(self, twojob_tasks):
        with pytest.raises(ParameterException):
            ratio_sweep(twojob_tasks, 20, order=["J1"])

    def test_split_makespan_empty(self):
        assert split_makespan([], 3, 4) == 0

    def test_budget_sweep_is_non_increasing(self, twojob_tasks):
        results = budget_sweep(twojob_tasks, [30, 10, 20, 40])
        assert [r.total_slots for r in results] == [10, 20, 30, 40]
        best = [r.best.makespan for r in results]
        assert best == sorted(best, reverse=True)


class TestCompareReport:
    def test_table1(self, table1):
        report = compare_report(table1)
        uaas = report.policy(PolicyEnum.UAAS.value)
        mk_jr = report.policy(PolicyEnum.MK_JR.value)
        pools = report.policy(PolicyEnum.BALANCED_POOLS.value)

        assert uaas.makespan == Fraction(107, 3)
        assert uaas.gap_vs_uaas == 0
        assert mk_jr.makespan == 47
        assert mk_jr.gap_vs_uaas == Fraction(34, 107)
        assert mk_jr.reduction_vs_policy == Fraction(34, 141)
        assert pools.makespan == 40
        assert pools.pool_makespans == (39, 40)
        assert pools.gap_vs_uaas == Fraction(13, 107)
        assert pools.pools_source == "pinned"
        assert uaas.makespan < pools.makespan < mk_jr.makespan

        assert report.oracle.makespan == Fraction(107, 3)
        assert report.oracle.matches_uaas
        assert report.sigma.sigma == Fraction(153, 107)

    def test_gap_percentages(self, table1):
        report = compare_report(table1)
        mk_jr_gap = float(report.policy("MK_JR").gap_vs_uaas) * 100
        pools_gap = float(report.policy("BALANCED_POOLS").gap_vs_uaas) * 100
        assert abs(mk_jr_gap - 31.76) < 0.05
        assert abs(pools_gap - 12.14) < 0.05

    def test_two_job_example(self, twojob5):
        report = compare_report(twojob5)
        assert report.policy("UAAS").makespan == Fraction(94, 5)
        mk_jr = report.policy("MK_JR")
        assert mk_jr.makespan == 35
        assert mk_jr.gap_vs_uaas == Fraction(81, 94)
        assert abs(float(mk_jr.gap_vs_uaas) * 100 - 86.17) < 0.01

    def test_single_job_all_policies_equal(self):
        w = make_workload([make_job("A", 2, 3, map_demand=4, reduce_demand=4)], 4, 4)
        report = compare_report(w)
        assert {result.makespan for result in report.policies} == {5}
        assert len(report.policies) == 3

    def test_unsplittable_cluster_skips_pools(self, fixtures_dir):
        report = compare_report(load_workload(fixtures_dir / "worstcase_c0.json"))
        assert [result.policy for result in report.policies] == ["UAAS", "MK_JR"]
        assert report.policy("UAAS").makespan == 9

    def test_pools_makespan_is_simulated(self):
        for seed in range(200):
            w = generate_workload(
                seed=seed, n=4, duration_range=("1", "20"), demand_range=(1, 8),
                cluster=ClusterConfig(map_slots=8, reduce_slots=8),
            )
            pools_schedule = pinned_or_searched_pools(w)
            pools = compare_report(w).policy(PolicyEnum.BALANCED_POOLS.value)
            assert pools.makespan == simulate_fifo(pools_schedule).makespan
            assert pools.predicted_makespan == pools_schedule.predicted_makespan
            assert pools.makespan <= pools.predicted_makespan

    def test_coprime_cluster_includes_pools(self):
        w = generate_workload(
            seed=5, n=5, duration_range=("1", "9"), demand_range=(1, 6),
            cluster=ClusterConfig(map_slots=6, reduce_slots=7),
        )
        report = compare_report(w)
        assert [result.policy for result in report.policies] == ["UAAS", "MK_JR", "BALANCED_POOLS"]
        assert report.policy("BALANCED_POOLS").pools_source == "search"

    def test_rejected_timeline_propagates(self, table1, monkeypatch):
        broken = [TimelineViolation(kind="fifo", message="overtaken")]
        monkeypatch.setattr(simulator, "verify_timeline", lambda *args, **kwargs: broken)
        with pytest.raises(TimelineInvalidException):
            compare_report(table1)
        with pytest.raises(TimelineInvalidException):
            sigma_bound(table1)
        with pytest.raises(TimelineInvalidException):
            stability_check(table1, [2])

    def test_document(self, table1):
        doc = compare_report(table1).to_document()
        assert doc["cluster"] == "30x30"
        assert doc["policies"]["UAAS"]["makespan_exact"] == "107/3"
        assert doc["policies"]["MK_JR"]["gap_vs_uaas_percent"] == "31.78%"
        assert doc["policies"]["BALANCED_POOLS"]["pools_source"] == "pinned"
        assert doc["sigma"]["sigma"]["exact"] == "153/107"
        assert doc["oracle"]["matches_uaas"] is True

"""Johnson 排序、闭式完工时间与流水线递推。"""

import random
from fractions import Fraction

import pytest

from app.core.exceptions import ParameterException
from app.services.johnson import (
    OrderedSequence,
    closed_form_makespan,
    durations_of,
    johnson_order,
    johnson_order_by_selection,
    pipeline_completion_times,
)
from app.services.workload_model import scale_to_cluster


def _table1_durations(table1):
    return durations_of(scale_to_cluster(job, table1.cluster) for job in table1.jobs)


def _random_jobs(rng, n):
    return [
        (f"J{i}", Fraction(rng.randint(0, 40), rng.randint(1, 6)), Fraction(rng.randint(0, 40), rng.randint(1, 6)))
        for i in range(n)
    ]


class TestJohnsonOrder:
    def test_table1_order(self, table1):
        seq = johnson_order(_table1_durations(table1))
        assert seq.job_ids == ("J2", "J5", "J1", "J4", "J3")

    def test_table1_closed_form(self, table1):
        breakdown = closed_form_makespan(johnson_order(_table1_durations(table1)))
        assert breakdown.makespan == Fraction(107, 3)
        assert breakdown.prefix_terms == (1, -1, 0, -1, -1)
        assert breakdown.critical_u == 1
        assert breakdown.idle_gap == 1

    def test_table1_completion_times(self, table1):
        seq = johnson_order(_table1_durations(table1))
        assert pipeline_completion_times(seq) == [5, 8, 13, 33, Fraction(107, 3)]

    def test_map_type_before_reduce_type(self):
        jobs = [("R", Fraction(5), Fraction(1)), ("M", Fraction(3), Fraction(4))]
        assert johnson_order(jobs).job_ids == ("M", "R")

    def test_equal_durations_count_as_map_type(self):
        jobs = [("A", Fraction(1), Fraction(1)), ("B", Fraction(2), Fraction(4))]
        assert johnson_order(jobs).job_ids == ("A", "B")

    def test_ties_keep_input_order(self):
        jobs = [("A", Fraction(2), Fraction(5)), ("B", Fraction(2), Fraction(7)), ("C", Fraction(9), Fraction(3)), ("D", Fraction(8), Fraction(3))]
        assert johnson_order(jobs).job_ids == ("A", "B", "C", "D")

    def test_negative_duration_rejected(self):
        with pytest.raises(ParameterException):
            johnson_order([("A", Fraction(-1), Fraction(1))])

    def test_empty(self):
        seq = johnson_order([])
        assert len(seq) == 0
        breakdown = closed_form_makespan(seq)
        assert breakdown.makespan == 0
        assert breakdown.critical_u is None


class TestSelectionVariant:
    def test_table1_matches_sort_order(self, table1):
        jobs = _table1_durations(table1)
        assert johnson_order_by_selection(jobs).job_ids == johnson_order(jobs).job_ids

    def test_reduce_type_tie_differs_only_in_order(self):
        jobs = [("A", Fraction(5), Fraction(2)), ("B", Fraction(6), Fraction(2))]
        by_sort = johnson_order(jobs)
        by_selection = johnson_order_by_selection(jobs)
        assert by_sort.job_ids == ("A", "B")
        assert by_selection.job_ids == ("B", "A")
        assert closed_form_makespan(by_sort).makespan == closed_form_makespan(by_selection).makespan == 13

    def test_same_makespan_on_random_instances(self):
        rng = random.Random(20240517)
        for _ in range(300):
            jobs = _random_jobs(rng, rng.randint(1, 9))
            by_sort = closed_form_makespan(johnson_order(jobs)).makespan
            by_selection = closed_form_makespan(johnson_order_by_selection(jobs)).makespan
            assert by_sort == by_selection


class TestClosedForm:
    def test_two_job_example(self):
        seq = OrderedSequence.from_items([("J2", Fraction(44, 5), Fraction(3, 2)), ("J1", 9, 1)])
        assert closed_form_makespan(seq).makespan == Fraction(94, 5)
        assert pipeline_completion_times(seq) == [Fraction(103, 10), Fraction(94, 5)]

    def test_single_job(self):
        seq = OrderedSequence.from_items([("A", 2, 3)])
        breakdown = closed_form_makespan(seq)
        assert breakdown.makespan == 5
        assert breakdown.critical_u == 1

    def test_matches_pipeline_recurrence(self):
        rng = random.Random(7)
        for _ in range(300):
            jobs = _random_jobs(rng, rng.randint(1, 9))
            rng.shuffle(jobs)
            seq = OrderedSequence.from_items(jobs)
            assert closed_form_makespan(seq).makespan == pipeline_completion_times(seq)[-1]

    def test_scaling_is_linear(self):
        seq = OrderedSequence.from_items([("A", 1, 4), ("B", 3, 2)])
        base = closed_form_makespan(seq).makespan
        assert closed_form_makespan(seq.scaled(Fraction(5, 4))).makespan == base * Fraction(5, 4)


class TestOrderedSequence:
    def test_rejects_length_mismatch(self):
        with pytest.raises(ParameterException):
            OrderedSequence(job_ids=("A", "B"), durations=((Fraction(1), Fraction(1)),))

    def test_rejects_duplicates(self):
        with pytest.raises(ParameterException):
            OrderedSequence.from_items([("A", 1, 1), ("A", 2, 2)])

    def test_items(self):
        seq = OrderedSequence.from_items([("A", "1/2", 3)])
        assert seq.items() == [("A", Fraction(1, 2), Fraction(3))]

from fractions import Fraction

import pytest

from app.cli.generator import SEED_LIMIT, generate_workload
from app.core.exceptions import ParameterException
from app.schemas.workload import ClusterConfig
from app.services.workload_model import validate_workload


def test_same_seed_is_deterministic():
    first = generate_workload(seed=2024, n=8, duration_range=("1/2", "7"), demand_range=(1, 6))
    second = generate_workload(seed=2024, n=8, duration_range=("1/2", "7"), demand_range=(1, 6))
    assert first == second


def test_different_seeds_differ():
    a = generate_workload(seed=1, n=8)
    b = generate_workload(seed=2, n=8)
    assert a != b


def test_jobs_within_ranges():
    cluster = ClusterConfig(map_slots=6, reduce_slots=4)
    w = generate_workload(
        seed=SEED_LIMIT - 1,
        n=30,
        duration_range=("1/2", "3"),
        demand_range=(2, 10),
        cluster=cluster,
        max_denominator=8,
    )
    assert w.job_ids == [f"J{i}" for i in range(1, 31)]
    assert w.cluster == cluster
    for job in w.jobs:
        for duration in (job.map_duration, job.reduce_duration):
            assert Fraction(1, 2) <= duration <= 3
            assert duration.denominator <= 8
        assert 2 <= job.map_demand <= 6
        assert 2 <= job.reduce_demand <= 4
    assert validate_workload(w) is w


def test_point_range():
    w = generate_workload(seed=3, n=5, duration_range=("5/2", "5/2"))
    assert {job.map_duration for job in w.jobs} == {Fraction(5, 2)}
    assert {job.map_demand for job in w.jobs} == {1}


@pytest.mark.parametrize(
    ("kwargs", "field"),
    [
        ({"seed": -1}, "seed"),
        ({"seed": SEED_LIMIT}, "seed"),
        ({"n": 0}, "n"),
        ({"duration_range": ("3", "1")}, "duration_range"),
        ({"duration_range": ("-1", "1")}, "duration_range"),
        ({"duration_range": ("x", "1")}, "duration_range"),
        ({"duration_range": ("1",)}, "duration_range"),
        ({"demand_range": (0, 3)}, "demand_range"),
        ({"demand_range": (11, 12)}, "demand_range"),
        ({"duration_range": ("1/3", "1/3"), "max_denominator": 2}, "duration_range"),
    ],
)
def test_invalid_parameters(kwargs, field):
    params = {"seed": 0, "n": 3}
    params.update(kwargs)
    with pytest.raises(ParameterException) as exc_info:
        generate_workload(**params)
    assert exc_info.value.context["field"] == field

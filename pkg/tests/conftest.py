import os

os.environ.setdefault("ENVIRONMENT", "test")
os.environ.setdefault("LOG_LEVEL", "WARNING")
os.environ.setdefault("MAKESPAN_LAB_THREADS", "1")

from fractions import Fraction
from pathlib import Path

import pytest

from app.schemas.workload import ClusterConfig, JobSpec, Workload
from app.utils.workload_io import load_workload

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "app" / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def table1():
    """5 个作业，30x30 集群，带固定的两池方案"""
    return load_workload(FIXTURES_DIR / "table1.json")


@pytest.fixture
def twojob5():
    """5 节点 x 2/2 槽位的两作业示例"""
    return load_workload(FIXTURES_DIR / "twojob5.json")


@pytest.fixture
def twojob4():
    """同一对作业，一个节点失效后的 8x8 集群"""
    return load_workload(FIXTURES_DIR / "twojob4.json")


@pytest.fixture
def twojob_tasks():
    return load_workload(FIXTURES_DIR / "twojob_tasks.json")


def make_job(job_id, map_duration, reduce_duration, map_demand=1, reduce_demand=1, **kwargs):
    return JobSpec(
        id=job_id,
        map_demand=map_demand,
        reduce_demand=reduce_demand,
        map_duration=Fraction(map_duration),
        reduce_duration=Fraction(reduce_duration),
        **kwargs,
    )


def make_workload(jobs, map_slots=1, reduce_slots=1):
    return Workload(jobs=tuple(jobs), cluster=ClusterConfig(map_slots=map_slots, reduce_slots=reduce_slots))


@pytest.fixture
def job_factory():
    return make_job


@pytest.fixture
def workload_factory():
    return make_workload

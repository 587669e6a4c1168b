"""进程池配置与并行搜索结果一致性。"""

import pytest

from app.core.exceptions import OracleSizeException
from app.services.johnson import durations_of
from app.services.oracle import brute_force_best_order, ratio_sweep
from app.services.schedulers import balanced_pools_schedule, uaas_schedule
from app.worker import ParallelConfig, parallel_map


def _parallel(workers=2):
    return ParallelConfig(max_workers=workers, min_items_for_parallel=1)


class TestParallelConfig:
    def test_defaults_from_env(self, monkeypatch):
        monkeypatch.setenv("MAKESPAN_LAB_THREADS", "3")
        monkeypatch.setenv("MAKESPAN_LAB_MIN_PARALLEL_ITEMS", "5")
        config = ParallelConfig()
        assert config.max_workers == 3
        assert config.min_items_for_parallel == 5
        assert config.parallel

    def test_single_worker_is_serial(self, monkeypatch):
        monkeypatch.setenv("MAKESPAN_LAB_THREADS", "1")
        assert not ParallelConfig().parallel

    @pytest.mark.parametrize(
        ("field", "value"),
        [("max_workers", 0), ("min_items_for_parallel", 0)],
    )
    def test_rejects_non_positive(self, field, value):
        with pytest.raises(ValueError, match="must be >= 1"):
            ParallelConfig(**{field: value})


class TestParallelMap:
    def test_serial_keeps_order(self):
        assert parallel_map(abs, [-3, 1, -2], ParallelConfig(max_workers=1)) == [3, 1, 2]

    def test_below_threshold_runs_in_process(self):
        config = ParallelConfig(max_workers=4, min_items_for_parallel=10)
        # lambda 无法跨进程传递，能得到结果说明没有启动进程池
        assert parallel_map(lambda x: x * 2, [1, 2, 3], config) == [2, 4, 6]

    def test_process_pool_keeps_order(self):
        items = [-(i % 7) for i in range(40)]
        assert parallel_map(abs, items, _parallel()) == [abs(i) for i in items]

    def test_exception_is_reraised(self):
        with pytest.raises(ValueError):
            parallel_map(int, ["1", "x"], _parallel())

    def test_empty(self):
        assert parallel_map(abs, [], _parallel()) == []


class TestParallelSearchesMatchSerial:
    def test_brute_force(self, table1):
        jobs = durations_of(uaas_schedule(table1).pools[0].jobs)
        assert brute_force_best_order(jobs, parallel_config=_parallel()) == brute_force_best_order(
            jobs, parallel_config=ParallelConfig(max_workers=1)
        )

    def test_balanced_pools(self, table1):
        w = table1.with_cluster(table1.cluster)
        serial = balanced_pools_schedule(w, parallel_config=ParallelConfig(max_workers=1))
        parallel = balanced_pools_schedule(w, parallel_config=_parallel(3))
        assert parallel.order == serial.order
        assert parallel.pool_makespans == serial.pool_makespans
        assert [pool.cluster for pool in parallel.pools] == [pool.cluster for pool in serial.pools]

    def test_ratio_sweep(self, twojob_tasks):
        serial = ratio_sweep(twojob_tasks, 20, parallel_config=ParallelConfig(max_workers=1))
        parallel = ratio_sweep(twojob_tasks, 20, parallel_config=_parallel())
        assert parallel == serial

    def test_size_limit_checked_before_pool(self):
        jobs = [(f"J{i}", 1, 1) for i in range(12)]
        with pytest.raises(OracleSizeException):
            brute_force_best_order(jobs, parallel_config=_parallel())

"""
FIFO 离散事件仿真器

按 Schedule 在有限的 map / reduce 槽位上重放作业：
- 整组分配：一个阶段在整个执行期间占用固定数量的槽位
- 不超车：每个阶段严格按顺序准入，后面的作业不能先于前面的作业开始同一阶段
- 作业的 reduce 阶段在自身 map 结束后才能开始
- 多个资源池互相独立仿真，完工时间取各池最大值

事件按 (时间, 顺序位置) 处理，结果完全确定。
"""

import csv
import heapq
import io
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from app.config.settings import settings
from app.core.exceptions import CapacityException, FileException, TimelineInvalidException
from app.core.logging import get_performance_logger, simulator_logger
from app.schemas.common import DurationModel, Stage
from app.schemas.workload import ClusterConfig
from app.services.schedulers import PoolSchedule, Schedule
from app.services.workload_model import ScaledJob, wave_duration
from app.utils.rational_utils import format_decimal, format_exact

GANTT_HEADER = (
    'job_id', 'stage', 'start_decimal', 'start_exact',
    'end_decimal', 'end_exact', 'slots',
)


@dataclass(frozen=True)
class StageRun:
    job_id: str
    stage: Stage
    start: Fraction
    end: Fraction
    slots_used: int
    pool: int = 0

    @property
    def duration(self) -> Fraction:
        return self.end - self.start


@dataclass(frozen=True)
class Timeline:
    runs: Tuple[StageRun, ...]
    makespan: Fraction
    # (池序号, 阶段) -> [(时间点, 该时刻起占用的槽位数)]
    occupancy: Dict[Tuple[int, Stage], Tuple[Tuple[Fraction, int], ...]] = field(default_factory=dict)
    pool_makespans: Tuple[Fraction, ...] = ()

    def runs_for(self, job_id: str) -> List[StageRun]:
        return [run for run in self.runs if run.job_id == job_id]

    def run(self, job_id: str, stage: Stage) -> StageRun:
        for item in self.runs:
            if item.job_id == job_id and item.stage == stage:
                return item
        raise KeyError((job_id, stage))


@dataclass(frozen=True)
class TimelineViolation:
    """kind: capacity / order / fifo / duration / missing"""
    kind: str
    message: str
    job_id: Optional[str] = None
    pool: Optional[int] = None


def stage_duration(job: ScaledJob, stage: Stage, duration_model: DurationModel = DurationModel.FLUID) -> Fraction:
    """作业在其分配下某一阶段的时长；WAVE 模型仅在作业携带任务时间时生效"""
    if stage == Stage.MAP:
        fluid, tasks, slots = job.eff_map_duration, job.map_tasks, job.alloc_map
    else:
        fluid, tasks, slots = job.eff_reduce_duration, job.reduce_tasks, job.alloc_reduce
    if duration_model == DurationModel.WAVE and tasks is not None:
        return wave_duration(tasks, slots)
    return fluid


def _check_capacity(pool: PoolSchedule) -> None:
    for job in pool.jobs:
        if job.alloc_map > pool.cluster.map_slots:
            raise CapacityException(job.id, Stage.MAP.value, job.alloc_map, pool.cluster.map_slots)
        if job.alloc_reduce > pool.cluster.reduce_slots:
            raise CapacityException(job.id, Stage.REDUCE.value, job.alloc_reduce, pool.cluster.reduce_slots)


def _simulate_pool(pool: PoolSchedule, pool_index: int, duration_model: DurationModel) -> List[StageRun]:
    _check_capacity(pool)

    jobs = pool.jobs
    n = len(jobs)
    free = {Stage.MAP: pool.cluster.map_slots, Stage.REDUCE: pool.cluster.reduce_slots}
    map_done = [False] * n
    runs: List[StageRun] = []
    # (结束时间, 顺序位置, 阶段序号, 占用槽位)
    events: List[Tuple[Fraction, int, int, int]] = []

    now = Fraction(0)
    next_map = 0
    next_reduce = 0

    while next_reduce < n or events:
        # 同一时刻先释放，再按顺序准入
        while next_map < n and jobs[next_map].alloc_map <= free[Stage.MAP]:
            job = jobs[next_map]
            end = now + stage_duration(job, Stage.MAP, duration_model)
            free[Stage.MAP] -= job.alloc_map
            runs.append(StageRun(job.id, Stage.MAP, now, end, job.alloc_map, pool_index))
            heapq.heappush(events, (end, next_map, 0, job.alloc_map))
            next_map += 1

        while (
            next_reduce < next_map
            and map_done[next_reduce]
            and jobs[next_reduce].alloc_reduce <= free[Stage.REDUCE]
        ):
            job = jobs[next_reduce]
            end = now + stage_duration(job, Stage.REDUCE, duration_model)
            free[Stage.REDUCE] -= job.alloc_reduce
            runs.append(StageRun(job.id, Stage.REDUCE, now, end, job.alloc_reduce, pool_index))
            heapq.heappush(events, (end, next_reduce, 1, job.alloc_reduce))
            next_reduce += 1

        if not events:
            break

        now = events[0][0]
        while events and events[0][0] == now:
            _, index, stage_no, slots = heapq.heappop(events)
            if stage_no == 0:
                free[Stage.MAP] += slots
                map_done[index] = True
            else:
                free[Stage.REDUCE] += slots

    return runs


def _occupancy(runs: Sequence[StageRun]) -> Dict[Tuple[int, Stage], Tuple[Tuple[Fraction, int], ...]]:
    deltas: Dict[Tuple[int, Stage], Dict[Fraction, int]] = {}
    for run in runs:
        if run.end == run.start:
            continue
        bucket = deltas.setdefault((run.pool, run.stage), {})
        bucket[run.start] = bucket.get(run.start, 0) + run.slots_used
        bucket[run.end] = bucket.get(run.end, 0) - run.slots_used

    result = {}
    for key, bucket in deltas.items():
        level = 0
        steps = []
        for instant in sorted(bucket):
            level += bucket[instant]
            steps.append((instant, level))
        result[key] = tuple(steps)
    return result


def simulate_fifo(schedule: Schedule, duration_model: DurationModel = DurationModel.FLUID) -> Timeline:
    """按 FIFO 不超车规则重放调度

    Raises:
        CapacityException: 某阶段所需槽位超过资源池容量
    """
    started = time.monotonic()
    runs: List[StageRun] = []
    pool_makespans = []
    for index, pool in enumerate(schedule.pools):
        pool_runs = _simulate_pool(pool, index, duration_model)
        runs.extend(pool_runs)
        pool_makespans.append(max((run.end for run in pool_runs), default=Fraction(0)))

    makespan = max(pool_makespans, default=Fraction(0))
    timeline = Timeline(
        runs=tuple(runs),
        makespan=makespan,
        occupancy=_occupancy(runs),
        pool_makespans=tuple(pool_makespans),
    )

    get_performance_logger().log_simulation(
        schedule.policy.value, time.monotonic() - started, len(runs)
    )
    simulator_logger.debug(
        f"{schedule.policy.value} 仿真完成: {len(runs)} 个阶段, 完工时间 {makespan}"
    )
    return timeline


# ============= 校验 =============

def _capacity_violations(
    runs: Sequence[StageRun],
    pool_index: int,
    stage: Stage,
    capacity: int,
) -> List[TimelineViolation]:
    violations = []
    active = [run for run in runs if run.end > run.start]
    for instant in sorted({run.start for run in active}):
        in_use = sum(run.slots_used for run in active if run.start <= instant < run.end)
        if in_use > capacity:
            violations.append(TimelineViolation(
                kind='capacity',
                message=f"池 {pool_index} {stage.value} 在 t={instant} 占用 {in_use} > {capacity}",
                pool=pool_index,
            ))
    return violations


def verify_timeline(
    t: Timeline,
    schedule: Schedule,
    cluster: ClusterConfig,
    duration_model: DurationModel = DurationModel.FLUID,
) -> List[TimelineViolation]:
    """检查容量、阶段先后、FIFO 不超车与时长一致性；返回空列表表示合法"""
    violations: List[TimelineViolation] = []

    total_map = sum(pool.cluster.map_slots for pool in schedule.pools)
    total_reduce = sum(pool.cluster.reduce_slots for pool in schedule.pools)
    if total_map > cluster.map_slots or total_reduce > cluster.reduce_slots:
        violations.append(TimelineViolation(
            kind='capacity',
            message=f"资源池合计 {total_map}x{total_reduce} 超出集群 {cluster.label()}",
        ))

    for index, pool in enumerate(schedule.pools):
        pool_runs = [run for run in t.runs if run.pool == index]
        for stage, capacity in ((Stage.MAP, pool.cluster.map_slots), (Stage.REDUCE, pool.cluster.reduce_slots)):
            violations.extend(_capacity_violations(
                [run for run in pool_runs if run.stage == stage], index, stage, capacity
            ))

        starts: Dict[Stage, List[Fraction]] = {Stage.MAP: [], Stage.REDUCE: []}
        for job in pool.jobs:
            by_stage = {}
            for run in pool_runs:
                if run.job_id == job.id:
                    by_stage.setdefault(run.stage, []).append(run)

            for stage in (Stage.MAP, Stage.REDUCE):
                found = by_stage.get(stage, [])
                if len(found) != 1:
                    violations.append(TimelineViolation(
                        kind='missing',
                        message=f"作业 {job.id} 的 {stage.value} 阶段出现 {len(found)} 次",
                        job_id=job.id,
                        pool=index,
                    ))
                    continue
                run = found[0]
                starts[stage].append(run.start)
                expected = stage_duration(job, stage, duration_model)
                slots = job.alloc_map if stage == Stage.MAP else job.alloc_reduce
                if run.duration != expected or run.slots_used != slots:
                    violations.append(TimelineViolation(
                        kind='duration',
                        message=(
                            f"作业 {job.id} {stage.value}: 时长 {run.duration} / 槽位 {run.slots_used}，"
                            f"应为 {expected} / {slots}"
                        ),
                        job_id=job.id,
                        pool=index,
                    ))

            if len(by_stage.get(Stage.MAP, [])) == 1 and len(by_stage.get(Stage.REDUCE, [])) == 1:
                map_run = by_stage[Stage.MAP][0]
                reduce_run = by_stage[Stage.REDUCE][0]
                if reduce_run.start < map_run.end:
                    violations.append(TimelineViolation(
                        kind='order',
                        message=f"作业 {job.id} 的 reduce 在 {reduce_run.start} 开始，早于 map 结束 {map_run.end}",
                        job_id=job.id,
                        pool=index,
                    ))

        for stage, values in starts.items():
            for position in range(1, len(values)):
                if values[position] < values[position - 1]:
                    violations.append(TimelineViolation(
                        kind='fifo',
                        message=f"池 {index} {stage.value} 第 {position + 1} 个作业超车",
                        pool=index,
                    ))

    if violations:
        simulator_logger.warning(f"时间线校验发现 {len(violations)} 项违规")
    return violations


def simulate_verified(
    schedule: Schedule,
    cluster: ClusterConfig,
    duration_model: DurationModel = DurationModel.FLUID,
) -> Timeline:
    """仿真并校验时间线

    Raises:
        TimelineInvalidException: verify_timeline 返回任何违规
    """
    timeline = simulate_fifo(schedule, duration_model)
    violations = verify_timeline(timeline, schedule, cluster, duration_model)
    if violations:
        raise TimelineInvalidException([v.message for v in violations])
    return timeline


# ============= 甘特图输出 =============

def emit_gantt(t: Timeline, digits: Optional[int] = None) -> List[Dict[str, str]]:
    """每个 StageRun 一行，按开始时间排序；时间同时给出十进制与精确形式"""
    digits = digits or settings.GANTT_SIGNIFICANT_DIGITS
    ordered = sorted(enumerate(t.runs), key=lambda item: (item[1].start, item[1].pool, item[0]))
    rows = []
    for _, run in ordered:
        rows.append({
            'job_id': run.job_id,
            'stage': run.stage.value,
            'start_decimal': format_decimal(run.start, digits),
            'start_exact': format_exact(run.start),
            'end_decimal': format_decimal(run.end, digits),
            'end_exact': format_exact(run.end),
            'slots': str(run.slots_used),
        })
    return rows


def _write_gantt_rows(t: Timeline, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=GANTT_HEADER, lineterminator='\n')
    writer.writeheader()
    writer.writerows(emit_gantt(t))


def gantt_csv_text(t: Timeline) -> str:
    buffer = io.StringIO()
    _write_gantt_rows(t, buffer)
    return buffer.getvalue()


def write_gantt_csv(t: Timeline, path) -> Path:
    """写出甘特图 CSV"""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open('w', encoding='utf-8', newline='') as fh:
            _write_gantt_rows(t, fh)
    except OSError as e:
        raise FileException("写入", str(target), f"无法写入甘特图 {target}: {e}") from e
    return target

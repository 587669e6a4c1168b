"""
工作负载模型服务

把工作负载描述转换为算法可用的阶段时长：
- 流体（可分负载）模型下的时长缩放：T' = T × 需求 / 分配
- 由任务级执行时间推导阶段时长
- 需求超过容量时的截断分配
- 工作负载校验（一次性报告全部违规项）

所有时长均为精确 Fraction，不做任何舍入。
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.core.exceptions import InvalidAllocationException, WorkloadValidationException
from app.core.logging import workload_logger
from app.schemas.common import JobType
from app.schemas.workload import ClusterConfig, JobSpec, Workload


@dataclass(frozen=True)
class ScaledJob:
    """作业在某一具体槽位分配下的有效阶段时长"""
    id: str
    alloc_map: int
    alloc_reduce: int
    eff_map_duration: Fraction
    eff_reduce_duration: Fraction
    # 任务级时间随作业携带，供 WAVE 模型仿真使用
    map_tasks: Optional[Tuple[Fraction, ...]] = None
    reduce_tasks: Optional[Tuple[Fraction, ...]] = None

    @property
    def durations(self) -> Tuple[Fraction, Fraction]:
        return self.eff_map_duration, self.eff_reduce_duration

    def as_job_spec(self) -> JobSpec:
        """把当前分配当作参考分配重新解释为 JobSpec"""
        return JobSpec(
            id=self.id,
            map_demand=self.alloc_map,
            reduce_demand=self.alloc_reduce,
            map_duration=self.eff_map_duration,
            reduce_duration=self.eff_reduce_duration,
            map_tasks=self.map_tasks,
            reduce_tasks=self.reduce_tasks,
        )


def _is_positive_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 1


def scale_durations(job: JobSpec, alloc_map: int, alloc_reduce: int) -> ScaledJob:
    """按比例律把参考时长换算到新的槽位分配

    eff_map = T^M × S_r^M / |A^M|，eff_reduce = T^R × S_r^R / |A^R|

    Raises:
        InvalidAllocationException: 任一分配不是正整数
    """
    if not (_is_positive_int(alloc_map) and _is_positive_int(alloc_reduce)):
        raise InvalidAllocationException(job.id, alloc_map, alloc_reduce)

    return ScaledJob(
        id=job.id,
        alloc_map=alloc_map,
        alloc_reduce=alloc_reduce,
        eff_map_duration=job.map_duration * job.map_demand / alloc_map,
        eff_reduce_duration=job.reduce_duration * job.reduce_demand / alloc_reduce,
        map_tasks=job.map_tasks,
        reduce_tasks=job.reduce_tasks,
    )


def duration_from_tasks(task_times: Sequence[Fraction], slots: int) -> Fraction:
    """流体模型：阶段时长 = 任务时间总和 / 槽位数；无任务的阶段时长为 0"""
    if not _is_positive_int(slots):
        raise InvalidAllocationException("<tasks>", slots, slots)
    if not task_times:
        return Fraction(0)
    return sum((Fraction(t) for t in task_times), Fraction(0)) / slots


def wave_duration(task_times: Sequence[Fraction], slots: int) -> Fraction:
    """离散波次模型：最长任务时间 × ceil(任务数 / 槽位数)

    只用于敏感性分析；与流体模型的 8/3 之类结果不一致，因此不是默认模型。
    """
    if not _is_positive_int(slots):
        raise InvalidAllocationException("<tasks>", slots, slots)
    if not task_times:
        return Fraction(0)
    waves = math.ceil(len(task_times) / slots)
    return max(Fraction(t) for t in task_times) * waves


def clamp_allocation(job: JobSpec, cluster: ClusterConfig) -> Tuple[int, int]:
    """作业保留自身请求的槽位，但不超过集群（或资源池）容量"""
    return (
        min(job.map_demand, cluster.map_slots),
        min(job.reduce_demand, cluster.reduce_slots),
    )


def scale_to_cluster(job: JobSpec, cluster: ClusterConfig) -> ScaledJob:
    """UAAS：作业在每个阶段使用全部可用槽位"""
    return scale_durations(job, cluster.map_slots, cluster.reduce_slots)


def scale_clamped(job: JobSpec, cluster: ClusterConfig) -> ScaledJob:
    """MK_JR / BalancedPools：按截断后的自身需求分配"""
    alloc_map, alloc_reduce = clamp_allocation(job, cluster)
    if (alloc_map, alloc_reduce) != (job.map_demand, job.reduce_demand):
        workload_logger.debug(
            f"作业 {job.id} 请求 {job.map_demand}x{job.reduce_demand} 超出 "
            f"{cluster.label()}，截断为 {alloc_map}x{alloc_reduce}"
        )
    return scale_durations(job, alloc_map, alloc_reduce)


def classify_job(map_duration: Fraction, reduce_duration: Fraction) -> JobType:
    """map 与 reduce 相等时归为 Map 型"""
    if map_duration <= reduce_duration:
        return JobType.MAP_TYPE
    return JobType.REDUCE_TYPE


def _violation(job_id: Optional[str], field: str, message: str) -> Dict[str, str]:
    return {'job_id': job_id or '', 'field': field, 'message': message}


def _check_job(job: JobSpec) -> List[Dict[str, str]]:
    violations = []
    if not job.id or not job.id.strip():
        violations.append(_violation(job.id, 'id', '作业 id 不能为空'))
    if job.map_demand < 1:
        violations.append(_violation(job.id, 'map_demand', f'必须 >= 1，实际为 {job.map_demand}'))
    if job.reduce_demand < 1:
        violations.append(_violation(job.id, 'reduce_demand', f'必须 >= 1，实际为 {job.reduce_demand}'))
    if job.map_duration < 0:
        violations.append(_violation(job.id, 'map_duration', f'必须 >= 0，实际为 {job.map_duration}'))
    if job.reduce_duration < 0:
        violations.append(_violation(job.id, 'reduce_duration', f'必须 >= 0，实际为 {job.reduce_duration}'))

    for stage, tasks, demand, duration in (
        ('map', job.map_tasks, job.map_demand, job.map_duration),
        ('reduce', job.reduce_tasks, job.reduce_demand, job.reduce_duration),
    ):
        if tasks is None:
            continue
        negative = [t for t in tasks if t < 0]
        if negative:
            violations.append(_violation(job.id, f'{stage}_tasks', f'任务时间必须 >= 0: {negative}'))
            continue
        if demand < 1:
            continue
        # 精确算术，容差为 0
        expected = duration_from_tasks(tasks, demand)
        if expected != duration:
            violations.append(_violation(
                job.id,
                f'{stage}_duration',
                f'与任务时间不一致: 任务推导值 {expected}，声明值 {duration}',
            ))
    return violations


def validate_workload(w: Workload) -> Workload:
    """校验全部 JobSpec / ClusterConfig 不变量

    需求超过集群容量不是错误（由截断与缩放规则处理）。

    Raises:
        WorkloadValidationException: 携带全部违规项（作业 id + 字段）
    """
    violations: List[Dict[str, str]] = []

    if w.cluster.map_slots < 1:
        violations.append(_violation(None, 'cluster.map_slots', f'必须 >= 1，实际为 {w.cluster.map_slots}'))
    if w.cluster.reduce_slots < 1:
        violations.append(_violation(None, 'cluster.reduce_slots', f'必须 >= 1，实际为 {w.cluster.reduce_slots}'))

    seen = set()
    for job in w.jobs:
        if job.id in seen:
            violations.append(_violation(job.id, 'id', '作业 id 重复'))
        seen.add(job.id)
        violations.extend(_check_job(job))

    if violations:
        workload_logger.warning(f"工作负载校验失败: {len(violations)} 项违规")
        raise WorkloadValidationException(violations)

    workload_logger.debug(f"工作负载校验通过: {len(w.jobs)} 个作业, 集群 {w.cluster.label()}")
    return w


def total_work(tasks: Iterable[Fraction]) -> Fraction:
    return sum((Fraction(t) for t in tasks), Fraction(0))

"""
调度策略服务

三种策略都产出 Schedule（资源池 + 执行顺序 + 每个作业的槽位分配），供仿真器重放：

- UAAS：所有作业使用集群全部槽位，按 Johnson 规则排序，闭式完工时间即最优值
- MK_JR：作业保持自身请求的槽位（超出容量时截断），按 J_A / J_B 规则排序
- BalancedPools：集群切分为两个资源池，贪心分配作业，每个池内按 Johnson 规则排序
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from app.config.settings import settings
from app.core.exceptions import AssignmentException, PoolConfigurationException
from app.core.logging import get_performance_logger, scheduler_logger
from app.schemas.common import PolicyEnum, SplitMode
from app.schemas.workload import ClusterConfig, JobSpec, Workload
from app.services.johnson import (
    OrderedSequence,
    closed_form_makespan,
    durations_of,
    johnson_order,
)
from app.services.workload_model import (
    ScaledJob,
    scale_clamped,
    scale_to_cluster,
    validate_workload,
)
from app.worker.config import ParallelConfig
from app.worker.pool import parallel_map

SOURCE_SEARCH = "search"
SOURCE_PINNED = "pinned"


@dataclass(frozen=True)
class PoolSchedule:
    """一个资源池内的执行计划；jobs 与 sequence 顺序一致"""
    cluster: ClusterConfig
    sequence: OrderedSequence
    jobs: Tuple[ScaledJob, ...]
    predicted_makespan: Optional[Fraction] = None

    @property
    def job_ids(self) -> Tuple[str, ...]:
        return self.sequence.job_ids


@dataclass(frozen=True)
class Schedule:
    policy: PolicyEnum
    pools: Tuple[PoolSchedule, ...]
    predicted_makespan: Optional[Fraction] = None
    # BalancedPools 的资源池来源：search / pinned
    pools_source: Optional[str] = None

    @property
    def order(self) -> List[str]:
        """全部作业 id，按资源池依次拼接"""
        return [job_id for pool in self.pools for job_id in pool.job_ids]

    @property
    def pool_makespans(self) -> List[Optional[Fraction]]:
        return [pool.predicted_makespan for pool in self.pools]

    def scaled_job(self, job_id: str) -> ScaledJob:
        for pool in self.pools:
            for job in pool.jobs:
                if job.id == job_id:
                    return job
        raise KeyError(job_id)


def _pool_from_scaled(
    cluster: ClusterConfig,
    scaled: Sequence[ScaledJob],
    predict: bool = True,
    sequence: Optional[OrderedSequence] = None,
) -> PoolSchedule:
    if sequence is None:
        sequence = johnson_order(durations_of(scaled))
    by_id = {job.id: job for job in scaled}
    predicted = closed_form_makespan(sequence).makespan if predict else None
    return PoolSchedule(
        cluster=cluster,
        sequence=sequence,
        jobs=tuple(by_id[job_id] for job_id in sequence.job_ids),
        predicted_makespan=predicted,
    )


def uaas_schedule(w: Workload) -> Schedule:
    """UAAS：每个作业在两个阶段都使用整个集群"""
    validate_workload(w)
    scaled = [scale_to_cluster(job, w.cluster) for job in w.jobs]
    pool = _pool_from_scaled(w.cluster, scaled)

    scheduler_logger.debug(
        f"UAAS 顺序 {list(pool.job_ids)}，预测完工时间 {pool.predicted_makespan}"
    )
    return Schedule(
        policy=PolicyEnum.UAAS,
        pools=(pool,),
        predicted_makespan=pool.predicted_makespan,
    )


def mk_jr_order(scaled: Sequence[ScaledJob]) -> OrderedSequence:
    """J_A = {map < reduce} 按 map 非降序，其余作业按 reduce 非增序排在后面

    与 Johnson 规则的区别：map 与 reduce 相等的作业归入 J_B。
    """
    j_a = []
    j_b = []
    for index, (job_id, m, r) in enumerate(durations_of(scaled)):
        if m < r:
            j_a.append(((m, index), (job_id, m, r)))
        else:
            j_b.append(((-r, index), (job_id, m, r)))
    j_a.sort(key=lambda entry: entry[0])
    j_b.sort(key=lambda entry: entry[0])
    return OrderedSequence.from_items(item for _, item in j_a + j_b)


def mk_jr_schedule(w: Workload) -> Schedule:
    """MK_JR：作业按自身请求的槽位运行（超出容量时截断并按比例律缩放）

    部分分配的作业可以并发执行，闭式完工时间不再适用，预测值留空，由仿真给出。
    """
    validate_workload(w)
    scaled = [scale_clamped(job, w.cluster) for job in w.jobs]
    sequence = mk_jr_order(scaled)
    pool = _pool_from_scaled(w.cluster, scaled, predict=False, sequence=sequence)

    scheduler_logger.debug(f"MK_JR 顺序 {list(pool.job_ids)}")
    return Schedule(policy=PolicyEnum.MK_JR, pools=(pool,))


def ordered_schedule(w: Workload, job_ids: Sequence[str]) -> Schedule:
    """按给定顺序、全集群分配构造 CUSTOM 调度（用于排列搜索与 ρ 扫描的交叉验证）"""
    validate_workload(w)
    missing = set(w.job_ids) ^ set(job_ids)
    if missing or len(set(job_ids)) != len(job_ids):
        raise AssignmentException("给定顺序必须恰好包含每个作业一次", sorted(missing))
    scaled = {job.id: scale_to_cluster(job, w.cluster) for job in w.jobs}
    sequence = OrderedSequence.from_items(durations_of(scaled[job_id] for job_id in job_ids))
    pool = _pool_from_scaled(w.cluster, list(scaled.values()), sequence=sequence)
    return Schedule(
        policy=PolicyEnum.CUSTOM,
        pools=(pool,),
        predicted_makespan=pool.predicted_makespan,
    )


# ============= BalancedPools =============

def _pool_makespan(jobs: Sequence[JobSpec], cluster: ClusterConfig) -> Fraction:
    if not jobs:
        return Fraction(0)
    scaled = [scale_clamped(job, cluster) for job in jobs]
    return closed_form_makespan(johnson_order(durations_of(scaled))).makespan


def _greedy_assignment(
    jobs: Sequence[JobSpec],
    split: Tuple[ClusterConfig, ClusterConfig],
) -> Tuple[List[JobSpec], List[JobSpec]]:
    """按 T^M + T^R 降序逐个放置作业

    选择使 max(两池预测完工时间) 增加最少的池；相同则取加入后池完工时间较小者，再相同取池 1。
    """
    ranked = sorted(
        enumerate(jobs),
        key=lambda item: (-(item[1].map_duration + item[1].reduce_duration), item[0]),
    )
    assigned: Tuple[List[JobSpec], List[JobSpec]] = ([], [])
    current = [Fraction(0), Fraction(0)]

    for _, job in ranked:
        candidates = []
        for index, cluster in enumerate(split):
            value = _pool_makespan(assigned[index] + [job], cluster)
            worst = max(value, current[1 - index])
            candidates.append((worst, value, index))
        _, best_value, best_pool = min(candidates)
        assigned[best_pool].append(job)
        current[best_pool] = best_value

    # 池内按提交顺序保留作业，Johnson 排序在之后进行
    position = {job.id: index for index, job in enumerate(jobs)}
    return (
        sorted(assigned[0], key=lambda job: position[job.id]),
        sorted(assigned[1], key=lambda job: position[job.id]),
    )


def candidate_splits(
    cluster: ClusterConfig,
    mode: SplitMode = SplitMode.PROPORTIONAL,
) -> List[Tuple[ClusterConfig, ClusterConfig]]:
    """枚举两池切分 (s, |S^M|-s) x (r, |S^R|-r)

    proportional 网格取 r = s·|S^R|/|S^M| 为整数的切分；集群没有这样的切分时
    （如 6x7）对每个 s 取最接近的 r，截断到 [1, |S^R|-1]。

    Raises:
        PoolConfigurationException: 任一阶段槽位 < 2
    """
    if cluster.map_slots < 2 or cluster.reduce_slots < 2:
        raise PoolConfigurationException(
            f"集群 {cluster.label()} 无法切分为两个资源池，每个阶段至少需要 2 个槽位",
            cluster.map_slots,
            cluster.reduce_slots,
        )

    if mode == SplitMode.FULL_GRID:
        pairs = [(s, r) for s in range(1, cluster.map_slots) for r in range(1, cluster.reduce_slots)]
    else:
        pairs = _proportional_pairs(cluster)

    return [
        (
            ClusterConfig(map_slots=s, reduce_slots=r),
            ClusterConfig(map_slots=cluster.map_slots - s, reduce_slots=cluster.reduce_slots - r),
        )
        for s, r in pairs
    ]


def _proportional_pairs(cluster: ClusterConfig) -> List[Tuple[int, int]]:
    targets = [
        (s, Fraction(s * cluster.reduce_slots, cluster.map_slots))
        for s in range(1, cluster.map_slots)
    ]
    exact = [(s, int(r)) for s, r in targets if r.denominator == 1]
    if exact:
        return exact

    # 四舍五入，.5 向上
    pairs = [
        (s, min(max(math.floor(r + Fraction(1, 2)), 1), cluster.reduce_slots - 1))
        for s, r in targets
    ]
    scheduler_logger.debug(f"集群 {cluster.label()} 没有等比例切分，使用最近整数切分 {pairs}")
    return pairs


def _evaluate_split(args) -> Tuple[Fraction, int, int, Tuple[Tuple[str, ...], Tuple[str, ...]]]:
    """进程池工作单元：返回 (max 池完工时间, s, r, 分配)"""
    jobs, split = args
    pool1, pool2 = _greedy_assignment(jobs, split)
    worst = max(_pool_makespan(pool1, split[0]), _pool_makespan(pool2, split[1]))
    return (
        worst,
        split[0].map_slots,
        split[0].reduce_slots,
        (tuple(job.id for job in pool1), tuple(job.id for job in pool2)),
    )


def balanced_pools_schedule(
    w: Workload,
    mode: Optional[SplitMode] = None,
    parallel_config: Optional[ParallelConfig] = None,
) -> Schedule:
    """BalancedPools：搜索两池切分与贪心分配，取最大池完工时间最小者（相同取最小 s）

    不超过一个作业时退化为单池：池 1 为整个集群，池 2 为空。
    """
    validate_workload(w)
    if len(w.jobs) <= 1:
        return _build_pools_schedule(
            w,
            (w.cluster, ClusterConfig(map_slots=0, reduce_slots=0)),
            (w.job_ids, ()),
            SOURCE_SEARCH,
        )

    mode = SplitMode(mode or settings.BALANCED_POOLS_SPLIT_MODE)
    splits = candidate_splits(w.cluster, mode)

    started = time.monotonic()
    results = parallel_map(
        _evaluate_split,
        [(tuple(w.jobs), split) for split in splits],
        parallel_config,
    )
    best = min(results, key=lambda item: (item[0], item[1], item[2]))
    get_performance_logger().log_search('balanced_pools', time.monotonic() - started, len(splits))

    worst, s, r, assignment = best
    split = (
        ClusterConfig(map_slots=s, reduce_slots=r),
        ClusterConfig(map_slots=w.cluster.map_slots - s, reduce_slots=w.cluster.reduce_slots - r),
    )
    scheduler_logger.debug(
        f"BalancedPools 选中切分 {split[0].label()} / {split[1].label()}，"
        f"最大池完工时间 {worst}"
    )
    return _build_pools_schedule(w, split, assignment, SOURCE_SEARCH)


def _build_pools_schedule(
    w: Workload,
    split: Tuple[ClusterConfig, ClusterConfig],
    assignment: Tuple[Sequence[str], Sequence[str]],
    source: str,
) -> Schedule:
    pools = []
    for cluster, job_ids in zip(split, assignment):
        scaled = [scale_clamped(w.job_by_id(job_id), cluster) for job_id in job_ids]
        pools.append(_pool_from_scaled(cluster, scaled))
    return Schedule(
        policy=PolicyEnum.BALANCED_POOLS,
        pools=tuple(pools),
        predicted_makespan=max(pool.predicted_makespan for pool in pools),
        pools_source=source,
    )


def fix_pools_and_assignment(
    w: Workload,
    split: Tuple[ClusterConfig, ClusterConfig],
    assignment: Tuple[Sequence[str], Sequence[str]],
) -> Schedule:
    """使用给定的切分与分配，池内按 Johnson 规则排序

    Raises:
        AssignmentException: 作业重复分配、缺失或不存在
        PoolConfigurationException: 切分超出集群容量
    """
    validate_workload(w)
    if len(split) != 2 or len(assignment) != 2:
        raise PoolConfigurationException("资源池方案必须恰好包含两个池")

    used_map = split[0].map_slots + split[1].map_slots
    used_reduce = split[0].reduce_slots + split[1].reduce_slots
    if used_map > w.cluster.map_slots or used_reduce > w.cluster.reduce_slots:
        raise PoolConfigurationException(
            f"资源池合计 {used_map}x{used_reduce} 超出集群 {w.cluster.label()}",
            used_map,
            used_reduce,
        )
    for cluster in split:
        if cluster.map_slots < 1 or cluster.reduce_slots < 1:
            raise PoolConfigurationException(
                f"资源池 {cluster.label()} 每个阶段至少需要 1 个槽位",
                cluster.map_slots,
                cluster.reduce_slots,
            )

    counts: Dict[str, int] = {}
    for job_ids in assignment:
        for job_id in job_ids:
            counts[job_id] = counts.get(job_id, 0) + 1
    duplicated = sorted(job_id for job_id, count in counts.items() if count > 1)
    if duplicated:
        raise AssignmentException(f"作业被重复分配: {duplicated}", duplicated)
    unknown = sorted(set(counts) - set(w.job_ids))
    if unknown:
        raise AssignmentException(f"分配中包含未知作业: {unknown}", unknown)
    missing = [job_id for job_id in w.job_ids if job_id not in counts]
    if missing:
        raise AssignmentException(f"作业未分配到任何资源池: {missing}", missing)

    return _build_pools_schedule(w, tuple(split), tuple(assignment), SOURCE_PINNED)


def pinned_or_searched_pools(w: Workload) -> Schedule:
    """工作负载携带 pool_plan 时使用固定方案，否则搜索"""
    if w.pool_plan is not None:
        return fix_pools_and_assignment(w, w.pool_plan.split, w.pool_plan.assignment)
    return balanced_pools_schedule(w)

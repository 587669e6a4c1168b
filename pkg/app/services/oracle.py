"""
分析与 Oracle 服务

- 暴力排列搜索（独立于 Johnson 规则的最优性校验）
- σ 界与最坏情况构造
- 均匀缩放下的顺序稳定性检查
- map/reduce 槽位比 ρ 扫描
- 三种策略的对比报告
"""

import math
import time
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from app.config.settings import ORACLE_HARD_LIMIT, settings
from app.core.exceptions import (
    OracleSizeException,
    ParameterException,
    PoolConfigurationException,
    TaskDataException,
    UndefinedSigmaException,
)
from app.core.logging import get_performance_logger, oracle_logger
from app.schemas.common import PolicyEnum, Stage
from app.schemas.report import (
    ComparisonReport,
    OracleResult,
    PolicyResult,
    RatioSweepPoint,
    RatioSweepResult,
    SigmaReport,
    StabilityEntry,
    StabilityReport,
)
from app.schemas.workload import ClusterConfig, JobSpec, Workload
from app.services.johnson import JobDurations, OrderedSequence, durations_of
from app.services.schedulers import (
    mk_jr_schedule,
    pinned_or_searched_pools,
    uaas_schedule,
)
from app.services.simulator import simulate_verified
from app.services.workload_model import total_work, validate_workload
from app.utils.rational_utils import parse_rational
from app.worker.config import ParallelConfig
from app.worker.pool import parallel_map


# ============= 暴力排列搜索 =============

def _to_integers(jobs: Sequence[JobDurations]) -> Tuple[List[int], List[int], int]:
    """按全部分母的最小公倍数放大为整数，搜索内部只做整数运算"""
    denominators = [Fraction(m).denominator for _, m, _ in jobs]
    denominators += [Fraction(r).denominator for _, _, r in jobs]
    scale = math.lcm(*denominators) if denominators else 1
    maps = [int(Fraction(m) * scale) for _, m, _ in jobs]
    reduces = [int(Fraction(r) * scale) for _, _, r in jobs]
    return maps, reduces, scale


def _search_from_first(args) -> Tuple[Optional[int], Tuple[int, ...]]:
    """固定首个作业，按字典序深度优先搜索；返回 (最优值, 排列)，只保留最先找到的最优排列"""
    first, maps, reduces = args
    n = len(maps)
    best_value: Optional[int] = None
    best_perm: Tuple[int, ...] = ()
    used = [False] * n
    perm: List[int] = []

    def visit(map_end: int, completion: int, rest_map: int, rest_reduce: int) -> None:
        nonlocal best_value, best_perm
        if len(perm) == n:
            if best_value is None or completion < best_value:
                best_value = completion
                best_perm = tuple(perm)
            return
        if best_value is not None:
            min_reduce = min(reduces[i] for i in range(n) if not used[i])
            lower = max(completion + rest_reduce, map_end + rest_map + min_reduce)
            if lower >= best_value:
                return
        for i in range(n):
            if used[i]:
                continue
            used[i] = True
            perm.append(i)
            end = map_end + maps[i]
            visit(end, max(end, completion) + reduces[i], rest_map - maps[i], rest_reduce - reduces[i])
            perm.pop()
            used[i] = False

    used[first] = True
    perm.append(first)
    visit(
        maps[first],
        maps[first] + reduces[first],
        sum(maps) - maps[first],
        sum(reduces) - reduces[first],
    )
    return best_value, best_perm


def brute_force_best_order(
    jobs: Sequence[JobDurations],
    limit: Optional[int] = None,
    parallel_config: Optional[ParallelConfig] = None,
) -> Tuple[OrderedSequence, Fraction]:
    """枚举全部排列求闭式完工时间的精确最小值

    最优值相同的排列按输入位置的字典序取最小者；按首个作业拆分后可并行，结果与串行一致。

    Raises:
        OracleSizeException: 作业数超过上限（默认 ORACLE_MAX_JOBS，任何情况下不超过 ORACLE_HARD_LIMIT）
    """
    jobs = list(jobs)
    limit = min(limit or settings.ORACLE_MAX_JOBS, ORACLE_HARD_LIMIT)
    if len(jobs) > limit:
        raise OracleSizeException(len(jobs), limit)
    if not jobs:
        return OrderedSequence((), ()), Fraction(0)

    maps, reduces, scale = _to_integers(jobs)
    started = time.monotonic()
    results = parallel_map(
        _search_from_first,
        [(first, maps, reduces) for first in range(len(jobs))],
        parallel_config,
    )
    value, perm = min(results, key=lambda item: (item[0], item[1]))
    get_performance_logger().log_search('permutations', time.monotonic() - started, math.factorial(len(jobs)))

    sequence = OrderedSequence.from_items(jobs[i] for i in perm)
    return sequence, Fraction(value, scale)


# ============= σ 界 =============

def sigma_bound(w: Workload) -> SigmaReport:
    """以 UAAS 缩放后的 Johnson 顺序计算 σ，并检查 MK_JR 仿真结果是否落在界内

    σ 的分子取 map 前缀和最大值加上单个作业 reduce 时长的最大值：
    单作业时 σ = 1，两作业最坏构造时 σ = (2C0+1)/(C0+2)。

    Raises:
        UndefinedSigmaException: 最优完工时间为 0
    """
    uaas = uaas_schedule(w)
    optimal = uaas.predicted_makespan
    if not optimal:
        raise UndefinedSigmaException()

    sequence = uaas.pools[0].sequence
    prefix_map = Fraction(0)
    prefix_reduce = Fraction(0)
    max_prefix_map = Fraction(0)
    max_prefix_reduce = Fraction(0)
    for m, r in sequence.durations:
        prefix_map += m
        prefix_reduce += r
        max_prefix_map = max(max_prefix_map, prefix_map)
        max_prefix_reduce = max(max_prefix_reduce, prefix_reduce)
    max_single_reduce = max(r for _, r in sequence.durations)

    sigma = (max_prefix_map + max_single_reduce) / optimal
    bound = 1 + sigma
    mk_jr = simulate_verified(mk_jr_schedule(w), w.cluster).makespan
    prefix_bound = optimal + max_prefix_map + max_prefix_reduce

    report = SigmaReport(
        sigma=sigma,
        bound=bound,
        optimal_makespan=optimal,
        order=sequence.job_ids,
        max_prefix_map=max_prefix_map,
        max_prefix_reduce=max_prefix_reduce,
        max_single_reduce=max_single_reduce,
        prefix_sigma=(max_prefix_map + max_prefix_reduce) / optimal,
        mk_jr_makespan=mk_jr,
        mk_jr_within_bound=mk_jr <= bound * optimal,
        prefix_bound_makespan=prefix_bound,
        mk_jr_within_prefix_bound=mk_jr <= prefix_bound,
    )
    oracle_logger.debug(f"σ = {sigma}, 1 + σ = {bound}, Ĉ_max = {optimal}, MK_JR = {mk_jr}")
    return report


def worst_case_instance(c0, cluster: Optional[ClusterConfig] = None) -> Workload:
    """两作业最坏构造：(1, C0) 与 (C0, 1)，均请求整个集群

    Raises:
        ParameterException: C0 <= 1
    """
    try:
        c0 = parse_rational(c0)
    except ValueError as e:
        raise ParameterException(f"C0 无法解析: {e}", field="c0", value=c0) from e
    if c0 <= 1:
        raise ParameterException("C0 必须 > 1", field="c0", value=c0)

    cluster = cluster or ClusterConfig(map_slots=1, reduce_slots=1)
    return Workload(
        jobs=(
            JobSpec(
                id='J1', map_demand=cluster.map_slots, reduce_demand=cluster.reduce_slots,
                map_duration=Fraction(1), reduce_duration=c0,
            ),
            JobSpec(
                id='J2', map_demand=cluster.map_slots, reduce_demand=cluster.reduce_slots,
                map_duration=c0, reduce_duration=Fraction(1),
            ),
        ),
        cluster=cluster,
    )


# ============= 稳定性 =============

def _stability_entry(w: Workload, rho0: Fraction) -> StabilityEntry:
    after = w.cluster.scaled(1 / rho0)
    scaled_workload = w.with_cluster(after)

    uaas_before = uaas_schedule(w)
    uaas_after = uaas_schedule(scaled_workload)
    mk_jr_before = mk_jr_schedule(w)
    mk_jr_after = mk_jr_schedule(scaled_workload)

    return StabilityEntry(
        rho0=rho0,
        cluster_before=w.cluster,
        cluster_after=after,
        uaas_order_before=tuple(uaas_before.order),
        uaas_order_after=tuple(uaas_after.order),
        uaas_makespan_before=uaas_before.predicted_makespan,
        uaas_makespan_after=uaas_after.predicted_makespan,
        mk_jr_order_before=tuple(mk_jr_before.order),
        mk_jr_order_after=tuple(mk_jr_after.order),
        mk_jr_makespan_before=simulate_verified(mk_jr_before, w.cluster).makespan,
        mk_jr_makespan_after=simulate_verified(mk_jr_after, after).makespan,
    )


def stability_check(
    w: Workload,
    scale_factors: Optional[Sequence] = None,
    nodes: Optional[Tuple[int, int]] = None,
) -> StabilityReport:
    """均匀改变槽位数后重新计算 UAAS 与 MK_JR

    scale_factors 中的 ρ0 = 原槽位数 / 新槽位数；nodes = (原节点数, 新节点数) 等价于 ρ0 = 原 / 新。

    Raises:
        ParameterException: ρ0 <= 0 或缩放后的槽位不是正整数
    """
    validate_workload(w)
    factors = [parse_rational(f) for f in (scale_factors or [])]
    if nodes is not None:
        before, after = nodes
        if before < 1 or after < 1:
            raise ParameterException("节点数必须 >= 1", field="nodes", value=nodes)
        factors.append(Fraction(before, after))
    if not factors:
        raise ParameterException("至少需要一个缩放因子或节点数变化", field="scale")
    for factor in factors:
        if factor <= 0:
            raise ParameterException("ρ0 必须 > 0", field="scale", value=factor)

    return StabilityReport(entries=tuple(_stability_entry(w, factor) for factor in factors))


# ============= ρ 扫描 =============

def _task_works(w: Workload, job_ids: Sequence[str]) -> List[Tuple[Fraction, Fraction]]:
    works = []
    for job_id in job_ids:
        job = w.job_by_id(job_id)
        if job.map_tasks is None:
            raise TaskDataException(job.id, Stage.MAP.value)
        if job.reduce_tasks is None:
            raise TaskDataException(job.id, Stage.REDUCE.value)
        works.append((total_work(job.map_tasks), total_work(job.reduce_tasks)))
    return works


def split_makespan(works: Sequence[Tuple[Fraction, Fraction]], map_slots: int, reduce_slots: int) -> Fraction:
    """固定顺序下所有作业使用全部槽位的完工时间

    C = max_k (Σ_{i≤k} W_i^M / m + Σ_{i≥k} W_i^R / r)
    """
    if not works:
        return Fraction(0)
    reduce_suffix = sum((r for _, r in works), Fraction(0))
    map_prefix = Fraction(0)
    best = Fraction(0)
    for m, r in works:
        map_prefix += m
        best = max(best, map_prefix / map_slots + reduce_suffix / reduce_slots)
        reduce_suffix -= r
    return best


def _sweep_point(args) -> RatioSweepPoint:
    works, map_slots, reduce_slots = args
    return RatioSweepPoint(
        rho=Fraction(map_slots, reduce_slots),
        map_slots=map_slots,
        reduce_slots=reduce_slots,
        makespan=split_makespan(works, map_slots, reduce_slots),
    )


def _resolve_order(w: Workload, order) -> Tuple[str, ...]:
    if order is None:
        return tuple(uaas_schedule(w).order)
    job_ids = tuple(order.job_ids if isinstance(order, OrderedSequence) else order)
    if sorted(job_ids) != sorted(w.job_ids) or len(set(job_ids)) != len(job_ids):
        raise ParameterException("扫描顺序必须恰好包含每个作业一次", field="order", value=list(job_ids))
    return job_ids


def ratio_sweep(
    w: Workload,
    total_slots: int,
    order: Union[OrderedSequence, Sequence[str], None] = None,
    parallel_config: Optional[ParallelConfig] = None,
) -> RatioSweepResult:
    """在固定总槽位下枚举整数切分 (m, total - m)，m ∈ [1, total - 1]

    order 缺省时使用原集群上的 UAAS 顺序。最优点相同取 ρ 最小者。

    Raises:
        ParameterException: total_slots < 2 或顺序不完整
        TaskDataException: 作业缺少任务级执行时间
    """
    validate_workload(w)
    if not isinstance(total_slots, int) or total_slots < 2:
        raise ParameterException("总槽位数必须是 >= 2 的整数", field="total_slots", value=total_slots)

    job_ids = _resolve_order(w, order)
    works = _task_works(w, job_ids)

    started = time.monotonic()
    points = parallel_map(
        _sweep_point,
        [(works, m, total_slots - m) for m in range(1, total_slots)],
        parallel_config,
    )
    best = min(points, key=lambda point: (point.makespan, point.rho))
    get_performance_logger().log_search('ratio_sweep', time.monotonic() - started, len(points))

    oracle_logger.debug(
        f"ρ 扫描 budget={total_slots}: 最优 {best.map_slots}x{best.reduce_slots}, 完工时间 {best.makespan}"
    )
    return RatioSweepResult(
        total_slots=total_slots,
        order=job_ids,
        points=tuple(points),
        best=best,
    )


def budget_sweep(
    w: Workload,
    budgets: Sequence[int],
    order: Union[OrderedSequence, Sequence[str], None] = None,
) -> List[RatioSweepResult]:
    """对多个总槽位预算重复 ρ 扫描；固定顺序下最优完工时间随预算不增"""
    return [ratio_sweep(w, budget, order) for budget in sorted(budgets)]


# ============= 对比报告 =============

def _policy_result(name: str, schedule, makespan: Fraction, uaas_makespan: Fraction) -> PolicyResult:
    gap = ratio = reduction = None
    if uaas_makespan:
        ratio = makespan / uaas_makespan
        gap = ratio - 1
    if makespan:
        reduction = 1 - uaas_makespan / makespan
    return PolicyResult(
        policy=name,
        order=tuple(schedule.order),
        makespan=makespan,
        predicted_makespan=schedule.predicted_makespan,
        pool_makespans=tuple(schedule.pool_makespans) if len(schedule.pools) > 1 else (),
        gap_vs_uaas=gap,
        approximation_ratio=ratio,
        reduction_vs_policy=reduction,
        pools_source=schedule.pools_source,
    )


def compare_report(w: Workload) -> ComparisonReport:
    """运行三种策略并仿真，附带 σ 报告与（n ≤ ORACLE_MAX_JOBS 时）暴力搜索结果

    makespan 一律取校验通过的仿真值；BalancedPools 的闭式预测保留在
    predicted_makespan 与 pool_makespans 中。工作负载带 pool_plan 时使用固定方案。

    Raises:
        TimelineInvalidException: 任一策略的仿真时间线未通过校验
    """
    validate_workload(w)
    schedules = [
        (PolicyEnum.UAAS.value, uaas_schedule(w)),
        (PolicyEnum.MK_JR.value, mk_jr_schedule(w)),
    ]
    try:
        schedules.append((PolicyEnum.BALANCED_POOLS.value, pinned_or_searched_pools(w)))
    except PoolConfigurationException as e:
        oracle_logger.warning(f"跳过 BalancedPools: {e.detail}")

    makespans = [simulate_verified(schedule, w.cluster).makespan for _, schedule in schedules]
    uaas_makespan = makespans[0]
    policies = [
        _policy_result(name, schedule, makespan, uaas_makespan)
        for (name, schedule), makespan in zip(schedules, makespans)
    ]

    sigma = sigma_bound(w) if uaas_makespan else None

    oracle = None
    if len(w.jobs) <= settings.ORACLE_MAX_JOBS:
        uaas_jobs = schedules[0][1].pools[0].jobs
        sequence, best = brute_force_best_order(durations_of(uaas_jobs))
        oracle = OracleResult(order=sequence.job_ids, makespan=best, matches_uaas=best == uaas_makespan)

    return ComparisonReport(
        cluster=w.cluster,
        policies=tuple(policies),
        sigma=sigma,
        oracle=oracle,
    )

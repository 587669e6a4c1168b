"""
Johnson 两阶段排序与闭式完工时间

适用前提：每个作业在每个阶段独占整个阶段资源（map 槽位整体视为一台机器，
reduce 槽位整体视为另一台）。此时 Johnson 规则给出最小完工时间的顺序，
完工时间为 ΣT^R + max_u K_u，K_u = Σ_{i≤u} T^M − Σ_{i≤u−1} T^R。
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from app.core.exceptions import ParameterException
from app.schemas.common import JobType
from app.services.workload_model import ScaledJob, classify_job

# (job_id, map 时长, reduce 时长)
JobDurations = Tuple[str, Fraction, Fraction]


@dataclass(frozen=True)
class OrderedSequence:
    """执行顺序及与之对齐的 (map, reduce) 有效时长"""
    job_ids: Tuple[str, ...]
    durations: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if len(self.job_ids) != len(self.durations):
            raise ParameterException(
                f"顺序长度 {len(self.job_ids)} 与时长长度 {len(self.durations)} 不一致",
                field="durations",
            )
        if len(set(self.job_ids)) != len(self.job_ids):
            raise ParameterException("顺序中存在重复作业", field="job_ids", value=list(self.job_ids))

    def __len__(self) -> int:
        return len(self.job_ids)

    def items(self) -> List[JobDurations]:
        return [(job_id, m, r) for job_id, (m, r) in zip(self.job_ids, self.durations)]

    def scaled(self, factor: Fraction) -> "OrderedSequence":
        return OrderedSequence(
            job_ids=self.job_ids,
            durations=tuple((m * factor, r * factor) for m, r in self.durations),
        )

    @classmethod
    def from_items(cls, items: Iterable[JobDurations]) -> "OrderedSequence":
        items = list(items)
        return cls(
            job_ids=tuple(job_id for job_id, _, _ in items),
            durations=tuple((Fraction(m), Fraction(r)) for _, m, r in items),
        )


@dataclass(frozen=True)
class MakespanBreakdown:
    """闭式完工时间及其构成"""
    makespan: Fraction
    prefix_terms: Tuple[Fraction, ...]
    # 1 起始；空序列为 None
    critical_u: Optional[int]
    idle_gap: Fraction


def durations_of(jobs: Iterable[ScaledJob]) -> List[JobDurations]:
    return [(job.id, job.eff_map_duration, job.eff_reduce_duration) for job in jobs]


def _check_non_negative(jobs: Sequence[JobDurations]) -> None:
    for job_id, m, r in jobs:
        if m < 0 or r < 0:
            raise ParameterException(
                f"作业 {job_id} 的时长必须 >= 0: ({m}, {r})",
                field="durations",
            )


def johnson_order(jobs: Sequence[JobDurations]) -> OrderedSequence:
    """Johnson 规则排序

    - Map 型（map ≤ reduce，相等归为 Map 型）排在前面，按 map 非降序
    - Reduce 型排在后面，按 reduce 非增序
    - 键相同时输入位置靠前的作业在前
    """
    jobs = list(jobs)
    _check_non_negative(jobs)

    map_type = []
    reduce_type = []
    for index, (job_id, m, r) in enumerate(jobs):
        if classify_job(m, r) == JobType.MAP_TYPE:
            map_type.append((m, index, job_id, m, r))
        else:
            reduce_type.append((-r, index, job_id, m, r))

    map_type.sort(key=lambda item: (item[0], item[1]))
    reduce_type.sort(key=lambda item: (item[0], item[1]))

    return OrderedSequence.from_items(
        (job_id, m, r) for _, _, job_id, m, r in map_type + reduce_type
    )


def johnson_order_by_selection(jobs: Sequence[JobDurations]) -> OrderedSequence:
    """逐次选取全局最短时长的构造方式

    每轮在剩余作业中找最短的单个时长（相同取输入位置最小者；同一作业 map 与 reduce
    相等按 map 处理）。Map 型从前往后放，Reduce 型从后往前放。
    与 johnson_order 的差别只在 reduce 时长相同的 Reduce 型作业之间的相对次序，完工时间相同。
    """
    jobs = list(jobs)
    _check_non_negative(jobs)

    n = len(jobs)
    slots: List[Optional[JobDurations]] = [None] * n
    front, back = 0, n - 1
    remaining = list(range(n))

    while remaining:
        best = min(remaining, key=lambda i: (min(jobs[i][1], jobs[i][2]), i))
        job_id, m, r = jobs[best]
        if classify_job(m, r) == JobType.MAP_TYPE:
            slots[front] = jobs[best]
            front += 1
        else:
            slots[back] = jobs[best]
            back -= 1
        remaining.remove(best)

    return OrderedSequence.from_items(item for item in slots if item is not None)


def closed_form_makespan(seq: OrderedSequence) -> MakespanBreakdown:
    """C_max = Σ T^R + max_u K_u，空序列约定为 0"""
    if len(seq) == 0:
        return MakespanBreakdown(
            makespan=Fraction(0),
            prefix_terms=(),
            critical_u=None,
            idle_gap=Fraction(0),
        )

    prefix_terms = []
    map_prefix = Fraction(0)
    reduce_prefix = Fraction(0)
    for m, r in seq.durations:
        map_prefix += m
        # K_u 中 reduce 前缀只累加到 u-1
        prefix_terms.append(map_prefix - reduce_prefix)
        reduce_prefix += r

    idle_gap = max(prefix_terms)
    critical_u = prefix_terms.index(idle_gap) + 1

    return MakespanBreakdown(
        makespan=reduce_prefix + idle_gap,
        prefix_terms=tuple(prefix_terms),
        critical_u=critical_u,
        idle_gap=idle_gap,
    )


def pipeline_completion_times(seq: OrderedSequence) -> List[Fraction]:
    """流水线递推: c_i = max(Σ_{k≤i} T^M, c_{i-1}) + T_i^R，c_0 = 0"""
    completion = []
    map_end = Fraction(0)
    previous = Fraction(0)
    for m, r in seq.durations:
        map_end += m
        previous = max(map_end, previous) + r
        completion.append(previous)
    return completion

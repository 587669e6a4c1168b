"""
随机工作负载生成器

同一 seed 生成完全相同的工作负载：时长为分母不超过上限的有理数，
需求为不超过集群容量的整数，全部由 random.Random(seed) 按固定顺序抽取。
"""

import math
import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from app.config.settings import settings
from app.core.exceptions import ParameterException
from app.schemas.workload import ClusterConfig, JobSpec, Workload
from app.utils.rational_utils import parse_rational

SEED_LIMIT = 2 ** 64


def _rational_range(value: Sequence, name: str) -> Tuple[Fraction, Fraction]:
    if len(value) != 2:
        raise ParameterException(f"{name} 必须是 [下界, 上界]", field=name, value=value)
    try:
        low, high = parse_rational(value[0]), parse_rational(value[1])
    except ValueError as e:
        raise ParameterException(f"{name} 无法解析: {e}", field=name, value=value) from e
    if low < 0 or low > high:
        raise ParameterException(f"{name} 为空或包含负数: [{low}, {high}]", field=name, value=value)
    return low, high


def _int_range(value: Sequence[int], name: str) -> Tuple[int, int]:
    if len(value) != 2:
        raise ParameterException(f"{name} 必须是 [下界, 上界]", field=name, value=value)
    low, high = int(value[0]), int(value[1])
    if low < 1 or low > high:
        raise ParameterException(f"{name} 为空或下界 < 1: [{low}, {high}]", field=name, value=value)
    return low, high


def _denominator_choices(low: Fraction, high: Fraction, max_denominator: int) -> List[int]:
    """区间内至少有一个 p/q 的分母 q"""
    return [
        q for q in range(1, max_denominator + 1)
        if math.ceil(low * q) <= math.floor(high * q)
    ]


def _draw_duration(rng: random.Random, low: Fraction, high: Fraction, denominators: List[int]) -> Fraction:
    q = rng.choice(denominators)
    p = rng.randint(math.ceil(low * q), math.floor(high * q))
    return Fraction(p, q)


def generate_workload(
    seed: int,
    n: int,
    duration_range: Sequence = (1, 10),
    demand_range: Sequence[int] = (1, 1),
    cluster: Optional[ClusterConfig] = None,
    max_denominator: Optional[int] = None,
) -> Workload:
    """生成 n 个作业的随机工作负载

    Raises:
        ParameterException: n < 1、seed 越界、区间为空，或需求下界超过集群容量
    """
    if not isinstance(seed, int) or not 0 <= seed < SEED_LIMIT:
        raise ParameterException("seed 必须是 64 位无符号整数", field="seed", value=seed)
    if n < 1:
        raise ParameterException("作业数必须 >= 1", field="n", value=n)

    cluster = cluster or ClusterConfig(map_slots=10, reduce_slots=10)
    max_denominator = max_denominator or settings.GENERATOR_MAX_DENOMINATOR
    low, high = _rational_range(duration_range, "duration_range")
    demand_low, demand_high = _int_range(demand_range, "demand_range")

    if demand_low > min(cluster.map_slots, cluster.reduce_slots):
        raise ParameterException(
            f"需求下界 {demand_low} 超过集群容量 {cluster.label()}",
            field="demand_range",
            value=demand_range,
        )
    denominators = _denominator_choices(low, high, max_denominator)
    if not denominators:
        raise ParameterException(
            f"区间 [{low}, {high}] 内没有分母 <= {max_denominator} 的有理数",
            field="duration_range",
            value=duration_range,
        )

    rng = random.Random(seed)
    jobs = []
    for index in range(1, n + 1):
        jobs.append(JobSpec(
            id=f"J{index}",
            map_demand=rng.randint(demand_low, min(demand_high, cluster.map_slots)),
            reduce_demand=rng.randint(demand_low, min(demand_high, cluster.reduce_slots)),
            map_duration=_draw_duration(rng, low, high, denominators),
            reduce_duration=_draw_duration(rng, low, high, denominators),
        ))
    return Workload(jobs=tuple(jobs), cluster=cluster)

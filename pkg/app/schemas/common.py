"""
通用数据模型

定义阶段、策略、作业类型、时长模型等枚举，以及精确有理数字段的解析辅助函数。
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Tuple

from app.utils.rational_utils import parse_rational, parse_rational_list


class Stage(str, Enum):
    """MapReduce 作业阶段"""
    MAP = "MAP"
    REDUCE = "REDUCE"


class PolicyEnum(str, Enum):
    """调度策略枚举"""
    UAAS = "UAAS"
    MK_JR = "MK_JR"
    BALANCED_POOLS = "BALANCED_POOLS"
    CUSTOM = "CUSTOM"


class JobType(str, Enum):
    """Johnson 分类：map 阶段不长于 reduce 阶段为 Map 型"""
    MAP_TYPE = "MAP_TYPE"
    REDUCE_TYPE = "REDUCE_TYPE"


class DurationModel(str, Enum):
    """阶段时长模型：FLUID 为默认的可分负载模型，WAVE 仅用于敏感性分析"""
    FLUID = "FLUID"
    WAVE = "WAVE"


class SplitMode(str, Enum):
    """BalancedPools 切分网格"""
    PROPORTIONAL = "proportional"
    FULL_GRID = "full_grid"


def coerce_rational(v: Any) -> Fraction:
    """pydantic 前置校验用：解析失败抛出 ValueError"""
    return parse_rational(v)


def coerce_optional_rational_tuple(v: Any) -> Optional[Tuple[Fraction, ...]]:
    if v is None:
        return None
    if isinstance(v, (str, bytes)):
        raise ValueError("任务时间必须是列表")
    return tuple(parse_rational_list(v))

"""
工作负载数据模型

JobSpec / ClusterConfig / Workload / PoolPlan 的 Pydantic 定义。
模型只负责类型解析（时长解析为精确 Fraction）；领域不变量由
app.services.workload_model.validate_workload 统一检查并一次性报告全部违规项。
"""

from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, validator, model_validator

from app.core.exceptions import ParameterException
from app.schemas.common import coerce_optional_rational_tuple, coerce_rational
from app.utils.rational_utils import parse_rational


class ClusterConfig(BaseModel):
    """集群（或资源池）的 map / reduce 槽位总数"""
    map_slots: int = Field(..., description="map 槽位总数 |S^M|")
    reduce_slots: int = Field(..., description="reduce 槽位总数 |S^R|")

    class Config:
        frozen = True

    @property
    def rho(self) -> Fraction:
        """map 槽位与 reduce 槽位之比"""
        return Fraction(self.map_slots, self.reduce_slots)

    @classmethod
    def from_nodes(
        cls,
        nodes: int,
        map_slots_per_node: int,
        reduce_slots_per_node: int,
    ) -> "ClusterConfig":
        """同构集群：节点数 × 每节点槽位"""
        if nodes < 1 or map_slots_per_node < 1 or reduce_slots_per_node < 1:
            raise ParameterException(
                "节点数与每节点槽位数必须 >= 1",
                field="nodes",
                value=f"{nodes}x({map_slots_per_node},{reduce_slots_per_node})",
            )
        return cls(
            map_slots=nodes * map_slots_per_node,
            reduce_slots=nodes * reduce_slots_per_node,
        )

    def scaled(self, factor) -> "ClusterConfig":
        """两个阶段的槽位按同一因子缩放；结果必须是正整数"""
        factor = parse_rational(factor)
        if factor <= 0:
            raise ParameterException("缩放因子必须 > 0", field="scale", value=factor)
        new_map = self.map_slots * factor
        new_reduce = self.reduce_slots * factor
        if new_map.denominator != 1 or new_reduce.denominator != 1:
            raise ParameterException(
                f"缩放后槽位不是整数: {self.map_slots}x{self.reduce_slots} * {factor}",
                field="scale",
                value=factor,
            )
        if new_map < 1 or new_reduce < 1:
            raise ParameterException("缩放后槽位必须 >= 1", field="scale", value=factor)
        return ClusterConfig(map_slots=int(new_map), reduce_slots=int(new_reduce))

    def label(self) -> str:
        return f"{self.map_slots}x{self.reduce_slots}"


class JobSpec(BaseModel):
    """作业在参考分配（即其请求的槽位）下的阶段需求与时长"""
    id: str = Field(..., description="作业唯一标识")
    map_demand: int = Field(..., description="请求的 map 槽位数 S_r^M")
    reduce_demand: int = Field(..., description="请求的 reduce 槽位数 S_r^R")
    map_duration: Fraction = Field(..., description="参考分配下的 map 阶段时长 T^M")
    reduce_duration: Fraction = Field(..., description="参考分配下的 reduce 阶段时长 T^R")
    map_tasks: Optional[Tuple[Fraction, ...]] = Field(default=None, description="map 任务执行时间")
    reduce_tasks: Optional[Tuple[Fraction, ...]] = Field(default=None, description="reduce 任务执行时间")

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @model_validator(mode='before')
    @classmethod
    def derive_durations_from_tasks(cls, data):
        """文件中可以省略阶段时长，此时由任务时间按流体模型推导"""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for stage in ('map', 'reduce'):
            duration_key = f'{stage}_duration'
            tasks = data.get(f'{stage}_tasks')
            demand = data.get(f'{stage}_demand')
            if data.get(duration_key) is None and tasks is not None and isinstance(demand, int) and demand > 0:
                data[duration_key] = sum(
                    (parse_rational(t) for t in tasks), Fraction(0)
                ) / demand
        return data

    @validator('id', pre=True)
    def validate_id(cls, v):
        if not isinstance(v, str):
            raise ValueError('作业 id 必须是字符串')
        return v

    @validator('map_duration', 'reduce_duration', pre=True)
    def parse_duration(cls, v):
        return coerce_rational(v)

    @validator('map_tasks', 'reduce_tasks', pre=True)
    def parse_tasks(cls, v):
        return coerce_optional_rational_tuple(v)

    def has_task_times(self) -> bool:
        return self.map_tasks is not None and self.reduce_tasks is not None


class PoolPlan(BaseModel):
    """固定的两池切分与作业分配；提供时 BalancedPools 跳过切分搜索"""
    split: Tuple[ClusterConfig, ClusterConfig] = Field(..., description="两个资源池的槽位配置")
    assignment: Tuple[Tuple[str, ...], Tuple[str, ...]] = Field(..., description="每个池中的作业 id")

    class Config:
        frozen = True


class Workload(BaseModel):
    """一批离线作业（按提交顺序）及其运行的集群"""
    jobs: Tuple[JobSpec, ...] = Field(..., description="按提交顺序 φ 排列的作业")
    cluster: ClusterConfig = Field(..., description="集群槽位配置")
    pool_plan: Optional[PoolPlan] = Field(default=None, description="可选的固定资源池方案")

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @property
    def job_ids(self) -> List[str]:
        return [job.id for job in self.jobs]

    def job_by_id(self, job_id: str) -> JobSpec:
        for job in self.jobs:
            if job.id == job_id:
                return job
        raise KeyError(job_id)

    def with_cluster(self, cluster: ClusterConfig) -> "Workload":
        """同一批作业换到另一集群（资源池方案不随之迁移）"""
        return Workload(jobs=self.jobs, cluster=cluster)

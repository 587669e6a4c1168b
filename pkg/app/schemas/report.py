"""
分析报告数据模型

σ 报告、ρ 扫描结果、稳定性报告与策略对比报告。
所有有理数字段保持 Fraction；to_document() 输出时同时给出精确形式与十进制形式。
"""

from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from app.schemas.workload import ClusterConfig
from app.utils.rational_utils import format_decimal, format_exact, format_percent


def rational_doc(value: Optional[Fraction]) -> Optional[Dict[str, str]]:
    if value is None:
        return None
    return {'exact': format_exact(value), 'decimal': format_decimal(value)}


class _ReportModel(BaseModel):
    class Config:
        frozen = True
        arbitrary_types_allowed = True


class SigmaReport(_ReportModel):
    """σ 界报告

    sigma = (max_k Σ_{i≤k} T̂^M + max_i T̂^R) / Ĉ_max，prefix_sigma 为两项都取前缀和最大值的读法。
    """
    sigma: Fraction = Field(..., description="σ")
    bound: Fraction = Field(..., description="1 + σ")
    optimal_makespan: Fraction = Field(..., description="UAAS 最优完工时间 Ĉ_max")
    order: Tuple[str, ...] = Field(..., description="UAAS 顺序")
    max_prefix_map: Fraction
    max_prefix_reduce: Fraction
    max_single_reduce: Fraction
    prefix_sigma: Fraction
    mk_jr_makespan: Fraction = Field(..., description="MK_JR 仿真完工时间")
    mk_jr_within_bound: bool = Field(..., description="MK_JR ≤ (1 + σ) × Ĉ_max")
    prefix_bound_makespan: Fraction = Field(..., description="Ĉ_max + 两个前缀和最大值")
    mk_jr_within_prefix_bound: bool

    def to_document(self) -> Dict[str, Any]:
        return {
            'sigma': rational_doc(self.sigma),
            'bound': rational_doc(self.bound),
            'optimal_makespan': rational_doc(self.optimal_makespan),
            'order': list(self.order),
            'max_prefix_map': rational_doc(self.max_prefix_map),
            'max_prefix_reduce': rational_doc(self.max_prefix_reduce),
            'max_single_reduce': rational_doc(self.max_single_reduce),
            'prefix_sigma': rational_doc(self.prefix_sigma),
            'mk_jr_makespan': rational_doc(self.mk_jr_makespan),
            'mk_jr_within_bound': self.mk_jr_within_bound,
            'prefix_bound_makespan': rational_doc(self.prefix_bound_makespan),
            'mk_jr_within_prefix_bound': self.mk_jr_within_prefix_bound,
        }


class RatioSweepPoint(_ReportModel):
    rho: Fraction
    map_slots: int
    reduce_slots: int
    makespan: Fraction

    def to_document(self) -> Dict[str, Any]:
        return {
            'rho': rational_doc(self.rho),
            'map_slots': self.map_slots,
            'reduce_slots': self.reduce_slots,
            'makespan': rational_doc(self.makespan),
        }


class RatioSweepResult(_ReportModel):
    total_slots: int
    order: Tuple[str, ...]
    points: Tuple[RatioSweepPoint, ...]
    best: RatioSweepPoint

    def to_document(self) -> Dict[str, Any]:
        return {
            'total_slots': self.total_slots,
            'order': list(self.order),
            'best': self.best.to_document(),
            'points': [point.to_document() for point in self.points],
        }


class OracleResult(_ReportModel):
    order: Tuple[str, ...]
    makespan: Fraction
    matches_uaas: Optional[bool] = None

    def to_document(self) -> Dict[str, Any]:
        return {
            'order': list(self.order),
            'makespan': rational_doc(self.makespan),
            'matches_uaas': self.matches_uaas,
        }


class StabilityEntry(_ReportModel):
    """一次均匀缩放前后的对比；rho0 = 原槽位数 / 新槽位数"""
    rho0: Fraction
    cluster_before: ClusterConfig
    cluster_after: ClusterConfig
    uaas_order_before: Tuple[str, ...]
    uaas_order_after: Tuple[str, ...]
    uaas_makespan_before: Fraction
    uaas_makespan_after: Fraction
    mk_jr_order_before: Tuple[str, ...]
    mk_jr_order_after: Tuple[str, ...]
    mk_jr_makespan_before: Fraction
    mk_jr_makespan_after: Fraction

    @property
    def uaas_order_unchanged(self) -> bool:
        return self.uaas_order_before == self.uaas_order_after

    @property
    def makespan_scaled_exactly(self) -> bool:
        return self.uaas_makespan_after == self.uaas_makespan_before * self.rho0

    @property
    def mk_jr_order_changed(self) -> bool:
        return self.mk_jr_order_before != self.mk_jr_order_after

    def to_document(self) -> Dict[str, Any]:
        return {
            'rho0': rational_doc(self.rho0),
            'cluster_before': self.cluster_before.label(),
            'cluster_after': self.cluster_after.label(),
            'uaas': {
                'order_before': list(self.uaas_order_before),
                'order_after': list(self.uaas_order_after),
                'order_unchanged': self.uaas_order_unchanged,
                'makespan_before': rational_doc(self.uaas_makespan_before),
                'makespan_after': rational_doc(self.uaas_makespan_after),
                'makespan_scaled_exactly': self.makespan_scaled_exactly,
            },
            'mk_jr': {
                'order_before': list(self.mk_jr_order_before),
                'order_after': list(self.mk_jr_order_after),
                'order_changed': self.mk_jr_order_changed,
                'makespan_before': rational_doc(self.mk_jr_makespan_before),
                'makespan_after': rational_doc(self.mk_jr_makespan_after),
            },
        }


class StabilityReport(_ReportModel):
    entries: Tuple[StabilityEntry, ...]

    @property
    def uaas_stable(self) -> bool:
        return all(e.uaas_order_unchanged and e.makespan_scaled_exactly for e in self.entries)

    def to_document(self) -> Dict[str, Any]:
        return {
            'uaas_stable': self.uaas_stable,
            'entries': [entry.to_document() for entry in self.entries],
        }


class PolicyResult(_ReportModel):
    policy: str
    order: Tuple[str, ...]
    makespan: Fraction = Field(..., description="仿真完工时间")
    predicted_makespan: Optional[Fraction] = None
    pool_makespans: Tuple[Fraction, ...] = ()
    gap_vs_uaas: Optional[Fraction] = Field(default=None, description="makespan / UAAS - 1")
    approximation_ratio: Optional[Fraction] = Field(default=None, description="makespan / UAAS")
    reduction_vs_policy: Optional[Fraction] = Field(default=None, description="1 - UAAS / makespan")
    pools_source: Optional[str] = None

    def to_document(self) -> Dict[str, Any]:
        doc = {
            'policy': self.policy,
            'order': list(self.order),
            'makespan_exact': format_exact(self.makespan),
            'makespan_decimal': format_decimal(self.makespan),
            'predicted_makespan': rational_doc(self.predicted_makespan),
            'gap_vs_uaas': rational_doc(self.gap_vs_uaas),
            'gap_vs_uaas_percent': format_percent(self.gap_vs_uaas) if self.gap_vs_uaas is not None else None,
            'approximation_ratio': rational_doc(self.approximation_ratio),
            'reduction_vs_policy': rational_doc(self.reduction_vs_policy),
        }
        if self.pool_makespans:
            doc['pool_makespans'] = [rational_doc(value) for value in self.pool_makespans]
        if self.pools_source:
            doc['pools_source'] = self.pools_source
        return doc


class ComparisonReport(_ReportModel):
    cluster: ClusterConfig
    policies: Tuple[PolicyResult, ...]
    sigma: Optional[SigmaReport] = None
    oracle: Optional[OracleResult] = None

    def policy(self, name: str) -> PolicyResult:
        for result in self.policies:
            if result.policy == name:
                return result
        raise KeyError(name)

    def to_document(self) -> Dict[str, Any]:
        return {
            'cluster': self.cluster.label(),
            'policies': {result.policy: result.to_document() for result in self.policies},
            'sigma': self.sigma.to_document() if self.sigma else None,
            'oracle': self.oracle.to_document() if self.oracle else None,
        }


def sweep_documents(results: List[RatioSweepResult]) -> List[Dict[str, Any]]:
    return [result.to_document() for result in results]

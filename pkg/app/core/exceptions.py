"""
自定义异常处理模块

定义业务异常类层次结构、标准错误码和错误消息。
提供异常转 CLI 退出码的工具函数。
"""

from typing import Any, Dict, List, Optional
from enum import Enum


class ErrorCode(Enum):
    """错误码枚举"""

    # ============= 通用错误 (1000-1999) =============
    INTERNAL_ERROR = (1000, "内部错误")
    INVALID_REQUEST = (1001, "无效请求")
    CONFIG_ERROR = (1002, "配置错误")
    PARAMETER_ERROR = (1003, "参数错误")

    # ============= 工作负载错误 (2000-2099) =============
    WORKLOAD_VALIDATION_ERROR = (2000, "工作负载校验失败")
    WORKLOAD_PARSE_ERROR = (2001, "工作负载解析失败")
    INVALID_ALLOCATION = (2002, "无效的槽位分配")
    TASK_DATA_MISSING = (2003, "缺少任务级执行时间")

    # ============= 调度错误 (3000-3099) =============
    ASSIGNMENT_ERROR = (3000, "作业到资源池的分配无效")
    POOL_CONFIG_ERROR = (3001, "资源池切分配置无效")

    # ============= 仿真错误 (4000-4099) =============
    CAPACITY_ERROR = (4000, "阶段所需槽位超过资源池容量")
    TIMELINE_INVALID = (4001, "仿真时间线校验失败")

    # ============= 分析 / Oracle 错误 (5000-5099) =============
    ORACLE_SIZE_EXCEEDED = (5000, "暴力搜索作业数超限")
    SIGMA_UNDEFINED = (5001, "σ 未定义（最优完工时间为 0）")

    # ============= 文件处理错误 (6000-6099) =============
    FILE_NOT_FOUND = (6000, "文件不存在")
    FILE_ACCESS_ERROR = (6001, "文件访问失败")

    @property
    def code(self) -> int:
        """获取错误码"""
        return self.value[0]

    @property
    def message(self) -> str:
        """获取错误消息"""
        return self.value[1]


class LabException(Exception):
    """基础异常类"""

    def __init__(
        self,
        error_code: ErrorCode,
        detail: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None
    ):
        self.error_code = error_code
        self.detail = detail or error_code.message
        self.context = context or {}

        super().__init__(self.detail)

    @property
    def code(self) -> int:
        """获取错误码"""
        return self.error_code.code

    @property
    def message(self) -> str:
        """获取错误消息"""
        return self.error_code.message

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典格式"""
        return {
            'error_code': self.code,
            'error_message': self.message,
            'detail': self.detail,
            'context': self.context
        }

    def __str__(self) -> str:
        return f"[{self.code}] {self.detail}"

    def __reduce__(self):
        """支持跨进程序列化"""
        return (LabException, (self.error_code, self.detail, self.context))


class WorkloadValidationException(LabException):
    """工作负载校验异常，一次性携带全部违规项"""

    def __init__(self, violations: List[Dict[str, str]]):
        self.violations = list(violations)
        lines = [
            f"{v.get('job_id') or '<workload>'}.{v.get('field')}: {v.get('message')}"
            for v in self.violations
        ]
        detail = f"工作负载校验失败，共 {len(lines)} 项: " + "; ".join(lines)
        super().__init__(
            ErrorCode.WORKLOAD_VALIDATION_ERROR,
            detail,
            {'violations': self.violations},
        )

    def __reduce__(self):
        return (WorkloadValidationException, (self.violations,))


class WorkloadParseException(LabException):
    """工作负载文档解析异常"""

    def __init__(self, source: str, detail: Optional[str] = None):
        context = {'source': source}
        error_detail = detail or f"无法解析工作负载: {source}"
        super().__init__(ErrorCode.WORKLOAD_PARSE_ERROR, error_detail, context)

    def __reduce__(self):
        return (WorkloadParseException, (self.context.get('source', ''), self.detail))


class InvalidAllocationException(LabException):
    """槽位分配必须为正整数"""

    def __init__(self, job_id: str, alloc_map: Any, alloc_reduce: Any):
        context = {
            'job_id': job_id,
            'alloc_map': str(alloc_map),
            'alloc_reduce': str(alloc_reduce),
        }
        detail = f"作业 {job_id} 的分配 {alloc_map}x{alloc_reduce} 无效，两个阶段都必须 >= 1"
        super().__init__(ErrorCode.INVALID_ALLOCATION, detail, context)

    def __reduce__(self):
        return (InvalidAllocationException, (
            self.context.get('job_id', ''),
            self.context.get('alloc_map'),
            self.context.get('alloc_reduce'),
        ))


class TaskDataException(LabException):
    """需要任务级执行时间但作业未提供"""

    def __init__(self, job_id: str, stage: str):
        context = {'job_id': job_id, 'stage': stage}
        detail = f"作业 {job_id} 缺少 {stage} 阶段的任务级执行时间"
        super().__init__(ErrorCode.TASK_DATA_MISSING, detail, context)

    def __reduce__(self):
        return (TaskDataException, (self.context.get('job_id', ''), self.context.get('stage', '')))


class AssignmentException(LabException):
    """资源池分配异常：作业重复或缺失"""

    def __init__(self, detail: str, job_ids: Optional[List[str]] = None):
        context = {'job_ids': list(job_ids or [])}
        super().__init__(ErrorCode.ASSIGNMENT_ERROR, detail, context)

    def __reduce__(self):
        return (AssignmentException, (self.detail, self.context.get('job_ids')))


class PoolConfigurationException(LabException):
    """资源池切分不可行"""

    def __init__(self, detail: str, map_slots: int = 0, reduce_slots: int = 0):
        context = {'map_slots': map_slots, 'reduce_slots': reduce_slots}
        super().__init__(ErrorCode.POOL_CONFIG_ERROR, detail, context)

    def __reduce__(self):
        return (PoolConfigurationException, (
            self.detail,
            self.context.get('map_slots', 0),
            self.context.get('reduce_slots', 0),
        ))


class CapacityException(LabException):
    """阶段请求的槽位超过资源池容量"""

    def __init__(self, job_id: str, stage: str, requested: int, capacity: int):
        context = {
            'job_id': job_id,
            'stage': stage,
            'requested': requested,
            'capacity': capacity,
        }
        detail = f"作业 {job_id} 的 {stage} 阶段需要 {requested} 个槽位，资源池只有 {capacity} 个"
        super().__init__(ErrorCode.CAPACITY_ERROR, detail, context)

    def __reduce__(self):
        return (CapacityException, (
            self.context.get('job_id', ''),
            self.context.get('stage', ''),
            self.context.get('requested', 0),
            self.context.get('capacity', 0),
        ))


class TimelineInvalidException(LabException):
    """仿真时间线未通过校验"""

    def __init__(self, messages: List[str]):
        self.messages = list(messages)
        detail = f"时间线校验失败，共 {len(self.messages)} 项: " + "; ".join(self.messages)
        super().__init__(ErrorCode.TIMELINE_INVALID, detail, {'violations': self.messages})

    def __reduce__(self):
        return (TimelineInvalidException, (self.messages,))


class OracleSizeException(LabException):
    """暴力搜索规模超限"""

    def __init__(self, job_count: int, limit: int):
        context = {'job_count': job_count, 'limit': limit}
        detail = f"暴力搜索最多支持 {limit} 个作业，当前为 {job_count} 个"
        super().__init__(ErrorCode.ORACLE_SIZE_EXCEEDED, detail, context)

    def __reduce__(self):
        return (OracleSizeException, (
            self.context.get('job_count', 0),
            self.context.get('limit', 0),
        ))


class UndefinedSigmaException(LabException):
    """最优完工时间为 0 时 σ 无定义"""

    def __init__(self):
        super().__init__(ErrorCode.SIGMA_UNDEFINED)

    def __reduce__(self):
        return (UndefinedSigmaException, ())


class ParameterException(LabException):
    """参数异常"""

    def __init__(self, detail: str, field: Optional[str] = None, value: Any = None):
        context = {}
        if field:
            context['field'] = field
        if value is not None:
            context['value'] = str(value)

        super().__init__(ErrorCode.PARAMETER_ERROR, detail, context)

    def __reduce__(self):
        return (ParameterException, (
            self.detail,
            self.context.get('field'),
            self.context.get('value')
        ))


class FileException(LabException):
    """文件处理异常"""

    def __init__(self, operation: str, file_path: str, detail: Optional[str] = None,
                 not_found: bool = False):
        context = {
            'operation': operation,
            'file_path': file_path
        }

        error_detail = detail or f"文件{operation}操作失败: {file_path}"
        code = ErrorCode.FILE_NOT_FOUND if not_found else ErrorCode.FILE_ACCESS_ERROR
        super().__init__(code, error_detail, context)

    def __reduce__(self):
        return (FileException, (
            self.context.get('operation', ''),
            self.context.get('file_path', ''),
            self.detail,
            self.error_code == ErrorCode.FILE_NOT_FOUND,
        ))


# ============= 退出码映射 =============

EXIT_CODE_MAP = {
    ErrorCode.FILE_NOT_FOUND: 2,
    ErrorCode.WORKLOAD_PARSE_ERROR: 3,
    ErrorCode.WORKLOAD_VALIDATION_ERROR: 4,
    ErrorCode.INVALID_ALLOCATION: 4,
    ErrorCode.TASK_DATA_MISSING: 4,
    ErrorCode.ORACLE_SIZE_EXCEEDED: 5,
    ErrorCode.CAPACITY_ERROR: 6,
    ErrorCode.TIMELINE_INVALID: 6,
    ErrorCode.PARAMETER_ERROR: 7,
    ErrorCode.ASSIGNMENT_ERROR: 7,
    ErrorCode.POOL_CONFIG_ERROR: 7,
}


def get_exit_code(error_code: ErrorCode) -> int:
    """获取错误码对应的进程退出码"""
    return EXIT_CODE_MAP.get(error_code, 1)

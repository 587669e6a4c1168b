"""
工作负载文档读写

文档为 JSON：
    {
      "cluster": {"map_slots": 30, "reduce_slots": 30},
      "jobs": [{"id": "J1", "map_demand": 30, "reduce_demand": 30,
                "map_duration": "4", "reduce_duration": "5",
                "map_tasks": [...], "reduce_tasks": [...]}],
      "pool_plan": {"split": [{...}, {...}], "assignment": [["J1"], ["J2"]]}
    }
时长接受十进制字符串、"p/q" 字符串或 JSON 数字；写出时一律为精确形式字符串。
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from app.core.exceptions import FileException, WorkloadParseException
from app.core.logging import file_logger
from app.schemas.workload import Workload
from app.utils.rational_utils import format_exact
from app.utils.workload_file_reader import read_text_file


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = '.'.join(str(part) for part in item.get('loc', ()))
        parts.append(f"{location}: {item.get('msg')}")
    return '; '.join(parts)


def parse_workload_document(document: Any, source: str = '<memory>') -> Workload:
    """把已解码的 JSON 文档转换为 Workload（不做领域校验）

    Raises:
        WorkloadParseException: 结构或字段类型不合法
    """
    if not isinstance(document, dict):
        raise WorkloadParseException(source, f"{source}: 顶层必须是对象")
    try:
        return Workload.model_validate(document)
    except ValidationError as e:
        raise WorkloadParseException(source, f"{source}: {_format_validation_error(e)}") from e


def loads_workload(text: str, source: str = '<memory>') -> Workload:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkloadParseException(source, f"{source}: JSON 解析失败 (行 {e.lineno}, 列 {e.colno}): {e.msg}") from e
    return parse_workload_document(document, source)


def load_workload(path: Union[str, Path]) -> Workload:
    """读取工作负载文件

    Raises:
        FileException: 文件不存在或不可读
        WorkloadParseException: 内容不是合法的工作负载文档
    """
    path = Path(path)
    workload = loads_workload(read_text_file(path), str(path))
    file_logger.debug(f"已加载工作负载 {path}: {len(workload.jobs)} 个作业")
    return workload


def dump_workload(workload: Workload) -> Dict[str, Any]:
    """转换为可写出的 JSON 文档，有理数写为精确形式字符串"""
    jobs = []
    for job in workload.jobs:
        item: Dict[str, Any] = {
            'id': job.id,
            'map_demand': job.map_demand,
            'reduce_demand': job.reduce_demand,
            'map_duration': format_exact(job.map_duration),
            'reduce_duration': format_exact(job.reduce_duration),
        }
        if job.map_tasks is not None:
            item['map_tasks'] = [format_exact(t) for t in job.map_tasks]
        if job.reduce_tasks is not None:
            item['reduce_tasks'] = [format_exact(t) for t in job.reduce_tasks]
        jobs.append(item)

    document: Dict[str, Any] = {
        'cluster': {
            'map_slots': workload.cluster.map_slots,
            'reduce_slots': workload.cluster.reduce_slots,
        },
        'jobs': jobs,
    }
    if workload.pool_plan is not None:
        document['pool_plan'] = {
            'split': [
                {'map_slots': pool.map_slots, 'reduce_slots': pool.reduce_slots}
                for pool in workload.pool_plan.split
            ],
            'assignment': [list(job_ids) for job_ids in workload.pool_plan.assignment],
        }
    return document


def dumps_document(document: Any) -> str:
    """统一的 JSON 文本格式：缩进 2，保留非 ASCII，以换行结尾"""
    return json.dumps(document, ensure_ascii=False, indent=2) + '\n'


def write_text(text: str, path: Union[str, Path]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding='utf-8')
    except OSError as e:
        raise FileException("写入", str(target), f"无法写入 {target}: {e}") from e
    file_logger.debug(f"已写出 {target}")
    return target


def save_workload(workload: Workload, path: Union[str, Path]) -> Path:
    return write_text(dumps_document(dump_workload(workload)), path)

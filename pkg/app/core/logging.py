"""
日志配置

库代码只通过下方的命名 logger 记录日志；CLI 入口显式调用 setup_logging()。
控制台日志写到 stderr（stdout 留给报告与 CSV），可选的日志文件固定为文本格式。
"""

import json
import logging
import sys
import traceback
from contextlib import contextmanager
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

from app.config.settings import settings
from app.utils.rational_utils import format_exact

_context_filter: Optional['ContextFilter'] = None
_performance_logger: Optional['PerformanceLogger'] = None

# LogRecord 自带的属性；其余属性都视为 extra / 上下文字段
_RESERVED_ATTRS = frozenset(
    logging.LogRecord("", 0, "", 0, "", (), None).__dict__
) | {"message", "asctime"}


def _json_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (str, int, float)):
        return value
    if isinstance(value, Fraction):
        return format_exact(value)
    return str(value)


class JSONFormatter(logging.Formatter):
    """每条记录输出一行 JSON；Fraction 字段写为精确形式"""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "location": f"{record.module}.{record.funcName}:{record.lineno}",
            "pid": record.process,
        }
        for key, value in record.__dict__.items():
            if key in _RESERVED_ATTRS or key.startswith('_') or key in entry:
                continue
            entry[key] = _json_value(value)

        if record.exc_info and record.exc_info[0] is not None:
            entry["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
                "traceback": self.formatException(record.exc_info),
            }
        return json.dumps(entry, ensure_ascii=False)


class TextFormatter(logging.Formatter):
    def __init__(self):
        super().__init__(
            fmt='%(asctime)s | %(levelname)-8s | %(name)s | %(message)s',
            datefmt='%H:%M:%S',
        )


class ContextFilter(logging.Filter):
    """给经过的记录附加当前上下文（workload、policy、command 等）"""

    def __init__(self):
        super().__init__()
        self.context: Dict[str, Any] = {}

    def filter(self, record: logging.LogRecord) -> bool:
        for key, value in self.context.items():
            if not hasattr(record, key):
                setattr(record, key, value)
        return True

    def set_context(self, **kwargs) -> None:
        self.context.update(kwargs)

    def clear_context(self) -> None:
        self.context.clear()

    @contextmanager
    def scoped(self, **kwargs) -> Iterator[None]:
        """with 块内附加上下文，退出时恢复原值"""
        saved = dict(self.context)
        self.context.update(kwargs)
        try:
            yield
        finally:
            self.context = saved


class PerformanceLogger:
    """仿真与搜索的耗时记录"""

    def __init__(self, logger: logging.Logger):
        self.logger = logger

    def _emit(self, event_type: str, message: str, duration: float, **fields) -> None:
        self.logger.info(
            message,
            extra={'event_type': event_type, 'duration_ms': round(duration * 1000, 2), **fields},
        )

    def log_simulation(self, policy: str, duration: float, runs: int) -> None:
        self._emit('simulation', f"{policy} simulated", duration, policy=policy, runs=runs)

    def log_search(self, kind: str, duration: float, candidates: int) -> None:
        self._emit('search', f"{kind} search finished", duration, kind=kind, candidates=candidates)


def _build_handlers(context_filter: ContextFilter) -> List[logging.Handler]:
    handlers: List[logging.Handler] = []
    if settings.LOG_CONSOLE_ENABLED:
        console = logging.StreamHandler(sys.stderr)
        console.setFormatter(JSONFormatter() if settings.LOG_FORMAT == "json" else TextFormatter())
        handlers.append(console)

    if settings.LOG_FILE_PATH:
        path = Path(settings.LOG_FILE_PATH)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(path, encoding='utf-8')
        except OSError as e:
            sys.stderr.write(f"无法打开日志文件 {path}: {e}\n")
        else:
            file_handler.setFormatter(TextFormatter())
            handlers.append(file_handler)

    for handler in handlers:
        handler.addFilter(context_filter)
    return handlers


def setup_logging() -> None:
    """按当前配置重建根 logger 的处理器"""
    global _context_filter, _performance_logger

    _context_filter = ContextFilter()
    _performance_logger = PerformanceLogger(logging.getLogger("performance"))

    root = logging.getLogger()
    root.setLevel(settings.LOG_LEVEL)
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    for handler in _build_handlers(_context_filter):
        root.addHandler(handler)

    logging.getLogger(__name__).debug(
        "logging ready",
        extra={'log_format': settings.LOG_FORMAT, 'log_file': settings.LOG_FILE_PATH or '-'},
    )


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def log_with_context(logger: logging.Logger, level: str, message: str, **context) -> None:
    """带上下文记录一条日志；setup_logging 之前调用时上下文作为 extra 传入"""
    log = getattr(logger, level.lower())
    if _context_filter is None:
        log(message, extra=context)
        return
    with _context_filter.scoped(**context):
        log(message)


def log_error_with_context(logger: logging.Logger, error: Exception, context: Dict[str, Any]) -> None:
    log_with_context(
        logger, 'error', f"Error occurred: {error}",
        error_type=type(error).__name__,
        error_message=str(error),
        traceback=traceback.format_exc(),
        **context,
    )


def get_performance_logger() -> PerformanceLogger:
    """setup_logging 之前调用时惰性创建"""
    global _performance_logger
    if _performance_logger is None:
        _performance_logger = PerformanceLogger(logging.getLogger("performance"))
    return _performance_logger


workload_logger = get_logger('workload')
scheduler_logger = get_logger('scheduler')
simulator_logger = get_logger('simulator')
oracle_logger = get_logger('oracle')
cli_logger = get_logger('cli')
file_logger = get_logger('file')

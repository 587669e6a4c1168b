"""Worker 包 - 搜索与扫描的进程池执行"""

from app.worker.config import ParallelConfig
from app.worker.pool import parallel_map

__all__ = [
    'ParallelConfig',
    'parallel_map',
]

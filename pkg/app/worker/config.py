"""
并行执行配置

排列搜索、资源池切分搜索与 ρ 扫描共用的进程池参数。
所有参数都可以通过环境变量覆盖。
"""

import os
from dataclasses import dataclass, field


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


@dataclass
class ParallelConfig:
    """并行配置类"""

    # 最大进程数；1 表示在当前进程中串行执行
    max_workers: int = field(
        default_factory=lambda: _env_int('MAKESPAN_LAB_THREADS', 1)
    )
    # 候选数少于该值时不启动进程池
    min_items_for_parallel: int = field(
        default_factory=lambda: _env_int('MAKESPAN_LAB_MIN_PARALLEL_ITEMS', 2)
    )

    def __post_init__(self) -> None:
        if self.max_workers < 1:
            raise ValueError(
                f"MAKESPAN_LAB_THREADS must be >= 1 (got {self.max_workers})"
            )
        if self.min_items_for_parallel < 1:
            raise ValueError(
                "MAKESPAN_LAB_MIN_PARALLEL_ITEMS must be >= 1 "
                f"(got {self.min_items_for_parallel})"
            )

    @property
    def parallel(self) -> bool:
        return self.max_workers > 1

"""
Run independent search units in a spawn-context process pool.

Spawn keeps child processes free of inherited logging handlers and file
descriptors. Results are returned in input order so that callers can break
ties deterministically no matter which worker finishes first.
"""

import logging
import multiprocessing as mp
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.worker.config import ParallelConfig

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    config: Optional[ParallelConfig] = None,
) -> List[R]:
    """Apply ``func`` to every item, in parallel when configured.

    ``func`` must be a module-level callable so that it can be pickled.
    The first exception raised by a unit is re-raised in the caller.
    """
    config = config or ParallelConfig()
    items = list(items)

    if not config.parallel or len(items) < config.min_items_for_parallel:
        return [func(item) for item in items]

    workers = min(config.max_workers, len(items))
    started = time.monotonic()
    ctx = mp.get_context("spawn")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as executor:
        results = list(executor.map(func, items))

    logger.debug(
        "parallel_map finished: units=%d workers=%d elapsed=%.3fs",
        len(items), workers, time.monotonic() - started,
    )
    return results

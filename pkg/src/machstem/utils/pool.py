"""
Ordered worker pool for sweep verbs.
"""

from typing import Callable, Optional, Sequence, TypeVar, cast

import anyio
import anyio.to_thread

from machstem.utils.config import get_config
from machstem.utils.logging import get_logger

T = TypeVar("T")
R = TypeVar("R")

logger = get_logger("pool")


def map_ordered(fn: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> list[R]:
    """Apply fn to every item on a capped thread pool; results keep input order.

    The first failure in input order is re-raised after all workers finish.
    """
    limit = threads if threads is not None else get_config().threads
    if limit <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {limit} threads")
    return anyio.run(_map_all, fn, list(items), limit)


async def _map_all(fn: Callable[[T], R], items: list[T], limit: int) -> list[R]:
    limiter = anyio.CapacityLimiter(limit)
    results: list[Optional[R]] = [None] * len(items)
    errors: list[Optional[BaseException]] = [None] * len(items)

    async def worker(index: int, item: T) -> None:
        try:
            results[index] = await anyio.to_thread.run_sync(fn, item, limiter=limiter)
        except Exception as exc:
            errors[index] = exc

    async with anyio.create_task_group() as tg:
        for index, item in enumerate(items):
            tg.start_soon(worker, index, item)

    for error in errors:
        if error is not None:
            raise error
    return cast(list[R], results)

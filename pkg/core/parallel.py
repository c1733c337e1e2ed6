"""Ordered fan-out of independent work items over worker processes."""

import logging
from multiprocessing import Pool
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def map_ordered(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply fn to every item and return results in input order.

    workers <= 1 runs in-process. fn must be a module-level function so it
    can be pickled. Output never depends on the worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    processes = min(workers, len(items))
    logger.debug("Dispatching %d items to %d processes", len(items), processes)
    with Pool(processes=processes) as pool:
        return pool.map(fn, items)

"""
Parallel Sharding Module

Runs an index-space task across processes. Index i goes to shard i mod workers, each
shard returns a partial result and the caller merges them. Tasks seed their own RNG
from (master seed, index), so results do not depend on the worker count.
"""

import logging
import multiprocessing
import time
from typing import Any, Callable, List, Sequence

logger = logging.getLogger(__name__)

# shard_task(shard, workers, n_items, *payload) -> partial result
ShardTask = Callable[..., Any]


def shard_indices(shard: int, workers: int, n_items: int) -> range:
    """Indices owned by one shard under stride partitioning."""
    return range(shard, n_items, workers)


def run_sharded(task: ShardTask, n_items: int, workers: int, payload: Sequence[Any] = ()) -> List[Any]:
    """
    Execute `task` once per shard and return the partial results in shard order.

    Args:
        task: Module-level callable (picklable) taking (shard, workers, n_items, *payload).
        n_items: Size of the index space.
        workers: Process count; 1 runs inline without a pool.
        payload: Extra positional arguments passed to every shard.

    Returns:
        List of partial results, index s holding shard s.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    workers = min(workers, max(n_items, 1))
    started = time.perf_counter()
    jobs = [(shard, workers, n_items, *payload) for shard in range(workers)]

    if workers == 1:
        results = [task(*jobs[0])]
    else:
        with multiprocessing.Pool(workers) as pool:
            results = pool.starmap(task, jobs)

    elapsed = time.perf_counter() - started
    logger.debug("%s: %d items on %d workers in %.2fs", getattr(task, "__name__", task),
                 n_items, workers, elapsed)
    return results

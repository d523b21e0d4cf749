"""
Worker pool and reproducible reductions.

All concurrency in the package goes through this module:

- ordered_map: run independent jobs (solver restarts, verify checks) on a
  thread pool and return results in submission order.
- chunked_sum: split a cell range into fixed chunks, evaluate them
  concurrently and add the partial results in chunk order, so the value
  never depends on scheduling.

numpy releases the GIL inside its kernels, so threads give real overlap for
the array work done per chunk.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from affine_vlab.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def worker_count(requested: Optional[int] = None) -> int:
    """Number of workers to use, capped by AFFINE_VLAB_THREADS."""
    cap = settings.worker_count
    if requested is None:
        return cap
    return max(1, min(int(requested), cap))


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply fn to every item concurrently, returning results in input order.

    Args:
        fn: Function of one argument
        items: Inputs
        workers: Optional worker cap (never above AFFINE_VLAB_THREADS)

    Returns:
        List of results aligned with items
    """
    items = list(items)
    n_workers = min(worker_count(workers), max(1, len(items)))
    if n_workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, items))


def chunk_bounds(n_items: int, chunk: Optional[int] = None) -> List[tuple]:
    """Fixed [start, stop) chunks covering range(n_items)."""
    size = max(1, int(chunk or settings.CHUNK_CELLS))
    return [(start, min(start + size, n_items)) for start in range(0, n_items, size)]


def chunked_sum(
    fn: Callable[[int, int], np.ndarray],
    n_items: int,
    chunk: Optional[int] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    Deterministic sum of fn(start, stop) over fixed chunks.

    The partial results are stacked in chunk order and reduced with numpy's
    pairwise summation, which is reproducible bit for bit.
    """
    bounds = chunk_bounds(n_items, chunk)
    if not bounds:
        raise ValueError("chunked_sum needs at least one item")
    partials = ordered_map(lambda b: np.asarray(fn(b[0], b[1]), dtype=float), bounds, workers)
    if len(partials) == 1:
        return partials[0]
    return np.sum(np.stack(partials, axis=0), axis=0)



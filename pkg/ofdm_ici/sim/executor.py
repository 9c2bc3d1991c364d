"""Work dispatch for realization- and block-level parallelism.

numpy releases the GIL inside the vectorized kernels, so a thread pool
gives real speedup on the per-block work. Results always come back in
submission order, so aggregation never depends on scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class SerialExecutor:
    """Runs every task on the calling thread.

    Base class; ThreadedExecutor overrides map() to use a pool.
    """

    threads = 1

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        return [fn(item) for item in items]

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class ThreadedExecutor(SerialExecutor):
    """Thread-pool executor with an order-preserving map()."""

    def __init__(self, threads: int):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self._pool = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="ofdm-ici")

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        # Exceptions from workers propagate on iteration, in submission order
        return list(self._pool.map(fn, items))

    def close(self):
        self._pool.shutdown(wait=True)


def get_executor(threads: int = 1) -> SerialExecutor:
    """SerialExecutor for one thread, ThreadedExecutor otherwise."""
    if threads <= 1:
        return SerialExecutor()
    logger.debug("Using %d worker threads", threads)
    return ThreadedExecutor(threads)

"""Order-preserving parallel map used by the searches."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count(requested: Optional[int] = None) -> int:
    """Explicit value, else CLUSTERAUT_THREADS, else 1."""
    if requested is None:
        env = os.environ.get("CLUSTERAUT_THREADS", "").strip()
        requested = int(env) if env else 1
    return max(1, int(requested))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """Results are returned in input order whatever the thread count."""
    items = list(items)
    workers = thread_count(threads)
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

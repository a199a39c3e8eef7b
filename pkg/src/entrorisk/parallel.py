"""Counter-based seeding and order-preserving parallel map."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

# Work is cut into fixed-size chunks so results never depend on worker count.
CHUNK = 1024


def task_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for task ``key`` under master ``seed``; independent of execution order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def pmap(fn: Callable[[T], R], tasks: Sequence[T] | Iterable[T], workers: int = 1) -> list[R]:
    """``[fn(t) for t in tasks]``, optionally on a thread pool; output keeps task order."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def chunks(n: int, size: int = CHUNK) -> list[slice]:
    return [slice(s, min(s + size, n)) for s in range(0, n, size)]

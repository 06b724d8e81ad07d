from __future__ import annotations

from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Map in input order; workers == 1 runs inline"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent reproducible streams derived from one process-wide seed"""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)

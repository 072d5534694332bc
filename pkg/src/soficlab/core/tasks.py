"""Seeded sub-streams and a small job pool.

Every randomized loop is split into tasks whose generators are derived from
(seed, task coordinates) alone, so results never depend on how many workers
run them or in which order they finish.
"""

from __future__ import annotations

import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar, Union

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

SeedPart = Union[int, str]


def _encode(part: SeedPart) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValueError(f"Seed parts must be nonnegative, got {part}")
    return int(part)


def derive_seed(seed: int, *parts: SeedPart) -> int:
    """A 63-bit seed deterministically mixed from a base seed and task coordinates."""
    sequence = np.random.SeedSequence([_encode(seed), *(_encode(p) for p in parts)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def child_rng(seed: int, *parts: SeedPart) -> np.random.Generator:
    """A generator for one task, independent of every other (seed, parts) combination."""
    return np.random.default_rng(
        np.random.SeedSequence([_encode(seed), *(_encode(p) for p in parts)])
    )


def run_tasks(fn: Callable[[T], R], tasks: Sequence[T], jobs: int = 1) -> list[R]:
    """Map `fn` over `tasks`, in a thread pool when jobs > 1.

    Results come back in task order. numpy releases the GIL in the heavy
    kernels, so threads are enough for the array-bound tasks here.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be positive, got {jobs}")
    if jobs == 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def chunks(total: int, size: int) -> list[tuple[int, int]]:
    """Fixed [start, stop) ranges covering range(total)."""
    if size < 1:
        raise ValueError(f"Chunk size must be positive, got {size}")
    return [(start, min(start + size, total)) for start in range(0, total, size)]

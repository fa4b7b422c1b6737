"""Chunked seeding and order-preserving parallel map.

Every chunk gets its own PCG64 stream built from
``numpy.random.SeedSequence(seed, spawn_key=(chunk_index,))``. Results are
reduced in chunk order, so the output never depends on worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

RNG_ALGORITHM = "numpy PCG64 / SeedSequence(seed, spawn_key=(chunk,))"


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(chunk_index),))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_sizes(n: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def ordered_map(fn, items, workers: int = 1) -> list:
    """``[fn(i, item) for i, item in enumerate(items)]``, optionally threaded."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(i, item) for i, item in enumerate(items)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(items)), items))

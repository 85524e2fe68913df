"""Reproducible parallel sampling on Philox substreams.

Work is split into fixed-size chunks; chunk i always draws from the
counter-based generator Philox seeded with SeedSequence(seed, spawn_key=(i,)).
The chunk layout depends only on (total, chunk_size), never on the worker
count, and partial results are combined in chunk-index order, so every
reduction is a pure function of (seed, total, chunk_size) regardless of how
many processes execute it.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

__all__ = ["substream", "chunk_counts", "map_chunks"]


def substream(seed: int, index: int) -> np.random.Generator:
    """Generator for chunk `index` of the stream family keyed by `seed`."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def chunk_counts(total: int, chunk_size: int) -> list[int]:
    """Sizes of the fixed chunk decomposition of `total` items."""
    if total < 1:
        raise ValueError(f"total must be >= 1, got {total}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    n_chunks = math.ceil(total / chunk_size)
    counts = [chunk_size] * n_chunks
    counts[-1] = total - chunk_size * (n_chunks - 1)
    return counts


def _run_chunk(job):
    fn, seed, index, count, args = job
    return fn(substream(seed, index), count, *args)


def map_chunks(fn, args: tuple, seed: int, total: int, chunk_size: int, workers: int = 1) -> np.ndarray:
    """Concatenate fn(rng_i, count_i, *args) over the fixed chunk layout.

    `fn` must be a module-level function (it is pickled by reference when
    workers > 1) returning a 1-d array of length count_i.  The result is
    identical for any `workers` value.
    """
    jobs = [
        (fn, seed, i, c, args)
        for i, c in enumerate(chunk_counts(total, chunk_size))
    ]
    if workers <= 1 or len(jobs) == 1:
        parts = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_chunk, jobs, chunksize=1))
    return np.concatenate(parts)

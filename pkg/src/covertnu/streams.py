"""Deterministic random substreams.

All randomness in the package comes from numpy's PCG64 bit generator.  A
run is identified by a 64-bit ``seed``; work is cut into fixed-size blocks
and block ``i`` draws from ``SeedSequence(seed, spawn_key=(i,))``.  Because
block boundaries depend only on the requested count, results are identical
no matter how many workers process the blocks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 1 << 16
_SEED_MASK = (1 << 64) - 1


def substream(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def blocks(count: int, block_size: int = BLOCK_SIZE):
    """Yield ``(index, size)`` pairs covering ``count`` items."""
    for index, start in enumerate(range(0, count, block_size)):
        yield index, min(block_size, count - start)


def map_blocks(fn, seed, count, block_size=BLOCK_SIZE, workers=1):
    """Apply ``fn(rng, size)`` to every block and return results in block order."""
    jobs = list(blocks(count, block_size))

    def run(job):
        index, size = job
        return fn(substream(seed, index), size)

    if workers <= 1 or len(jobs) == 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws on the open interval (0, 1), safe for inverse CDFs."""
    return (rng.integers(0, 1 << 53, size=size, dtype=np.int64) + 0.5) / float(1 << 53)

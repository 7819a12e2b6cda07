"""Counter-based seed splitting so chunked sampling is reproducible in any order."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

CHUNK = 1 << 16


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream identified by ``key`` under ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def derive_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(2, np.uint64)[0] >> 1)


def chunked(
    n: int,
    seed: int,
    stream: int,
    draw: Callable[[np.random.Generator, int], np.ndarray],
    workers: int = 1,
) -> np.ndarray:
    """Concatenate ``draw(rng_i, size_i)`` over fixed-size chunks ``i``.

    Chunk ``i`` always uses ``substream(seed, stream, i)``, so the output does
    not depend on ``workers``.
    """
    if n <= 0:
        return np.empty(0)
    sizes = [CHUNK] * (n // CHUNK)
    if n % CHUNK:
        sizes.append(n % CHUNK)

    def job(i: int) -> np.ndarray:
        return draw(substream(seed, stream, i), sizes[i])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    return np.concatenate(parts)

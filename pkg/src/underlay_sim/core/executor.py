"""Seeded, chunked Monte Carlo execution on a worker pool."""

import asyncio
import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum
from typing import Any, TypeVar

import numpy as np

from ..numerics.rng import family_base, substream
from ..types import ChunkTask
from ..utils.logging import log_dict

logger = logging.getLogger("underlay_sim.executor")

T = TypeVar("T")


class StreamFamily(IntEnum):
    """Disjoint substream families; chunk ``i`` of family ``f`` uses stream ``f * 2**32 + i``."""

    CALIBRATION = 1
    MEASUREMENT = 2
    GEOMETRY = 3
    SAMPLES = 4
    REFERENCE = 5


class MonteCarloExecutor:
    """Runs Monte Carlo chunks in parallel with worker-count independent results.

    ``runs`` is cut into fixed-size chunks. Chunk ``i`` always draws from
    ``substream(seed, base + i)`` and partial results come back in chunk
    order, so the output depends only on ``(seed, runs, chunk_size)``.
    """

    def __init__(self, seed: int, workers: int = 1, chunk_size: int = 8192):
        """Initialize executor.

        Args:
            seed: 64-bit experiment seed
            workers: Number of worker threads (>= 1)
            chunk_size: Runs per chunk
        """
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        if chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
        self.seed = seed
        self.workers = workers
        self.chunk_size = chunk_size
        self._pool: ThreadPoolExecutor | None = None

    def __enter__(self) -> "MonteCarloExecutor":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    @property
    def pool(self) -> ThreadPoolExecutor:
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="underlay-mc")
        return self._pool

    def close(self) -> None:
        """Shut the worker pool down."""
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def stream(self, family: StreamFamily, index: int = 0) -> np.random.Generator:
        """Dedicated substream ``index`` of a family (calibration sets, geometry draws)."""
        return substream(self.seed, family_base(family) + index)

    def chunk_plan(self, runs: int) -> list[int]:
        """Chunk sizes covering ``runs``; only the last chunk may be shorter."""
        if runs < 1:
            return []
        full, rest = divmod(runs, self.chunk_size)
        return [self.chunk_size] * full + ([rest] if rest else [])

    async def map_chunks(self, task: ChunkTask[T], runs: int, family: StreamFamily, offset: int = 0) -> list[T]:
        """Run ``task`` over all chunks of ``runs``.

        Args:
            task: Callable ``(size, rng) -> partial result``
            runs: Total Monte Carlo runs
            family: Substream family of this task
            offset: First stream index within the family

        Returns:
            Partial results in chunk order
        """
        plan = self.chunk_plan(runs)
        base = family_base(family) + offset
        start = time.time()
        loop = asyncio.get_running_loop()
        futures = [
            loop.run_in_executor(self.pool, self._run_chunk, task, size, base + index)
            for index, size in enumerate(plan)
        ]
        results = list(await asyncio.gather(*futures))
        log_dict(
            logger,
            logging.DEBUG,
            "Monte Carlo task finished",
            {
                "family": family.name,
                "runs": runs,
                "chunks": len(plan),
                "workers": self.workers,
                "elapsed_s": f"{time.time() - start:.2f}",
            },
        )
        return results

    async def run_blocking(self, fn: Callable[..., T], *args: Any) -> T:
        """Run one blocking call (e.g. a bisection) on the worker pool."""
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(self.pool, fn, *args)

    def _run_chunk(self, task: ChunkTask[T], size: int, stream_id: int) -> T:
        """Execute a single chunk (runs in a worker thread)."""
        return task(size, substream(self.seed, stream_id))

"""Row-band execution for per-pixel raster kernels.

Every kernel in the package computes each output pixel from a read-only
input with a fixed arithmetic order, so splitting the rows into bands cannot
change a single bit of the result. Bands only decide who does the work.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Union

import numpy as np

Workers = Union[int, str, None]

# below this many rows per band the thread overhead dominates
_MIN_BAND_ROWS = 16


def resolve_workers(workers: Workers) -> int:
    if workers is None:
        return 1
    if isinstance(workers, str):
        if workers.lower() == "auto":
            return os.cpu_count() or 1
        workers = int(workers)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return int(workers)


def bands(height: int, workers: int) -> list[tuple[int, int]]:
    count = max(1, min(workers, height // _MIN_BAND_ROWS or 1))
    edges = np.linspace(0, height, count + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def map_rows(kernel: Callable[[int, int], np.ndarray], height: int, workers: Workers = 1) -> np.ndarray:
    """Evaluate ``kernel(y0, y1)`` over row bands and stack the results."""
    n = resolve_workers(workers)
    parts = bands(height, n)
    if len(parts) == 1:
        return kernel(0, height)
    with ThreadPoolExecutor(max_workers=n) as pool:
        results = list(pool.map(lambda band: kernel(*band), parts))
    return np.concatenate(results, axis=0)

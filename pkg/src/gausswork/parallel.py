"""Deterministic fan-out of per-index work across processes.

Sample streams are keyed by index, so any contiguous partition of the
index range produces identical values; chunks are merged in index order,
making results independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def split_ranges(n_items: int, n_chunks: int) -> list[tuple[int, int]]:
    """Contiguous [lo, hi) index ranges covering range(n_items)."""
    n_chunks = max(1, min(n_chunks, n_items))
    bounds = [round(i * n_items / n_chunks) for i in range(n_chunks + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(n_chunks) if bounds[i] < bounds[i + 1]]


def run_chunked(worker: Callable, common_args: Sequence, n_items: int, threads: int) -> list:
    """Apply ``worker(*common_args, lo, hi) -> list`` over index chunks.

    With threads <= 1 runs inline; otherwise fans out to processes.  The
    concatenated result is in index order either way.
    """
    if n_items <= 0:
        return []
    ranges = split_ranges(n_items, threads if threads > 1 else 1)
    if threads <= 1 or len(ranges) == 1:
        out: list = []
        for lo, hi in ranges:
            out.extend(worker(*common_args, lo, hi))
        return out
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, *common_args, lo, hi) for lo, hi in ranges]
        out = []
        for fut in futures:
            out.extend(fut.result())
        return out

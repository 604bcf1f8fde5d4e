"""Deterministic trial-batch parallelism.

Batch boundaries are fixed by the batch size alone, workers return one
partial per batch, and partials are merged in batch order; results are
therefore byte-identical for any thread count.  Threads give real
concurrency because the hot kernels release the GIL.
"""

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["batch_spans", "map_batches", "default_threads"]


def batch_spans(total: int, batch: int):
    spans = []
    start = 0
    while start < total:
        count = min(batch, total - start)
        spans.append((start, count))
        start += count
    return spans


def map_batches(total: int, batch: int, threads: int, worker):
    """Run worker(start, count) over fixed batches; partials in batch order."""
    spans = batch_spans(total, batch)
    if threads <= 1 or len(spans) <= 1:
        return [worker(s, c) for s, c in spans]
    with ThreadPoolExecutor(max_workers=min(threads, len(spans))) as pool:
        futures = [pool.submit(worker, s, c) for s, c in spans]
        return [f.result() for f in futures]


def default_threads(explicit=None) -> int:
    """Resolve a thread count: explicit flag, else LINOPT_THREADS, else 1."""
    if explicit is not None and explicit > 0:
        return int(explicit)
    env = os.environ.get("LINOPT_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1

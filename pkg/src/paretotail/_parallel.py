"""Deterministic chunked execution of Monte Carlo repetitions.

Repetitions are split into fixed-size chunks that do not depend on the
worker count, each chunk reduces its repetitions in index order, and chunk
results are combined in chunk order.  Together with per-repetition RNG
streams spawned from the root seed this makes every aggregate bit-identical
whether it ran serially or on a pool.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

CHUNK_REPS = 50


def run_chunked(worker, n_items: int, workers: int = 1, chunk: int = CHUNK_REPS, args=()):
    """Call ``worker(start, stop, *args)`` over [0, n_items) and collect results in order."""
    if n_items < 1:
        raise ValueError(f"need at least one repetition, got {n_items}")
    bounds = [(s, min(s + chunk, n_items)) for s in range(0, n_items, chunk)]
    if workers <= 1 or len(bounds) == 1:
        return [worker(s, e, *args) for s, e in bounds]
    with ProcessPoolExecutor(max_workers=min(workers, len(bounds))) as pool:
        futures = [pool.submit(worker, s, e, *args) for s, e in bounds]
        return [f.result() for f in futures]

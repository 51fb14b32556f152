"""Thread-pool driver for the GIL-free numba kernels.

Work is cut into fixed-size chunks whose boundaries do not depend on the
thread count, and every chunk writes only its own slice of the output, so a
run with one thread and a run with many produce identical arrays.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "HARDYZ_THREADS"
CHUNK = 2048


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {raw!r}")
        return n
    return os.cpu_count() or 1


def run_chunked(fn, n: int, chunk: int = CHUNK) -> None:
    """Call ``fn(lo, hi)`` over [0, n) in fixed chunks, possibly in parallel."""
    bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    threads = thread_count()
    if threads == 1 or len(bounds) <= 1:
        for lo, hi in bounds:
            fn(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for fut in [pool.submit(fn, lo, hi) for lo, hi in bounds]:
            fut.result()

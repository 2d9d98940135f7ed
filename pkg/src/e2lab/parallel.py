"""Fixed chunking plus an optional process pool.

Chunk boundaries never depend on the worker count, and partial results are
combined in chunk order with ``math.fsum``, so a run gives the same bits for
any number of workers.
"""
import math
import os
from concurrent.futures import ProcessPoolExecutor

CHUNK = 1 << 12


def default_workers():
    env = os.environ.get("E2LAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def chunk_ranges(lo, hi, size=CHUNK):
    """Half-open integer blocks [a, b) covering [lo, hi)."""
    return [(a, min(a + size, hi)) for a in range(lo, hi, size)]


def pmap(func, items, workers=1):
    """Ordered map; runs in-process when workers <= 1 or there is a single item."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(func, items))


def fsum_complex(values):
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))

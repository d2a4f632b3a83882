"""Thread-count policy and an order-preserving parallel map."""
import os
from concurrent.futures import ThreadPoolExecutor

_override = None


def n_threads():
    """Worker count: explicit override, then ``DUALCURV_THREADS``, then CPU count."""
    if _override is not None:
        return _override
    env = os.environ.get("DUALCURV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def set_threads(count):
    """Force the worker count for this process (``None`` restores the default)."""
    global _override
    _override = None if count is None else max(1, int(count))


def pmap(func, items):
    """``list(map(func, items))`` evaluated on a thread pool.

    Results come back in input order, so any reduction performed by the
    caller is independent of the number of workers.
    """
    items = list(items)
    workers = min(n_threads(), len(items))
    if workers <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))

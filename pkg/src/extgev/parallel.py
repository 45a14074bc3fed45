"""Row-parallel map governed by ``EXTGEV_THREADS`` (serial by default)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "EXTGEV_THREADS"


def thread_count() -> int:
    raw = os.environ.get(ENV_THREADS, "1").strip() or "1"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}")
    return n


def map_rows(fn, items) -> list:
    """``[fn(i) for i in items]``, order preserved; each call must be pure."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))

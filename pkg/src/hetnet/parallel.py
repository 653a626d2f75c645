"""Order-preserving map for parameter sweeps.

``HETNET_THREADS`` caps the number of worker processes; unset or 1 runs
serially.  Workers are processes because the solvers are pure Python.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

ENV_VAR = "HETNET_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def pmap(fn, items, chunksize: int = 8) -> list:
    """``[fn(x) for x in items]``, spread over worker processes when enabled."""
    items = list(items)
    workers = min(worker_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))

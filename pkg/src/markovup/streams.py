"""Counter-based random streams for reproducible parallel simulation.

Each path owns a Philox generator keyed by (seed, task, path index), so
results never depend on scheduling order or worker count.  Philox is a
counter-based generator: distinct keys give statistically independent
streams and identical output on every platform.
"""

from __future__ import annotations

import numpy as np

# Task index is packed into the high bits of the second key word, leaving
# room for 2**40 paths per task and 2**24 tasks per seed.
_PATH_BITS = 40
_MAX_PATHS = 1 << _PATH_BITS
_MAX_TASKS = 1 << (64 - _PATH_BITS)


def path_stream(seed: int, path_index: int, task_index: int = 0) -> np.random.Generator:
    """Return the uniform-[0,1) source owned by one simulated path."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    if not 0 <= path_index < _MAX_PATHS:
        raise ValueError(f"path_index must be in [0, 2**{_PATH_BITS}), got {path_index}")
    if not 0 <= task_index < _MAX_TASKS:
        raise ValueError(f"task_index must be in [0, 2**{64 - _PATH_BITS}), got {task_index}")
    key = np.array([seed, (task_index << _PATH_BITS) | path_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

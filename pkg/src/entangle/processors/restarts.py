"""
Seeded restart batches for the local searches
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..core.config import get_settings

T = TypeVar("T")


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Independent stream per (root seed, restart index)"""
    return np.random.default_rng([seed, restart])


def run_restarts(task: Callable[[int], T], restarts: int, threads: Optional[int] = None) -> List[T]:
    """Run task(0..restarts-1); results come back in restart order"""
    workers = min(threads or get_settings().threads, restarts)
    if workers <= 1:
        return [task(index) for index in range(restarts)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(task, range(restarts)))


def best_by(results: Sequence[T], key: Callable[[T], float], maximize: bool = False) -> Tuple[int, T]:
    """Best result; ties go to the lowest restart index"""
    sign = -1.0 if maximize else 1.0
    index = min(range(len(results)), key=lambda k: (sign * key(results[k]), k))
    return index, results[index]

"""Seeding policy.

All randomness flows through Philox4x64 (a counter-based generator). A
matrix column ``j`` drawn under ``seed`` uses the 128-bit Philox key
``(j << 64) | seed``: the low word carries the seed, the high word the
column index. Column streams are therefore independent of generation order
and of each other, and distinct seeds never share a column stream.

Trial-level seeds are derived from a parent seed and integer labels through
``numpy.random.SeedSequence`` hashing.
"""

from __future__ import annotations

import os

import numpy as np

MASK64 = (1 << 64) - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        from .errors import ParameterError

        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def column_generator(seed: int, column: int) -> np.random.Generator:
    """Generator for column ``column`` of a matrix drawn under ``seed``."""
    key = (int(column) << 64) | check_seed(seed)
    return np.random.Generator(np.random.Philox(key=key))


def generator(seed: int) -> np.random.Generator:
    """Generator for draws that are not tied to a matrix column."""
    return np.random.Generator(np.random.Philox(key=check_seed(seed)))


def derive_seed(seed: int, *labels: int) -> int:
    """Hash ``seed`` and integer labels into a fresh 64-bit seed."""
    entropy = [check_seed(seed), *(int(x) for x in labels)]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def max_workers() -> int:
    """Thread cap from ``SUPERPOSE_THREADS`` (defaults to the CPU count)."""
    raw = os.environ.get("SUPERPOSE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1

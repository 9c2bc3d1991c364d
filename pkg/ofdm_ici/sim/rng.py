"""Deterministic random streams.

Every random draw in the package comes from a generator keyed by a root
seed plus a tuple of non-negative integers (stream kind, realization,
target, block, ...). Streams with different keys are independent, and a
stream never depends on which other streams were drawn or in what order.
"""

import numpy as np

# Stream kinds, first element of every key
STREAM_CHANNEL = 0
STREAM_SYMBOLS = 1
STREAM_NOISE = 2
STREAM_BOOTSTRAP = 3
STREAM_ICI_SAMPLES = 4
STREAM_CALIBRATION = 5
STREAM_REALIZATION = 6

SEED_MAX = 2 ** 64 - 1


def _sequence(root: int, key: tuple[int, ...]) -> np.random.SeedSequence:
    if not 0 <= int(root) <= SEED_MAX:
        raise ValueError(f"seed must be in [0, 2**64), got {root}")
    return np.random.SeedSequence(int(root), spawn_key=tuple(int(k) for k in key))


def make_rng(root: int, *key: int) -> np.random.Generator:
    """A PCG64 generator for the stream (root, key)."""
    return np.random.Generator(np.random.PCG64(_sequence(root, key)))


def derive_seed(root: int, *key: int) -> int:
    """A 64-bit child seed for the stream (root, key)."""
    words = _sequence(root, key).generate_state(1, dtype=np.uint64)
    return int(words[0])

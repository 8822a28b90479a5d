"""Counter-based random substreams.

Every random number in a simulation run is a pure function of
``(master_seed, key..., index)``: a key names the substream (trial part,
replication, generation, draw slot) and ``index`` the trial or organism.
Any subset of a run can therefore be recomputed in isolation, and chunked
or threaded execution gives bit-identical results.

The mixer is the SplitMix64 finalizer applied in a chain, vectorized over
numpy ``uint64`` arrays (wrap-around multiplication is the intended
modular arithmetic).
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from reductionlab.errors import ConfigError

SEED_MAX = 2**64 - 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TO_UNIT = 2.0**-53

# Substream tags. Never reorder: changing a tag changes every stored run.
PART1 = 1
PART2 = 2
RACE = 3
EVOLVE = 4


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _mix(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> _S30)) * _M1
    x = (x ^ (x >> _S27)) * _M2
    return x ^ (x >> _S31)


def stream_key(seed: int, key: Sequence[int]) -> np.ndarray:
    """Fold a master seed and a substream key into one 64-bit state."""
    h = _mix(np.array([check_seed(seed)], dtype=np.uint64) + _GOLDEN)
    for part in key:
        h = _mix(h ^ (np.array([int(part) % 2**64], dtype=np.uint64) * _GOLDEN + _GOLDEN))
    return h


def counter_bits(seed: int, key: Sequence[int], index) -> np.ndarray:
    idx = np.asarray(index, dtype=np.uint64)
    h = stream_key(seed, key)
    return _mix(_mix(h + idx * _GOLDEN) ^ h)


def counter_uniforms(seed: int, key: Sequence[int], index) -> np.ndarray:
    """Uniform doubles in [0, 1) with 53 random bits, one per entry of ``index``."""
    return (counter_bits(seed, key, index) >> _S11).astype(np.float64) * _TO_UNIT


def chunk_ranges(start: int, stop: int, workers: int) -> list[tuple[int, int]]:
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    n = stop - start
    pieces = max(1, min(workers, n))
    bounds = np.linspace(start, stop, pieces + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def map_chunks(fn: Callable[[int, int], object], start: int, stop: int, workers: int = 1) -> list:
    """Apply ``fn(lo, hi)`` over contiguous index chunks, results in index order."""
    ranges = chunk_ranges(start, stop, workers)
    if workers == 1 or len(ranges) == 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))

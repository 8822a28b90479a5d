import numpy as np
import pytest
from scipy import stats as sps

from reductionlab import streams
from reductionlab.errors import ConfigError


def test_uniforms_in_unit_interval_and_deterministic():
    idx = np.arange(100_000, dtype=np.uint64)
    a = streams.counter_uniforms(7, (1,), idx)
    b = streams.counter_uniforms(7, (1,), idx)
    assert np.array_equal(a, b)
    assert a.min() >= 0.0 and a.max() < 1.0


def test_any_subset_recomputes_identically():
    full = streams.counter_uniforms(99, (2, 5), np.arange(1000, dtype=np.uint64))
    part = streams.counter_uniforms(99, (2, 5), np.array([3, 500, 999], dtype=np.uint64))
    assert np.array_equal(part, full[[3, 500, 999]])


@pytest.mark.parametrize("key_a,key_b,seed_b", [((1,), (2,), 0), ((1,), (1,), 1), ((4, 0, 1), (4, 1, 0), 0)])
def test_distinct_streams_differ(key_a, key_b, seed_b):
    idx = np.arange(1000, dtype=np.uint64)
    a = streams.counter_uniforms(0, key_a, idx)
    b = streams.counter_uniforms(seed_b, key_b, idx)
    assert not np.any(a == b)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


def test_uniformity_ks_and_lag_correlation():
    u = streams.counter_uniforms(2024, (3,), np.arange(200_000, dtype=np.uint64))
    assert sps.kstest(u, "uniform").pvalue > 1e-3
    assert abs(np.corrcoef(u[:-1], u[1:])[0, 1]) < 4 / np.sqrt(u.size)
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / u.size)


def test_seed_validation():
    for bad in (-1, 2**64, 1.5, True):
        with pytest.raises(ConfigError):
            streams.check_seed(bad)
    assert streams.check_seed(2**64 - 1) == 2**64 - 1


def test_chunking_covers_range_in_order():
    for workers in (1, 2, 3, 8, 50):
        ranges = streams.chunk_ranges(1, 31, workers)
        flat = [i for lo, hi in ranges for i in range(lo, hi)]
        assert flat == list(range(1, 31))
    out = streams.map_chunks(lambda lo, hi: list(range(lo, hi)), 0, 100, workers=4)
    assert sum(out, []) == list(range(100))

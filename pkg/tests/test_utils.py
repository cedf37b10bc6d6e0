"""
Utilitaires : générateur SplitMix64, chronométrage, fichiers
"""

import json

import numpy as np
import pytest

from shearlab.utils import SplitMix64, Timer, best_of, cache_key, ensure_parent_directory, safe_json_dumps


class TestSplitMix64:
    def test_reference_stream(self):
        assert int(SplitMix64(0).next_uint64(1)[0]) == 0xE220A8397B1DCDAF
        mask = (1 << 64) - 1
        state, expected = 1234567, []
        for _ in range(5):
            state = (state + 0x9E3779B97F4A7C15) & mask
            z = ((state ^ (state >> 30)) * 0xBF58476D1CE4E5B9) & mask
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
            expected.append(z ^ (z >> 31))
        assert [int(z) for z in SplitMix64(1234567).next_uint64(5)] == expected

    def test_stream_does_not_depend_on_batching(self):
        batched = SplitMix64(9).next_uint64(6)
        rng = SplitMix64(9)
        split = np.concatenate([rng.next_uint64(2), rng.next_uint64(4)])
        np.testing.assert_array_equal(batched, split)

    def test_uniform_range(self):
        values = SplitMix64(3).uniform((64, 64))
        assert values.shape == (64, 64)
        assert 0.0 <= values.min() and values.max() < 1.0

    def test_normal_moments(self):
        values = SplitMix64(5).normal(20001)
        assert values.shape == (20001,)
        assert abs(values.mean()) < 0.05
        assert abs(values.std() - 1.0) < 0.05


def test_timer_laps():
    timer_ = Timer()
    assert timer_.elapsed_time == 0.0
    for _ in range(3):
        with timer_.measure():
            sum(range(1000))
    assert len(timer_.laps) == 3
    assert timer_.best == min(timer_.laps)
    assert best_of(lambda: None, repeats=2) >= 0.0


def test_safe_json_dumps_is_canonical():
    assert safe_json_dumps({"b": 1, "a": 2}) == safe_json_dumps({"a": 2, "b": 1})
    with pytest.raises(ValueError):
        safe_json_dumps({"x": float("nan")})
    assert json.loads(safe_json_dumps({"é": 1})) == {"é": 1}


def test_files(tmp_path):
    path = ensure_parent_directory(tmp_path / "a" / "b" / "c.txt")
    assert path.parent.is_dir()
    assert cache_key(16, 8, 1) == cache_key(16, 8, 1)
    assert cache_key(16, 8, 1) != cache_key(16, 8, 2)
    assert len(cache_key("x")) == 16

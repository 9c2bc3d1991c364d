"""Tests for the percentile bootstrap CI."""

import numpy as np
import pytest

from ofdm_ici.errors import InvalidConfigError
from ofdm_ici.sim.bootstrap import MIN_RESAMPLES, bootstrap_ci


class TestBootstrapCi:
    def test_all_zero(self):
        assert bootstrap_ci(np.zeros(1000, dtype=np.int8), 2) == (0.0, 0.0)

    def test_constant_counts(self):
        assert bootstrap_ci(np.ones(50), 4) == (0.25, 0.25)

    def test_contains_estimate(self):
        rng = np.random.default_rng(1)
        counts = rng.binomial(2, 0.01, size=5000)
        low, high = bootstrap_ci(counts, 2, seed=3)
        ber = counts.sum() / (2 * counts.size)
        assert low <= ber <= high
        assert high > low

    def test_single_error(self):
        counts = np.zeros(1000, dtype=np.int8)
        counts[17] = 1
        low, high = bootstrap_ci(counts, 2)
        assert low == 0.0
        assert high >= 1 / 2000

    def test_deterministic(self):
        counts = np.random.default_rng(2).binomial(4, 0.1, size=300)
        assert bootstrap_ci(counts, 4, seed=9) == bootstrap_ci(counts, 4, seed=9)

    def test_width_close_to_normal_approximation(self):
        rng = np.random.default_rng(5)
        p, bits, n = 0.05, 4, 20000
        counts = rng.binomial(bits, p, size=n)
        low, high = bootstrap_ci(counts, bits, resamples=2000, seed=1)
        se = np.sqrt(p * (1 - p) / (n * bits))
        assert (high - low) == pytest.approx(2 * 1.96 * se, rel=0.15)

    def test_coverage(self):
        # 200 independent BER estimates at p = 0.02: a 95% CI should cover p
        # in roughly 190 of them; 175 is far outside the binomial spread
        rng = np.random.default_rng(123)
        p, bits, n = 0.02, 2, 2000
        covered = 0
        for trial in range(200):
            counts = rng.binomial(bits, p, size=n)
            low, high = bootstrap_ci(counts, bits, resamples=500, seed=trial)
            covered += low <= p <= high
        assert covered >= 175

    @pytest.mark.parametrize("kwargs", [
        {"resamples": MIN_RESAMPLES - 1},
        {"confidence": 1.0},
        {"confidence": 0.0},
        {"bits_per_iteration": 0},
    ])
    def test_invalid_arguments(self, kwargs):
        args = {"per_iteration_errors": [0, 1, 0], "bits_per_iteration": 2}
        args.update(kwargs)
        with pytest.raises(InvalidConfigError):
            bootstrap_ci(**args)

    def test_empty(self):
        with pytest.raises(InvalidConfigError):
            bootstrap_ci([], 2)

"""Percentile bootstrap confidence intervals for BER estimates."""

import numpy as np

from ..errors import InvalidConfigError
from .rng import STREAM_BOOTSTRAP, make_rng

MIN_RESAMPLES = 100


def bootstrap_ci(per_iteration_errors, bits_per_iteration: int, resamples: int = 1000,
                 confidence: float = 0.95, seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap CI of the BER over iteration-level error counts.

    Resampling n iterations with replacement only depends on how many
    times each distinct count value is drawn, so each resample is one
    multinomial draw over the histogram of counts. The interval is widened
    if needed so that it always contains the point estimate.
    """
    counts = np.asarray(per_iteration_errors, dtype=np.int64).ravel()
    if counts.size == 0:
        raise InvalidConfigError("bootstrap needs at least one iteration")
    if resamples < MIN_RESAMPLES:
        raise InvalidConfigError(f"resamples must be >= {MIN_RESAMPLES}, got {resamples}")
    if not 0 < confidence < 1:
        raise InvalidConfigError(f"confidence must be in (0, 1), got {confidence}")
    if bits_per_iteration < 1:
        raise InvalidConfigError(f"bits_per_iteration must be >= 1, got {bits_per_iteration}")

    n = counts.size
    denom = n * bits_per_iteration
    values, freq = np.unique(counts, return_counts=True)
    if values.size == 1:
        ber = float(values[0]) / bits_per_iteration
        return ber, ber

    rng = make_rng(seed, STREAM_BOOTSTRAP)
    draws = rng.multinomial(n, freq / n, size=resamples)
    replicate_ber = (draws @ values) / denom
    alpha = 1.0 - confidence
    low, high = np.quantile(replicate_ber, [alpha / 2, 1 - alpha / 2])
    ber = counts.sum() / denom
    return float(min(low, ber)), float(max(high, ber))

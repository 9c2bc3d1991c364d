"""Sum-of-sinusoids realizations of tapped-delay-line profiles.

A Jakes tap with average power p becomes n paths at the tap delay:

    a_p = sqrt(p / n) exp(j (2 pi v_p t_eval + phi_p)),   v_p = v_max cos(theta_p)
    theta_p = (2 pi p - pi + psi) / n,                      p = 1..n

with psi and every phi_p independent and uniform on [-pi, pi). The arrival
angles are equally spaced over the full circle with a common random
rotation, so the ensemble autocorrelation of the tap gain is exactly
p J0(2 pi v_max dt). A direct tap becomes a single path with Doppler
v_max cos(theta), theta uniform, and deterministic amplitude sqrt(p).

Tap powers are the profile's average powers normalized to unit sum; no
per-realization renormalization is applied.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from ..core.ofdm import ChannelRealization, PathParams
from ..errors import InvalidConfigError
from ..sim.rng import STREAM_CHANNEL, derive_seed, make_rng
from .profiles import JAKES, TapProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DopplerConfig:
    max_doppler: float      # Hz
    n_sinusoids: int = 8    # per Jakes tap
    seed: int = 0

    def __post_init__(self):
        if not self.max_doppler >= 0:
            raise InvalidConfigError(f"max_doppler must be >= 0, got {self.max_doppler}")
        if self.n_sinusoids < 1:
            raise InvalidConfigError(f"n_sinusoids must be >= 1, got {self.n_sinusoids}")

    @classmethod
    def from_normalized(cls, normalized_doppler: float, symbol_period: float,
                        n_sinusoids: int = 8, seed: int = 0) -> "DopplerConfig":
        """Build from v_max T."""
        return cls(max_doppler=normalized_doppler / symbol_period,
                   n_sinusoids=n_sinusoids, seed=seed)


def realize(profile: TapProfile, dop: DopplerConfig, t_eval: float = 0.0) -> ChannelRealization:
    """One channel realization, deterministic in dop.seed."""
    rng = make_rng(dop.seed, STREAM_CHANNEL)
    paths: list[PathParams] = []
    n = dop.n_sinusoids
    p_index = np.arange(1, n + 1)
    for tap, power in zip(profile.taps, profile.normalized_powers()):
        if tap.spectrum == JAKES:
            psi = rng.uniform(-np.pi, np.pi)
            phi = rng.uniform(-np.pi, np.pi, size=n)
            theta = (2 * np.pi * p_index - np.pi + psi) / n
            doppler = dop.max_doppler * np.cos(theta)
            amps = np.sqrt(power / n) * np.exp(1j * (2 * np.pi * doppler * t_eval + phi))
            paths.extend(PathParams(tap.delay, float(v), complex(a)) for v, a in zip(doppler, amps))
        else:
            theta = rng.uniform(-np.pi, np.pi)
            v = dop.max_doppler * np.cos(theta)
            amp = np.sqrt(power) * np.exp(2j * np.pi * v * t_eval)
            paths.append(PathParams(tap.delay, float(v), complex(amp)))
    label = f"{profile.name} v_max={dop.max_doppler:g}Hz sinusoids={n} seed={dop.seed}"
    return ChannelRealization(paths=tuple(paths), label=label)


def realization_seed(dop: DopplerConfig, index: int) -> int:
    """Seed of the index-th realization derived from dop.seed."""
    return derive_seed(dop.seed, STREAM_CHANNEL, index)


def realize_many(profile: TapProfile, dop: DopplerConfig, count: int,
                 t_eval: float = 0.0) -> list[ChannelRealization]:
    """count realizations with per-index derived seeds."""
    logger.debug("Realizing %d channels of %s", count, profile.name)
    return [
        realize(profile, replace(dop, seed=realization_seed(dop, i)), t_eval)
        for i in range(count)
    ]

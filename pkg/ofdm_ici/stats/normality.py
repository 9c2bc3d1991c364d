"""Normality studies of the ICI term across channel realizations.

Each realization gets its channel from a seed derived from the Doppler
config and its ICI symbol draws from a seed derived from the study seed,
the realization index, the subcarrier's position in S and M. The two
families of streams are independent.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as sps

from ..channel.doppler import DopplerConfig, realize_many
from ..channel.profiles import TapProfile
from ..core.ofdm import ChannelRealization, OfdmConfig, coefficient_set
from ..errors import InvalidConfigError
from ..sim.executor import SerialExecutor
from ..sim.rng import STREAM_CALIBRATION, STREAM_ICI_SAMPLES, derive_seed, make_rng
from .mardia import SampleSet, mardia_statistics, sample_ici

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalityRow:
    profile: str
    constellation_order: int
    subcarrier: int
    symbol_index: int
    realizations: int
    mean_skew: float
    var_skew: float
    mean_kurt: float
    var_kurt: float


@dataclass(frozen=True)
class KurtosisRow:
    """Kurtosis spread across realizations at one axis value."""
    profile: str
    axis: str               # "subcarrier" or "normalized_doppler"
    value: float
    constellation_order: int
    realizations: int
    mean_kurt: float
    p05_kurt: float
    p95_kurt: float


def sample_seed(seed: int, realization: int, cfg: OfdmConfig, subcarrier: int, order: int) -> int:
    position = cfg.used_subcarriers.index(subcarrier)
    return derive_seed(seed, STREAM_ICI_SAMPLES, realization, position, order)


def realization_statistics(cfg: OfdmConfig, chan: ChannelRealization, realization: int,
                           symbol_index: int, subcarriers: Sequence[int], orders: Sequence[int],
                           n_samples: int, seed: int) -> np.ndarray:
    """Mardia (b1, b2) per (subcarrier, M) for one channel; shape (n_sub, n_orders, 2)."""
    out = np.empty((len(subcarriers), len(orders), 2))
    for a, l in enumerate(subcarriers):
        cs = coefficient_set(cfg, chan, symbol_index, l)
        for b, order in enumerate(orders):
            cfg_m = cfg.with_changes(constellation_order=order)
            s = sample_ici(cfg_m, cs, n_samples,
                           sample_seed(seed, realization, cfg, l, order), label=chan.label)
            out[a, b] = mardia_statistics(s)
    return out


def _study(cfg: OfdmConfig, channels: Sequence[ChannelRealization], symbol_index: int,
           subcarriers: Sequence[int], orders: Sequence[int], n_samples: int, seed: int,
           executor: SerialExecutor | None) -> np.ndarray:
    """Statistics of every realization; shape (n_real, n_sub, n_orders, 2)."""
    if not subcarriers or not orders or not channels:
        raise InvalidConfigError("subcarriers, orders and realizations must all be nonempty")
    executor = executor or SerialExecutor()
    per_real = executor.map(
        lambda item: realization_statistics(cfg, item[1], item[0], symbol_index, subcarriers,
                                            orders, n_samples, seed),
        list(enumerate(channels)),
    )
    return np.stack(per_real)


def _variance(values: np.ndarray) -> float:
    return float(np.var(values, ddof=1)) if values.size > 1 else 0.0


def normality_rows(cfg: OfdmConfig, label: str, channels: Sequence[ChannelRealization],
                   orders: Sequence[int], subcarriers: Sequence[int], n_samples: int = 1000,
                   symbol_index: int = 0, seed: int = 0,
                   executor: SerialExecutor | None = None) -> list[NormalityRow]:
    """Mean and variance of Mardia skewness and kurtosis over the given channels."""
    stats = _study(cfg, channels, symbol_index, subcarriers, orders, n_samples, seed, executor)
    rows = []
    for b, order in enumerate(orders):
        for a, l in enumerate(subcarriers):
            skew = stats[:, a, b, 0]
            kurt = stats[:, a, b, 1]
            rows.append(NormalityRow(
                profile=label,
                constellation_order=order,
                subcarrier=l,
                symbol_index=symbol_index,
                realizations=len(channels),
                mean_skew=float(np.mean(skew)),
                var_skew=_variance(skew),
                mean_kurt=float(np.mean(kurt)),
                var_kurt=_variance(kurt),
            ))
    return rows


def normality_table(cfg: OfdmConfig, profiles: Sequence[TapProfile], dop: DopplerConfig,
                    orders: Sequence[int], subcarriers: Sequence[int], n_realizations: int,
                    n_samples: int = 1000, symbol_index: int = 0, seed: int = 0,
                    executor: SerialExecutor | None = None) -> list[NormalityRow]:
    """normality_rows per (profile, M, subcarrier), realizations drawn from dop."""
    rows = []
    for profile in profiles:
        channels = realize_many(profile, dop, n_realizations)
        rows.extend(normality_rows(cfg, profile.name, channels, orders, subcarriers,
                                   n_samples, symbol_index, seed, executor))
        logger.info("Normality study of %s done (%d realizations)", profile.name, n_realizations)
    return rows


def _kurtosis_row(profile: str, axis: str, value: float, order: int, kurt: np.ndarray) -> KurtosisRow:
    p05, p95 = np.percentile(kurt, [5, 95])
    return KurtosisRow(profile, axis, float(value), order, kurt.size,
                       float(np.mean(kurt)), float(p05), float(p95))


def kurtosis_rows(cfg: OfdmConfig, label: str, channels: Sequence[ChannelRealization],
                  subcarriers: Sequence[int], orders: Sequence[int], n_samples: int = 1000,
                  symbol_index: int = 0, seed: int = 0,
                  executor: SerialExecutor | None = None) -> list[KurtosisRow]:
    """Mean, 5th and 95th percentile of kurtosis per (subcarrier, M) over the given channels."""
    stats = _study(cfg, channels, symbol_index, subcarriers, orders, n_samples, seed, executor)
    return [
        _kurtosis_row(label, "subcarrier", l, order, stats[:, a, b, 1])
        for b, order in enumerate(orders)
        for a, l in enumerate(subcarriers)
    ]


def kurtosis_profile(cfg: OfdmConfig, profile: TapProfile, dop: DopplerConfig,
                     subcarriers: Sequence[int], orders: Sequence[int], n_realizations: int,
                     n_samples: int = 1000, symbol_index: int = 0, seed: int = 0,
                     executor: SerialExecutor | None = None) -> list[KurtosisRow]:
    """kurtosis_rows for n_realizations channels drawn from dop."""
    channels = realize_many(profile, dop, n_realizations)
    return kurtosis_rows(cfg, profile.name, channels, subcarriers, orders, n_samples,
                         symbol_index, seed, executor)


def kurtosis_vs_doppler(cfg: OfdmConfig, profile: TapProfile, normalized_dopplers: Sequence[float],
                        subcarrier: int, orders: Sequence[int], n_realizations: int,
                        n_samples: int = 1000, n_sinusoids: int = 8, channel_seed: int = 0,
                        symbol_index: int = 0, seed: int = 0,
                        executor: SerialExecutor | None = None) -> list[KurtosisRow]:
    """Mean, 5th and 95th percentile of kurtosis per (v_max T, M) at one subcarrier."""
    if not normalized_dopplers:
        raise InvalidConfigError("normalized Doppler grid must not be empty")
    rows = []
    for nu_t in normalized_dopplers:
        dop = DopplerConfig.from_normalized(nu_t, cfg.symbol_period, n_sinusoids, channel_seed)
        channels = realize_many(profile, dop, n_realizations)
        stats = _study(cfg, channels, symbol_index, [subcarrier], orders, n_samples, seed, executor)
        rows.extend(_kurtosis_row(profile.name, "normalized_doppler", nu_t, order, stats[:, 0, b, 1])
                    for b, order in enumerate(orders))
        logger.info("Kurtosis at v_max T = %g done", nu_t)
    return rows


def ici_histogram(s: SampleSet, bins: int = 50) -> list[tuple[float, float, float]]:
    """Binned joint density of (Re ICI, Im ICI) as (re_center, im_center, density) rows."""
    density, re_edges, im_edges = np.histogram2d(s.samples[:, 0], s.samples[:, 1],
                                                 bins=bins, density=True)
    re_c = (re_edges[:-1] + re_edges[1:]) / 2
    im_c = (im_edges[:-1] + im_edges[1:]) / 2
    return [(float(re_c[i]), float(im_c[j]), float(density[i, j]))
            for i in range(len(re_c)) for j in range(len(im_c))]


def marginal_cdf(s: SampleSet, ici_variance: float, points: int = 101) -> list[tuple[float, float, float]]:
    """Empirical CDF of Re ICI next to the normal CDF of variance Var(ICI)/2.

    Rows are (x, empirical, gaussian) on an even grid spanning the samples.
    """
    if not ici_variance > 0:
        raise InvalidConfigError(f"ici_variance must be > 0, got {ici_variance}")
    re = np.sort(s.samples[:, 0])
    grid = np.linspace(re[0], re[-1], points)
    empirical = np.searchsorted(re, grid, side="right") / re.size
    gaussian = sps.norm.cdf(grid, scale=np.sqrt(ici_variance / 2.0))
    return [(float(x), float(e), float(g)) for x, e, g in zip(grid, empirical, gaussian)]


def gaussian_calibration(n: int, seeds: int, root: int = 0) -> tuple[float, float]:
    """Mean (b1, b2) over `seeds` independent standard bivariate normal samples of size n."""
    totals = np.zeros(2)
    for i in range(seeds):
        z = make_rng(root, STREAM_CALIBRATION, i).standard_normal((n, 2))
        totals += mardia_statistics(SampleSet(z))
    return float(totals[0] / seeds), float(totals[1] / seeds)

"""Monte-Carlo BER engine working directly in the frequency domain.

One iteration for a target (m, l):

1. draw uniform labels for every subcarrier of S in OFDM symbol m;
2. map them to QAM symbols X[m,k];
3. form Y = X[m,l] H[m,l] + sum_{k != l} X[m,k] H_ici[m,l,k] + sqrt(N0/2) (n_re + j n_im)
   with n_re, n_im ~ N(0, 1), so the noise variance is N0;
4. zero-force: X_hat = Y / H[m,l];
5. slice X_hat to a Gray label;
6. count differing bits.

Targets sharing a symbol index m share their symbol draws (they belong to
the same transmitted OFDM symbol). Noise is independent per target. The
noise draws are also shared across the noise levels of run_ber_grid, so an
E_b/N0 sweep uses common random numbers.

Iterations run in blocks; every (symbol group, block) pair has its own
derived random stream, and per-iteration error counts are concatenated in
block order, so results are identical for any executor or thread count.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..channel.doppler import DopplerConfig, realize_many
from ..channel.profiles import TapProfile
from ..core.analytic import (
    LinkMetrics,
    awgn_qam_bep,
    noise_density_for,
    received_bit_energy,
    symbol_bep,
)
from ..core.modem import Constellation, bit_errors, build_constellation, demap_labels
from ..core.ofdm import ChannelRealization, CoefficientSet, OfdmConfig, coefficient_sets
from ..errors import (
    DiscardedResultError,
    InvalidConfigError,
    SubcarrierNotUsedError,
    ZeroBepError,
    ZeroChannelError,
)
from .bootstrap import bootstrap_ci
from .executor import SerialExecutor
from .rng import (
    STREAM_BOOTSTRAP,
    STREAM_NOISE,
    STREAM_REALIZATION,
    STREAM_SYMBOLS,
    derive_seed,
    make_rng,
)

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 1024
SWEEP_AXES = ("ebno_db", "normalized_doppler")


@dataclass(frozen=True)
class SimSpec:
    """What to simulate: link config, targets (m, l) and iteration budget."""
    cfg: OfdmConfig
    targets: tuple[tuple[int, int], ...]
    iterations: int
    seed: int = 0
    min_error_bits: int = 10
    bootstrap_resamples: int = 1000
    confidence: float = 0.95
    block_size: int = DEFAULT_BLOCK_SIZE

    def __post_init__(self):
        targets = self.targets
        if len(targets) == 2 and all(isinstance(v, (int, np.integer)) for v in targets):
            targets = (targets,)
        targets = tuple((int(m), int(l)) for m, l in targets)
        object.__setattr__(self, "targets", targets)
        if not targets:
            raise InvalidConfigError("SimSpec needs at least one target (m, l)")
        for m, l in targets:
            if not self.cfg.uses(l):
                raise SubcarrierNotUsedError(f"target subcarrier {l} is not in the used-subcarrier set")
        if self.iterations < 1:
            raise InvalidConfigError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 < self.confidence < 1:
            raise InvalidConfigError(f"confidence must be in (0, 1), got {self.confidence}")
        if self.min_error_bits < 0:
            raise InvalidConfigError(f"min_error_bits must be >= 0, got {self.min_error_bits}")
        if self.block_size < 1:
            raise InvalidConfigError(f"block_size must be >= 1, got {self.block_size}")

    @property
    def n_blocks(self) -> int:
        return math.ceil(self.iterations / self.block_size)


@dataclass(frozen=True)
class BerResult:
    """Simulated BER of one target at one noise level."""
    symbol_index: int
    subcarrier: int
    ber: float
    error_bits: int
    total_bits: int
    ci_low: float
    ci_high: float
    discarded: bool
    noise_density: float
    ici_variance: float
    rho: float | None = None

    def with_rho(self, rho: float | None) -> "BerResult":
        return replace(self, rho=rho)


@dataclass(frozen=True)
class InstantaneousRow:
    """Analytic metrics and simulated BER of one (realization, m, l)."""
    realization: int
    metrics: LinkMetrics
    result: BerResult

    @property
    def rho(self) -> float | None:
        return self.result.rho


@dataclass(frozen=True)
class SweepAxis:
    name: str                   # "ebno_db" or "normalized_doppler"
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in SWEEP_AXES:
            raise InvalidConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {self.name!r}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise InvalidConfigError("sweep grid must not be empty")


@dataclass(frozen=True)
class SweepRow:
    """Averages over realizations at one (grid point, target)."""
    axis: str
    value: float
    constellation_order: int
    symbol_index: int
    subcarrier: int
    mean_bep: float
    mean_ber: float
    ci_low: float
    ci_high: float
    error_bits: int
    total_bits: int
    realizations: int
    discarded_realizations: int


@dataclass(frozen=True)
class _SymbolGroup:
    """Targets sharing one OFDM symbol index, simulated from common draws."""
    index: int
    symbol_index: int
    positions: tuple[int, ...]  # indices into spec.targets
    gains: np.ndarray           # |S| x n_targets, H on the own subcarrier, H_ici elsewhere
    own_columns: np.ndarray     # position of each target's l within S
    channel_coeffs: np.ndarray  # H[m,l] per target


def _group_targets(cfg: OfdmConfig, sets: Sequence[CoefficientSet]) -> list[_SymbolGroup]:
    column = {k: i for i, k in enumerate(cfg.used_subcarriers)}
    by_symbol: dict[int, list[int]] = {}
    for pos, cs in enumerate(sets):
        by_symbol.setdefault(cs.symbol_index, []).append(pos)

    groups = []
    for g, (m, positions) in enumerate(by_symbol.items()):
        gains = np.zeros((len(cfg.used_subcarriers), len(positions)), dtype=complex)
        own = np.empty(len(positions), dtype=np.intp)
        coeffs = np.empty(len(positions), dtype=complex)
        for j, pos in enumerate(positions):
            cs = sets[pos]
            own[j] = column[cs.subcarrier]
            coeffs[j] = cs.channel_coeff
            gains[[column[k] for k in cs.ici_subcarriers], j] = cs.ici_values
            gains[own[j], j] = cs.channel_coeff
        groups.append(_SymbolGroup(g, m, tuple(positions), gains, own, coeffs))
    return groups


def _simulate_block(spec: SimSpec, constellation: Constellation, levels: np.ndarray,
                    group: _SymbolGroup, block: int) -> np.ndarray:
    """Bit errors per (noise level, iteration, target) for one block of iterations."""
    start = block * spec.block_size
    size = min(spec.block_size, spec.iterations - start)
    n_sub = group.gains.shape[0]
    n_targets = group.gains.shape[1]

    symbol_rng = make_rng(spec.seed, STREAM_SYMBOLS, group.index, block)
    labels = symbol_rng.integers(0, constellation.order, size=(size, n_sub))
    received = constellation.points[labels] @ group.gains

    noise_rng = make_rng(spec.seed, STREAM_NOISE, group.index, block)
    noise = noise_rng.standard_normal((size, n_targets, 2))
    noise = noise[..., 0] + 1j * noise[..., 1]

    sent = labels[:, group.own_columns]
    errors = np.empty((len(levels), size, n_targets), dtype=np.int8)
    for i, n0 in enumerate(levels):
        y = received + math.sqrt(n0 / 2.0) * noise
        decided = demap_labels(constellation, y / group.channel_coeffs)
        errors[i] = bit_errors(constellation, sent, decided)
    return errors


def _run_sets(spec: SimSpec, sets: Sequence[CoefficientSet], levels: np.ndarray,
              executor: SerialExecutor | None) -> list[list[BerResult]]:
    cfg = spec.cfg
    for cs in sets:
        if cs.channel_coeff == 0:
            raise ZeroChannelError(
                f"H[{cs.symbol_index},{cs.subcarrier}] is zero; zero-forcing is undefined"
            )
    constellation = build_constellation(cfg.constellation_order, cfg.symbol_variance)
    groups = _group_targets(cfg, sets)
    tasks = [(group, block) for group in groups for block in range(spec.n_blocks)]
    executor = executor or SerialExecutor()
    outputs = executor.map(
        lambda task: _simulate_block(spec, constellation, levels, task[0], task[1]), tasks
    )

    per_target: list[np.ndarray | None] = [None] * len(sets)
    cursor = 0
    for group in groups:
        blocks = outputs[cursor:cursor + spec.n_blocks]
        cursor += spec.n_blocks
        stacked = np.concatenate(blocks, axis=1)  # level x iteration x target
        for j, pos in enumerate(group.positions):
            per_target[pos] = stacked[:, :, j]

    bits = cfg.bits_per_symbol
    total_bits = spec.iterations * bits
    results: list[list[BerResult]] = []
    for li, n0 in enumerate(levels):
        row = []
        for pos, cs in enumerate(sets):
            counts = per_target[pos][li]
            error_bits = int(counts.sum(dtype=np.int64))
            low, high = bootstrap_ci(
                counts, bits, spec.bootstrap_resamples, spec.confidence,
                seed=derive_seed(spec.seed, STREAM_BOOTSTRAP, pos, li),
            )
            discarded = error_bits < spec.min_error_bits
            if discarded:
                logger.debug("Discarding BER at (m=%d, l=%d, N0=%g): %d error bits",
                             cs.symbol_index, cs.subcarrier, n0, error_bits)
            row.append(BerResult(
                symbol_index=cs.symbol_index,
                subcarrier=cs.subcarrier,
                ber=error_bits / total_bits,
                error_bits=error_bits,
                total_bits=total_bits,
                ci_low=low,
                ci_high=high,
                discarded=discarded,
                noise_density=float(n0),
                ici_variance=cfg.symbol_variance * cs.ici_power,
            ))
        results.append(row)
    return results


def _check_levels(noise_densities) -> np.ndarray:
    levels = np.atleast_1d(np.asarray(noise_densities, dtype=float))
    if levels.size == 0:
        raise InvalidConfigError("at least one noise density is required")
    if not np.all(np.isfinite(levels) & (levels >= 0)):
        raise InvalidConfigError("noise densities must be finite and >= 0")
    return levels


def run_ber_grid(spec: SimSpec, chan: ChannelRealization, noise_densities,
                 executor: SerialExecutor | None = None) -> list[list[BerResult]]:
    """BER of every target at every noise density, sharing symbol and noise draws.

    spec.cfg.noise_density is ignored here. Returns results[level][target].
    """
    levels = _check_levels(noise_densities)
    sets = coefficient_sets(spec.cfg, chan, spec.targets)
    return _run_sets(spec, sets, levels, executor)


def run_ber(spec: SimSpec, chan: ChannelRealization,
            executor: SerialExecutor | None = None) -> list[BerResult]:
    """BER of every target at spec.cfg.noise_density, in target order."""
    return run_ber_grid(spec, chan, [spec.cfg.noise_density], executor)[0]


def error_factor(ber: BerResult, metrics: LinkMetrics) -> float:
    """rho = BER / BEP."""
    if ber.discarded:
        raise DiscardedResultError(
            f"BER at (m={ber.symbol_index}, l={ber.subcarrier}) has only {ber.error_bits} error bits"
        )
    if metrics.bep <= 0:
        raise ZeroBepError(f"BEP is zero at (m={metrics.symbol_index}, l={metrics.subcarrier})")
    return ber.ber / metrics.bep


def realization_spec(spec: SimSpec, index: int) -> SimSpec:
    """spec with the seed of the index-th channel realization."""
    return replace(spec, seed=derive_seed(spec.seed, STREAM_REALIZATION, index))


def _rho_or_none(result: BerResult, metrics: LinkMetrics) -> float | None:
    if result.discarded or metrics.bep <= 0:
        return None
    return error_factor(result, metrics)


def instantaneous_study(spec: SimSpec, channels: Sequence[ChannelRealization],
                        executor: SerialExecutor | None = None) -> list[InstantaneousRow]:
    """Analytic BEP, simulated BER and rho per (realization, target)."""
    rows = []
    discarded = 0
    for i, chan in enumerate(channels):
        sets = coefficient_sets(spec.cfg, chan, spec.targets)
        results = _run_sets(realization_spec(spec, i), sets,
                            _check_levels([spec.cfg.noise_density]), executor)[0]
        for cs, result in zip(sets, results):
            metrics = symbol_bep(spec.cfg, cs)
            discarded += result.discarded
            rows.append(InstantaneousRow(i, metrics, result.with_rho(_rho_or_none(result, metrics))))
        logger.info("Realization %d/%d done (%d targets)", i + 1, len(channels), len(sets))
    if discarded:
        logger.warning("%d of %d BER estimates discarded (< %d error bits)",
                       discarded, len(rows), spec.min_error_bits)
    return rows


def _bep_at(cfg: OfdmConfig, cs: CoefficientSet, n0: float) -> float:
    denom = cfg.symbol_variance * cs.ici_power + n0
    if denom == 0:
        return 0.0
    return awgn_qam_bep(cfg.constellation_order, received_bit_energy(cfg, cs.channel_power) / denom)


def _sweep_rows(spec: SimSpec, axis: str, value: float, bep: np.ndarray,
                errors: np.ndarray, discarded: np.ndarray) -> list[SweepRow]:
    """bep, errors and discarded are realization x target arrays."""
    n_real = bep.shape[0]
    bits_per_real = spec.iterations * spec.cfg.bits_per_symbol
    rows = []
    for j, (m, l) in enumerate(spec.targets):
        err = errors[:, j]
        if n_real > 1:
            low, high = bootstrap_ci(err, bits_per_real, spec.bootstrap_resamples, spec.confidence,
                                     seed=derive_seed(spec.seed, STREAM_BOOTSTRAP, j))
        else:
            low = high = float(err[0]) / bits_per_real
        rows.append(SweepRow(
            axis=axis,
            value=value,
            constellation_order=spec.cfg.constellation_order,
            symbol_index=m,
            subcarrier=l,
            mean_bep=float(np.mean(bep[:, j])),
            mean_ber=float(err.sum()) / (n_real * bits_per_real),
            ci_low=low,
            ci_high=high,
            error_bits=int(err.sum()),
            total_bits=n_real * bits_per_real,
            realizations=n_real,
            discarded_realizations=int(discarded[:, j].sum()),
        ))
    return rows


def average_sweep(spec: SimSpec, profile: TapProfile, dop: DopplerConfig, n_realizations: int,
                  sweep: SweepAxis, executor: SerialExecutor | None = None) -> list[SweepRow]:
    """Mean analytic BEP and mean simulated BER over channel realizations.

    ebno_db axis: dop is fixed and N0 follows each E_b/N0 value.
    normalized_doppler axis: N0 is spec.cfg.noise_density and v_max T
    follows each value, keeping dop.seed so every grid point sees the same
    angles and phases.
    The CI is a percentile bootstrap over realization-level error counts.
    """
    if n_realizations < 1:
        raise InvalidConfigError(f"n_realizations must be >= 1, got {n_realizations}")
    cfg = spec.cfg
    n_points = len(sweep.values)
    n_targets = len(spec.targets)
    bep = np.zeros((n_points, n_realizations, n_targets))
    errors = np.zeros((n_points, n_realizations, n_targets), dtype=np.int64)
    discarded = np.zeros((n_points, n_realizations, n_targets), dtype=bool)

    if sweep.name == "ebno_db":
        levels = _check_levels([noise_density_for(v, cfg.constellation_order, cfg.symbol_variance)
                                for v in sweep.values])
        channels = realize_many(profile, dop, n_realizations)
        for i, chan in enumerate(channels):
            sets = coefficient_sets(cfg, chan, spec.targets)
            results = _run_sets(realization_spec(spec, i), sets, levels, executor)
            for p, n0 in enumerate(levels):
                for j, cs in enumerate(sets):
                    bep[p, i, j] = _bep_at(cfg, cs, n0)
                    errors[p, i, j] = results[p][j].error_bits
                    discarded[p, i, j] = results[p][j].discarded
            if (i + 1) % 10 == 0 or i + 1 == n_realizations:
                logger.info("Sweep %s: %d/%d realizations", profile.name, i + 1, n_realizations)
    else:
        levels = _check_levels([cfg.noise_density])
        for p, nu_t in enumerate(sweep.values):
            dop_p = DopplerConfig.from_normalized(nu_t, cfg.symbol_period, dop.n_sinusoids, dop.seed)
            for i, chan in enumerate(realize_many(profile, dop_p, n_realizations)):
                sets = coefficient_sets(cfg, chan, spec.targets)
                results = _run_sets(realization_spec(spec, i), sets, levels, executor)[0]
                for j, cs in enumerate(sets):
                    bep[p, i, j] = _bep_at(cfg, cs, cfg.noise_density)
                    errors[p, i, j] = results[j].error_bits
                    discarded[p, i, j] = results[j].discarded
            logger.info("Sweep %s: grid point %d/%d (v_max T = %g)",
                        profile.name, p + 1, n_points, nu_t)

    rows = []
    for p, value in enumerate(sweep.values):
        rows.extend(_sweep_rows(spec, sweep.name, value, bep[p], errors[p], discarded[p]))
    return rows

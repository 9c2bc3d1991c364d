"""Study abstractions and registry.

A study turns a fully resolved Scenario into result tables. Studies are
registered by name in a StudyRegistry; StudyRegistry.execute() never
raises and reports failures through StudyResult.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..channel.doppler import DopplerConfig, realize_many
from ..channel.profiles import ProfileRegistry, TapProfile
from ..channel.realization_io import load_realization
from ..core.analytic import awgn_qam_bep, bep_by_enumeration
from ..core.ofdm import ChannelRealization, OfdmConfig, PathParams, coefficient_set
from ..errors import OfdmIciError, ScenarioError
from ..sim.executor import SerialExecutor
from ..sim.montecarlo import SimSpec, SweepAxis, average_sweep, instantaneous_study, run_ber
from ..sim.rng import STREAM_CHANNEL, STREAM_REALIZATION, STREAM_SYMBOLS, derive_seed
from ..stats.mardia import expected_kurtosis, expected_skewness, sample_ici
from ..stats.normality import (
    gaussian_calibration,
    ici_histogram,
    kurtosis_rows,
    kurtosis_vs_doppler,
    marginal_cdf,
    normality_rows,
)
from .outputs import NOT_AVAILABLE, RunOutputs, Table
from .scenario import Scenario

logger = logging.getLogger(__name__)


@dataclass
class StudyResult:
    """Result of executing a study."""
    success: bool
    output: str  # Human-readable summary
    data: dict = field(default_factory=dict)
    error: str = ""


@dataclass
class StudyContext:
    """Everything a study handler needs."""
    scenario: Scenario
    outputs: RunOutputs
    executor: SerialExecutor
    profiles: ProfileRegistry


@dataclass
class StudyDefinition:
    name: str
    description: str
    handler: Callable[[StudyContext], StudyResult]
    command: str = ""   # CLI subcommand


class StudyRegistry:
    """Registry of available studies."""

    def __init__(self):
        self._studies: dict[str, StudyDefinition] = {}

    def register(self, study: StudyDefinition):
        self._studies[study.name] = study

    def get(self, name: str) -> StudyDefinition | None:
        return self._studies.get(name)

    def by_command(self, command: str) -> StudyDefinition | None:
        for study in self._studies.values():
            if study.command == command:
                return study
        return None

    def list_studies(self) -> list[StudyDefinition]:
        return list(self._studies.values())

    def execute(self, name: str, ctx: StudyContext) -> StudyResult:
        """Run a study by name. Never leaks exceptions."""
        study = self._studies.get(name)
        if not study:
            return StudyResult(success=False, output="", error=f"Unknown study: {name}")
        try:
            return study.handler(ctx)
        except OfdmIciError as e:
            logger.error("Study %s failed: %s", name, e)
            return StudyResult(success=False, output="", error=f"{type(e).__name__}: {e}")
        except Exception as e:
            logger.exception("Study %s crashed", name)
            return StudyResult(success=False, output="", error=f"Study {name} failed: {e}")


# -- channels ------------------------------------------------------------------

@dataclass
class ChannelGroup:
    """Realizations of one channel source."""
    label: str
    channels: list[ChannelRealization]
    profile: TapProfile | None = None
    doppler: DopplerConfig | None = None


def channel_seed(scenario: Scenario) -> int:
    return derive_seed(scenario.seed, STREAM_CHANNEL)


def doppler_for(scenario: Scenario) -> DopplerConfig:
    return DopplerConfig.from_normalized(
        scenario.channel.normalized_doppler, scenario.ofdm.symbol_period,
        scenario.channel.n_sinusoids, channel_seed(scenario),
    )


def channel_groups(ctx: StudyContext) -> list[ChannelGroup]:
    s = ctx.scenario
    if s.channel.file is not None:
        chan = load_realization(s.channel.file)
        return [ChannelGroup(chan.label or s.channel.file, [chan])]
    dop = doppler_for(s)
    groups = []
    for name in s.channel.profiles:
        profile = ctx.profiles.get(name)
        groups.append(ChannelGroup(name, realize_many(profile, dop, s.params.realizations),
                                   profile, dop))
    return groups


def _study_seed(scenario: Scenario, order: int) -> int:
    return derive_seed(scenario.seed, STREAM_REALIZATION, order)


def _targets(scenario: Scenario) -> tuple[tuple[int, int], ...]:
    return tuple((m, l) for m in scenario.params.symbols for l in scenario.params.subcarriers)


# -- coefficients ---------------------------------------------------------------

COEFFICIENT_COLUMNS = ("profile", "realization", "m", "l", "k", "re", "im", "abs2")
COEFFICIENT_SUMMARY_COLUMNS = ("profile", "realization", "m", "l", "t_m", "channel_re", "channel_im",
                               "channel_power", "ici_power")


def run_coefficients(ctx: StudyContext) -> StudyResult:
    s = ctx.scenario
    coeffs = Table("coefficients", COEFFICIENT_COLUMNS)
    summary = Table("coefficient_summary", COEFFICIENT_SUMMARY_COLUMNS)
    dump = 0
    for group in channel_groups(ctx):
        for r, chan in enumerate(group.channels):
            ctx.outputs.write_realization(chan, dump)
            dump += 1
            for m, l in _targets(s):
                cs = coefficient_set(s.ofdm, chan, m, l)
                h = cs.channel_coeff
                coeffs.add(group.label, r, m, l, l, h.real, h.imag, abs(h) ** 2)
                for k, v in zip(cs.ici_subcarriers, cs.ici_values):
                    coeffs.add(group.label, r, m, l, k, v.real, v.imag, abs(v) ** 2)
                summary.add(group.label, r, m, l, cs.symbol_start_time, h.real, h.imag,
                            cs.channel_power, cs.ici_power)
    ctx.outputs.write_table(coeffs)
    ctx.outputs.write_table(summary)
    return StudyResult(success=True, output=f"{len(summary.rows)} coefficient sets",
                       data={"rows": len(summary.rows)})


# -- normality ------------------------------------------------------------------

NORMALITY_COLUMNS = ("profile", "M", "subcarrier", "symbol", "realizations",
                     "mean_skew", "var_skew", "mean_kurt", "var_kurt")
KURTOSIS_COLUMNS = ("profile", "axis", "value", "M", "realizations", "mean_kurt", "p05_kurt", "p95_kurt")
HISTOGRAM_COLUMNS = ("profile", "M", "subcarrier", "re", "im", "density")
CDF_COLUMNS = ("profile", "M", "subcarrier", "x", "empirical", "gaussian")


def run_normality(ctx: StudyContext) -> StudyResult:
    s = ctx.scenario
    p = s.params
    table = Table("normality", NORMALITY_COLUMNS)
    kurt = Table("kurtosis_profile", KURTOSIS_COLUMNS)
    hist = Table("ici_histogram", HISTOGRAM_COLUMNS)
    cdf = Table("ici_marginal_cdf", CDF_COLUMNS)
    groups = channel_groups(ctx)

    for group in groups:
        for m in p.symbols:
            for row in normality_rows(s.ofdm, group.label, group.channels, s.constellation_orders,
                                      p.subcarriers, p.samples, m, s.seed, ctx.executor):
                table.add(row.profile, row.constellation_order, row.subcarrier, row.symbol_index,
                          row.realizations, row.mean_skew, row.var_skew, row.mean_kurt, row.var_kurt)
        if p.kurtosis_subcarriers:
            for row in kurtosis_rows(s.ofdm, group.label, group.channels, p.kurtosis_subcarriers,
                                     s.constellation_orders, p.samples, p.symbols[0], s.seed,
                                     ctx.executor):
                kurt.add(row.profile, row.axis, row.value, row.constellation_order,
                         row.realizations, row.mean_kurt, row.p05_kurt, row.p95_kurt)
        if p.kurtosis_dopplers:
            if group.profile is None:
                raise ScenarioError("a Doppler sweep needs a built-in profile", "params.kurtosis_dopplers")
            for row in kurtosis_vs_doppler(s.ofdm, group.profile, p.kurtosis_dopplers,
                                           p.subcarriers[0], s.constellation_orders, len(group.channels),
                                           p.samples, s.channel.n_sinusoids, group.doppler.seed,
                                           p.symbols[0], s.seed, ctx.executor):
                kurt.add(row.profile, row.axis, row.value, row.constellation_order,
                         row.realizations, row.mean_kurt, row.p05_kurt, row.p95_kurt)
        if p.histogram_bins or p.dump_samples:
            _write_samples(ctx, group, hist, cdf)

    ctx.outputs.write_table(table)
    if kurt.rows:
        ctx.outputs.write_table(kurt)
    if hist.rows:
        ctx.outputs.write_table(hist)
        ctx.outputs.write_table(cdf)
    return StudyResult(success=True, output=f"{len(table.rows)} normality rows",
                       data={"rows": len(table.rows)})


def _write_samples(ctx: StudyContext, group: ChannelGroup, hist: Table, cdf: Table):
    """Histogram, marginal CDF and raw samples of the first realization."""
    s = ctx.scenario
    p = s.params
    chan = group.channels[0]
    m = p.symbols[0]
    for l in p.subcarriers:
        cs = coefficient_set(s.ofdm, chan, m, l)
        for order in s.constellation_orders:
            cfg = s.ofdm.with_changes(constellation_order=order)
            samples = sample_ici(cfg, cs, p.samples, derive_seed(s.seed, STREAM_SYMBOLS, order),
                                 label=group.label)
            if p.histogram_bins:
                for x_re, x_im, density in ici_histogram(samples, p.histogram_bins):
                    hist.add(group.label, order, l, x_re, x_im, density)
                for x, emp, gauss in marginal_cdf(samples, cfg.symbol_variance * cs.ici_power):
                    cdf.add(group.label, order, l, x, emp, gauss)
            if p.dump_samples:
                lines = ["re,im"] + [f"{x!r},{y!r}" for x, y in samples.samples.tolist()]
                name = f"samples_{_file_label(group.label)}_{order}_{l}.csv"
                ctx.outputs.write_text(name, "\n".join(lines) + "\n")


def _file_label(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label).strip("_") or "channel"


# -- instantaneous --------------------------------------------------------------

INSTANT_COLUMNS = ("profile", "M", "realization", "m", "l", "channel_power", "ici_variance",
                   "noise_density", "ebrx", "ratio", "ratio_db", "bep", "capacity", "ber",
                   "ci_low", "ci_high", "error_bits", "total_bits", "discarded", "rho")


def _db(x: float) -> float | str:
    return 10.0 * math.log10(x) if x > 0 else NOT_AVAILABLE


def _rho_cell(result) -> float | str | None:
    if result.discarded:
        return None
    return NOT_AVAILABLE if result.rho is None else result.rho


def run_instantaneous(ctx: StudyContext) -> StudyResult:
    s = ctx.scenario
    p = s.params
    table = Table("instantaneous", INSTANT_COLUMNS)
    dump = 0
    for group in channel_groups(ctx):
        for chan in group.channels:
            ctx.outputs.write_realization(chan, dump)
            dump += 1
        for order in s.constellation_orders:
            spec = SimSpec(
                cfg=s.config_for(order), targets=_targets(s), iterations=p.iterations,
                seed=_study_seed(s, order), min_error_bits=p.min_error_bits,
                bootstrap_resamples=p.bootstrap_resamples, confidence=p.confidence,
            )
            for row in instantaneous_study(spec, group.channels, ctx.executor):
                mt, res = row.metrics, row.result
                valid = not res.discarded
                table.add(
                    group.label, order, row.realization, mt.symbol_index, mt.subcarrier,
                    mt.channel_power, mt.ici_variance, mt.noise_density, mt.ebrx, mt.ratio,
                    _db(mt.ratio), mt.bep, mt.capacity_lower_bound,
                    res.ber if valid else None,
                    res.ci_low if valid else None,
                    res.ci_high if valid else None,
                    res.error_bits, res.total_bits, res.discarded, _rho_cell(res),
                )
    ctx.outputs.write_table(table)
    return StudyResult(success=True, output=f"{len(table.rows)} symbol rows",
                       data={"rows": len(table.rows)})


# -- average sweep --------------------------------------------------------------

SWEEP_COLUMNS = ("profile", "axis", "value", "M", "m", "l", "mean_bep", "mean_ber", "ci_low",
                 "ci_high", "error_bits", "total_bits", "realizations", "discarded_realizations")


def run_average_sweep(ctx: StudyContext) -> StudyResult:
    s = ctx.scenario
    p = s.params
    if s.channel.file is not None:
        raise ScenarioError("average_sweep needs a built-in profile", "channel.file")
    table = Table("average_sweep", SWEEP_COLUMNS)
    axis = SweepAxis(p.axis, p.grid)
    dop = doppler_for(s)
    for name in s.channel.profiles:
        profile = ctx.profiles.get(name)
        for order in s.constellation_orders:
            spec = SimSpec(
                cfg=s.config_for(order), targets=_targets(s), iterations=p.iterations,
                seed=_study_seed(s, order), min_error_bits=p.min_error_bits,
                bootstrap_resamples=p.bootstrap_resamples, confidence=p.confidence,
            )
            for row in average_sweep(spec, profile, dop, p.realizations, axis, ctx.executor):
                table.add(name, row.axis, row.value, row.constellation_order, row.symbol_index,
                          row.subcarrier, row.mean_bep, row.mean_ber, row.ci_low, row.ci_high,
                          row.error_bits, row.total_bits, row.realizations,
                          row.discarded_realizations)
    ctx.outputs.write_table(table)
    return StudyResult(success=True, output=f"{len(table.rows)} sweep rows",
                       data={"rows": len(table.rows)})


# -- validate -------------------------------------------------------------------

CHECK_COLUMNS = ("check", "value", "expected", "tolerance", "passed")

BEP_ORACLE_ORDERS = (4, 16, 64)
BEP_ORACLE_RATIOS = (0.1, 1.0, 10.0, 30.0)
BEP_ORACLE_TOLERANCE = 1e-12
ORTHOGONALITY_TOLERANCE = 1e-12


def _small_config(order: int = 4, noise_density: float = 0.0) -> OfdmConfig:
    return OfdmConfig(subcarrier_spacing=15_000.0, cp_length=72 / 15.36e6,
                      used_subcarriers=tuple(range(-4, 0)) + tuple(range(1, 5)),
                      constellation_order=order, noise_density=noise_density)


def run_validate(ctx: StudyContext) -> StudyResult:
    """Fast self-checks of the analytic, simulation and statistics layers."""
    s = ctx.scenario
    p = s.params
    checks = Table("checks", CHECK_COLUMNS)

    worst = max(abs(awgn_qam_bep(m, r) - bep_by_enumeration(m, r))
                for m in BEP_ORACLE_ORDERS for r in BEP_ORACLE_RATIOS)
    checks.add("bep_closed_form_vs_enumeration", worst, 0.0, BEP_ORACLE_TOLERANCE,
               worst <= BEP_ORACLE_TOLERANCE)

    # 4-QAM through an identity channel at r = 1: N0 = sigma_x^2 / log2(M)
    cfg = _small_config(order=4, noise_density=0.5)
    identity = ChannelRealization((PathParams(0.0, 0.0, 1.0),), label="identity")
    spec = SimSpec(cfg, ((0, 1),), p.iterations, seed=s.seed)
    ber = run_ber(spec, identity, ctx.executor)[0]
    expected = awgn_qam_bep(4, 1.0)
    sigma = math.sqrt(expected * (1 - expected) / ber.total_bits)
    checks.add("awgn_ber_vs_bep", ber.ber, expected, 4 * sigma, abs(ber.ber - expected) <= 4 * sigma)

    multipath = ChannelRealization(
        (PathParams(0.0, 0.0, 0.8), PathParams(1e-6, 0.0, 0.5 - 0.3j), PathParams(3e-6, 0.0, 0.2j)),
        label="static multipath",
    )
    leak = max(float(np.max(np.abs(coefficient_set(cfg, multipath, 3, l).ici_values)))
               for l in cfg.used_subcarriers)
    checks.add("zero_doppler_orthogonality", leak, 0.0, ORTHOGONALITY_TOLERANCE,
               leak <= ORTHOGONALITY_TOLERANCE)

    n = p.samples
    b1, b2 = gaussian_calibration(n, p.calibration_seeds, root=s.seed)
    se_b1 = 6.0 * math.sqrt(8.0) / n / math.sqrt(p.calibration_seeds)
    se_b2 = math.sqrt(64.0 / n) / math.sqrt(p.calibration_seeds)
    checks.add("mardia_skewness_calibration", b1, expected_skewness(n), 4 * se_b1,
               abs(b1 - expected_skewness(n)) <= 4 * se_b1)
    checks.add("mardia_kurtosis_calibration", b2, expected_kurtosis(n), 4 * se_b2,
               abs(b2 - expected_kurtosis(n)) <= 4 * se_b2)

    ctx.outputs.write_table(checks)
    failed = [row[0] for row in checks.rows if not row[-1]]
    if failed:
        return StudyResult(success=False, output="", data={"failed": failed},
                           error=f"validation failed: {', '.join(failed)}")
    return StudyResult(success=True, output=f"{len(checks.rows)} checks passed",
                       data={"rows": len(checks.rows)})


def register_studies(registry: StudyRegistry):
    """Register the built-in studies."""
    registry.register(StudyDefinition(
        "coefficients", "Channel and ICI coefficients per (m, l)", run_coefficients, command="coeffs"))
    registry.register(StudyDefinition(
        "normality", "Mardia skewness and kurtosis of ICI samples", run_normality, command="normality"))
    registry.register(StudyDefinition(
        "instantaneous", "Per-symbol BEP, BER and error factor", run_instantaneous, command="instant"))
    registry.register(StudyDefinition(
        "average_sweep", "Average BEP and BER over realizations", run_average_sweep, command="sweep"))
    registry.register(StudyDefinition(
        "validate", "Quick self-checks", run_validate, command="validate"))


def create_default_registry() -> StudyRegistry:
    registry = StudyRegistry()
    register_studies(registry)
    return registry

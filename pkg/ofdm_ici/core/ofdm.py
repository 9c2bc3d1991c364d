"""Closed-form OFDM channel and ICI coefficients for tapped-delay-line channels.

For a channel h(t, tau) = sum_i a_i exp(j2pi v_i t) delta(tau - tau_i) whose
delays all fit inside the cyclic prefix, the demodulated symbol on
subcarrier l of OFDM symbol m is

    Y[m,l] = X[m,l] H[m,l] + sum_{k != l} X[m,k] H_ici[m,l,k] + noise

with per-path contributions

    H[m,l]       = a_i exp(-j2pi l tau_i / T) exp(j2pi v_i t_m) D(v_i)
    H_ici[m,l,k] = a_i exp(-j2pi k tau_i / T) exp(j2pi v_i t_m) D((k - l)/T + v_i)

where D is the normalised Dirichlet kernel (see dirichlet_kernel) and
t_m = m (T + T_cp).

Coefficients are computed per (m, l) on request; nothing here builds the
full |S| x |S| matrix.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from ..errors import (
    DelayExceedsCpError,
    EmptyRealizationError,
    InvalidConfigError,
    SameSubcarrierError,
    SubcarrierNotUsedError,
)
from .modem import bits_per_symbol

# Below this |2*pi*fT| the kernel switches to its 2nd-order series
_SERIES_THRESHOLD = 1e-8

# LTE 10 MHz downlink: 15 kHz spacing, 72-sample CP at 15.36 MHz, 600 used subcarriers
LTE_SUBCARRIER_SPACING = 15_000.0
LTE_CP_LENGTH = 72 / 15.36e6
LTE_SUBCARRIERS = tuple(range(-300, 0)) + tuple(range(1, 301))


@dataclass(frozen=True)
class OfdmConfig:
    """Numerology and link parameters shared by every computation.

    subcarrier_spacing is 1/T in Hz, cp_length is T_cp in seconds,
    used_subcarriers is the ordered set S, symbol_variance is sigma_x^2 and
    noise_density is N0.
    """
    subcarrier_spacing: float
    cp_length: float
    used_subcarriers: tuple[int, ...]
    constellation_order: int = 4
    symbol_variance: float = 1.0
    noise_density: float = 0.0
    _subcarrier_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        subcarriers = tuple(int(k) for k in self.used_subcarriers)
        object.__setattr__(self, "used_subcarriers", subcarriers)
        object.__setattr__(self, "_subcarrier_set", frozenset(subcarriers))
        if not (self.subcarrier_spacing > 0 and math.isfinite(self.subcarrier_spacing)):
            raise InvalidConfigError(f"subcarrier_spacing must be > 0, got {self.subcarrier_spacing}")
        if not (self.cp_length >= 0 and math.isfinite(self.cp_length)):
            raise InvalidConfigError(f"cp_length must be >= 0, got {self.cp_length}")
        if not subcarriers:
            raise InvalidConfigError("used_subcarriers must not be empty")
        if len(set(subcarriers)) != len(subcarriers):
            raise InvalidConfigError("used_subcarriers contains duplicates")
        bits_per_symbol(self.constellation_order)  # raises InvalidOrderError
        if not (self.symbol_variance > 0 and math.isfinite(self.symbol_variance)):
            raise InvalidConfigError(f"symbol_variance must be > 0, got {self.symbol_variance}")
        if not (self.noise_density >= 0 and math.isfinite(self.noise_density)):
            raise InvalidConfigError(f"noise_density must be >= 0, got {self.noise_density}")

    @property
    def symbol_period(self) -> float:
        """T, the useful OFDM symbol length (inverse subcarrier spacing)."""
        return 1.0 / self.subcarrier_spacing

    @property
    def cp_efficiency(self) -> float:
        """T / (T + T_cp)."""
        t = self.symbol_period
        return t / (t + self.cp_length)

    @property
    def bits_per_symbol(self) -> int:
        return bits_per_symbol(self.constellation_order)

    def symbol_start_time(self, m: int) -> float:
        """t_m = m (T + T_cp): consecutive OFDM symbols including their CP."""
        return m * (self.symbol_period + self.cp_length)

    def uses(self, k: int) -> bool:
        return k in self._subcarrier_set

    def with_changes(self, **changes) -> "OfdmConfig":
        return replace(self, **changes)


def lte_config(constellation_order: int = 4, noise_density: float = 0.0,
               symbol_variance: float = 1.0) -> OfdmConfig:
    """LTE 10 MHz downlink numerology: 1/T = 15 kHz, S = {-300..-1, 1..300}."""
    return OfdmConfig(
        subcarrier_spacing=LTE_SUBCARRIER_SPACING,
        cp_length=LTE_CP_LENGTH,
        used_subcarriers=LTE_SUBCARRIERS,
        constellation_order=constellation_order,
        symbol_variance=symbol_variance,
        noise_density=noise_density,
    )


@dataclass(frozen=True)
class PathParams:
    """One propagation path: delay (s), Doppler shift (Hz), complex amplitude."""
    delay: float
    doppler: float
    amplitude: complex

    def __post_init__(self):
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if not (self.delay >= 0 and math.isfinite(self.delay)):
            raise InvalidConfigError(f"path delay must be >= 0, got {self.delay}")
        if not math.isfinite(self.doppler):
            raise InvalidConfigError(f"path doppler must be finite, got {self.doppler}")
        if not (math.isfinite(self.amplitude.real) and math.isfinite(self.amplitude.imag)):
            raise InvalidConfigError(f"path amplitude must be finite, got {self.amplitude}")


@dataclass(frozen=True)
class ChannelRealization:
    """A deterministic doubly-selective channel given as a finite path list."""
    paths: tuple[PathParams, ...]
    label: str = ""

    def __post_init__(self):
        paths = tuple(self.paths)
        if not paths:
            raise EmptyRealizationError("channel realization has no paths")
        object.__setattr__(self, "paths", paths)

    @property
    def max_delay(self) -> float:
        return max(p.delay for p in self.paths)

    @property
    def max_doppler(self) -> float:
        return max(abs(p.doppler) for p in self.paths)

    @property
    def total_gain(self) -> float:
        """sum_i |a_i|^2."""
        return float(sum(abs(p.amplitude) ** 2 for p in self.paths))


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Channel coefficient and ICI contributions for one (m, l) pair.

    ici_subcarriers lists every k in S except l, in S order, and
    ici_values holds H_ici[m,l,k] aligned with it.
    """
    symbol_index: int
    subcarrier: int
    channel_coeff: complex
    ici_subcarriers: tuple[int, ...]
    ici_values: np.ndarray = field(repr=False)
    symbol_start_time: float = 0.0

    def __post_init__(self):
        values = np.array(self.ici_values, dtype=complex)
        values.setflags(write=False)
        object.__setattr__(self, "ici_values", values)

    @property
    def ici_coeffs(self) -> Mapping[int, complex]:
        """Map from interfering subcarrier k to H_ici[m,l,k]."""
        return {k: complex(v) for k, v in zip(self.ici_subcarriers, self.ici_values)}

    @property
    def channel_power(self) -> float:
        return abs(self.channel_coeff) ** 2

    @property
    def ici_power(self) -> float:
        """sum_k |H_ici[m,l,k]|^2 (ICI variance per unit symbol variance)."""
        return float(np.sum(np.abs(self.ici_values) ** 2))


def dirichlet_kernel(f_times_T):
    """D(f) = (1/T) int_0^T exp(j2pi f t) dt as a function of fT.

    Evaluated as exp(j pi fT) sinc(fT), which has no cancellation anywhere.
    Exactly 1 at fT == 0; for |2 pi fT| < 1e-8 the 2nd-order series
    1 + j pi fT is used. Integer fT != 0 gives values of order 1e-16,
    not exact zeros.

    Accepts a scalar (returns complex) or an array (returns complex array).
    """
    x = np.asarray(f_times_T, dtype=float)
    out = np.exp(1j * np.pi * x) * np.sinc(x)
    small = np.abs(2 * np.pi * x) < _SERIES_THRESHOLD
    if np.any(small):
        out = np.where(small, 1 + 1j * np.pi * x, out)
    out = np.where(x == 0, 1 + 0j, out)
    if out.ndim == 0:
        return complex(out)
    return out


def _require_used(cfg: OfdmConfig, k: int):
    if not cfg.uses(k):
        raise SubcarrierNotUsedError(f"subcarrier {k} is not in the used-subcarrier set")


def _check_delays(cfg: OfdmConfig, chan: ChannelRealization):
    if chan.max_delay >= cfg.cp_length:
        raise DelayExceedsCpError(
            f"max path delay {chan.max_delay:.4g} s is not below the CP length "
            f"{cfg.cp_length:.4g} s ({chan.label or 'unlabelled channel'})"
        )


def _sum_paths(cfg: OfdmConfig, chan: ChannelRealization, m: int,
               phase_subcarriers: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """sum_i a_i exp(-j2pi k tau_i/T) exp(j2pi v_i t_m) D(offset + v_i T), elementwise in k.

    Paths are accumulated one at a time so the summation order does not
    depend on how many subcarriers are evaluated together. Offsets are
    integers, so a path with zero Doppler contributes to k == l only, and
    that contribution is exact.
    """
    t = cfg.symbol_period
    t_m = cfg.symbol_start_time(m)
    acc = np.zeros(phase_subcarriers.shape, dtype=complex)
    for path in chan.paths:
        if path.doppler == 0:
            kernel = (offsets == 0).astype(complex)
        else:
            kernel = dirichlet_kernel(offsets + path.doppler * t)
        rotation = path.amplitude * np.exp(2j * np.pi * path.doppler * t_m)
        acc += rotation * np.exp(-2j * np.pi * phase_subcarriers * path.delay / t) * kernel
    return acc


def channel_coefficient(cfg: OfdmConfig, chan: ChannelRealization, m: int, l: int) -> complex:
    """H[m,l], the channel coefficient of subcarrier l in OFDM symbol m."""
    _require_used(cfg, l)
    _check_delays(cfg, chan)
    values = _sum_paths(cfg, chan, m, np.array([l], dtype=float), np.zeros(1))
    return complex(values[0])


def ici_coefficient(cfg: OfdmConfig, chan: ChannelRealization, m: int, l: int, k: int) -> complex:
    """H_ici[m,l,k], the leakage of subcarrier k into subcarrier l in OFDM symbol m."""
    if k == l:
        raise SameSubcarrierError(f"ICI coefficient needs k != l (got k = l = {l})")
    _require_used(cfg, l)
    _require_used(cfg, k)
    _check_delays(cfg, chan)
    values = _sum_paths(cfg, chan, m, np.array([k], dtype=float),
                        np.array([k - l], dtype=float))
    return complex(values[0])


def coefficient_set(cfg: OfdmConfig, chan: ChannelRealization, m: int, l: int) -> CoefficientSet:
    """H[m,l] together with H_ici[m,l,k] for every k in S, k != l."""
    _require_used(cfg, l)
    _check_delays(cfg, chan)
    others = tuple(k for k in cfg.used_subcarriers if k != l)
    ks = np.array(others, dtype=float)
    h = _sum_paths(cfg, chan, m, np.array([l], dtype=float), np.zeros(1))
    ici = _sum_paths(cfg, chan, m, ks, ks - l)
    return CoefficientSet(
        symbol_index=m,
        subcarrier=l,
        channel_coeff=complex(h[0]),
        ici_subcarriers=others,
        ici_values=ici,
        symbol_start_time=cfg.symbol_start_time(m),
    )


def coefficient_sets(cfg: OfdmConfig, chan: ChannelRealization,
                     targets: Iterable[tuple[int, int]]) -> list[CoefficientSet]:
    """coefficient_set for each (m, l) in targets, in order."""
    return [coefficient_set(cfg, chan, m, l) for m, l in targets]

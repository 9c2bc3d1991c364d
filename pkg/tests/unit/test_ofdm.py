"""Tests for OFDM config, Dirichlet kernel and channel/ICI coefficients."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofdm_ici.core.ofdm import (
    LTE_CP_LENGTH,
    LTE_SUBCARRIER_SPACING,
    ChannelRealization,
    CoefficientSet,
    OfdmConfig,
    PathParams,
    channel_coefficient,
    coefficient_set,
    coefficient_sets,
    dirichlet_kernel,
    ici_coefficient,
    lte_config,
)
from ofdm_ici.errors import (
    DelayExceedsCpError,
    EmptyRealizationError,
    InvalidConfigError,
    InvalidOrderError,
    SameSubcarrierError,
    SubcarrierNotUsedError,
)


def _time_domain_coefficient(cfg, chan, m, l, k, nodes=128):
    """(1/T) int_0^T of the received subcarrier-k waveform against subcarrier l.

    Gauss-Legendre quadrature of the continuous-time model; independent of
    the closed form under test.
    """
    t_sym = cfg.symbol_period
    t_m = cfg.symbol_start_time(m)
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = (x + 1) * t_sym / 2
    integrand = np.zeros_like(t, dtype=complex)
    for p in chan.paths:
        integrand += (p.amplitude * np.exp(2j * np.pi * p.doppler * (t_m + t))
                      * np.exp(2j * np.pi * k * (t - p.delay) / t_sym)
                      * np.exp(-2j * np.pi * l * t / t_sym))
    return complex(np.sum(w * integrand) / 2)


class TestOfdmConfig:
    def test_lte_defaults(self):
        cfg = lte_config()
        assert cfg.subcarrier_spacing == LTE_SUBCARRIER_SPACING
        assert len(cfg.used_subcarriers) == 600
        assert not cfg.uses(0)
        assert cfg.uses(-300) and cfg.uses(300)
        assert cfg.constellation_order == 4

    def test_cp_efficiency(self):
        assert lte_config().cp_efficiency == pytest.approx(1024 / 1096, abs=1e-12)
        assert lte_config().cp_efficiency == pytest.approx(0.934307, abs=1e-6)

    def test_symbol_start_time(self):
        cfg = lte_config()
        assert cfg.symbol_start_time(0) == 0.0
        assert cfg.symbol_start_time(3) == pytest.approx(3 * (1 / 15000 + LTE_CP_LENGTH))

    def test_bits_per_symbol(self):
        assert lte_config(constellation_order=64).bits_per_symbol == 6

    def test_with_changes_keeps_other_fields(self):
        cfg = lte_config().with_changes(noise_density=0.1)
        assert cfg.noise_density == 0.1
        assert cfg.used_subcarriers == lte_config().used_subcarriers

    def test_membership_follows_replaced_subcarriers(self):
        cfg = OfdmConfig(15e3, 1e-6, (1, 2, 3))
        narrowed = cfg.with_changes(used_subcarriers=(-1, 1))
        assert cfg.uses(3) and not cfg.uses(-1)
        assert narrowed.uses(-1) and not narrowed.uses(3)
        assert cfg == OfdmConfig(15e3, 1e-6, [1, 2, 3])
        assert hash(cfg) == hash(OfdmConfig(15e3, 1e-6, [1, 2, 3]))
        assert "_subcarrier_set" not in repr(cfg)

    @pytest.mark.parametrize("changes", [
        {"subcarrier_spacing": 0.0},
        {"cp_length": -1e-6},
        {"used_subcarriers": ()},
        {"used_subcarriers": (1, 2, 2)},
        {"symbol_variance": 0.0},
        {"noise_density": -0.1},
        {"noise_density": math.inf},
    ])
    def test_invalid_values(self, changes):
        kwargs = {"subcarrier_spacing": 15e3, "cp_length": 1e-6, "used_subcarriers": (1, 2, 3)}
        kwargs.update(changes)
        with pytest.raises(InvalidConfigError):
            OfdmConfig(**kwargs)

    @pytest.mark.parametrize("order", [2, 8, 32, 12])
    def test_invalid_order(self, order):
        with pytest.raises(InvalidOrderError):
            OfdmConfig(15e3, 1e-6, (1, 2), constellation_order=order)


class TestChannelTypes:
    def test_negative_delay_rejected(self):
        with pytest.raises(InvalidConfigError):
            PathParams(-1e-9, 0.0, 1.0)

    def test_amplitude_coerced_to_complex(self):
        assert isinstance(PathParams(0.0, 0.0, 1).amplitude, complex)

    def test_empty_realization_rejected(self):
        with pytest.raises(EmptyRealizationError):
            ChannelRealization(paths=())

    def test_properties(self, two_path_channel):
        assert two_path_channel.max_delay == 1.5e-6
        assert two_path_channel.max_doppler == 600.0
        assert two_path_channel.total_gain == pytest.approx(0.65 + 0.25)

    def test_long_delay_accepted_at_construction(self):
        chan = ChannelRealization((PathParams(1e-3, 0.0, 1.0),))
        assert chan.max_delay == 1e-3


class TestDirichletKernel:
    def test_zero_is_exactly_one(self):
        assert dirichlet_kernel(0.0) == 1 + 0j

    @pytest.mark.parametrize("x", [1.0, -1.0, 2.0, 7.0, -300.0])
    def test_nonzero_integers_vanish(self, x):
        assert abs(dirichlet_kernel(x)) < 1e-12

    def test_half(self):
        # (e^{j pi} - 1) / (j pi) = 2j / pi
        assert abs(dirichlet_kernel(0.5) - 2j / math.pi) < 1e-15

    def test_small_argument_series(self):
        x = 1e-10
        assert dirichlet_kernel(x) == pytest.approx(1 + 1j * math.pi * x, abs=1e-20)

    def test_array_input(self):
        out = dirichlet_kernel(np.array([0.0, 0.5, 1.0]))
        assert out.shape == (3,)
        assert out[0] == 1
        assert out.dtype == complex

    def test_scalar_returns_complex(self):
        assert isinstance(dirichlet_kernel(0.25), complex)

    @given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
    def test_magnitude_at_most_one(self, x):
        assert abs(dirichlet_kernel(x)) <= 1.0 + 1e-15

    @given(st.floats(min_value=1e-3, max_value=50.0))
    @settings(max_examples=200)
    def test_matches_direct_formula(self, x):
        for v in (x, -x):
            direct = (cmath.exp(2j * math.pi * v) - 1) / (2j * math.pi * v)
            assert abs(dirichlet_kernel(v) - direct) < 1e-12

    @given(st.floats(min_value=-1e-3, max_value=1e-3, allow_nan=False))
    def test_continuous_near_zero(self, x):
        assert abs(dirichlet_kernel(x) - 1) <= 2 * math.pi * abs(x) + 1e-15


class TestCoefficients:
    def test_static_single_path_is_amplitude(self, small_cfg):
        chan = ChannelRealization((PathParams(0.0, 0.0, 0.5 - 0.5j),))
        assert channel_coefficient(small_cfg, chan, 0, 7) == 0.5 - 0.5j

    def test_zero_doppler_orthogonality(self, small_cfg):
        chan = ChannelRealization((
            PathParams(0.0, 0.0, 0.9),
            PathParams(1.1e-6, 0.0, 0.2 - 0.3j),
            PathParams(4e-6, 0.0, 0.1j),
        ))
        for m in (0, 5):
            for l in small_cfg.used_subcarriers:
                cs = coefficient_set(small_cfg, chan, m, l)
                assert np.all(cs.ici_values == 0)
                assert cs.ici_power == 0.0
                expected = sum(p.amplitude * cmath.exp(-2j * math.pi * l * p.delay * 15e3)
                               for p in chan.paths)
                assert abs(cs.channel_coeff - expected) < 1e-14

    def test_single_path_time_shift(self, small_cfg):
        chan = ChannelRealization((PathParams(2e-6, 820.0, 0.7 + 0.2j),))
        h0 = channel_coefficient(small_cfg, chan, 0, 3)
        for m in (1, 4, 13):
            t_m = small_cfg.symbol_start_time(m)
            hm = channel_coefficient(small_cfg, chan, m, 3)
            assert abs(hm - h0 * cmath.exp(2j * math.pi * 820.0 * t_m)) < 1e-13

    @pytest.mark.parametrize("m", [0, 2])
    @pytest.mark.parametrize("l,k", [(1, 1), (1, 2), (-8, 8), (5, -3)])
    def test_matches_time_domain_integral(self, small_cfg, two_path_channel, m, l, k):
        oracle = _time_domain_coefficient(small_cfg, two_path_channel, m, l, k)
        if k == l:
            value = channel_coefficient(small_cfg, two_path_channel, m, l)
        else:
            value = ici_coefficient(small_cfg, two_path_channel, m, l, k)
        assert abs(value - oracle) < 1e-12

    def test_ici_magnitude_single_path(self, small_cfg):
        nu_t = 0.05
        chan = ChannelRealization((PathParams(0.0, nu_t * 15e3, 1.0),))
        cs = coefficient_set(small_cfg, chan, 0, 1)
        for k, v in cs.ici_coeffs.items():
            x = (k - 1) + nu_t
            assert abs(v) == pytest.approx(abs(math.sin(math.pi * x)) / (math.pi * abs(x)), rel=1e-12)

    def test_ici_decays_like_inverse_square(self, small_cfg):
        chan = ChannelRealization((PathParams(0.0, 0.05 * 15e3, 1.0),))
        cs = coefficient_set(small_cfg, chan, 0, 1)
        bound = (math.sin(math.pi * 0.05) / math.pi) ** 2
        for k, v in cs.ici_coeffs.items():
            assert abs(v) ** 2 <= bound / ((abs(k - 1) - 0.05) ** 2) * (1 + 1e-12)

    @pytest.mark.parametrize("l", [1, 150, -300])
    def test_scaled_ici_stays_between_constants_on_lte(self, l):
        nu_t = 0.01
        cfg = lte_config()
        chan = ChannelRealization((PathParams(2e-6, nu_t * LTE_SUBCARRIER_SPACING, 0.8 - 0.6j),))
        coeffs = coefficient_set(cfg, chan, 3, l).ici_coeffs
        c = (math.sin(math.pi * nu_t) / math.pi) ** 2
        scaled = [abs(v) ** 2 * (k - l) ** 2 for k, v in coeffs.items() if 10 <= abs(k - l) <= 100]
        assert len(scaled) >= 90
        assert min(scaled) >= 0.95 * c
        assert max(scaled) <= 1.05 * c

    def test_power_conservation_single_path(self):
        # sum over all k of |D(k - l + vT)|^2 is 1; 601 subcarriers leave a ~1e-5 tail
        cfg = OfdmConfig(15e3, LTE_CP_LENGTH, tuple(range(-300, 301)))
        chan = ChannelRealization((PathParams(0.0, 0.05 * 15e3, 1.0),))
        cs = coefficient_set(cfg, chan, 0, 0)
        assert cs.channel_power + cs.ici_power == pytest.approx(1.0, abs=1e-4)

    def test_coefficient_set_keys(self, small_cfg, two_path_channel):
        cs = coefficient_set(small_cfg, two_path_channel, 1, 4)
        assert set(cs.ici_coeffs) == set(small_cfg.used_subcarriers) - {4}
        assert cs.ici_subcarriers == tuple(k for k in small_cfg.used_subcarriers if k != 4)
        assert cs.symbol_start_time == small_cfg.symbol_start_time(1)

    def test_ici_values_read_only(self, small_cfg, two_path_channel):
        cs = coefficient_set(small_cfg, two_path_channel, 1, 4)
        with pytest.raises(ValueError):
            cs.ici_values[0] = 0

    def test_ici_values_copied_from_caller(self):
        values = np.array([0.1, 0.2j])
        cs = CoefficientSet(0, 1, 1 + 0j, (2, 3), values)
        values[0] = 5.0
        assert cs.ici_values[0] == 0.1
        assert cs.ici_values.dtype == complex
        assert values.flags.writeable

    def test_coefficient_set_matches_single_calls(self, small_cfg, two_path_channel):
        cs = coefficient_set(small_cfg, two_path_channel, 2, -3)
        assert abs(cs.channel_coeff - channel_coefficient(small_cfg, two_path_channel, 2, -3)) < 1e-14
        for k, v in cs.ici_coeffs.items():
            assert abs(v - ici_coefficient(small_cfg, two_path_channel, 2, -3, k)) < 1e-14

    def test_coefficient_sets_in_order(self, small_cfg, two_path_channel):
        sets = coefficient_sets(small_cfg, two_path_channel, [(0, 1), (1, -1), (0, 8)])
        assert [(cs.symbol_index, cs.subcarrier) for cs in sets] == [(0, 1), (1, -1), (0, 8)]

    def test_same_subcarrier_rejected(self, small_cfg, two_path_channel):
        with pytest.raises(SameSubcarrierError):
            ici_coefficient(small_cfg, two_path_channel, 0, 3, 3)

    @pytest.mark.parametrize("l", [0, 9, 100])
    def test_unused_subcarrier_rejected(self, small_cfg, two_path_channel, l):
        with pytest.raises(SubcarrierNotUsedError):
            channel_coefficient(small_cfg, two_path_channel, 0, l)
        with pytest.raises(SubcarrierNotUsedError):
            coefficient_set(small_cfg, two_path_channel, 0, l)

    def test_unused_interferer_rejected(self, small_cfg, two_path_channel):
        with pytest.raises(SubcarrierNotUsedError):
            ici_coefficient(small_cfg, two_path_channel, 0, 1, 0)

    def test_delay_at_cp_length_rejected(self, small_cfg):
        chan = ChannelRealization((PathParams(small_cfg.cp_length, 0.0, 1.0),))
        with pytest.raises(DelayExceedsCpError):
            channel_coefficient(small_cfg, chan, 0, 1)
        with pytest.raises(DelayExceedsCpError):
            coefficient_set(small_cfg, chan, 0, 1)

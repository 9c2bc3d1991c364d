"""Tests for Gray-coded square QAM mapping and hard demapping."""

import math

import numpy as np
import pytest

from ofdm_ici.core.modem import (
    bit_errors,
    bits_per_symbol,
    build_constellation,
    demap_hard,
    demap_labels,
    gray_code,
    gray_decode,
    map_bits,
    map_labels,
)
from ofdm_ici.errors import BitLengthError, InvalidConfigError, InvalidOrderError
from ofdm_ici.sim.rng import make_rng

ORDERS = (4, 16, 64)


class TestBitsPerSymbol:
    @pytest.mark.parametrize("order,bits", [(4, 2), (16, 4), (64, 6), (256, 8)])
    def test_valid(self, order, bits):
        assert bits_per_symbol(order) == bits

    @pytest.mark.parametrize("order", [0, 1, 2, 8, 32, 128, 20, -4, 4.0, True, "16"])
    def test_invalid(self, order):
        with pytest.raises(InvalidOrderError):
            bits_per_symbol(order)


class TestGray:
    def test_known_codes(self):
        assert [gray_code(n) for n in range(8)] == [0, 1, 3, 2, 6, 7, 5, 4]

    def test_decode_inverts(self):
        n = np.arange(256)
        assert np.array_equal(gray_decode(gray_code(n)), n)
        assert gray_decode(gray_code(13)) == 13


class TestConstellation:
    @pytest.mark.parametrize("order", ORDERS)
    def test_unit_average_energy(self, order):
        c = build_constellation(order)
        assert c.average_energy == pytest.approx(1.0, abs=1e-12)
        assert c.points.shape == (order,)

    def test_scaled_energy(self):
        assert build_constellation(16, 2.5).average_energy == pytest.approx(2.5, abs=1e-12)

    def test_half_spacing(self):
        c = build_constellation(16)
        assert c.half_spacing == pytest.approx(math.sqrt(3 / 30))

    def test_four_qam_first_point(self):
        c = build_constellation(4)
        assert map_bits(c, [0, 0]) == pytest.approx(-(1 + 1j) / math.sqrt(2))
        assert map_bits(c, [1, 1]) == pytest.approx((1 + 1j) / math.sqrt(2))

    def test_arrays_read_only(self):
        c = build_constellation(16)
        with pytest.raises(ValueError):
            c.points[0] = 0

    def test_cached(self):
        assert build_constellation(64) is build_constellation(64)

    def test_invalid_variance(self):
        with pytest.raises(InvalidConfigError):
            build_constellation(4, 0.0)

    @pytest.mark.parametrize("order", ORDERS)
    def test_gray_neighbours_differ_in_one_bit(self, order):
        c = build_constellation(order)
        spacing = 2 * c.half_spacing
        checked = 0
        for a in range(order):
            for b in range(a + 1, order):
                if abs(abs(c.points[a] - c.points[b]) - spacing) < 1e-9:
                    assert c.popcount[a ^ b] == 1
                    checked += 1
        side = c.levels_per_axis
        assert checked == 2 * side * (side - 1)

    def test_bit_labels_msb_first(self):
        c = build_constellation(16)
        assert list(c.bit_labels[0b1011]) == [1, 0, 1, 1]


class TestMapping:
    def test_map_labels_vectorised(self):
        c = build_constellation(16)
        labels = np.array([[0, 5], [15, 3]])
        assert np.array_equal(map_labels(c, labels), c.points[labels])

    @pytest.mark.parametrize("bits", [[0], [0, 1, 0], [[0, 1], [1, 0]]])
    def test_wrong_length(self, bits):
        with pytest.raises(BitLengthError):
            map_bits(build_constellation(4), bits)

    def test_non_binary(self):
        with pytest.raises(BitLengthError):
            map_bits(build_constellation(4), [0, 2])

    @pytest.mark.parametrize("order", [4, 16, 64, 256])
    @pytest.mark.parametrize("variance", [1.0, 2.5])
    def test_random_bits_average_to_symbol_variance(self, order, variance):
        c = build_constellation(order, variance)
        bits = make_rng(2024, order).integers(0, 2, size=(100_000, c.bits_per_symbol))
        weights = 1 << np.arange(c.bits_per_symbol - 1, -1, -1)
        symbols = map_labels(c, bits @ weights)
        assert np.mean(np.abs(symbols) ** 2) == pytest.approx(variance, rel=0.01)
        for i in range(8):
            assert map_bits(c, bits[i]) == symbols[i]


class TestDemapping:
    @pytest.mark.parametrize("order", ORDERS)
    def test_exhaustive_round_trip(self, order):
        c = build_constellation(order)
        assert np.array_equal(demap_labels(c, c.points), np.arange(order))
        for label in range(order):
            bits = c.bit_labels[label]
            assert np.array_equal(demap_hard(c, map_bits(c, bits)), bits)

    @pytest.mark.parametrize("order", ORDERS)
    def test_small_perturbation_keeps_label(self, order):
        c = build_constellation(order)
        rng = np.random.default_rng(5)
        offset = 0.9 * c.half_spacing * (rng.uniform(-1, 1, order) + 1j * rng.uniform(-1, 1, order))
        assert np.array_equal(demap_labels(c, c.points + offset), np.arange(order))

    def test_matches_minimum_distance(self):
        c = build_constellation(64)
        rng = np.random.default_rng(11)
        y = rng.normal(size=2000) + 1j * rng.normal(size=2000)
        nearest = np.argmin(np.abs(y[:, None] - c.points[None, :]), axis=1)
        assert np.array_equal(demap_labels(c, y), nearest)

    def test_tie_at_origin_four_qam(self):
        c = build_constellation(4)
        assert list(demap_hard(c, 0j)) == [0, 0]

    def test_tie_goes_to_smaller_gray_label(self):
        c = build_constellation(16)
        d = c.half_spacing
        # Between levels 2 (Gray 3) and 3 (Gray 2) on both axes
        assert int(demap_labels(c, np.array([2 * d + 2j * d]))[0]) == (2 << 2) | 2
        # Between levels 1 (Gray 1) and 2 (Gray 3)
        assert int(demap_labels(c, np.array([0j]))[0]) == (1 << 2) | 1

    def test_far_values_clamp_to_corner(self):
        c = build_constellation(16)
        corner = int(np.argmax(c.points.real + c.points.imag))
        assert int(demap_labels(c, np.array([100 + 100j]))[0]) == corner

    def test_demap_hard_returns_copy(self):
        c = build_constellation(4)
        bits = demap_hard(c, c.points[3])
        bits[0] = 0
        assert list(c.bit_labels[3]) == [1, 1]


class TestBitErrors:
    def test_counts(self):
        c = build_constellation(16)
        sent = np.array([0, 0b1111, 0b1010])
        decided = np.array([0, 0b0000, 0b1011])
        assert list(bit_errors(c, sent, decided)) == [0, 4, 1]

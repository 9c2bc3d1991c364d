"""Square M-QAM with per-axis binary-reflected Gray labels.

A symbol's label is an integer in [0, M). Its upper half of bits (I bits)
selects the in-phase level and its lower half (Q bits) the quadrature
level; on each axis the Gray label g sits at PAM level index
gray_decode(g). The point array is indexed by label, so "smaller index"
and "smaller label" mean the same thing.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import BitLengthError, InvalidConfigError, InvalidOrderError


def bits_per_symbol(order: int) -> int:
    """log2(M) for a valid square QAM order, else InvalidOrderError."""
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)):
        raise InvalidOrderError(f"constellation order must be an integer, got {order!r}")
    order = int(order)
    if order < 4 or order & (order - 1):
        raise InvalidOrderError(f"constellation order must be a power of two >= 4, got {order}")
    bits = order.bit_length() - 1
    if bits % 2:
        raise InvalidOrderError(f"constellation order {order} is not a perfect square")
    return bits


def gray_code(n):
    return n ^ (n >> 1)


def gray_decode(g):
    """Inverse of gray_code for non-negative ints or integer arrays."""
    n = g
    shift = g >> 1
    while np.any(shift):
        n = n ^ shift
        shift = shift >> 1
    return n


@dataclass(frozen=True, eq=False)
class Constellation:
    """Immutable square QAM constellation.

    points[i] carries bit_labels[i] (the MSB-first bits of i).
    """
    order: int
    symbol_variance: float
    points: np.ndarray = field(repr=False)
    bit_labels: np.ndarray = field(repr=False)
    half_spacing: float
    popcount: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self) -> int:
        return self.bit_labels.shape[1]

    @property
    def levels_per_axis(self) -> int:
        return 1 << (self.bits_per_symbol // 2)

    @property
    def average_energy(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))


@lru_cache(maxsize=32)
def build_constellation(order: int, symbol_variance: float = 1.0) -> Constellation:
    """Gray-labelled square M-QAM scaled to average energy symbol_variance."""
    n_bits = bits_per_symbol(order)
    if not symbol_variance > 0:
        raise InvalidConfigError(f"symbol_variance must be > 0, got {symbol_variance}")
    half = n_bits // 2
    levels = 1 << half
    d = np.sqrt(3.0 * symbol_variance / (2.0 * (order - 1)))

    labels = np.arange(order)
    i_level = gray_decode(labels >> half)
    q_level = gray_decode(labels & (levels - 1))
    points = ((2 * i_level - levels + 1) + 1j * (2 * q_level - levels + 1)) * d

    bit_labels = ((labels[:, None] >> np.arange(n_bits - 1, -1, -1)) & 1).astype(np.uint8)
    popcount = bit_labels.sum(axis=1).astype(np.int64)

    for arr in (points, bit_labels, popcount):
        arr.setflags(write=False)
    return Constellation(
        order=order,
        symbol_variance=float(symbol_variance),
        points=points,
        bit_labels=bit_labels,
        half_spacing=float(d),
        popcount=popcount,
    )


def map_bits(c: Constellation, bits) -> complex:
    """The constellation point labelled by an MSB-first bit vector."""
    b = np.asarray(bits)
    if b.ndim != 1 or b.size != c.bits_per_symbol:
        raise BitLengthError(f"expected {c.bits_per_symbol} bits for {c.order}-QAM, got shape {b.shape}")
    if not np.all((b == 0) | (b == 1)):
        raise BitLengthError("bit vector may only contain 0 and 1")
    label = 0
    for bit in b:
        label = (label << 1) | int(bit)
    return complex(c.points[label])


def map_labels(c: Constellation, labels: np.ndarray) -> np.ndarray:
    """Vectorised map_bits on integer labels."""
    return c.points[labels]


def _slice_axis(c: Constellation, x: np.ndarray) -> np.ndarray:
    """Gray label of the nearest PAM level on one axis.

    Midpoints between two levels go to the level with the smaller Gray label.
    """
    levels = c.levels_per_axis
    u = (x / c.half_spacing + (levels - 1)) / 2.0
    lo = np.clip(np.floor(u), 0, levels - 2).astype(np.int64)
    frac = u - lo
    g_lo = gray_code(lo)
    g_hi = gray_code(lo + 1)
    pick_hi = (frac > 0.5) | ((frac == 0.5) & (g_hi < g_lo))
    return np.where(pick_hi, g_hi, g_lo)


def demap_labels(c: Constellation, y) -> np.ndarray:
    """Hard-decision labels for an array of received values (per-axis slicing)."""
    y = np.asarray(y, dtype=complex)
    half = c.bits_per_symbol // 2
    return (_slice_axis(c, y.real) << half) | _slice_axis(c, y.imag)


def demap_hard(c: Constellation, y: complex) -> np.ndarray:
    """MSB-first bit label of the point nearest to y."""
    label = int(demap_labels(c, np.array([y]))[0])
    return c.bit_labels[label].copy()


def bit_errors(c: Constellation, sent: np.ndarray, decided: np.ndarray) -> np.ndarray:
    """Number of differing bits between sent and decided labels, elementwise."""
    return c.popcount[np.bitwise_xor(sent, decided)]

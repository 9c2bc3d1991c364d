"""Mardia's multivariate skewness and kurtosis for bivariate ICI samples.

With Z_i the samples, Z_bar their mean and S the maximum-likelihood
covariance (divide by n), let d_ij = (Z_i - Z_bar)^T S^-1 (Z_j - Z_bar):

    b1 = (1/n^2) sum_i sum_j d_ij^3
    b2 = (1/n)   sum_i d_ii^2

A bivariate normal sample has E[b1] ~ 24/n and E[b2] = 8(n - 1)/(n + 1).
"""

from dataclasses import dataclass, field

import numpy as np

from ..core.modem import build_constellation
from ..core.ofdm import CoefficientSet, OfdmConfig
from ..errors import InvalidConfigError, SingularCovarianceError
from ..sim.rng import STREAM_ICI_SAMPLES, make_rng

MAX_CONDITION = 1e12
DIMENSION = 2


@dataclass(frozen=True, eq=False)
class SampleSet:
    """n draws of (Re ICI, Im ICI) and where they came from."""
    samples: np.ndarray = field(repr=False)
    label: str = ""
    symbol_index: int = 0
    subcarrier: int = 0
    constellation_order: int = 0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != DIMENSION:
            raise InvalidConfigError(f"samples must have shape (n, 2), got {samples.shape}")
        if samples.shape[0] < 3:
            raise InvalidConfigError(f"need at least 3 samples, got {samples.shape[0]}")
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @classmethod
    def from_complex(cls, values: np.ndarray, **context) -> "SampleSet":
        values = np.asarray(values, dtype=complex)
        return cls(np.column_stack((values.real, values.imag)), **context)


def expected_skewness(n: int) -> float:
    return DIMENSION * (DIMENSION + 1) * (DIMENSION + 2) / n


def expected_kurtosis(n: int) -> float:
    return DIMENSION * (DIMENSION + 2) * (n - 1) / (n + 1)


def sample_ici(cfg: OfdmConfig, cs: CoefficientSet, n: int, seed: int,
               label: str = "") -> SampleSet:
    """n draws of sum_{k != l} X_k H_ici[m,l,k] with X_k uniform over the constellation."""
    if n < 3:
        raise InvalidConfigError(f"need at least 3 samples, got {n}")
    c = build_constellation(cfg.constellation_order, cfg.symbol_variance)
    rng = make_rng(seed, STREAM_ICI_SAMPLES)
    labels = rng.integers(0, c.order, size=(n, len(cs.ici_subcarriers)))
    ici = c.points[labels] @ cs.ici_values
    return SampleSet.from_complex(
        ici, label=label, symbol_index=cs.symbol_index, subcarrier=cs.subcarrier,
        constellation_order=cfg.constellation_order,
    )


def _whitened(s: SampleSet) -> np.ndarray:
    """Centered samples times a factor W with W W^T = S^-1."""
    centered = s.samples - s.samples.mean(axis=0)
    cov = centered.T @ centered / s.n
    cond = np.linalg.cond(cov)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularCovarianceError(
            f"sample covariance is singular (condition number {cond:.3g}) for "
            f"{s.label or 'samples'} at (m={s.symbol_index}, l={s.subcarrier})"
        )
    return centered @ np.linalg.cholesky(np.linalg.inv(cov))


def mardia_skewness(s: SampleSet) -> float:
    w = _whitened(s)
    gram = w @ w.T
    return float(np.sum(gram ** 3) / s.n ** 2)


def mardia_kurtosis(s: SampleSet) -> float:
    w = _whitened(s)
    d = np.einsum("ij,ij->i", w, w)
    return float(np.mean(d ** 2))


def mardia_statistics(s: SampleSet) -> tuple[float, float]:
    """(b1, b2) sharing one covariance inversion."""
    w = _whitened(s)
    gram = w @ w.T
    return float(np.sum(gram ** 3) / s.n ** 2), float(np.mean(np.diag(gram) ** 2))

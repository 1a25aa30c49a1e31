"""SNR statistics of the TAS/MRC legitimate link and the MRC eavesdropper.

Alice picks the transmit antenna whose channel row has the largest norm at
Bob, who combines with MRC. The post-combining SNR at Bob is then the
maximum of ``n_a`` i.i.d. Gamma(``n_b``, ``gamma_bar_b``) variables, so

    F_B(g) = P(n_b, g / gamma_bar_b) ** n_a.

Eve sees the same antenna, but that choice is independent of her channel,
so her SNR is simply Gamma(``n_e``, ``gamma_bar_e``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .specfun import DomainError, _gamma_pair

__all__ = [
    "AntennaConfig",
    "LinkBudget",
    "SnrSamplePair",
    "db_to_linear",
    "legit_snr_cdf",
    "legit_snr_sf",
    "legit_snr_pdf",
    "eve_snr_cdf",
    "eve_snr_sf",
    "eve_snr_pdf",
    "sample_joint_snr",
    "feedback_bits",
    "max_cdf_deviation",
]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts at Alice (``n_a``), Bob (``n_b``) and Eve (``n_e``)."""

    n_a: int
    n_b: int
    n_e: int

    def __post_init__(self) -> None:
        for name in ("n_a", "n_b", "n_e"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise DomainError(f"{name} must be an integer >= 1, got {value!r}")


@dataclass(frozen=True)
class LinkBudget:
    """Average per-antenna SNRs (linear) at Bob and at Eve."""

    gamma_bar_b: float
    gamma_bar_e: float

    def __post_init__(self) -> None:
        for name in ("gamma_bar_b", "gamma_bar_e"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def from_db(cls, snr_b_db: float, snr_e_db: float) -> LinkBudget:
        return cls(db_to_linear(snr_b_db), db_to_linear(snr_e_db))

    @property
    def rho(self) -> float:
        """Ratio of Bob's to Eve's average SNR."""
        return self.gamma_bar_b / self.gamma_bar_e


@dataclass(frozen=True)
class SnrSamplePair:
    """Instantaneous SNRs at Bob and Eve from the same fading draw.

    Fields are floats for a single draw, or equal-length arrays when the
    sampler is asked for many.
    """

    gamma_b: float | np.ndarray
    gamma_e: float | np.ndarray


def _check_snr(gamma: float) -> None:
    if not gamma >= 0:
        raise DomainError(f"SNR must be >= 0, got {gamma!r}")


def _gamma_density(shape: int, scale: float, gamma: float) -> float:
    x = gamma / scale
    if x == 0:
        return 1.0 / scale if shape == 1 else 0.0
    return math.exp((shape - 1) * math.log(x) - x - math.lgamma(shape)) / scale


def legit_snr_cdf(gamma: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """CDF of Bob's SNR under best-antenna selection."""
    _check_snr(gamma)
    p, _ = _gamma_pair(cfg.n_b, gamma / lb.gamma_bar_b)
    return p**cfg.n_a


def legit_snr_sf(gamma: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """Survival function ``1 - legit_snr_cdf``, accurate in both tails."""
    _check_snr(gamma)
    p, q = _gamma_pair(cfg.n_b, gamma / lb.gamma_bar_b)
    if q >= 1.0:
        return 1.0
    if p < 0.5:
        return 1.0 - p**cfg.n_a
    return -math.expm1(cfg.n_a * math.log1p(-q))


def legit_snr_pdf(gamma: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """Density of Bob's SNR under best-antenna selection."""
    _check_snr(gamma)
    p, _ = _gamma_pair(cfg.n_b, gamma / lb.gamma_bar_b)
    base = _gamma_density(cfg.n_b, lb.gamma_bar_b, gamma)
    return cfg.n_a * base * p ** (cfg.n_a - 1)


def eve_snr_cdf(gamma: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """CDF of Eve's SNR. Independent of ``n_a``."""
    _check_snr(gamma)
    return _gamma_pair(cfg.n_e, gamma / lb.gamma_bar_e)[0]


def eve_snr_sf(gamma: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    _check_snr(gamma)
    return _gamma_pair(cfg.n_e, gamma / lb.gamma_bar_e)[1]


def eve_snr_pdf(gamma: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    _check_snr(gamma)
    return _gamma_density(cfg.n_e, lb.gamma_bar_e, gamma)


def _squared_row_norms(rng: Generator, shape: tuple[int, int, int]) -> np.ndarray:
    # Unit-variance circularly-symmetric complex Gaussian: N(0, 1/2) per part.
    h = rng.normal(0.0, math.sqrt(0.5), size=shape + (2,))
    return np.einsum("...ijk,...ijk->...i", h, h)


def sample_joint_snr(
    cfg: AntennaConfig,
    lb: LinkBudget,
    rng: Generator,
    size: int | None = None,
    chunk: int = 1 << 16,
) -> SnrSamplePair:
    """Draw Bob/Eve SNRs by simulating the antenna-selection protocol.

    Each draw generates an ``n_a x n_b`` channel to Bob and an ``n_a x n_e``
    channel to Eve, picks the row with the largest norm at Bob (lowest
    index on ties), and scales both selected rows' squared norms by the
    average SNRs.

    Args:
        cfg: Antenna counts.
        lb: Average SNRs.
        rng: Seeded numpy generator. The output is a deterministic function
            of its state and of ``chunk``.
        size: Number of draws; ``None`` returns a single float pair.
        chunk: Draws generated per batch, to bound memory.
    """
    n = 1 if size is None else int(size)
    if n < 0:
        raise DomainError(f"size must be >= 0, got {size!r}")
    gamma_b = np.empty(n)
    gamma_e = np.empty(n)
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        bob = _squared_row_norms(rng, (m, cfg.n_a, cfg.n_b))
        eve = _squared_row_norms(rng, (m, cfg.n_a, cfg.n_e))
        best = np.argmax(bob, axis=1)
        rows = np.arange(m)
        gamma_b[start : start + m] = lb.gamma_bar_b * bob[rows, best]
        gamma_e[start : start + m] = lb.gamma_bar_e * eve[rows, best]
    if size is None:
        return SnrSamplePair(float(gamma_b[0]), float(gamma_e[0]))
    return SnrSamplePair(gamma_b, gamma_e)


def feedback_bits(cfg: AntennaConfig) -> int:
    """Bits needed to feed back the selected antenna index, ``ceil(log2 n_a)``."""
    return (cfg.n_a - 1).bit_length()


def max_cdf_deviation(samples: np.ndarray, cdf, n_points: int = 2001) -> float:
    """Largest gap between the empirical CDF of ``samples`` and ``cdf``.

    The gap is taken on both sides of each of ``n_points`` evaluation
    points spread over the sample quantiles, so it approaches the
    Kolmogorov statistic as ``n_points`` grows.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise DomainError("no samples")
    grid = np.quantile(x, np.linspace(0.0, 1.0, n_points))
    right = np.searchsorted(x, grid, side="right") / x.size
    left = np.searchsorted(x, grid, side="left") / x.size
    model = np.array([cdf(float(g)) for g in grid])
    return float(max(np.max(np.abs(right - model)), np.max(np.abs(left - model))))

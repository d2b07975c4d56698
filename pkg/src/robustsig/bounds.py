"""Estimating the variance band from data.

Two estimators: equal consecutive sub-samples (max/min of the block
variances) and overlapping moving blocks of fixed length, which do not need
the change points to be known.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels
from .errors import DomainError, InsufficientDataError, ShapeError
from .gnormal import TestSpec, VarianceBand
from .rules import TestReport, decide

# Floor applied to an estimated lower standard deviation of zero.
SIGMA_FLOOR = 1e-12
# Windows between exact recomputations in the rolling variance scan.
REFRESH_EVERY = 512


@dataclass(frozen=True)
class BlockConfig:
    block_length: int

    def __post_init__(self):
        if int(self.block_length) != self.block_length or self.block_length < 2:
            raise ShapeError(f"block length must be an integer >= 2, got {self.block_length}")
        object.__setattr__(self, "block_length", int(self.block_length))

    @classmethod
    def default_for(cls, n: int) -> "BlockConfig":
        """``ceil(sqrt(n))``, at least 2."""
        return cls(max(2, math.isqrt(max(n, 1) - 1) + 1))


@dataclass(frozen=True)
class BandEstimate:
    sigma_lower_sq_hat: float
    sigma_upper_sq_hat: float
    method: str  # "subsample" or "moving-block"
    k_or_L: int
    block_length: int

    @property
    def degenerate(self) -> bool:
        return self.sigma_lower_sq_hat <= 0.0 or self.sigma_lower_sq_hat == self.sigma_upper_sq_hat

    def to_band(self) -> tuple[VarianceBand, bool]:
        """Square roots of the estimates as a band, plus a flag telling whether
        the lower edge had to be raised to :data:`SIGMA_FLOOR`."""
        lo = math.sqrt(self.sigma_lower_sq_hat)
        hi = math.sqrt(self.sigma_upper_sq_hat)
        clamped = lo < SIGMA_FLOOR
        lo = max(lo, SIGMA_FLOOR)
        hi = max(hi, lo)
        return VarianceBand(lo, hi), clamped


def pooled_variance_mean(n1: int, var1: float, n2: int, var2: float) -> float:
    """Expected sample variance of two pooled equal-mean samples."""
    if n1 < 1 or n2 < 1:
        raise DomainError("both sample sizes must be >= 1")
    if var1 < 0 or var2 < 0:
        raise DomainError("variances must be nonnegative")
    return (n1 * var1 + n2 * var2) / (n1 + n2)


def block_variances(data: Sequence[float], k: int) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64).ravel()
    n = x.size
    if k < 1:
        raise ShapeError("number of sub-samples must be >= 1")
    if n % k:
        raise ShapeError(f"data length {n} is not divisible by k={k}")
    m = n // k
    if m < 2:
        raise InsufficientDataError(f"sub-sample length {m} < 2")
    return x.reshape(k, m).var(axis=1, ddof=1)


def subsample_bounds(data: Sequence[float], k: int) -> BandEstimate:
    v = block_variances(data, k)
    m = np.asarray(data).size // k
    return BandEstimate(float(v.min()), float(v.max()), "subsample", k, m)


def moving_block_variances(data: Sequence[float], cfg: BlockConfig) -> np.ndarray:
    """Unbiased variances of all ``L = n - m + 1`` overlapping windows, O(n)."""
    x = np.asarray(data, dtype=np.float64).ravel()
    m = cfg.block_length
    if m > x.size:
        raise ShapeError(f"block length {m} exceeds data length {x.size}")
    return kernels().rolling_block_variances(x, m, REFRESH_EVERY)


def moving_block_bounds(data: Sequence[float], cfg: BlockConfig) -> BandEstimate:
    v = moving_block_variances(data, cfg)
    return BandEstimate(float(v.min()), float(v.max()), "moving-block", v.size, cfg.block_length)


def estimate_then_test(data: Sequence[float], cfg: Optional[BlockConfig], spec: TestSpec) -> TestReport:
    """Moving-block band estimate followed by :func:`decide` on the same data.

    ``cfg=None`` uses :meth:`BlockConfig.default_for`. The estimate is attached
    to the report as ``band_estimate``.
    """
    x = np.asarray(data, dtype=np.float64).ravel()
    if cfg is None:
        cfg = BlockConfig.default_for(x.size)
    est = moving_block_bounds(x, cfg)
    band, clamped = est.to_band()
    report = decide(x, spec, band)
    report.band_estimated = True
    report.block_length = cfg.block_length
    report.degenerate_band = est.degenerate
    report.band_estimate = est
    if clamped:
        report.notes.append(f"estimated lower sigma was 0; clamped to {SIGMA_FLOOR:g}")
    return report

"""Rejection rules, sample statistics and test reports."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientDataError
from .gnormal import (
    TestKind,
    TestSpec,
    VarianceBand,
    critical_value,
    p1,
    p2,
    p3,
    std_normal_quantile,
)

GREATER = "greater"
LESS = "less"
ABS_GREATER = "abs-greater"

_COMPARISON = {TestKind.I: GREATER, TestKind.II: LESS, TestKind.III: ABS_GREATER}


@dataclass(frozen=True)
class RejectionRule:
    method: str  # "robust" or "classical"
    kind: TestKind
    threshold: float
    comparison: str

    def rejects(self, statistic: float) -> bool:
        # strict inequalities: a statistic equal to the threshold is accepted
        if self.comparison == GREATER:
            return statistic > self.threshold
        if self.comparison == LESS:
            return statistic < self.threshold
        return abs(statistic) > self.threshold


@dataclass(frozen=True)
class SampleStats:
    n: int
    mean: float
    sample_variance: float

    @property
    def std(self) -> float:
        return math.sqrt(self.sample_variance)


@dataclass
class TestReport:
    __test__ = False

    spec: TestSpec
    band_used: VarianceBand
    n: int
    statistic: float
    threshold_robust: float
    threshold_classical: float
    reject_robust: bool
    reject_classical: bool
    robust_p_value: float
    band_estimated: bool = False
    block_length: Optional[int] = None
    degenerate_band: bool = False
    band_estimate: Optional[object] = None
    notes: list = field(default_factory=list)


def _as_array(data: Sequence[float]) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 1:
        x = x.ravel()
    return x


def sample_stats(data: Sequence[float]) -> SampleStats:
    """Mean and unbiased (n - 1) variance, computed in two passes."""
    x = _as_array(data)
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {n}")
    mean = math.fsum(x) / n
    d = x - mean
    var = math.fsum(d * d) / (n - 1)
    return SampleStats(n=n, mean=mean, sample_variance=var)


def robust_rule(spec: TestSpec, band: VarianceBand) -> RejectionRule:
    return RejectionRule("robust", spec.kind, critical_value(spec, band), _COMPARISON[spec.kind])


def classical_rule(spec: TestSpec, stats: SampleStats) -> RejectionRule:
    """Student-style large-sample rule with the plug-in scale S_n."""
    if stats.n < 2:
        raise InsufficientDataError("classical rule needs n >= 2")
    s = stats.std
    a = spec.alpha
    if spec.kind is TestKind.I:
        t = s * std_normal_quantile(1.0 - a)
    elif spec.kind is TestKind.II:
        t = s * std_normal_quantile(a)
    else:
        t = s * std_normal_quantile(1.0 - a / 2.0)
    return RejectionRule("classical", spec.kind, t, _COMPARISON[spec.kind])


def robust_p_value(statistic: float, kind, band: VarianceBand) -> float:
    """Maximal false-rejection probability evaluated at the observed statistic.

    This is not defined in the underlying theory; it is the natural inversion
    of the robust rule, so ``p < alpha`` iff the robust test rejects (up to ties).
    """
    kind = TestKind.parse(kind)
    if kind is TestKind.I:
        return p1(statistic, band)
    if kind is TestKind.II:
        return p2(statistic, band)
    return p3(abs(statistic), band)


def test_statistic(stats: SampleStats, mu0: float) -> float:
    return math.sqrt(stats.n) * (stats.mean - mu0)


test_statistic.__test__ = False


def decide(data: Sequence[float], spec: TestSpec, band: VarianceBand) -> TestReport:
    stats = sample_stats(data)
    stat = test_statistic(stats, spec.mu0)
    rob = robust_rule(spec, band)
    cla = classical_rule(spec, stats)
    return TestReport(
        spec=spec,
        band_used=band,
        n=stats.n,
        statistic=stat,
        threshold_robust=rob.threshold,
        threshold_classical=cla.threshold,
        reject_robust=rob.rejects(stat),
        reject_classical=cla.rejects(stat),
        robust_p_value=robust_p_value(stat, spec.kind, band),
    )

"""Normal special functions and G-normal tail laws.

Everything here is a pure scalar function. The maximal false-rejection
probabilities ``p1``, ``p2`` and ``p3`` are the worst-case asymptotic
rejection probabilities of the one-sided (I, II) and two-sided (III) tests
when each observation's standard deviation may be chosen adaptively in
``[sigma_lower, sigma_upper]``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, UnsupportedVariantError

__all__ = [
    "VarianceBand",
    "TestKind",
    "TestSpec",
    "std_normal_cdf",
    "std_normal_sf",
    "std_normal_pdf",
    "std_normal_quantile",
    "p1",
    "p2",
    "p3",
    "tail_probability",
    "critical_value",
    "self_similar_f",
    "self_similar_f_yy",
    "power_approx",
]

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class VarianceBand:
    """Standard-deviation interval ``[sigma_lower, sigma_upper]``."""

    sigma_lower: float
    sigma_upper: float

    def __post_init__(self):
        lo, hi = float(self.sigma_lower), float(self.sigma_upper)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError(f"band edges must be finite, got ({lo}, {hi})")
        if not 0.0 < lo <= hi:
            raise DomainError(
                f"need 0 < sigma_lower <= sigma_upper, got ({lo}, {hi})"
            )
        object.__setattr__(self, "sigma_lower", lo)
        object.__setattr__(self, "sigma_upper", hi)

    @property
    def degenerate(self) -> bool:
        return self.sigma_lower == self.sigma_upper

    @property
    def variance_lower(self) -> float:
        return self.sigma_lower**2

    @property
    def variance_upper(self) -> float:
        return self.sigma_upper**2


class TestKind(str, enum.Enum):
    """I: H0 mu <= mu0; II: H0 mu >= mu0; III: H0 mu == mu0."""

    __test__ = False  # keep pytest from collecting it

    I = "I"
    II = "II"
    III = "III"

    @classmethod
    def parse(cls, value) -> "TestKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise DomainError(f"unknown test kind {value!r}") from None


@dataclass(frozen=True)
class TestSpec:
    __test__ = False

    kind: TestKind
    mu0: float = 0.0
    alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "kind", TestKind.parse(self.kind))
        alpha = float(self.alpha)
        if not 0.0 < alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {alpha}")
        mu0 = float(self.mu0)
        if not math.isfinite(mu0):
            raise DomainError("mu0 must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mu0", mu0)


# --------------------------------------------------------------------------
# standard normal
# --------------------------------------------------------------------------


def std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT2PI


def std_normal_cdf(x: float) -> float:
    """Phi(x) through the complementary error function."""
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_sf(x: float) -> float:
    """1 - Phi(x), accurate in the upper tail."""
    return 0.5 * math.erfc(x / _SQRT2)


# Acklam's rational approximation (relative error ~1.15e-9 before refinement).
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549671035506205e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log1p(-p))
        return -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
        ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    )


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on the open unit interval.

    Acklam's rational approximation followed by one Halley step against the
    erfc-based CDF. The residual is measured on the tail nearer to ``p`` so the
    step does not lose precision for ``p`` close to 1.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile requires 0 < p < 1, got {p}")
    if p == 0.5:
        return 0.0
    x = _acklam(p)
    if p < 0.5:
        err = std_normal_cdf(x) - p
    else:
        err = (1.0 - p) - std_normal_sf(x)
    u = err * _SQRT2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


# --------------------------------------------------------------------------
# G-normal tail laws
# --------------------------------------------------------------------------


def _check_band(band: VarianceBand) -> VarianceBand:
    if not isinstance(band, VarianceBand):
        raise DomainError(f"expected a VarianceBand, got {type(band).__name__}")
    return band


def p1(c: float, band: VarianceBand) -> float:
    """Maximal asymptotic probability of ``sqrt(n)(mean - mu0) > c``.

    The defining integral splits at 0 into a sigma_upper normal tail (z >= 0)
    and a sigma_lower normal piece (z < 0), both weighted by
    ``2 / (sigma_lower + sigma_upper)``.
    """
    _check_band(band)
    c = float(c)
    lo, hi = band.sigma_lower, band.sigma_upper
    if math.isnan(c):
        raise DomainError("c must not be NaN")
    if c >= 0.0:
        return 2.0 * hi * std_normal_sf(c / hi) / (hi + lo)
    return (hi + lo * (1.0 - 2.0 * std_normal_cdf(c / lo))) / (hi + lo)


def p2(c: float, band: VarianceBand) -> float:
    """Maximal asymptotic probability of ``sqrt(n)(mean - mu0) < c``."""
    return p1(-c, band)


def p3(c: float, band: VarianceBand) -> float:
    """Two-sided maximal rejection probability, taken as ``min(1, 2 p1(c))``.

    Only meaningful for ``c > 0``; for ``c <= 0`` the clip at 1 is active.
    """
    return min(1.0, 2.0 * p1(c, band))


def tail_probability(kind, c: float, band: VarianceBand) -> float:
    kind = TestKind.parse(kind)
    if kind is TestKind.I:
        return p1(c, band)
    if kind is TestKind.II:
        return p2(c, band)
    return p3(c, band)


def critical_value(spec: TestSpec, band: VarianceBand) -> float:
    """Robust threshold solving ``p_kind(c) = alpha``."""
    _check_band(band)
    if not isinstance(spec, TestSpec):
        raise DomainError("expected a TestSpec")
    lo, hi, a = band.sigma_lower, band.sigma_upper, spec.alpha
    if spec.kind is TestKind.I:
        return hi * std_normal_quantile(1.0 - a * (hi + lo) / (2.0 * hi))
    if spec.kind is TestKind.II:
        return hi * std_normal_quantile(a * (hi + lo) / (2.0 * hi))
    return hi * std_normal_quantile(1.0 - a * (hi + lo) / (4.0 * hi))


def self_similar_f(y: float, band: VarianceBand) -> float:
    """Profile ``f`` with ``u(t, x) = f((x - c) / sqrt(t))`` solving the G-heat
    equation from the indicator ``1(x > c)``. Identically ``f(y) = p1(-y)``."""
    return p1(-y, band)


def self_similar_f_yy(y: float, band: VarianceBand) -> float:
    """Second derivative of :func:`self_similar_f`; >= 0 iff ``y <= 0``."""
    _check_band(band)
    lo, hi = band.sigma_lower, band.sigma_upper
    if y <= 0.0:
        inner = std_normal_pdf(y / hi) / hi**2
    else:
        inner = std_normal_pdf(y / lo) / lo**2
    return -2.0 * y * inner / (hi + lo)


def power_approx(n: int, mu: float, spec: TestSpec, band: VarianceBand) -> float:
    """Asymptotic worst-case power ``1 - p2(c1 - sqrt(n)(mu - mu0))`` of the
    kind I robust test."""
    if spec.kind is not TestKind.I:
        raise UnsupportedVariantError("power approximation exists only for kind I")
    if n < 1:
        raise DomainError("n must be >= 1")
    c1 = critical_value(spec, band)
    return 1.0 - p2(c1 - math.sqrt(n) * (mu - spec.mu0), band)

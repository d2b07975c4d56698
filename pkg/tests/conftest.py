"""Shared fixtures and independent reference computations."""
import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from robustsig import VarianceBand, set_backend, get_backend

mpmath.mp.dps = 40

REFERENCE_BAND = VarianceBand(0.5, 1.0)
QUAD_BANDS = [VarianceBand(0.5, 1.0), VarianceBand(1.0, 1.0), VarianceBand(0.2, 3.0)]


@pytest.fixture
def band():
    return REFERENCE_BAND


@pytest.fixture(params=["python", "cython"])
def backend(request):
    from robustsig import available_backends

    if request.param not in available_backends():
        pytest.skip(f"{request.param} backend not built")
    prev = get_backend()
    set_backend(request.param)
    yield request.param
    set_backend(prev)


def mp_cdf(x):
    """Phi(x) at 40 digits."""
    return float(mpmath.ncdf(mpmath.mpf(x)))


def bisect_quantile(p, cdf, lo=-40.0, hi=40.0, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _phi(z):
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def quad_p1(c, band):
    """Adaptive quadrature of the p1 integrand, split at 0."""
    lo, hi = band.sigma_lower, band.sigma_upper
    w = 2.0 / (lo + hi)
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    total = 0.0
    if c < 0:
        total += integrate.quad(lambda z: _phi(z / lo), c, 0.0, **opts)[0]
    total += integrate.quad(lambda z: _phi(z / hi), max(c, 0.0), np.inf, **opts)[0]
    return w * total


def quad_p2(c, band):
    """Adaptive quadrature of the p2 integrand (upper-sigma piece on z <= 0)."""
    lo, hi = band.sigma_lower, band.sigma_upper
    w = 2.0 / (lo + hi)
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    total = integrate.quad(lambda z: _phi(z / hi), -np.inf, min(c, 0.0), **opts)[0]
    if c > 0:
        total += integrate.quad(lambda z: _phi(z / lo), 0.0, c, **opts)[0]
    return w * total


def binomial_tail(n, c, sigma):
    """Exact P(sigma * S_n / sqrt(n) > c) for a +-1 random walk, by enumeration."""
    total = 0
    for k in range(n + 1):
        if sigma * (2 * k - n) / math.sqrt(n) > c:
            total += math.comb(n, k)
    return total / 2**n


def two_pass_var(block):
    m = len(block)
    mean = math.fsum(block) / m
    return math.fsum((v - mean) ** 2 for v in block) / (m - 1)


# -- acceptance summary -----------------------------------------------------

AC_LINES = {}


@pytest.fixture
def ac_record():
    """Record the one-line verdict of an acceptance criterion."""

    def record(key, ok, detail):
        line = f"{key:<5} {'PASS' if ok else 'FAIL'}  {detail}"
        AC_LINES[key] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if AC_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(AC_LINES, key=lambda k: int(k[2:])):
            terminalreporter.write_line(AC_LINES[key])

"""Numerical cross-checks of the closed-form tail laws.

``dp_max_rejection`` solves the finite-horizon control problem exactly under
+-1 noise: the adversary picks sigma_lower or sigma_upper at each step to
maximise the probability that the final normalised sum lands in the rejection
region. ``g_heat_solve`` integrates the fully nonlinear G-heat equation
with an explicit finite-difference scheme.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ConfigurationError, DomainError, ResourceError
from .gnormal import TestKind, VarianceBand, self_similar_f

MAX_DP_STEPS = 200
_KIND_CODE = {TestKind.I: 1, TestKind.II: 2, TestKind.III: 3}


@dataclass(frozen=True)
class LatticeState:
    """Net count of +-sigma_upper steps (``p``) and +-sigma_lower steps (``q``)."""

    p: int
    q: int

    def xi(self, band: VarianceBand) -> float:
        return self.p * band.sigma_upper + self.q * band.sigma_lower


def _check_dp(n: int, c: float) -> None:
    if n < 1:
        raise DomainError("horizon must be >= 1")
    if n > MAX_DP_STEPS:
        raise ResourceError(f"horizon {n} exceeds the DP limit of {MAX_DP_STEPS}")
    if not math.isfinite(c):
        raise DomainError("c must be finite")


def dp_max_rejection(n: int, c: float, band: VarianceBand, kind=TestKind.I) -> float:
    """Exact supremum over adaptive strategies of the rejection probability at
    horizon ``n`` (Rademacher noise)."""
    _check_dp(n, c)
    kind = TestKind.parse(kind)
    return kernels().dp_value(int(n), float(c), band.sigma_lower, band.sigma_upper,
                              _KIND_CODE[kind], False)


def dp_policy_value(n: int, c: float, band: VarianceBand, kind=TestKind.I) -> float:
    """Exact rejection probability of the threshold strategy aimed at ``c``."""
    _check_dp(n, c)
    kind = TestKind.parse(kind)
    return kernels().dp_value(int(n), float(c), band.sigma_lower, band.sigma_upper,
                              _KIND_CODE[kind], True)


@dataclass(frozen=True)
class PDEGrid:
    half_width: float
    dx: float = 0.01
    t0: float = 0.01
    cfl: float = 0.5  # dt = cfl * dx^2 / sigma_upper^2
    t_end: float = 1.0

    @classmethod
    def for_problem(cls, c: float, band: VarianceBand, dx: float = 0.01,
                    t0: float = 0.01, cfl: float = 0.5) -> "PDEGrid":
        """Smallest grid (multiple of dx) reaching past ``|c| + 8 sigma_upper``."""
        reach = abs(c) + 8.0 * band.sigma_upper
        return cls(math.ceil(reach / dx) * dx, dx, t0, cfl)

    def dt(self, band: VarianceBand) -> float:
        return self.cfl * self.dx**2 / band.sigma_upper**2


def g_heat_solve(c: float, band: VarianceBand, grid: PDEGrid | None = None) -> float:
    """``u(1, 0)`` for the G-heat equation started from ``1(x > c)``.

    The march starts at ``t0`` from the exact self-similar profile (the
    indicator itself is discontinuous), uses the sign of the discrete second
    difference at each node to pick the diffusion coefficient, and takes
    Dirichlet values from the same profile at both ends.
    """
    if grid is None:
        grid = PDEGrid.for_problem(c, band)
    if not 0.0 < grid.t0 < grid.t_end:
        raise ConfigurationError("need 0 < t0 < t_end")
    if grid.dx <= 0 or not 0 < grid.cfl <= 1.0:
        raise ConfigurationError("explicit scheme unstable: need dx > 0 and dt <= dx^2 / sigma_upper^2")
    if grid.half_width < abs(c) + 8.0 * band.sigma_upper - 1e-9:
        raise ConfigurationError("half_width must reach |c| + 8 sigma_upper")

    m = int(round(grid.half_width / grid.dx))
    x = np.arange(-m, m + 1) * grid.dx
    dt_max = grid.dt(band)
    steps = math.ceil((grid.t_end - grid.t0) / dt_max)
    dt = (grid.t_end - grid.t0) / steps

    def profile(t, xs):
        s = math.sqrt(t)
        return np.array([self_similar_f((v - c) / s, band) for v in xs])

    u0 = profile(grid.t0, x)
    times = grid.t0 + dt * np.arange(1, steps + 1)
    # the closed form is the exact solution, so it supplies the boundary data
    left = profile_edge(c, band, x[0], times)
    right = profile_edge(c, band, x[-1], times)
    r = dt / grid.dx**2
    u = kernels().g_heat_march(u0, 0.5 * band.sigma_upper**2 * r,
                               0.5 * band.sigma_lower**2 * r, left, right)
    return float(u[m])


def profile_edge(c: float, band: VarianceBand, x_edge: float, times: np.ndarray) -> np.ndarray:
    return np.array([self_similar_f((x_edge - c) / math.sqrt(t), band) for t in times])


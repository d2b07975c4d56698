import math

import numpy as np
import pytest

from conftest import binomial_tail, mp_cdf
from robustsig import VarianceBand, p1, p2, p3
from robustsig.errors import ConfigurationError, ResourceError
from robustsig.oracle import (
    MAX_DP_STEPS,
    LatticeState,
    PDEGrid,
    dp_max_rejection,
    dp_policy_value,
    g_heat_solve,
)

C1 = 1.7804643416920256


class TestDynamicProgramme:
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 1.7])
    @pytest.mark.parametrize("n,c", [(1, 0.0), (7, 0.3), (20, 1.0), (41, -0.4), (100, 1.7805)])
    def test_degenerate_band_is_binomial_tail(self, sigma, n, c, backend):
        band = VarianceBand(sigma, sigma)
        expected = binomial_tail(n, c, sigma)
        assert dp_max_rejection(n, c, band) == pytest.approx(expected, abs=1e-12)
        assert dp_policy_value(n, c, band) == pytest.approx(expected, abs=1e-12)

    def test_unreachable_target(self, band):
        n = 30
        assert dp_max_rejection(n, 10 * band.sigma_upper * math.sqrt(n), band) == 0.0

    def test_policy_below_max(self, band):
        for n in (10, 40, 160):
            for c in (-1.0, 0.0, 0.7, C1, 2.5):
                assert dp_policy_value(n, c, band) <= dp_max_rejection(n, c, band) + 1e-15

    def test_gap_shrinks(self, band):
        gap10 = dp_max_rejection(10, C1, band) - dp_policy_value(10, C1, band)
        gap40 = dp_max_rejection(40, C1, band) - dp_policy_value(40, C1, band)
        assert 0.0 <= gap40 <= gap10

    def test_convergence_toward_tail_law(self, band):
        vals = [dp_max_rejection(n, C1, band) for n in (10, 40, 160)]
        target = p1(C1, band)
        assert abs(vals[2] - target) <= abs(vals[0] - target)
        # monotone toward the limit, up to 5e-3 of lattice oscillation
        dists = [abs(v - target) for v in vals]
        assert dists[1] <= dists[0] + 5e-3 and dists[2] <= dists[1] + 5e-3

    def test_comonotone(self, band):
        cs = np.linspace(-2, 3, 41)
        vals = [dp_max_rejection(30, c, band) for c in cs]
        assert np.all(np.diff(vals) <= 1e-15)
        his = (0.5, 0.7, 1.0, 1.5)
        vals = [dp_max_rejection(30, 1.0, VarianceBand(0.5, h)) for h in his]
        assert np.all(np.diff(vals) >= -1e-15)

    def test_other_kinds(self, band):
        # kind II is the mirror image of kind I; kind III is two-sided
        n = 60
        assert dp_max_rejection(n, -C1, band, "II") == pytest.approx(dp_max_rejection(n, C1, band), abs=1e-12)
        v3 = dp_max_rejection(n, 2.08, band, "III")
        assert abs(v3 - p3(2.08, band)) < 0.02
        assert dp_policy_value(n, 2.08, band, "III") <= v3 + 1e-15

    def test_horizon_limit(self, band):
        with pytest.raises(ResourceError):
            dp_max_rejection(MAX_DP_STEPS + 1, 0.0, band)
        dp_max_rejection(MAX_DP_STEPS, 0.0, band)

    def test_lattice_state(self, band):
        assert LatticeState(3, -2).xi(band) == 3 * 1.0 - 2 * 0.5


class TestGHeat:
    @pytest.mark.parametrize("b", [VarianceBand(0.5, 1.0), VarianceBand(1.0, 1.0)], ids=str)
    @pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 1.7805, 2.5])
    def test_matches_closed_form(self, c, b):
        assert abs(g_heat_solve(c, b) - p1(c, b)) <= 1e-3

    def test_heat_kernel_reduction(self):
        b = VarianceBand(0.8, 0.8)
        assert g_heat_solve(0.6, b) == pytest.approx(1 - mp_cdf(0.6 / 0.8), abs=1e-3)

    @pytest.mark.slow
    @pytest.mark.parametrize("c,b", [
        (0.5, VarianceBand(0.5, 1.0)),
        (1.7805, VarianceBand(0.5, 1.0)),
        (1.0, VarianceBand(1.0, 1.0)),
    ])
    def test_refinement_reduces_error(self, c, b):
        coarse = abs(g_heat_solve(c, b, PDEGrid.for_problem(c, b, dx=0.02)) - p1(c, b))
        fine = abs(g_heat_solve(c, b, PDEGrid.for_problem(c, b, dx=0.01)) - p1(c, b))
        assert fine < coarse

    def test_symmetric_case_is_exact(self):
        b = VarianceBand(1.0, 1.0)
        assert g_heat_solve(0.0, b) == pytest.approx(0.5, abs=1e-12)

    def test_invalid_grids(self, band):
        with pytest.raises(ConfigurationError):
            g_heat_solve(0.0, band, PDEGrid(10.0, dx=0.05, cfl=1.5))
        with pytest.raises(ConfigurationError):
            g_heat_solve(0.0, band, PDEGrid(10.0, dx=0.05, t0=0.0))
        with pytest.raises(ConfigurationError):
            g_heat_solve(0.0, band, PDEGrid(2.0, dx=0.05))

    def test_grid_dt(self, band):
        g = PDEGrid.for_problem(1.0, band, dx=0.01)
        assert g.dt(band) <= g.dx**2 / band.sigma_upper**2
        assert g.half_width >= 1.0 + 8 * band.sigma_upper


def test_p2_mirror_of_dp(band):
    assert dp_max_rejection(50, 0.4, band, "II") == pytest.approx(dp_max_rejection(50, -0.4, band), abs=1e-12)
    assert p2(0.4, band) == p1(-0.4, band)

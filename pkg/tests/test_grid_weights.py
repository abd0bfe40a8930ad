"""Phase grids, moments, and weighted norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinlab import collision as col
from kinlab import velocity as vel
from kinlab.errors import NumericalError, ConfigurationError
from kinlab.grid import DistributionField, PhaseGrid, moments, sample_field
from kinlab.weights import WeightSpec, weighted_norm


@pytest.fixture(scope="module")
def ball_model():
    return col.build_collision(col.RELAXATION_BOUNDED, vel.ball(20))


@pytest.fixture(scope="module")
def ball_grid(ball_model):
    return PhaseGrid(40.0, 0.1, ball_model.domain)


class TestMoments:
    def test_equilibrium_profile_has_zero_flux(self, ball_model, ball_grid):
        g = lambda x: np.exp(-((x - 3.0) ** 2))
        fld = sample_field(ball_grid, lambda x, v: 0.5 * g(x) * np.ones_like(v))
        mom = moments(fld)
        assert np.abs(mom.iota).max() < 1e-14
        assert np.abs(mom.rho - g(ball_grid.x)).max() < 1e-12

    def test_zero_field(self, ball_grid):
        fld = DistributionField(ball_grid, np.zeros((ball_grid.n_v, ball_grid.n_x)))
        mom = moments(fld)
        assert mom.mass == 0.0 and mom.first_x_moment == 0.0 and mom.m0 == 0.0

    def test_single_cell_mass(self, ball_grid):
        # mass 1 in the cell nearest x = 2 and the node nearest v = 0.5
        g = ball_grid
        i = int(np.argmin(np.abs(g.x - 2.0)))
        j = int(np.argmin(np.abs(g.velocity.v1 - 0.5)))
        values = np.zeros((g.n_v, g.n_x))
        values[j, i] = 1.0 / (g.dx * g.velocity.weights[j])
        mom = moments(DistributionField(g, values))
        assert mom.mass == pytest.approx(1.0, abs=1e-12)
        assert mom.first_x_moment == pytest.approx(g.x[i], abs=1e-12)
        assert abs(mom.first_x_moment - 2.0) <= g.dx / 2
        assert mom.m0 == pytest.approx(g.x[i] + g.velocity.v1[j], abs=1e-12)
        assert abs(mom.m0 - 2.5) <= g.dx / 2 + 1.0 / g.n_v


class TestWeightedNorm:
    def test_zero_field_all_specs(self, ball_model, ball_grid):
        fld = DistributionField(ball_grid, np.zeros((ball_grid.n_v, ball_grid.n_x)))
        for p in (1.0, 2.0, math.inf):
            for k in (-1, 0, 1):
                spec = WeightSpec(p, k)
                assert weighted_norm(fld, spec, ball_model.equilibrium) == 0.0

    def test_equilibrium_box_l1(self, ball_model, ball_grid):
        # f = M(v) 1_{x in [0,1]}: unit mass since M is a probability measure
        fld = sample_field(ball_grid, lambda x, v: np.where(x <= 1.0, 0.5, 0.0)
                           * np.ones_like(v))
        val = weighted_norm(fld, WeightSpec(1.0, 0), ball_model.equilibrium)
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_equilibrium_box_l2_inverse_weight(self, ball_model, ball_grid):
        # || M 1_{[0,1]} ||_{L2(M^{-1})} = (int_0^1 int M)^{1/2} = 1
        fld = sample_field(ball_grid, lambda x, v: np.where(x <= 1.0, 0.5, 0.0)
                           * np.ones_like(v))
        spec = WeightSpec(2.0, 0, "inv_sqrt_m")
        val = weighted_norm(fld, spec, ball_model.equilibrium)
        assert val == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(mag=st.floats(min_value=1e-6, max_value=1e6),
           sign=st.sampled_from([-1.0, 1.0]),
           seed=st.integers(min_value=0, max_value=2**16))
    def test_homogeneity(self, ball_model, ball_grid, mag, sign, seed):
        # squaring limits |c| to the representable range; tinier scales
        # underflow before the norm does
        c = sign * mag
        rng = np.random.default_rng(seed)
        vals = rng.uniform(0, 1, (ball_grid.n_v, ball_grid.n_x))
        fld = DistributionField(ball_grid, vals)
        scaled = DistributionField(ball_grid, c * vals)
        for p in (1.0, 2.0, math.inf):
            spec = WeightSpec(p, 1)
            a = weighted_norm(fld, spec)
            b = weighted_norm(scaled, spec)
            assert b == pytest.approx(abs(c) * a, rel=1e-12)

    def test_homogeneity_zero_scale(self, ball_grid):
        vals = np.ones((ball_grid.n_v, ball_grid.n_x))
        assert weighted_norm(DistributionField(ball_grid, 0.0 * vals),
                             WeightSpec(2.0, 1)) == 0.0

    def test_monotone_in_f(self, ball_grid):
        rng = np.random.default_rng(5)
        small = rng.uniform(0, 1, (ball_grid.n_v, ball_grid.n_x))
        big = small + rng.uniform(0, 1, small.shape)
        for p in (1.0, 2.0):
            spec = WeightSpec(p, 0)
            assert (weighted_norm(DistributionField(ball_grid, big), spec)
                    >= weighted_norm(DistributionField(ball_grid, small), spec))

    def test_stretched_validity(self):
        WeightSpec(2.0, 0, "stretched", r=1.5, s=1.0)
        WeightSpec(2.0, 0, "stretched", r=0.3, s=1.5)
        WeightSpec(2.0, 0, "stretched", r=0.49, s=2.0)
        with pytest.raises(ConfigurationError):
            WeightSpec(2.0, 0, "stretched", r=0.5, s=2.0)
        with pytest.raises(ConfigurationError):
            WeightSpec(2.0, 0, "stretched", r=0.9, s=1.0)

    def test_cap_saturation_errors(self):
        d = vel.real_line(64, 30.0)   # deliberately huge tail
        m_vals = np.exp(-0.5 * d.v1**2) / np.sqrt(2 * np.pi)
        grid = PhaseGrid(10.0, 0.5, d)
        fld = DistributionField(grid, np.ones((grid.n_v, grid.n_x)))
        spec = WeightSpec(2.0, 0, "inv_m")
        with pytest.raises(NumericalError):
            weighted_norm(fld, spec, m_vals)

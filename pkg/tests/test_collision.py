"""Collision-operator construction, adjoint identities, and spectral gaps."""

import numpy as np
import pytest

from kinlab import collision as col
from kinlab import velocity as vel
from kinlab.errors import ConfigurationError


class TestVelocityDomains:
    def test_ball_weights_sum_to_measure(self):
        d = vel.ball(32)
        assert d.weights.sum() == pytest.approx(2.0, abs=1e-14)
        assert np.all(np.abs(d.v1) < 1.0)

    def test_real_line_nodes_inside(self):
        d = vel.real_line(64, 8.0)
        assert np.all(np.abs(d.v1) <= 8.0)
        assert d.weights.sum() == pytest.approx(16.0, abs=1e-12)

    def test_circle_measure(self):
        d = vel.circle(64)
        assert d.weights.sum() == pytest.approx(2.0 * np.pi, abs=1e-12)
        assert np.all(np.abs(d.v1) <= 1.0)

    def test_gaussian_mass_on_truncation(self):
        d = vel.real_line(128, 8.0)
        M = np.exp(-0.5 * d.v1**2) / np.sqrt(2 * np.pi)
        assert (M * d.weights).sum() == pytest.approx(1.0, abs=1e-10)


class TestBuildCollision:
    def test_bgk_uniform_equilibrium_action(self):
        # BGK with M = 1/2 on (-1, 1): L f = rho[f]/2 - f at each node
        d = vel.ball(24)
        m = col.build_collision(col.RELAXATION_BOUNDED, d)
        rng = np.random.default_rng(0)
        f = rng.uniform(0, 1, d.n)
        rho = f @ d.weights
        expected = 0.5 * rho - f
        assert np.abs(m.apply(f) - expected).max() < 1e-14

    def test_fokker_planck_annihilates_gaussian(self):
        d = vel.real_line(128, 8.0)
        m = col.build_collision(col.FOKKER_PLANCK, d)
        resid = np.abs(m.apply(m.equilibrium)).max()
        assert resid <= 1e-8 * np.abs(m.equilibrium).max()

    def test_circle_acts_as_angular_laplacian_on_cos(self):
        d = vel.circle(64)
        m = col.build_collision(col.CIRCLE, d)
        ct = np.cos(d.thetas)
        dtheta = 2 * np.pi / 64
        assert np.abs(m.apply(ct) + ct).max() < dtheta**2
        assert np.abs(m.apply(np.ones(d.n))).max() < 1e-13

    def test_incompatible_domain_rejected(self):
        with pytest.raises(ConfigurationError):
            col.build_collision(col.FOKKER_PLANCK, vel.ball(16))
        with pytest.raises(ConfigurationError):
            col.build_collision(col.CIRCLE, vel.real_line(16))

    def test_tiny_resolution_rejected(self):
        with pytest.raises(ConfigurationError):
            col.build_collision(col.RELAXATION_BOUNDED, vel.ball(2))

    @pytest.mark.parametrize("kind,domain", [
        (col.RELAXATION_BOUNDED, vel.ball(32)),
        (col.RELAXATION_GAUSSIAN, vel.real_line(64)),
        (col.FOKKER_PLANCK, vel.real_line(64)),
        (col.CIRCLE, vel.circle(32)),
    ])
    def test_equilibrium_is_null_vector(self, kind, domain):
        m = col.build_collision(kind, domain)
        M = m.equilibrium
        assert (M * domain.weights).sum() == pytest.approx(1.0, abs=1e-12)
        assert (M * domain.v1 * domain.weights).sum() == pytest.approx(0.0, abs=1e-12)
        assert np.abs(m.apply(M)).max() <= 1e-8 * np.abs(M).max()


class TestAdjointIdentity:
    def test_relaxation_exact(self):
        m = col.build_collision(col.RELAXATION_BOUNDED, vel.ball(32))
        rep = col.adjoint_identity_check(m)
        assert rep.l_sharp_one <= 1e-12
        assert rep.phi_residual <= 1e-12
        assert rep.c_L == pytest.approx(1.0, abs=1e-12)

    def test_circle_constant_at_d2(self):
        # phi = v1/(d-1) collapses to v1 at d = 2; measured constant is 1
        d = vel.circle(64)
        m = col.build_collision(col.CIRCLE, d)
        rep = col.adjoint_identity_check(m)
        dtheta = 2 * np.pi / 64
        assert rep.l_sharp_one <= 1e-12
        assert abs(rep.c_L - 1.0) < dtheta**2
        assert rep.phi_residual < 2 * dtheta**2

    def test_fokker_planck_measured_constant(self):
        m = col.build_collision(col.FOKKER_PLANCK, vel.real_line(128, 8.0))
        rep = col.adjoint_identity_check(m)
        assert rep.l_sharp_one <= 1e-12
        assert abs(rep.c_L - 1.0) < 1e-2
        # the equilibrium-weighted residual is small even though the flat
        # max sits at the truncation edge
        assert rep.phi_residual_weighted < 1e-2

    @pytest.mark.parametrize("kind,domain", [
        (col.RELAXATION_BOUNDED, vel.ball(16)),
        (col.RELAXATION_GAUSSIAN, vel.real_line(32)),
        (col.FOKKER_PLANCK, vel.real_line(32)),
        (col.CIRCLE, vel.circle(16)),
    ])
    def test_discrete_adjoint_pairing(self, kind, domain):
        # <Lf, g> = <f, L#g> in the flat quadrature product, to round-off
        m = col.build_collision(kind, domain)
        Ls = col.adjoint_sharp(m)
        rng = np.random.default_rng(3)
        w = domain.weights
        for _ in range(50):
            f = rng.normal(size=domain.n)
            g = rng.normal(size=domain.n)
            lhs = np.sum(m.apply(f) * g * w)
            rhs = np.sum(f * (Ls @ g) * w)
            scale = np.linalg.norm(f) * np.linalg.norm(g) * np.abs(m.matrix).max()
            assert abs(lhs - rhs) <= 1e-12 * max(scale, 1.0)


class TestSpectralGap:
    def test_bgk_gap_is_one(self):
        m = col.build_collision(col.RELAXATION_BOUNDED, vel.ball(32))
        assert abs(col.spectral_gap(m) - 1.0) <= 1e-10

    def test_fokker_planck_hermite_spectrum(self):
        # oracle: the continuum spectrum is 0, -1, -2, ...
        m = col.build_collision(col.FOKKER_PLANCK, vel.real_line(256, 8.0))
        eigs = col.spectrum(m)
        assert abs(eigs[0]) < 1e-10
        assert eigs[1] == pytest.approx(-1.0, abs=0.02)
        assert eigs[2] == pytest.approx(-2.0, abs=0.1)
        assert abs(m.gap - 1.0) < 0.02

    def test_circle_gap_is_one(self):
        m = col.build_collision(col.CIRCLE, vel.circle(64))
        assert abs(col.spectral_gap(m) - 1.0) < 0.02

    @pytest.mark.parametrize("kind,maker,n", [
        (col.RELAXATION_BOUNDED, vel.ball, 32),
        (col.FOKKER_PLANCK, vel.real_line, 64),
        (col.CIRCLE, vel.circle, 32),
    ])
    def test_gap_stable_under_resolution_doubling(self, kind, maker, n):
        g1 = col.build_collision(kind, maker(n)).gap
        g2 = col.build_collision(kind, maker(2 * n)).gap
        assert g1 > 0 and g2 > 0
        assert abs(g2 - g1) <= 0.02 * g1

    def test_gap_needs_resolution(self):
        m = col.build_collision(col.RELAXATION_BOUNDED, vel.ball(4))
        with pytest.raises(ConfigurationError):
            col.spectral_gap(m)


class TestDissipativity:
    @pytest.mark.parametrize("kind,domain", [
        (col.RELAXATION_BOUNDED, vel.ball(24)),
        (col.RELAXATION_GAUSSIAN, vel.real_line(48)),
        (col.FOKKER_PLANCK, vel.real_line(48)),
        (col.CIRCLE, vel.circle(24)),
    ])
    def test_nonpositive_in_weighted_product(self, kind, domain):
        # <Lf, f> in L2(M^{-1}) <= 0 for 200 random profiles
        m = col.build_collision(kind, domain)
        rng = np.random.default_rng(7)
        w = domain.weights
        inv_m = 1.0 / m.equilibrium
        for _ in range(200):
            f = rng.normal(size=domain.n)
            val = np.sum(m.apply(f) * f * inv_m * w)
            scale = np.sum(f * f * inv_m * w)
            assert val <= 1e-12 * scale

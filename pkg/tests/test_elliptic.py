"""Dirichlet resolvent of (1 - d_xx): oracles and estimates."""

import numpy as np
import pytest

from kinlab.elliptic import EllipticSolver


def make(n=1000, x_max=50.0):
    dx = x_max / n
    x = (np.arange(n) + 0.5) * dx
    return EllipticSolver(n, dx), x, dx


class TestSolveR:
    def test_zero_rhs(self):
        solver, x, _ = make()
        sol = solver.solve(np.zeros_like(x))
        assert np.all(sol.u == 0.0)

    def test_dirichlet_eigenfunction(self):
        # eta = sin(pi x / L) is odd about both ends, so the ghost closure is
        # exact and u = eta / (1 + lambda_h) with the discrete eigenvalue
        solver, x, dx = make(2000, 40.0)
        L = 40.0
        eta = np.sin(np.pi * x / L)
        sol = solver.solve(eta)
        lam_h = (2.0 - 2.0 * np.cos(np.pi * dx / L)) / dx**2
        assert np.abs(sol.u - eta / (1.0 + lam_h)).max() < 1e-12
        # and the continuum factor to second order
        assert np.abs(sol.u - eta / (1.0 + (np.pi / L) ** 2)).max() < 5 * dx**2

    def test_maximum_principle_and_moment_contraction(self):
        solver, x, dx = make(800, 30.0)
        rng = np.random.default_rng(11)
        for _ in range(100):
            eta = rng.uniform(0.0, 1.0, x.size) * (x < 20.0)
            sol = solver.solve(eta)
            assert sol.u.min() >= -1e-14
            # first-moment contraction holds exactly at the discrete level
            assert (x * np.abs(sol.u)).sum() <= (x * np.abs(eta)).sum() * (1 + 1e-12)

    def test_h1_bound_ratio_stable_under_refinement(self):
        # || R eta ||_{H1} + || d_xx R eta ||_2 <= C || eta ||_2 with C
        # stable in dx, measured on a fixed family of smooth densities
        rng = np.random.default_rng(4)
        params = [(rng.uniform(3, 20), rng.uniform(0.5, 3.0), rng.uniform(0.2, 2.0))
                  for _ in range(100)]
        ratios = []
        for n in (500, 1000, 2000):
            solver, x, dx = make(n, 30.0)
            worst = 0.0
            for c, s, a in params:
                eta = a * np.exp(-(((x - c) / s) ** 2))
                sol = solver.solve(eta)
                h1_sq = ((sol.u**2).sum() + (sol.du**2).sum()
                         + (sol.d2u**2).sum()) * dx
                l2_sq = (eta**2).sum() * dx
                worst = max(worst, np.sqrt(h1_sq / l2_sq))
            ratios.append(worst)
        assert all(np.isfinite(r) for r in ratios)
        assert max(ratios) - min(ratios) < 0.02 * max(ratios)

    def test_second_derivative_from_equation(self):
        solver, x, dx = make(400, 20.0)
        eta = np.exp(-((x - 6.0) ** 2))
        sol = solver.solve(eta)
        assert np.allclose(sol.d2u, sol.u - eta)

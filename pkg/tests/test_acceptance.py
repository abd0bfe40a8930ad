"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail
line per criterion.  The two kinetic reference runs are shared fixtures;
the Fokker-Planck one dominates the wall time (about 15 minutes).
"""

import math
import time

import numpy as np
import pytest
import scipy.linalg

from kinlab import collision as col
from kinlab import heat, nash
from kinlab import velocity as vel
from kinlab.diagnostics import (DiagnosticsContext, hypocoercivity_series,
                                localization_report)
from kinlab.grid import PhaseGrid, sample_field
from kinlab.harness import Job, execute_kinetic
from kinlab.solver import (KineticStepper, SolverConfig, assemble_generator,
                           cfl_timestep, exact_damped_transport)
from kinlab.suites import fokker_planck_reference, relaxation_reference
from kinlab.weights import WeightSpec, weighted_norm


def report(name: str, detail: str):
    print(f"[PASS] {name}: {detail}")


def bump_profile(x):
    return np.maximum(x, 0.0) * np.exp(-np.square(x))


def smooth_bump(x, lo, hi):
    u = (np.asarray(x, dtype=float) - lo) / (hi - lo) * 2.0 - 1.0
    inside = np.abs(u) < 1.0
    out = np.zeros_like(u)
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2)) * np.e
    return out


@pytest.fixture(scope="module")
def relax_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("relax")
    t0 = time.time()
    result, record = execute_kinetic(
        Job("relaxation_d1", "kinetic", scenario=relaxation_reference()), out)
    return result, record, time.time() - t0


@pytest.fixture(scope="module")
def fp_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fp")
    t0 = time.time()
    result, record = execute_kinetic(
        Job("fokker_planck_d1", "kinetic", scenario=fokker_planck_reference()), out)
    return result, record, time.time() - t0


class TestHeatBaseline:
    def test_whole_line_decay(self):
        t0 = time.time()
        res = heat.heat_decay_experiment("whole", lambda x: np.exp(-np.square(x)),
                                         1.0e4, dx=0.1, window=(100.0, 1.0e4))
        elapsed = time.time() - t0
        assert abs(res.fit.exponent + 0.5) <= 0.1
        assert elapsed <= 60.0
        report("heat whole-line", f"L2^2 exponent {res.fit.exponent:+.4f} "
               f"(target -0.5 +/- 0.1), {elapsed:.0f}s")

    def test_half_line_decay_and_first_moment(self):
        t0 = time.time()
        res = heat.heat_decay_experiment("half", bump_profile, 1.0e4, dx=0.1,
                                         window=(100.0, 1.0e4))
        elapsed = time.time() - t0
        assert abs(res.fit.exponent + 1.5) <= 0.1
        assert res.first_moment_drift <= 1e-6
        assert elapsed <= 60.0
        report("heat half-line", f"L2^2 exponent {res.fit.exponent:+.4f} "
               f"(target -1.5 +/- 0.1), moment drift {res.first_moment_drift:.1e}, "
               f"{elapsed:.0f}s")

    def test_kernel_oracle(self):
        fld = heat.make_heat_field("half", bump_profile, 40.0, 0.05)
        while fld.time < 10.0 - 1e-12:
            dt = min(max(5e-4, fld.time / 200.0), 0.02, 10.0 - fld.time)
            fld = heat.step_heat(fld, dt)
        exact = heat.halfline_kernel_solution(bump_profile, 10.0, fld.x)
        err = float(np.abs(fld.values - exact).max())
        assert err <= 1e-4
        report("heat kernel oracle", f"Linf error {err:.2e} at dx=0.05, t=10 "
               "(tolerance 1e-4)")


class TestKineticDecay:
    def test_relaxation_exponents(self, relax_run):
        result, record, elapsed = relax_run
        assert result.status == "ok"
        fits = {f.quantity: f for f in result.fits}
        assert abs(fits["l2_minv_sq"].measured + 1.5) <= 0.15
        assert abs(fits["linf_w"].measured + 1.5) <= 0.2
        assert abs(fits["l1"].measured + 0.5) <= 0.1
        assert all(f.passed for f in result.fits)
        assert elapsed <= 600.0
        report("relaxation decay", "; ".join(
            f"{q} {fits[q].measured:+.4f}" for q in ("l2_minv_sq", "linf_w", "l1"))
            + f"; runtime {elapsed:.0f}s (limit 600)")

    def test_fokker_planck_exponents(self, fp_run):
        result, record, elapsed = fp_run
        assert result.status == "ok"
        fits = {f.quantity: f for f in result.fits}
        assert abs(fits["l2_minv_sq"].measured + 1.5) <= 0.15
        assert abs(fits["linf_w"].measured + 1.5) <= 0.2
        assert abs(fits["l1"].measured + 0.5) <= 0.1
        assert elapsed <= 1200.0
        report("fokker-planck decay", "; ".join(
            f"{q} {fits[q].measured:+.4f}" for q in ("l2_minv_sq", "linf_w", "l1"))
            + f"; runtime {elapsed:.0f}s (limit 1200)")


class TestCircleOperator:
    def test_operator_level_suite(self):
        # the d >= 2 half-plane run is out of desk scale: the circle model
        # is accepted at the operator level instead
        d = vel.circle(64)
        m = col.build_collision(col.CIRCLE, d)
        null_resid = float(np.abs(m.apply(m.equilibrium)).max())
        assert null_resid <= 1e-8 * float(np.abs(m.equilibrium).max())
        gap = col.spectral_gap(m)
        assert abs(gap - 1.0) <= 0.02
        rep = col.adjoint_identity_check(m)
        assert rep.l_sharp_one <= 1e-12
        assert abs(rep.c_L - 1.0) <= 0.01
        report("circle operator suite", f"null resid {null_resid:.1e}, "
               f"gap {gap:.5f} (1 +/- 2%), c_L {rep.c_L:.5f}")


class TestDampedTransportOracle:
    def test_solver_convergence_and_rates(self):
        d = vel.ball(24)
        m = col.build_collision(col.RELAXATION_BOUNDED, d)
        f_in = lambda x, v: 0.5 * smooth_bump(x, 1.0, 4.0) * np.ones_like(v)
        errs = []
        for dx in (0.1, 0.05):
            grid = PhaseGrid(20.0, dx, d)
            cfg = SolverConfig(damping=1.0)
            dt = cfl_timestep(grid, cfg)
            st = KineticStepper(m, grid, cfg)
            st.load(sample_field(grid, f_in))
            t = 0.0
            while t < 5.0 - 1e-12:
                step = min(dt, 5.0 - t)
                st.step(step)
                t += step
            exact = exact_damped_transport(f_in, 5.0, grid)
            vol = grid.cell_volumes()
            errs.append(float((np.abs(st.values - exact.values) * vol).sum()))
        ratio = errs[0] / errs[1]
        assert 1.5 <= ratio <= 2.5

        # measured decay rates dominate the damped-transport rates kappa = 1
        fine = vel.ball(48)
        grid = PhaseGrid(24.0, 0.05, fine)
        cases = {
            (1.0, 1): lambda x, v: (1.0 - 0.8 * v) * smooth_bump(x, 1.0, 2.0),
            (2.0, 0): lambda x, v: 0.5 * smooth_bump(x, 1.0, 2.0) * np.ones_like(v),
            (math.inf, -1): lambda x, v: smooth_bump(x, 1.0, 2.0)
                            * smooth_bump(v, 0.3, 0.9),
        }
        ts = np.linspace(0.25, 5.0, 20)
        kappas = {}
        for (p, k), f_in2 in cases.items():
            spec = WeightSpec(p, k)
            vals = np.array([
                weighted_norm(exact_damped_transport(f_in2, t, grid), spec)
                for t in ts
            ])
            A = np.vstack([ts, np.ones_like(ts)]).T
            kappas[(p, k)] = -float(np.linalg.lstsq(A, np.log(vals), rcond=None)[0][0])
            assert kappas[(p, k)] >= 1.0 - 1e-3, (p, k)
        report("damped-transport oracle", f"L1 halving ratio {ratio:.2f}; "
               "fitted rates " + ", ".join(f"{k}:{v:.3f}" for k, v in kappas.items())
               + " all >= 1")


class TestTinyGridOracles:
    def test_matrix_exponential_and_duality(self):
        d = vel.ball(8)
        m = col.build_collision(col.RELAXATION_BOUNDED, d)
        grid = PhaseGrid(12.0, 1.0, d)   # 12 x 8 grid
        fld = sample_field(grid, lambda x, v: np.exp(-np.square((x - 5.0) / 2.0))
                           * np.ones_like(v))
        G = assemble_generator(m, grid)
        exact = scipy.linalg.expm(G) @ fld.values.ravel()
        st = KineticStepper(m, grid, SolverConfig())
        st.load(fld)
        for _ in range(1000):
            st.step(1e-3)
        rel = float(np.linalg.norm(st.values.ravel() - exact)
                    / np.linalg.norm(exact))
        assert rel <= 1e-3

        Gd = assemble_generator(m, grid, dual=True)
        a = np.repeat(d.weights / m.equilibrium, grid.n_x)
        adj = (G.T * a[None, :]) / a[:, None]
        dual_resid = float(np.abs(adj - Gd).max() / np.abs(G).max())
        assert dual_resid <= 1e-12
        report("tiny-grid oracles", f"Strang vs expm rel error {rel:.2e} "
               f"(tol 1e-3); dual adjointness {dual_resid:.1e} (tol 1e-12)")


class TestHypocoercivity:
    @pytest.mark.parametrize("which", ["relaxation", "fokker_planck"])
    def test_modified_energy_monotone(self, which, relax_run, fp_run):
        _, record, _ = relax_run if which == "relaxation" else fp_run
        eps = record.epsilon
        assert eps is not None and eps > 0
        series = hypocoercivity_series(record.samples, eps)
        assert series.monotone, f"worst relative increase {series.worst_increase}"
        # norm equivalence (1/2) ||f|| <= |||f||| <= 2 ||f|| at every sample
        for s in record.samples:
            z = s.z_value(eps)
            assert 0.25 * s.l2_minv_sq - 1e-300 <= z <= 4.0 * s.l2_minv_sq + 1e-300
        report(f"hypocoercivity ({which})",
               f"eps {eps}, Z non-increasing on {len(record.samples)} samples, "
               f"min dissipation ratio {series.dissipation_ratio:.3f}")


class TestMomentMonotonicity:
    def test_relaxation_moment_functionals(self, relax_run):
        _, record, _ = relax_run
        wb = record.series("w_bounded")
        ws = record.series("w_signed")
        rel_up = np.diff(wb) / wb[:-1]
        assert np.all(rel_up <= 1e-6), f"max increase {rel_up.max():.2e}"
        rel_down = -np.diff(ws) / np.abs(ws[:-1])
        assert np.all(rel_down <= 1e-6), f"max decrease {rel_down.max():.2e}"
        report("moment monotonicities",
               f"bounded functional non-increasing (worst {rel_up.max():+.2e}); "
               f"signed moment non-decreasing (worst {rel_down.max():+.2e})")


class TestLocalization:
    @pytest.mark.parametrize("which", ["relaxation", "fokker_planck"])
    def test_sqrt_t_window(self, which, relax_run, fp_run):
        _, record, _ = relax_run if which == "relaxation" else fp_run
        rep = localization_report(record, (100.0, 1000.0))
        assert len(rep.decades) == 2
        wm = [d.window_mass_sqrt_t for d in rep.decades]
        assert max(wm) <= 3.0 * min(wm)
        xs = [d.x_t / math.sqrt(d.t) for d in rep.decades]
        assert max(xs) <= 2.0 * min(xs)
        for d in rep.decades:
            assert d.ratio_b <= 20.0 * d.ratio_a
        report(f"localization ({which})",
               f"window-mass*sqrt(t) band {min(wm):.3f}..{max(wm):.3f} (<=3x); "
               f"x_t/sqrt(t) {min(xs):.2f}..{max(xs):.2f} (<=2x); "
               f"B/A worst {max(d.ratio_b / d.ratio_a for d in rep.decades):.2f} (<=20)")


class TestInequalityBattery:
    def test_all_four_suites(self):
        t0 = time.time()
        mix = nash.TestFunctionEnsemble(0, nash.GAUSSIAN_MIXTURES, 500)
        bumps = nash.TestFunctionEnsemble(1, nash.SPLINE_BUMPS, 500)
        fourier = nash.TestFunctionEnsemble(2, nash.RANDOM_FOURIER, 500)

        worst = {}
        for ens in (mix, bumps):
            r_nash = nash.check_nash(ens)
            r_half = nash.check_improved_nash_half(ens)
            r_kato = nash.check_kato_chain(ens)
            assert r_nash.ok and r_half.ok and r_kato.chain.ok
            assert r_kato.kato_violations == 0
            worst[ens.family] = (r_nash.worst_ratio, r_half.worst_ratio,
                                 r_kato.chain.worst_ratio, r_kato.kato_worst)
        r_fourier = nash.check_fourier_pointwise_bound(fourier)
        assert r_fourier.violations == 0
        comp = nash.check_comparison_bound()
        assert comp.constant_free_ok
        elapsed = time.time() - t0
        assert elapsed <= 120.0
        report("inequality battery",
               f"nash/improved/chain saturated on 500-member ensembles; "
               f"fourier margin {r_fourier.worst_margin:.3f} <= 1 with 0 violations; "
               f"kato contraction <= 1 everywhere; {elapsed:.0f}s (limit 120)")

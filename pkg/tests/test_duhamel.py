"""Consistency of trajectories with the characteristics representation."""

import numpy as np
import pytest

from kinlab import collision as col
from kinlab import velocity as vel
from kinlab.errors import InsufficientDataError, PreconditionError
from kinlab.grid import PhaseGrid, sample_field
from kinlab.solver import (DiagnosticsSchedule, DuhamelData, SolverConfig,
                           TrajectoryRecord, duhamel_consistency, run_scenario)


def run_with_window(dx, nodes, t_max=3.0, window=(2.0, 2.8)):
    d = vel.ball(nodes)
    m = col.build_collision(col.RELAXATION_BOUNDED, d)
    grid = PhaseGrid(40.0, dx, d)
    f_in = lambda x, v: 0.5 * np.exp(-np.square(x - 4.0)) * np.ones_like(v)
    sched = DiagnosticsSchedule(t0=0.5, per_decade=8, duhamel_window=window)
    return run_scenario(m, grid, f_in, t_max, SolverConfig(), sched)


class TestDuhamelConsistency:
    def test_residual_first_order_and_halving(self):
        reports = []
        for dx, nodes in ((0.1, 16), (0.05, 32)):
            rec = run_with_window(dx, nodes)
            rep = duhamel_consistency(rec, rec.duhamel.t_start,
                                      rec.duhamel.t_end - rec.duhamel.t_start)
            # residual bounded by C (dx + dt) with a stable constant
            assert rep.max_residual <= 0.1 * (dx + rec.dt)
            reports.append(rep)
        assert reports[0].l1_residual / reports[1].l1_residual > 1.6

    def test_zero_trajectory(self):
        d = vel.ball(16)
        m = col.build_collision(col.RELAXATION_BOUNDED, d)
        grid = PhaseGrid(40.0, 0.1, d)
        f_in = lambda x, v: 0.0 * x * np.ones_like(v)
        sched = DiagnosticsSchedule(t0=0.5, per_decade=8, duhamel_window=(1.0, 1.8))
        rec = run_scenario(m, grid, f_in, 2.0, SolverConfig(), sched)
        rep = duhamel_consistency(rec, rec.duhamel.t_start,
                                  rec.duhamel.t_end - rec.duhamel.t_start)
        assert rep.max_residual == 0.0 and rep.l1_residual == 0.0

    def test_plateau_equilibrium_interior_exact(self):
        # a locally constant local equilibrium transports into itself; the
        # residual inside the plateau is interpolation-free
        d = vel.ball(16)
        m = col.build_collision(col.RELAXATION_BOUNDED, d)
        grid = PhaseGrid(40.0, 0.1, d)

        def plateau(x):
            return np.clip((x - 2.0) / 2.0, 0.0, 1.0) * np.clip((30.0 - x) / 2.0, 0.0, 1.0)

        record = TrajectoryRecord("relaxation_bounded", grid, SolverConfig(),
                                  DiagnosticsSchedule(), dt=0.05)
        from kinlab.diagnostics import DiagnosticsContext
        record.context = DiagnosticsContext(m, grid)
        s = 0.5
        times = list(np.arange(0.0, s + 1e-9, 0.005))
        fld = sample_field(grid, lambda x, v: 0.5 * plateau(x) * np.ones_like(v))
        duh = DuhamelData(0.0, s)
        duh.times = times
        duh.rhos = [plateau(grid.x) for _ in times]
        duh.f_start = fld
        duh.f_end = sample_field(grid, lambda x, v: 0.5 * plateau(x)
                                 * np.ones_like(v), time=s)
        record.duhamel = duh
        rep = duhamel_consistency(record, 0.0, s)
        interior = (grid.x > 6.0) & (grid.x < 26.0)
        # only the gain-term quadrature floor remains inside the plateau
        assert np.abs(rep.residual[:, interior]).max() < 1e-5

    def test_sparse_snapshots_rejected(self):
        rec = run_with_window(0.2, 16)
        rec.duhamel.times = rec.duhamel.times[:4]
        rec.duhamel.rhos = rec.duhamel.rhos[:4]
        with pytest.raises(InsufficientDataError):
            duhamel_consistency(rec, rec.duhamel.t_start,
                                rec.duhamel.t_end - rec.duhamel.t_start)

    def test_no_window_recorded(self):
        d = vel.ball(16)
        m = col.build_collision(col.RELAXATION_BOUNDED, d)
        grid = PhaseGrid(40.0, 0.2, d)
        f_in = lambda x, v: 0.5 * np.exp(-np.square(x - 4.0)) * np.ones_like(v)
        rec = run_scenario(m, grid, f_in, 1.0, SolverConfig())
        with pytest.raises(InsufficientDataError):
            duhamel_consistency(rec, 0.5, 0.5)

    def test_long_windows_rejected(self):
        rec = run_with_window(0.2, 16)
        with pytest.raises(PreconditionError):
            duhamel_consistency(rec, 0.0, 1.5)

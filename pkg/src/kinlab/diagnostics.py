"""Trajectory diagnostics: norms, moments, the modified energy, and fits.

Everything here is pure computation on immutable snapshots.  A
:class:`DiagnosticsContext` bundles the per-grid machinery (elliptic solve,
weight arrays, moment observables) so that sampling along a run stays
cheap; the per-sample output is a flat :class:`Sample` row.

The modified energy is Z = ||f||^2 + eps * X with cross term
X = integral (d_x R rho) . iota and R the Dirichlet resolvent of (1 - d_xx);
Z is linear in eps, so rows store the energy and the cross term separately
and eps is calibrated after the run from the recorded pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collision import CollisionModel
from .elliptic import EllipticSolver
from .errors import (CalibrationError, ConfigurationError, PreconditionError,
                     ZeroSignalError)
from .grid import DistributionField, PhaseGrid
from .velocity import BALL, CIRCLE
from .weights import OMEGA_INV_SQRT_M, OMEGA_ONE, WeightSpec, angle, omega_values

EPS_CAP = 1.0
EPS_FRACTION = 0.75   # calibrated so |eps X| <= 3/4 ||f||^2 at every sample
DECADES_DEFAULT = (10.0, 100.0, 1000.0)
EQUILIBRIUM_CUT = 1e-6   # velocity nodes below this M(v) are excluded from A


@dataclass(frozen=True)
class DecayFit:
    """Least-squares power-law exponent on a log-log window."""

    exponent: float
    intercept: float
    residual: float
    stderr: float
    window: tuple[float, float]
    n_samples: int


def fit_decay(t, values, window: tuple[float, float]) -> DecayFit:
    """Fit log(values) vs log(t) on the window; needs 8 positive points."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    sel = (t >= lo) & (t <= hi) & np.isfinite(values)
    if not np.any(sel):
        raise ZeroSignalError("no samples inside the fit window")
    if np.any(values[sel] <= 0):
        raise ZeroSignalError("fit window contains nonpositive values")
    if sel.sum() < 8:
        raise ZeroSignalError(f"need at least 8 samples in window, got {int(sel.sum())}")
    lt = np.log(t[sel])
    lv = np.log(values[sel])
    A = np.vstack([lt, np.ones_like(lt)]).T
    coef, res, _, _ = np.linalg.lstsq(A, lv, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = lv - A @ coef
    dof = max(sel.sum() - 2, 1)
    var = float(resid @ resid) / dof
    denom = float(((lt - lt.mean()) ** 2).sum())
    stderr = math.sqrt(var / denom) if denom > 0 else math.inf
    return DecayFit(slope, intercept, float(np.sqrt(resid @ resid)), stderr,
                    (float(lo), float(hi)), int(sel.sum()))


@dataclass
class Sample:
    """One diagnostics row along a trajectory (CSV schema v1)."""

    t: float
    mass: float
    l1: float
    xl1: float
    x2l1: float
    l2_minv_sq: float     # energy E = ||f||^2 in L2(M^{-1})
    linf_w: float
    j_l1: float
    cross_term: float     # X, so that Z = E + eps X
    y_value: float        # Y = ||f_perp||^2 + ||d_x R rho||^2_{H1}
    boundary_flux: float  # instantaneous |v1|-weighted squared trace at x = 0
    window_mass_sqrt_t: float = math.nan
    x_t: float = math.nan
    ratio_a: float = math.nan
    ratio_b: float = math.nan
    # extra in-memory observables (not part of the CSV schema)
    rho_l2: float = math.nan
    rho_linf_m1: float = math.nan
    w_bounded: float = math.nan   # integral (x + phi(v) + c0) f
    w_signed: float = math.nan    # integral (x + v) f
    far_mass_fraction: float = 0.0

    def z_value(self, eps: float) -> float:
        return self.l2_minv_sq + eps * self.cross_term


CSV_COLUMNS = ("t", "mass", "l1", "xl1", "x2l1", "l2_minv_sq", "linf_w", "j_l1",
               "Z", "Y", "boundary_flux", "window_mass_sqrt_t", "x_t",
               "ratio_A", "ratio_B")


class DiagnosticsContext:
    """Per-grid machinery reused by every sample of a run."""

    def __init__(self, model: CollisionModel, grid: PhaseGrid):
        if grid.velocity is not model.domain:
            same = (grid.velocity.kind == model.domain.kind
                    and grid.velocity.n == model.domain.n
                    and np.allclose(grid.velocity.v1, model.domain.v1))
            if not same:
                raise ConfigurationError("grid velocity domain differs from the model's")
        self.model = model
        self.grid = grid
        self.elliptic = EllipticSolver(grid.n_x, grid.dx)
        v1 = grid.velocity.v1
        self.inv_m = 1.0 / model.equilibrium
        if model.domain.kind == BALL:
            linf_spec = WeightSpec(math.inf, -1, OMEGA_ONE)
        else:
            linf_spec = WeightSpec(math.inf, -1, OMEGA_INV_SQRT_M)
        self.linf_spec = linf_spec
        self.linf_omega = omega_values(linf_spec, grid.velocity, model.equilibrium)
        self.bracket_m1 = 1.0 / (angle(grid.x)[None, :] + angle(v1)[:, None])
        self.phi = v1 / model.c_L
        self.c0 = float(np.max(np.abs(self.phi)))
        self.is_bounded = model.domain.kind == BALL
        self.has_signed_moment = model.domain.kind != CIRCLE
        # localisation window (a, b) in units of sqrt(t); fixed once calibrated
        self.window_ab: tuple[float, float] | None = None

    # -- core functionals -------------------------------------------------

    def energy(self, values: np.ndarray) -> float:
        w = self.grid.velocity.weights
        return float(((values**2 * self.inv_m[:, None]).T @ w).sum() * self.grid.dx)

    def f_perp_energy(self, values: np.ndarray, rho: np.ndarray) -> float:
        perp = values - self.model.equilibrium[:, None] * rho[None, :]
        return self.energy(perp)

    def boundary_trace(self, values: np.ndarray) -> float:
        """Incoming-trace term sum over v1 < 0 of |v1| f(0, v)^2 / M."""
        v1 = self.grid.velocity.v1
        w = self.grid.velocity.weights
        neg = v1 < 0
        col = values[neg, 0]
        return float(np.sum(np.abs(v1[neg]) * col**2 * self.inv_m[neg] * w[neg]))

    def sample(self, fld: DistributionField) -> Sample:
        g = self.grid
        w = g.velocity.weights
        v1 = g.velocity.v1
        values = fld.values
        rho = w @ values
        iota = (w * v1) @ values
        dx = g.dx
        mass = float(rho.sum() * dx)
        xl1 = float((g.x * rho).sum() * dx)
        x2l1 = float((g.x**2 * rho).sum() * dx)
        energy = self.energy(values)
        perp_sq = self.f_perp_energy(values, rho)
        sol = self.elliptic.solve(rho)
        cross = float((sol.du * iota).sum() * dx)
        y_val = perp_sq + self.elliptic.grad_h1_sq(sol)
        linf_w = float((np.abs(values) * self.bracket_m1 * self.linf_omega[:, None]).max(initial=0.0))
        j_l1 = float(np.abs(iota).sum() * dx)
        rho_l2 = float(np.sqrt((rho**2).sum() * dx))
        rho_linf_m1 = float(np.max(np.abs(rho) / angle(g.x), initial=0.0))
        w_signed = math.nan
        w_bounded = math.nan
        if self.has_signed_moment:
            w_signed = xl1 + float(iota.sum() * dx)
        if self.is_bounded:
            phi_f = float(((self.phi * w) @ values).sum() * dx)
            w_bounded = xl1 + phi_f + self.c0 * mass
        tail = max(2, g.n_x // 20)
        far = float(rho[-tail:].sum() * dx)
        far_frac = far / mass if mass > 0 else 0.0

        smp = Sample(
            t=fld.time, mass=mass, l1=mass, xl1=xl1, x2l1=x2l1,
            l2_minv_sq=energy, linf_w=linf_w, j_l1=j_l1,
            cross_term=cross, y_value=y_val,
            boundary_flux=self.boundary_trace(values),
            rho_l2=rho_l2, rho_linf_m1=rho_linf_m1,
            w_bounded=w_bounded, w_signed=w_signed,
            far_mass_fraction=far_frac,
        )
        self._localisation_columns(smp, rho, fld)
        return smp

    # -- localisation ----------------------------------------------------

    def _localisation_columns(self, smp: Sample, rho: np.ndarray,
                              fld: DistributionField):
        t = fld.time
        if t < 1.0:
            return
        g = self.grid
        if self.window_ab is None and t >= DECADES_DEFAULT[0]:
            mass = rho.sum() * g.dx
            if mass <= 0:
                return
            csum = np.cumsum(rho) * g.dx
            lo = g.x[min(int(np.searchsorted(csum, 0.20 * mass)), g.n_x - 1)]
            hi = g.x[min(int(np.searchsorted(csum, 0.85 * mass)), g.n_x - 1)]
            rt = math.sqrt(t)
            self.window_ab = (float(lo / rt), float(hi / rt))
        if self.window_ab is None:
            return
        a, b = self.window_ab
        rt = math.sqrt(t)
        sel = (g.x >= a * rt) & (g.x <= b * rt)
        smp.window_mass_sqrt_t = float(rho[sel].sum() * g.dx) * rt
        smp.x_t = peak_location(g.x, rho)


def peak_location(x: np.ndarray, rho: np.ndarray, smooth: int = 5) -> float:
    """Argmax of the moving average of x*rho; ties resolve to smaller x."""
    xr = x * rho
    kernel = np.ones(smooth) / smooth
    smoothed = np.convolve(xr, kernel, mode="same")
    return float(x[int(np.argmax(smoothed))])


# -- epsilon calibration and the hypocoercivity series ---------------------


def calibrate_epsilon(samples) -> float:
    """Largest eps <= 1 keeping |eps X| <= 3/4 E on all samples, halved.

    ``samples`` is an iterable of objects with ``l2_minv_sq`` and
    ``cross_term`` (or (E, X) pairs).  Bisection on the monotone
    feasibility predicate; the halving leaves a safety margin.
    """
    pairs = []
    for s in samples:
        if hasattr(s, "l2_minv_sq"):
            pairs.append((s.l2_minv_sq, s.cross_term))
        else:
            pairs.append((float(s[0]), float(s[1])))
    if not pairs:
        raise ZeroSignalError("no samples to calibrate against")
    if len(pairs) < 10:
        raise PreconditionError("calibration needs at least 10 samples")
    energies = np.array([p[0] for p in pairs])
    crosses = np.array([p[1] for p in pairs])
    if np.all(energies == 0.0):
        raise ZeroSignalError("all samples are identically zero")

    def feasible(eps: float) -> bool:
        return bool(np.all(eps * np.abs(crosses) <= EPS_FRACTION * energies + 1e-300))

    if feasible(EPS_CAP):
        return EPS_CAP / 2.0
    lo, hi = 0.0, EPS_CAP
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo / 2.0


@dataclass(frozen=True)
class HypocoercivityState:
    t: float
    eps: float
    z: float
    y: float
    boundary_flux: float
    degenerate: bool


@dataclass(frozen=True)
class HypocoercivitySeries:
    states: tuple[HypocoercivityState, ...]
    monotone: bool
    worst_increase: float        # max relative increase of Z between samples
    dissipation_ratio: float     # min over gaps of -dZ / (dt * mean Y)
    equivalence_ok: bool


def hypocoercivity_series(samples, eps: float,
                          rel_tol: float = 1e-8) -> HypocoercivitySeries:
    """Z and Y along the samples plus the monotonicity verdict.

    Raises CalibrationError if eps violates the norm equivalence on any
    sample (the calibration is stale for this trajectory).
    """
    states = []
    for s in samples:
        e, x = s.l2_minv_sq, s.cross_term
        if eps * abs(x) > EPS_FRACTION * e + 1e-300:
            raise CalibrationError(
                f"eps={eps!r} violates the norm equivalence at t={s.t!r}"
            )
        z = e + eps * x
        degenerate = s.y_value <= 1e-14 * max(e, 1.0) and e > 0
        states.append(HypocoercivityState(s.t, eps, z, s.y_value,
                                          s.boundary_flux, degenerate))
    worst = 0.0
    ratios = []
    for prev, cur in zip(states, states[1:]):
        if prev.z > 0:
            worst = max(worst, (cur.z - prev.z) / prev.z)
        dt = cur.t - prev.t
        ybar = 0.5 * (cur.y + prev.y)
        if dt > 0 and ybar > 0:
            ratios.append((prev.z - cur.z) / (dt * ybar))
    monotone = worst <= rel_tol
    min_ratio = float(min(ratios)) if ratios else math.nan
    return HypocoercivitySeries(tuple(states), monotone, worst, min_ratio, True)


# -- localisation report ----------------------------------------------------


@dataclass(frozen=True)
class DecadeLocalization:
    t: float
    window: tuple[float, float]       # (a sqrt(t), b sqrt(t))
    window_mass_sqrt_t: float
    x_t: float
    ratio_a: float                    # min of f t / M over the slab
    ratio_b: float                    # max of f t / M over the slab
    profile_exponent: float           # slope of log(f t) vs log M over the slab


@dataclass(frozen=True)
class LocalizationReport:
    decades: tuple[DecadeLocalization, ...]
    window_ab: tuple[float, float]


def localization_report(record, decades=DECADES_DEFAULT) -> LocalizationReport:
    """Per-decade window mass, peak location and slab profile bounds.

    ``record`` must be a TrajectoryRecord whose run stored fields at the
    decade times and whose initial signed moment was positive.
    """
    if record.m0_initial is None or record.m0_initial <= 0:
        raise PreconditionError("localisation needs a positive initial signed moment")
    ctx: DiagnosticsContext = record.context
    if ctx.window_ab is None:
        raise PreconditionError("run too short: the sqrt(t) window was never calibrated")
    a, b = ctx.window_ab
    g = ctx.grid
    M = ctx.model.equilibrium
    keep = M >= EQUILIBRIUM_CUT
    out = []
    for target in decades:
        fld = record.nearest_field(target)
        if fld is None:
            continue
        t = fld.time
        w = g.velocity.weights
        rho = w @ fld.values
        rt = math.sqrt(t)
        sel = (g.x >= a * rt) & (g.x <= b * rt)
        wmass = float(rho[sel].sum() * g.dx) * rt
        x_t = peak_location(g.x, rho)
        half_cells = max(1, math.ceil(1.0 / g.dx))
        centre = int(np.clip(round(x_t / g.dx - 0.5), half_cells, g.n_x - half_cells - 1))
        slab = slice(centre - half_cells, centre + half_cells + 1)
        prof = fld.values[keep, slab] * t / M[keep, None]
        lo = float(prof.min())
        hi = float(prof.max())
        mean_ft = np.maximum((fld.values[keep, slab] * t).mean(axis=1), 1e-300)
        logm = np.log(M[keep])
        # exponent alpha in f ~ M^alpha over the slab (alpha = 1 means the
        # profile is proportional to the equilibrium); undefined for a flat
        # equilibrium
        if keep.sum() > 2 and np.ptp(logm) > 1e-6:
            slope = float(np.polyfit(logm, np.log(mean_ft), 1)[0])
        else:
            slope = math.nan
        out.append(DecadeLocalization(t, (a * rt, b * rt), wmass, x_t, lo, hi, slope))
    return LocalizationReport(tuple(out), (a, b))


# -- interpolation-inequality monitors --------------------------------------


def interpolation_ratios(sample: Sample) -> tuple[float, float]:
    """Measured constants of the two L1 interpolation inequalities.

    First: ||rho||_1 / (||rho||_2^{2/3} ||x rho||_1^{1/3}), provably <= 2.
    Second: ||rho||_1 / (||rho||_{Linf,-1}^{1/3} ||x rho||_1^{2/3}).
    """
    r1 = math.nan
    r2 = math.nan
    if sample.rho_l2 > 0 and sample.xl1 > 0:
        r1 = sample.l1 / (sample.rho_l2 ** (2.0 / 3.0) * sample.xl1 ** (1.0 / 3.0))
    if sample.rho_linf_m1 > 0 and sample.xl1 > 0:
        r2 = sample.l1 / (sample.rho_linf_m1 ** (1.0 / 3.0) * sample.xl1 ** (2.0 / 3.0))
    return r1, r2

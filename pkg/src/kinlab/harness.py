"""Experiment orchestration, persistence, and the exponent summary.

A suite is a list of jobs (kinetic runs, heat baselines, inequality
batches).  Each job writes its own CSV artifacts; the harness collects a
manifest with sha256 checksums and a summary table comparing fitted decay
exponents against the predicted values with pass/fail per tolerance.

Outputs are byte-deterministic for a fixed config and seed: floats are
serialised with repr (shortest round-trip), runs never share files, and
manifests are sorted by run name.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import math
import traceback
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from . import heat as heat_mod
from . import nash as nash_mod
from .config import ScenarioConfig
from .errors import KinlabError
from .solver import TrajectoryRecord, run_scenario

CSV_SCHEMA = "kinlab-csv-v1"
MANIFEST_SCHEMA = "kinlab-manifest-v1"

# predicted long-time exponents for the d = 1 kinetic runs
KINETIC_PREDICTIONS = (
    ("l2_minv_sq", -1.5, 0.15),
    ("linf_w", -1.5, 0.2),
    ("l1", -0.5, 0.1),
)
KINETIC_FIT_WINDOW = (100.0, 2000.0)


@dataclass
class Job:
    name: str
    kind: str                      # "kinetic" | "heat_decay" | "heat_localization" | "nash"
    scenario: ScenarioConfig | None = None
    heat_mode: str = "half"
    t_max: float = 1.0e4
    dx: float = 0.1
    window: tuple[float, float] | None = None
    nash_count: int = 500
    seed: int = 0
    report_only: bool = False   # record fits without asserting the asymptotic prediction


@dataclass
class FitRow:
    quantity: str
    predicted: float | None
    tolerance: float | None
    measured: float
    stderr: float
    window: tuple[float, float]
    passed: bool


@dataclass
class RunResult:
    name: str
    kind: str
    status: str = "ok"
    error: str = ""
    files: list[dict] = field(default_factory=list)
    fits: list[FitRow] = field(default_factory=list)
    extras: dict = field(default_factory=dict)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return repr(x)   # shortest round-trip, byte-deterministic
    return str(x)


def _jsonable(obj):
    """Strict-JSON copy: non-finite floats become null."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_csv(path: Path, header_meta: str, columns: list[str],
               rows) -> None:
    lines = [f"# {CSV_SCHEMA} {header_meta}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


# -- kinetic jobs --------------------------------------------------------------


def kinetic_csv_rows(record: TrajectoryRecord, eps: float):
    for s in record.samples:
        yield (s.t, s.mass, s.l1, s.xl1, s.x2l1, s.l2_minv_sq, s.linf_w,
               s.j_l1, s.z_value(eps), s.y_value, s.boundary_flux,
               s.window_mass_sqrt_t, s.x_t, s.ratio_a, s.ratio_b)


def execute_kinetic(job: Job, out_dir: Path):
    cfg = job.scenario
    model = cfg.build_model()
    grid = cfg.build_grid(model.domain)
    record = run_scenario(model, grid, cfg.initial_datum(model), cfg.t_max,
                          cfg.solver_config(), cfg.schedule())
    try:
        eps = diag.calibrate_epsilon(record.samples)
    except KinlabError:
        eps = 0.0
    record.epsilon = eps

    loc_report = None
    if (record.m0_initial or 0.0) > 0 and record.decade_fields:
        try:
            loc_report = diag.localization_report(record, cfg.decades)
        except KinlabError:
            loc_report = None
    if loc_report is not None:
        times = record.times()
        for dec in loc_report.decades:
            idx = int(np.argmin(np.abs(times - dec.t)))
            record.samples[idx].ratio_a = dec.ratio_a
            record.samples[idx].ratio_b = dec.ratio_b

    result = RunResult(job.name, "kinetic")
    files = []
    series_path = out_dir / f"{job.name}_series.csv"
    meta = (f"run={job.name} kind={cfg.kind} dx={_fmt(cfg.dx)} "
            f"x_max={_fmt(cfg.x_max)} nodes={cfg.velocity_nodes} "
            f"epsilon={_fmt(eps)} linf_weight="
            + ("one" if cfg.kind == "relaxation_bounded" else "inv_sqrt_m"))
    _write_csv(series_path, meta, list(diag.CSV_COLUMNS),
               kinetic_csv_rows(record, eps))
    files.append(series_path)

    if loc_report is not None:
        g = record.grid
        M = record.context.model.equilibrium
        keep = M >= diag.EQUILIBRIUM_CUT
        for dec in loc_report.decades:
            fld = record.nearest_field(dec.t)
            if fld is None:
                continue
            half = max(1, math.ceil(1.0 / g.dx))
            centre = int(np.clip(round(dec.x_t / g.dx - 0.5), half, g.n_x - half - 1))
            slab = slice(centre - half, centre + half + 1)
            rows = []
            for j in np.flatnonzero(keep):
                for i in range(slab.start, slab.stop):
                    rows.append((g.x[i], g.velocity.v1[j],
                                 fld.values[j, i] * dec.t / M[j]))
            p = out_dir / f"{job.name}_slab_t{int(round(dec.t))}.csv"
            _write_csv(p, f"run={job.name} decade={_fmt(dec.t)} "
                          f"x_t={_fmt(dec.x_t)}", ["x", "v", "ratio"], rows)
            files.append(p)
        result.extras["localization"] = [
            {"t": d.t, "window": list(d.window),
             "window_mass_sqrt_t": d.window_mass_sqrt_t, "x_t": d.x_t,
             "ratio_A": d.ratio_a, "ratio_B": d.ratio_b,
             "profile_exponent": d.profile_exponent}
            for d in loc_report.decades
        ]

    times = record.times()
    window = job.window or (KINETIC_FIT_WINDOW[0], min(KINETIC_FIT_WINDOW[1], cfg.t_max))
    for qty, predicted, tol in KINETIC_PREDICTIONS:
        if job.report_only:
            predicted, tol = None, None
        try:
            fit = diag.fit_decay(times, record.series(qty), window)
        except KinlabError:
            result.fits.append(FitRow(qty, predicted, tol, math.nan, math.nan,
                                      window, job.report_only))
            continue
        passed = True if predicted is None else abs(fit.exponent - predicted) <= tol
        result.fits.append(FitRow(qty, predicted, tol, fit.exponent,
                                  fit.stderr, fit.window, passed))
    result.files = [{"path": p.name, "sha256": _sha256(p)} for p in files]
    return result, record


# -- heat jobs ------------------------------------------------------------------


def heat_initial(mode: str):
    if mode == "whole":
        return lambda x: np.exp(-np.square(x))
    return lambda x: np.maximum(x, 0.0) * np.exp(-np.square(x))


def execute_heat(job: Job, out_dir: Path):
    result = RunResult(job.name, job.kind)
    files = []
    if job.kind == "heat_decay":
        predicted = -0.5 if job.heat_mode == "whole" else -1.5
        res = heat_mod.heat_decay_experiment(job.heat_mode, heat_initial(job.heat_mode),
                                             job.t_max, dx=job.dx, window=job.window)
        series = res.series
        rows = [(t,) + tuple(series.columns[c][i] for c in
                             ("l1", "l2sq", "xl1", "x2l1", "linf")) + (math.nan, math.nan)
                for i, t in enumerate(series.t)]
        p = out_dir / f"{job.name}_series.csv"
        _write_csv(p, f"run={job.name} mode={job.heat_mode} dx={_fmt(job.dx)}",
                   ["t", "l1", "l2sq", "xl1", "x2l1", "linf", "window_mass", "x_peak"],
                   rows)
        files.append(p)
        if res.fit is not None:
            result.fits.append(FitRow("l2sq", predicted, 0.1, res.fit.exponent,
                                      res.fit.stderr, res.fit.window,
                                      abs(res.fit.exponent - predicted) <= 0.1))
        result.extras["first_moment_drift"] = res.first_moment_drift
        result.extras["zero_signal"] = res.zero_signal
    else:
        res = heat_mod.heat_localization_experiment(heat_initial("half"), job.t_max,
                                                    dx=job.dx, window=job.window)
        series = res.series
        rows = [(t,) + tuple(series.columns[c][i] for c in
                             ("l1", "l2sq", "xl1", "x2l1", "linf"))
                + (res.window_mass_sqrt_t[i], res.x_peak[i])
                for i, t in enumerate(series.t)]
        p = out_dir / f"{job.name}_series.csv"
        _write_csv(p, f"run={job.name} mode=half dx={_fmt(job.dx)}",
                   ["t", "l1", "l2sq", "xl1", "x2l1", "linf", "window_mass", "x_peak"],
                   rows)
        files.append(p)
        for qty, fit, predicted, tol in (("l1", res.l1_fit, -0.5, 0.1),
                                         ("x2l1", res.x2_fit, 0.5, 0.1),
                                         ("x_peak", res.peak_fit, 0.5, 0.1)):
            result.fits.append(FitRow(qty, predicted, tol, fit.exponent, fit.stderr,
                                      fit.window, abs(fit.exponent - predicted) <= tol))
        result.extras["cauchy_schwarz_max"] = res.cauchy_schwarz_max
        result.extras["window"] = list(res.window)
    result.files = [{"path": p.name, "sha256": _sha256(p)} for p in files]
    return result, None


# -- inequality batch -----------------------------------------------------------


def execute_nash(job: Job, out_dir: Path):
    result = RunResult(job.name, "nash")
    count = job.nash_count
    mixed = [
        nash_mod.TestFunctionEnsemble(job.seed, nash_mod.GAUSSIAN_MIXTURES, count),
        nash_mod.TestFunctionEnsemble(job.seed + 1, nash_mod.SPLINE_BUMPS, count),
    ]
    fourier_ens = nash_mod.TestFunctionEnsemble(job.seed + 2, nash_mod.RANDOM_FOURIER, count)
    rows = []
    ok = True
    for ens in mixed:
        nash_rep = nash_mod.check_nash(ens)
        half_rep = nash_mod.check_improved_nash_half(ens)
        kato_rep = nash_mod.check_kato_chain(ens)
        for rep in (nash_rep, half_rep, kato_rep.chain):
            rows.append((f"{rep.name}[{ens.family}]", rep.worst_ratio,
                         rep.head_worst, int(rep.saturated), rep.n_checked,
                         rep.n_skipped))
            ok = ok and rep.ok
        rows.append((f"kato_moment[{ens.family}]", kato_rep.kato_worst, math.nan,
                     int(kato_rep.kato_violations == 0), kato_rep.chain.n_checked, 0))
        ok = ok and kato_rep.kato_violations == 0
    fr = nash_mod.check_fourier_pointwise_bound(fourier_ens)
    rows.append(("fourier_pointwise", fr.worst_margin, math.nan,
                 int(fr.violations == 0), fr.n_checked, 0))
    ok = ok and fr.violations == 0
    comp = nash_mod.check_comparison_bound(job.seed)
    rows.append(("comparison_scalar", comp.measured_constant, math.nan,
                 int(comp.constant_free_ok), comp.n, 0))
    ok = ok and comp.constant_free_ok
    p = out_dir / f"{job.name}_inequalities.csv"
    _write_csv(p, f"run={job.name} count={count} seed={job.seed}",
               ["inequality", "worst_ratio", "head_worst", "ok", "checked", "skipped"],
               rows)
    result.files = [{"path": p.name, "sha256": _sha256(p)}]
    result.extras["all_ok"] = ok
    if not ok:
        result.status = "failed"
        result.error = "an inequality check failed its acceptance rule"
    return result, None


# -- suite driver ----------------------------------------------------------------


def execute_job(job: Job, out_dir: Path):
    """Run one job, writing its artifacts; returns (RunResult, payload)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    if job.kind == "kinetic":
        return execute_kinetic(job, out_dir)
    if job.kind in ("heat_decay", "heat_localization"):
        return execute_heat(job, out_dir)
    if job.kind == "nash":
        return execute_nash(job, out_dir)
    raise KinlabError(f"unknown job kind {job.kind!r}")


def _job_worker(args):
    job, out_dir = args
    try:
        result, _ = execute_job(job, Path(out_dir))
        return result
    except Exception as exc:  # noqa: BLE001 - report, do not kill the pool
        return RunResult(job.name, job.kind, status="failed",
                         error=f"{type(exc).__name__}: {exc}")


@dataclass
class SuiteResult:
    manifest_path: Path
    results: list[RunResult]
    exit_code: int

    def summary_lines(self) -> list[str]:
        lines = []
        for r in sorted(self.results, key=lambda r: r.name):
            if r.status != "ok":
                lines.append(f"{r.name}: FAILED ({r.error})")
                continue
            if not r.fits:
                lines.append(f"{r.name}: ok")
            for f in r.fits:
                verdict = "pass" if f.passed else "FAIL"
                pred = "-" if f.predicted is None else f"{f.predicted:+.3g}"
                lines.append(
                    f"{r.name} {f.quantity} exponent: predicted {pred}, "
                    f"measured {f.measured:+.4f} +/- {f.stderr:.4f} "
                    f"(tol {f.tolerance}) [{verdict}]"
                )
        return lines


def run_suite(jobs: list[Job], out_dir: Path, parallelism: int = 1,
              seed: int = 0) -> SuiteResult:
    """Execute jobs up to the parallelism bound and write the manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for job in jobs:
        job.seed = job.seed or seed
    if parallelism <= 1 or len(jobs) <= 1:
        results = [_job_worker((job, str(out_dir))) for job in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_job_worker,
                                    [(job, str(out_dir)) for job in jobs]))
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "seed": seed,
        "runs": sorted(
            ({"name": r.name, "kind": r.kind, "status": r.status,
              "error": r.error, "files": r.files,
              "fits": [asdict(f) for f in r.fits],
              "extras": r.extras} for r in results),
            key=lambda d: d["name"],
        ),
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(_jsonable(manifest), indent=2, sort_keys=True, allow_nan=False)
        + "\n")
    hard_failure = any(r.status != "ok" for r in results)
    fit_failure = any(not f.passed for r in results for f in r.fits)
    exit_code = 1 if hard_failure else (2 if fit_failure else 0)
    return SuiteResult(manifest_path, results, exit_code)


def verify_manifest(out_dir: Path) -> list[str]:
    """Recompute checksums; returns a list of mismatch descriptions."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    problems = []
    for run in manifest["runs"]:
        for f in run["files"]:
            p = out_dir / f["path"]
            if not p.exists():
                problems.append(f"{run['name']}: missing file {f['path']}")
            elif _sha256(p) != f["sha256"]:
                problems.append(f"{run['name']}: checksum mismatch for {f['path']}")
    return problems

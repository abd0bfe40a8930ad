"""Named experiment suites shipped with the laboratory."""

from __future__ import annotations

from .config import ScenarioConfig
from .harness import Job


def relaxation_reference() -> ScenarioConfig:
    """The d = 1 bounded-velocity decay run (dx = 0.1, 32 nodes)."""
    return ScenarioConfig(kind="relaxation_bounded", velocity_nodes=32,
                          x_max=300.0, dx=0.1, t_max=2000.0,
                          samples_per_decade=8, sample_t0=1.0,
                          name="relaxation_d1")


def fokker_planck_reference() -> ScenarioConfig:
    """The d = 1 kinetic Fokker-Planck decay run."""
    return ScenarioConfig(kind="fokker_planck", velocity_nodes=48, v_max=8.0,
                          x_max=450.0, dx=0.15, t_max=2000.0, cfl=0.95,
                          samples_per_decade=8, sample_t0=1.0,
                          name="fokker_planck_d1")


def quick_relaxation() -> ScenarioConfig:
    """Small fast run used for smoke tests and golden artifacts."""
    return ScenarioConfig(kind="relaxation_bounded", velocity_nodes=16,
                          x_max=120.0, dx=0.25, t_max=150.0,
                          samples_per_decade=8, sample_t0=0.5,
                          decades=(10.0, 100.0),
                          name="quick_relaxation")


def suite_jobs(name: str) -> list[Job]:
    if name == "theorem11_d1":
        return [
            Job("relaxation_d1", "kinetic", scenario=relaxation_reference()),
            Job("fokker_planck_d1", "kinetic", scenario=fokker_planck_reference()),
        ]
    if name == "heat_d1":
        return [
            Job("heat_whole_d1", "heat_decay", heat_mode="whole", t_max=1.0e4,
                dx=0.1, window=(100.0, 1.0e4)),
            Job("heat_half_d1", "heat_decay", heat_mode="half", t_max=1.0e4,
                dx=0.1, window=(100.0, 1.0e4)),
            Job("heat_localization_d1", "heat_localization", t_max=1.0e4,
                dx=0.1, window=(100.0, 1.0e4)),
        ]
    if name == "nash":
        return [Job("nash_d1", "nash")]
    if name == "quick":
        return [
            Job("quick_relaxation", "kinetic", scenario=quick_relaxation(),
                window=(10.0, 150.0), report_only=True),
            Job("quick_heat", "heat_decay", heat_mode="half", t_max=200.0,
                dx=0.2, window=(20.0, 200.0)),
            Job("quick_nash", "nash", nash_count=60),
        ]
    if name == "all":
        return (suite_jobs("theorem11_d1") + suite_jobs("heat_d1")
                + suite_jobs("nash"))
    raise KeyError(f"unknown suite {name!r}; known: theorem11_d1, heat_d1, "
                   "nash, quick, all")


SUITE_NAMES = ("theorem11_d1", "heat_d1", "nash", "quick", "all")

"""kinlab: a desk-scale laboratory for kinetic decay in the half-space.

Simulates linear kinetic equations with absorbing inflow boundary on the
half-line, measures their long-time decay exponents, moment monotonicities,
modified-energy dissipation and sqrt(t) mass localisation, and verifies the
functional inequalities those estimates rest on.
"""

from .collision import CollisionModel, adjoint_identity_check, build_collision, spectral_gap
from .diagnostics import (DecayFit, DiagnosticsContext, calibrate_epsilon,
                          fit_decay, hypocoercivity_series, localization_report)
from .elliptic import EllipticSolver
from .grid import DistributionField, PhaseGrid, moments, sample_field
from .solver import (DiagnosticsSchedule, SolverConfig, TrajectoryRecord,
                     duhamel_consistency, exact_damped_transport, run_scenario,
                     step_kinetic)
from .weights import WeightSpec, weighted_norm

__all__ = [
    "CollisionModel", "build_collision", "adjoint_identity_check", "spectral_gap",
    "DecayFit", "DiagnosticsContext", "calibrate_epsilon", "fit_decay",
    "hypocoercivity_series", "localization_report", "EllipticSolver",
    "DistributionField", "PhaseGrid", "moments", "sample_field",
    "DiagnosticsSchedule", "SolverConfig", "TrajectoryRecord",
    "duhamel_consistency", "exact_damped_transport", "run_scenario",
    "step_kinetic", "WeightSpec", "weighted_norm",
]

__version__ = "0.1.0"

"""Velocity domains and their quadratures.

Three domains are supported: the bounded ball (an interval in one
dimension), the truncated real line for Gaussian equilibria, and the unit
circle standing in for the sphere at d = 2.  Every domain carries midpoint
quadrature nodes with positive weights summing to the domain measure; all
velocity integrals in the package go through these weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

BALL = "ball"
REAL_LINE = "real_line"
CIRCLE = "circle"


@dataclass(frozen=True)
class VelocityDomain:
    """Discrete velocity domain: nodes, weights and metadata.

    ``v1`` holds the transport speed of each node (the first velocity
    component; for the circle this is cos(theta)).  ``weights`` are the
    quadrature weights, positive and summing to ``measure``.
    """

    kind: str
    v1: np.ndarray
    weights: np.ndarray
    measure: float
    radius: float | None = None
    v_max: float | None = None
    thetas: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.v1.size

    @property
    def speed_max(self) -> float:
        return float(np.max(np.abs(self.v1)))

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ConfigurationError("quadrature weights must be positive")
        if not np.isclose(self.weights.sum(), self.measure, rtol=1e-12):
            raise ConfigurationError(
                f"weights sum {self.weights.sum()!r} != measure {self.measure!r}"
            )


def ball(n: int, radius: float = 1.0) -> VelocityDomain:
    """Midpoint nodes on (-radius, radius); measure 2*radius."""
    if n < 2:
        raise ConfigurationError("need at least 2 velocity nodes")
    dv = 2.0 * radius / n
    v = -radius + (np.arange(n) + 0.5) * dv
    w = np.full(n, dv)
    return VelocityDomain(BALL, v, w, 2.0 * radius, radius=radius)


def real_line(n: int, v_max: float = 8.0) -> VelocityDomain:
    """Midpoint nodes on [-v_max, v_max]; measure 2*v_max.

    The truncation default 8 leaves Gaussian mass below 1e-15 outside the
    domain, so discrete Gaussian moments match their whole-line values to
    round-off.
    """
    if n < 2:
        raise ConfigurationError("need at least 2 velocity nodes")
    if v_max <= 0:
        raise ConfigurationError("v_max must be positive")
    dv = 2.0 * v_max / n
    v = -v_max + (np.arange(n) + 0.5) * dv
    w = np.full(n, dv)
    return VelocityDomain(REAL_LINE, v, w, 2.0 * v_max, v_max=v_max)


def circle(n: int) -> VelocityDomain:
    """Equispaced angles on [0, 2pi); v1 = cos(theta); measure 2pi."""
    if n < 2:
        raise ConfigurationError("need at least 2 velocity nodes")
    dtheta = 2.0 * np.pi / n
    thetas = np.arange(n) * dtheta
    v1 = np.cos(thetas)
    w = np.full(n, dtheta)
    return VelocityDomain(CIRCLE, v1, w, 2.0 * np.pi, thetas=thetas)

"""Phase-space grid over the half-line and distribution fields on it.

Space is discretised by uniform cells on [0, x_max] with cell-centre
coordinates; velocity comes from a :class:`~kinlab.velocity.VelocityDomain`.
Fields store values as a (n_v, n_x) array so that transport sweeps are
contiguous along x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .velocity import VelocityDomain


@dataclass(frozen=True)
class PhaseGrid:
    """Tensor grid over (x, v) with cell volumes and boundary metadata.

    The inflow part of the boundary is the x = 0 face crossed with
    {v1 > 0}; production configs keep x_max >= 100 so long runs have room
    to spread (enforced at the scenario level, not here, because operator
    oracles legitimately use tiny grids).
    """

    x_max: float
    dx: float
    velocity: VelocityDomain

    def __post_init__(self):
        if self.dx <= 0 or self.x_max <= 0:
            raise ConfigurationError("dx and x_max must be positive")
        if self.n_x < 2:
            raise ConfigurationError("grid needs at least 2 cells")

    @property
    def n_x(self) -> int:
        return int(round(self.x_max / self.dx))

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.n_x) + 0.5) * self.dx

    @property
    def n_v(self) -> int:
        return self.velocity.n

    def cell_volumes(self) -> np.ndarray:
        """(n_v, n_x) array of quadrature volumes dx * w_j."""
        return np.outer(self.velocity.weights, np.full(self.n_x, self.dx))


@dataclass
class DistributionField:
    """Discrete f(x, v) >= 0 at one time instant."""

    grid: PhaseGrid
    values: np.ndarray  # (n_v, n_x)
    time: float = 0.0

    def __post_init__(self):
        expected = (self.grid.n_v, self.grid.n_x)
        if self.values.shape != expected:
            raise ConfigurationError(
                f"field shape {self.values.shape} != grid shape {expected}"
            )

    def copy(self) -> "DistributionField":
        return DistributionField(self.grid, self.values.copy(), self.time)


def sample_field(grid: PhaseGrid, f_in, time: float = 0.0) -> DistributionField:
    """Sample a callable f_in(x, v) on the grid (broadcast over meshes)."""
    X = grid.x[None, :]
    V = grid.velocity.v1[:, None]
    values = np.asarray(f_in(X, V), dtype=float)
    values = np.broadcast_to(values, (grid.n_v, grid.n_x)).copy()
    return DistributionField(grid, values, time)


@dataclass(frozen=True)
class Moments:
    rho: np.ndarray           # density per x-cell
    iota: np.ndarray          # first velocity moment (flux) per x-cell
    mass: float
    first_x_moment: float     # integral of x * f
    m0: float | None          # integral of (x + v) f, one-dimensional only


def moments(field: DistributionField) -> Moments:
    """Velocity quadrature per cell plus the scalar moments.

    The signed moment m0 = integral (x + v) f is only meaningful in one
    space dimension; it is reported for ball and real-line velocity domains
    and left None on the circle.
    """
    g = field.grid
    w = g.velocity.weights
    rho = w @ field.values
    iota = (w * g.velocity.v1) @ field.values
    mass = float(rho.sum() * g.dx)
    first_x = float((g.x * rho).sum() * g.dx)
    if g.velocity.kind == "circle":
        m0 = None
    else:
        m0 = first_x + float(iota.sum() * g.dx)
    return Moments(rho, iota, mass, first_x, m0)


def require_support(field: DistributionField, x_limit: float, tol: float = 1e-12):
    """Check the field is supported (up to tol of its mass) below x_limit."""
    g = field.grid
    beyond = g.x >= x_limit
    w = g.velocity.weights
    rho = w @ field.values
    total = rho.sum() * g.dx
    if total <= 0:
        return
    if float(rho[beyond].sum() * g.dx) > tol * total:
        raise PreconditionError(
            f"initial data carries mass beyond x = {x_limit:g}; "
            "compact support within the first quarter of the domain is required"
        )

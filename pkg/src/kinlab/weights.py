"""Weighted Lebesgue norms on phase space.

A weight specification is the triple (p, k, omega): exponent p in
{1, 2, inf} (other finite p are handled by the same quadrature), the
polynomial index k in {-1, 0, 1} entering through (<x1> + <v>)^k, and a
velocity weight omega which is one of: the constant 1, the inverse square
root of the equilibrium, the inverse equilibrium, or a stretched
exponential exp(r <v>^s).

Weights are clipped nowhere: evaluation that would exceed the cap raises,
so corrupt norms cannot propagate silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalError
from .grid import DistributionField

OMEGA_ONE = "one"
OMEGA_INV_SQRT_M = "inv_sqrt_m"
OMEGA_INV_M = "inv_m"
OMEGA_STRETCHED = "stretched"


def angle(y: np.ndarray | float) -> np.ndarray | float:
    """Japanese bracket <y> = sqrt(1 + |y|^2)."""
    return np.sqrt(1.0 + np.square(y))


@dataclass(frozen=True)
class WeightSpec:
    p: float
    k: int = 0
    omega: str = OMEGA_ONE
    r: float = 0.0
    s: float = 0.0
    cap: float = 1e30

    def __post_init__(self):
        if not (self.p >= 1):
            raise ConfigurationError("p must satisfy p >= 1")
        if self.k not in (-1, 0, 1):
            raise ConfigurationError("k must be one of -1, 0, 1")
        if self.omega not in (OMEGA_ONE, OMEGA_INV_SQRT_M, OMEGA_INV_M, OMEGA_STRETCHED):
            raise ConfigurationError(f"unknown omega kind {self.omega!r}")
        if self.omega == OMEGA_STRETCHED:
            ok = (
                (self.s == 1.0 and self.r > 1.0)
                or (1.0 < self.s < 2.0 and self.r > 0.0)
                or (self.s == 2.0 and 0.0 < self.r < 0.5)
            )
            if not ok:
                raise ConfigurationError(
                    "stretched weight requires (s=1, r>1), (s in (1,2), r>0) "
                    "or (s=2, r in (0,1/2))"
                )


def omega_values(spec: WeightSpec, field_or_domain, equilibrium=None) -> np.ndarray:
    """Evaluate the velocity weight on the domain nodes; error on saturation."""
    domain = getattr(field_or_domain, "velocity", field_or_domain)
    if spec.omega == OMEGA_ONE:
        w = np.ones(domain.n)
    elif spec.omega in (OMEGA_INV_SQRT_M, OMEGA_INV_M):
        if equilibrium is None:
            raise ConfigurationError(
                "equilibrium-based weight needs the model equilibrium"
            )
        power = -0.5 if spec.omega == OMEGA_INV_SQRT_M else -1.0
        with np.errstate(over="raise", divide="raise"):
            try:
                w = np.power(np.asarray(equilibrium, dtype=float), power)
            except FloatingPointError as exc:
                raise NumericalError(f"weight overflow: {exc}") from exc
    else:
        bra = angle(domain.v1)
        with np.errstate(over="raise"):
            try:
                w = np.exp(spec.r * bra**spec.s)
            except FloatingPointError as exc:
                raise NumericalError(f"stretched weight overflow: {exc}") from exc
    if not np.all(np.isfinite(w)):
        node = int(np.argmax(~np.isfinite(w)))
        raise NumericalError(f"weight not finite at node {node} (v={domain.v1[node]!r})")
    if np.any(w > spec.cap):
        node = int(np.argmax(w))
        raise NumericalError(
            f"weight exceeds cap {spec.cap:g} at node {node} (v={domain.v1[node]!r})"
        )
    return w


def weighted_norm(field: DistributionField, spec: WeightSpec, equilibrium=None) -> float:
    """|| f (<x1> + <v>)^k omega ||_p by cell-volume quadrature."""
    g = field.grid
    om = omega_values(spec, g.velocity, equilibrium)
    bracket = (angle(g.x)[None, :] + angle(g.velocity.v1)[:, None]) ** spec.k
    weighted = np.abs(field.values) * bracket * om[:, None]
    if not np.all(np.isfinite(weighted)):
        j, i = np.unravel_index(int(np.argmax(~np.isfinite(weighted))), weighted.shape)
        raise NumericalError(
            f"weighted integrand not finite at (x={g.x[i]!r}, v={g.velocity.v1[j]!r})"
        )
    if math.isinf(spec.p):
        return float(weighted.max(initial=0.0))
    vol = g.cell_volumes()
    return float((weighted**spec.p * vol).sum() ** (1.0 / spec.p))

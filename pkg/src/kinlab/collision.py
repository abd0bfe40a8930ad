"""Collision operators acting on velocity profiles.

Builds the discrete generator L for the four supported models:

* ``relaxation_bounded``  -- L f = M rho[f] - f with M uniform on the ball,
* ``relaxation_gaussian`` -- same BGK structure with Gaussian M on the line,
* ``fokker_planck``       -- drift-diffusion in flux form d_v(M d_v(f/M)),
  with no-flux ends, so the discrete Gaussian is an exact steady state and
  the implicit Euler step is an M-matrix solve (positivity preserved),
* ``circle``              -- periodic second differences in the angle.

Each model exposes the dense matrix (velocity resolutions stay small), the
discrete equilibrium normalised to unit mass, the measured adjoint constant
c_L, and the measured spectral gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import velocity as vel
from .errors import ConfigurationError, NumericalError

RELAXATION_BOUNDED = "relaxation_bounded"
RELAXATION_GAUSSIAN = "relaxation_gaussian"
FOKKER_PLANCK = "fokker_planck"
CIRCLE = "circle"

KINDS = (RELAXATION_BOUNDED, RELAXATION_GAUSSIAN, FOKKER_PLANCK, CIRCLE)

_COMPATIBLE = {
    RELAXATION_BOUNDED: vel.BALL,
    RELAXATION_GAUSSIAN: vel.REAL_LINE,
    FOKKER_PLANCK: vel.REAL_LINE,
    CIRCLE: vel.CIRCLE,
}


@dataclass
class CollisionModel:
    """Discretised collision operator with its equilibrium and constants."""

    kind: str
    domain: vel.VelocityDomain
    equilibrium: np.ndarray          # discrete M, sum(M * w) == 1 exactly
    matrix: np.ndarray               # dense generator on velocity profiles
    c_L: float                       # measured constant in phi = v1 / c_L
    gap: float | None                # measured spectral gap, None if n < 8
    bands: np.ndarray | None = field(default=None, repr=False)  # (3, n) tridiag of L

    @property
    def n(self) -> int:
        return self.domain.n

    def apply(self, profiles: np.ndarray) -> np.ndarray:
        """L applied along axis 0 of a (n_v, ...) array."""
        return self.matrix @ profiles

    def rho(self, profiles: np.ndarray) -> np.ndarray:
        return np.tensordot(self.domain.weights, profiles, axes=(0, 0))


@dataclass(frozen=True)
class AdjointReport:
    """Residuals of the flat-space adjoint identities."""

    l_sharp_one: float          # max |L# 1|
    phi_residual: float         # max_v |L#(v1/c_L) + v1|
    phi_residual_weighted: float  # same residual in the equilibrium-weighted L2
    c_L: float


def _gaussian(v: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * v * v) / np.sqrt(2.0 * np.pi)


def _bgk_matrix(M: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.outer(M, w) - np.eye(M.size)


def _fokker_planck_parts(domain: vel.VelocityDomain):
    """Flux-form tridiagonal L with M evaluated at half-nodes.

    L f = [G_{j+1/2} - G_{j-1/2}] / dv with
    G_{j+1/2} = M_{j+1/2} (f_{j+1}/M_{j+1} - f_j/M_j) / dv and zero flux at
    the truncation ends.  Constant f/M is annihilated exactly.
    """
    v = domain.v1
    dv = domain.weights[0]
    M = _gaussian(v)
    M_half = _gaussian(v[:-1] + 0.5 * dv)
    n = v.size
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)
    c = M_half / dv**2
    # interior flux differences
    diag[:-1] -= c / M[:-1]
    upper[:-1] += c / M[1:]
    diag[1:] -= c / M[1:]
    lower[1:] += c / M[:-1]
    L = np.diag(diag) + np.diag(upper[:-1], 1) + np.diag(lower[1:], -1)
    bands = np.zeros((3, n))
    bands[0, 1:] = upper[:-1]
    bands[1, :] = diag
    bands[2, :-1] = lower[1:]
    return L, bands, M


def _circle_matrix(domain: vel.VelocityDomain):
    n = domain.n
    dtheta = domain.weights[0]
    L = np.zeros((n, n))
    idx = np.arange(n)
    L[idx, idx] = -2.0 / dtheta**2
    L[idx, (idx + 1) % n] = 1.0 / dtheta**2
    L[idx, (idx - 1) % n] = 1.0 / dtheta**2
    return L


def build_collision(kind: str, domain: vel.VelocityDomain) -> CollisionModel:
    """Build the discrete collision model for ``kind`` on ``domain``."""
    if kind not in KINDS:
        raise ConfigurationError(f"unknown collision kind {kind!r}")
    if _COMPATIBLE[kind] != domain.kind:
        raise ConfigurationError(
            f"collision {kind!r} requires a {_COMPATIBLE[kind]!r} velocity domain, "
            f"got {domain.kind!r}"
        )
    if domain.n < 4:
        raise ConfigurationError("velocity resolution must be at least 4 nodes")

    w = domain.weights
    bands = None
    if kind == RELAXATION_BOUNDED:
        M = np.full(domain.n, 1.0 / domain.measure)
        matrix = _bgk_matrix(M, w)
    elif kind == RELAXATION_GAUSSIAN:
        M = _gaussian(domain.v1)
        M = M / (M @ w)  # unit discrete mass makes BGK exactly conservative
        matrix = _bgk_matrix(M, w)
    elif kind == FOKKER_PLANCK:
        matrix, bands, M = _fokker_planck_parts(domain)
        M = M / (M @ w)
    else:  # circle
        M = np.full(domain.n, 1.0 / domain.measure)
        matrix = _circle_matrix(domain)

    model = CollisionModel(kind, domain, M, matrix, c_L=np.nan, gap=None, bands=bands)
    model.c_L = adjoint_identity_check(model).c_L
    if domain.n >= 8:
        model.gap = spectral_gap(model)
    return model


def adjoint_sharp(model: CollisionModel) -> np.ndarray:
    """Matrix of the adjoint w.r.t. the flat quadrature inner product."""
    w = model.domain.weights
    return (model.matrix.T * w[:, None]) / w[None, :]


def adjoint_identity_check(model: CollisionModel) -> AdjointReport:
    """Verify L# 1 = 0 and measure c_L from L#(v1/c) = -v1.

    c_L is fitted by least squares in the equilibrium-weighted L2 product,
    where the operator acts; the flat max residual is reported as well.
    """
    Ls = adjoint_sharp(model)
    v1 = model.domain.v1
    w = model.domain.weights
    M = model.equilibrium
    one_resid = float(np.max(np.abs(Ls @ np.ones(model.n))))
    y = Ls @ v1
    denom = np.sum(v1 * v1 * M * w)
    if denom == 0.0:
        raise NumericalError("degenerate velocity grid: v1 == 0 everywhere")
    c = float(-np.sum(y * v1 * M * w) / denom)
    resid = y / c + v1
    max_resid = float(np.max(np.abs(resid)))
    weighted = float(np.sqrt(np.sum(resid * resid * M * w)))
    return AdjointReport(one_resid, max_resid, weighted, c)


def spectral_gap(model: CollisionModel) -> float:
    """Smallest nonzero |eigenvalue| of -L in L2(M^{-1}).

    Dense eigendecomposition of the symmetrised operator
    A^{1/2} L A^{-1/2} with A = diag(w/M); L is self-adjoint in the
    equilibrium-weighted product so the spectrum is real and nonpositive.
    """
    if model.n < 8:
        raise ConfigurationError("spectral gap needs at least 8 velocity nodes")
    a = model.domain.weights / model.equilibrium
    s = np.sqrt(a)
    sym = (model.matrix * s[:, None]) / s[None, :]
    sym = 0.5 * (sym + sym.T)  # symmetrise away round-off
    try:
        eigs = scipy.linalg.eigh(sym, eigvals_only=True)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"eigensolve failed: {exc}") from exc
    eigs = np.sort(eigs)[::-1]  # descending: first ~ 0
    gap = float(-eigs[1])
    if gap <= 0:
        raise NumericalError(f"nonpositive spectral gap {gap!r}")
    return gap


def spectrum(model: CollisionModel) -> np.ndarray:
    """Full eigenvalue list of L in L2(M^{-1}), descending."""
    a = model.domain.weights / model.equilibrium
    s = np.sqrt(a)
    sym = (model.matrix * s[:, None]) / s[None, :]
    sym = 0.5 * (sym + sym.T)
    return np.sort(scipy.linalg.eigh(sym, eigvals_only=True))[::-1]

"""Averaged spectral density on the radial interval and its observables.

F_lambda is the average of |phi|^2 over all model eigenpairs below lambda,
a probability density for the measure F dx on (0, x_max]. Its p-th truncated
moment integral min(x^p, 1) F dx equals the p-th Wasserstein distance (to the
power p) between the radial marginal and the boundary Dirac mass, which is
the observable the decay-rate envelopes bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .boundary import BoundarySpectrum
from .counting import _kept_modes
from .errors import BudgetExceededError, ConvergenceError, EmptySpectrumError
from .params import ModelParams
from .radial import (
    BISECT_RELTOL,
    EIGVEC_RTOL,
    NEUMANN,
    BoundaryCondition,
    Mesh,
    assemble_radial,
    mesh_nodes_for,
)

__all__ = [
    "RadialDensity",
    "MomentReport",
    "bootstrap_b",
    "assemble_density",
    "resample_vector",
    "resample_density",
    "moment_p",
    "wasserstein_to_boundary",
    "tail_mass",
    "tail_sequence",
    "moment_report",
]

NORM_TOL = 1e-8
DEFAULT_PAIR_BUDGET = 2_000_000

_FULL_BC = BoundaryCondition(NEUMANN, NEUMANN)


@dataclass(frozen=True)
class RadialDensity:
    """Nonnegative node values f with sum(f h) = 1 (within 1e-8)."""

    grid: Mesh
    values: np.ndarray = field(repr=False)
    n_lambda: int
    lam: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.shape != self.grid.nodes.shape:
            raise ValueError("density values must match the grid")
        if np.any(vals < 0):
            raise ValueError("density values must be nonnegative")
        mass = float(vals.sum() * self.grid.h)
        if abs(mass - 1.0) > NORM_TOL:
            raise ValueError(f"density mass {mass!r} deviates from 1 beyond {NORM_TOL}")


@dataclass(frozen=True)
class MomentReport:
    lam: float
    p: float
    moment: float
    wasserstein: float
    tails: tuple[tuple[int, float], ...]


def bootstrap_b(params: ModelParams, lam: float) -> float:
    """Bootstrap cut B = lambda^(-1/2 + gamma) / (4/gamma + 3), gamma = 1/(n beta)."""
    g = params.gamma
    return lam ** (-0.5 + g) / (4.0 / g + 3.0)


def assemble_density(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    lam: float,
    seed: int = 0,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    grid: Mesh | None = None,
) -> RadialDensity:
    """Average |phi|^2 over every model eigenpair below lam.

    The fast path accumulates all modes on one shared mesh sized for lam.
    Passing an explicit coarser/finer target grid switches to the per-mode
    path where eigenvectors are linearly resampled onto it and renormalized.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    interval = (0.0, params.x_max)
    mus = _kept_modes(params, spectrum, interval, lam)
    if grid is None:
        m = mesh_nodes_for(params, interval, lam)
        base = assemble_radial(params, 0.0, interval, _FULL_BC, mesh_nodes=m)
        xbeta = base.mesh.nodes ** params.beta
        off2 = base.offdiag * base.offdiag
        dens = np.zeros(len(base))
        npairs, status = kernels.density_accumulate(
            base.diag,
            xbeta,
            base.offdiag,
            off2,
            np.ascontiguousarray(mus),
            float(lam),
            BISECT_RELTOL,
            EIGVEC_RTOL,
            seed,
            pair_budget,
            dens,
        )
        _raise_status(status, npairs, pair_budget, lam)
        if npairs == 0:
            raise EmptySpectrumError(f"no model eigenvalues below lambda={lam:g}")
        return RadialDensity(base.mesh, dens / (base.mesh.h * npairs), npairs, float(lam))

    # slow path: per-mode assembly on mode meshes, resample onto the target
    from .radial import eigenvalues_below, eigenvector

    dens = np.zeros(len(grid))
    npairs = 0
    for j, mu in enumerate(mus):
        m = mesh_nodes_for(params, interval, lam)
        op = assemble_radial(params, float(mu), interval, _FULL_BC, mesh_nodes=m)
        alphas = eigenvalues_below(op, lam, budget=pair_budget)
        if npairs + alphas.size > pair_budget:
            raise BudgetExceededError(f"eigenpair budget {pair_budget} exceeded at lambda={lam:g}")
        prev = []
        for idx, alpha in enumerate(alphas):
            cluster = prev if (idx and alpha - alphas[idx - 1] <= 1e-10 * max(1.0, abs(alpha))) else []
            vec = eigenvector(op, float(alpha), seed=seed, orthogonal_to=np.array(cluster) if cluster else None)
            prev = cluster + [vec] if cluster else [vec]
            resampled = resample_vector(vec, op.mesh, grid)
            dens += resampled * resampled
        npairs += int(alphas.size)
    if npairs == 0:
        raise EmptySpectrumError(f"no model eigenvalues below lambda={lam:g}")
    return RadialDensity(grid, dens / npairs, npairs, float(lam))


def _raise_status(status, npairs, pair_budget, lam):
    if status == kernels.BUDGET_EXCEEDED:
        raise BudgetExceededError(
            f"eigenpair budget {pair_budget} exceeded at lambda={lam:g} ({npairs} found)"
        )
    if status == kernels.NO_CONVERGENCE:
        raise ConvergenceError(f"eigenvector extraction failed at lambda={lam:g}")


def resample_vector(values: np.ndarray, src: Mesh, dst: Mesh) -> np.ndarray:
    """Linear interpolation onto dst nodes, renormalized to sum(v^2 h) = 1."""
    out = np.interp(dst.nodes, src.nodes, values)
    nrm = math.sqrt(float(np.sum(out * out)) * dst.h)
    if nrm == 0.0:
        raise ValueError("resampled vector vanished; grids do not overlap")
    return out / nrm


def resample_density(density: RadialDensity, grid: Mesh) -> RadialDensity:
    """Linear interpolation of f onto a new grid, renormalized to unit mass."""
    vals = np.interp(grid.nodes, density.grid.nodes, density.values)
    mass = float(vals.sum() * grid.h)
    if mass <= 0.0:
        raise ValueError("resampled density vanished; grids do not overlap")
    return RadialDensity(grid, vals / mass, density.n_lambda, density.lam)


def moment_p(density: RadialDensity, p: float) -> float:
    """Truncated moment integral of min(x^p, 1) against F dx (midpoint rule)."""
    if p < 1:
        raise ValueError(f"moment order must be >= 1, got {p!r}")
    x = density.grid.nodes
    w = np.minimum(x ** p, 1.0)
    return float(np.sum(w * density.values) * density.grid.h)


def wasserstein_to_boundary(density: RadialDensity, p: float) -> float:
    """W_p distance of the radial marginal to the boundary mass: moment^(1/p)."""
    return moment_p(density, p) ** (1.0 / p)


def tail_mass(density: RadialDensity, a: float) -> float:
    """Mass of F dx on [a, x_max]."""
    sel = density.grid.nodes >= a
    return float(density.values[sel].sum() * density.grid.h)


def tail_sequence(params: ModelParams, density: RadialDensity, k_max: int | None = None) -> list[float]:
    """Masses F_k = tail_mass(k * B) for the bootstrap cut B, k = 1..k_max.

    Default k_max covers the bootstrap's guaranteed stopping index
    (4/gamma + 2) plus one. Nonincreasing in k; zero once k B > x_max.
    """
    if k_max is None:
        k_max = int(math.ceil(4.0 / params.gamma)) + 3
    B = bootstrap_b(params, density.lam)
    return [tail_mass(density, k * B) for k in range(1, k_max + 1)]


def moment_report(params: ModelParams, density: RadialDensity, p: float) -> MomentReport:
    mom = moment_p(density, p)
    tails = tuple(
        (k + 1, f) for k, f in enumerate(tail_sequence(params, density))
    )
    return MomentReport(density.lam, float(p), mom, mom ** (1.0 / p), tails)

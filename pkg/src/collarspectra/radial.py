"""Radial mode operators: assembly, counting, eigenpairs, traces.

The one-dimensional family is P_mu = -d^2/dx^2 + C/x^2 + mu x^beta on an
interval [a, b] inside [0, x_max], discretized by the symmetric three-point
stencil on a uniform mesh with spacing h = (b - a)/(mesh_nodes + 1). Dirichlet
ends keep only interior nodes; a Neumann end places a node on the endpoint
with kinetic diagonal 1/h^2 (ghost-node reflection). At a = 0 the singular
potential forces a cutoff: the first node sits at h and no endpoint node is
created whatever the declared left condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BudgetExceededError, ConvergenceError
from .params import ModelParams

__all__ = [
    "DIRICHLET",
    "NEUMANN",
    "BoundaryCondition",
    "Mesh",
    "TridiagOperator",
    "assemble_radial",
    "mesh_nodes_for",
    "sturm_count",
    "eigenvalues_below",
    "eigenvector",
    "dense_oracle_eigs",
    "rescaled_problem",
    "trace_plus_weighted",
]

DIRICHLET = "dirichlet"
NEUMANN = "neumann"

DENSE_LIMIT = 400
BISECT_RELTOL = 1e-12
EIGVEC_RTOL = 1e-8
DEFAULT_EIG_BUDGET = 500_000


@dataclass(frozen=True)
class BoundaryCondition:
    left: str = DIRICHLET
    right: str = DIRICHLET

    def __post_init__(self):
        for side in (self.left, self.right):
            if side not in (DIRICHLET, NEUMANN):
                raise ValueError(f"unknown boundary condition {side!r}")


@dataclass(frozen=True)
class Mesh:
    """Uniform node set; nodes may include endpoints (Neumann sides)."""

    nodes: np.ndarray = field(repr=False)
    h: float
    interval: tuple[float, float]

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if nodes.size < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if nodes[0] <= 0 or np.any(np.diff(nodes) <= 0):
            raise ValueError("mesh nodes must be strictly increasing and positive")

    def __len__(self) -> int:
        return int(self.nodes.size)


@dataclass(frozen=True)
class TridiagOperator:
    """Assembled symmetric tridiagonal operator for one boundary mode."""

    diag: np.ndarray = field(repr=False)
    offdiag: np.ndarray = field(repr=False)
    mesh: Mesh
    bc: BoundaryCondition
    mu: float
    interval: tuple[float, float]
    c_beta: float
    beta: float

    def __len__(self) -> int:
        return int(self.diag.size)

    def dense(self) -> np.ndarray:
        m = len(self)
        full = np.diag(self.diag)
        idx = np.arange(m - 1)
        full[idx, idx + 1] = self.offdiag
        full[idx + 1, idx] = self.offdiag
        return full


def mesh_nodes_for(params: ModelParams, interval, lam: float) -> int:
    """Interior node count resolving oscillations up to energy lam."""
    a, b = interval
    return max(params.mesh_nodes, int(math.ceil(params.mesh_kappa * (b - a) * math.sqrt(max(lam, 0.0)))))


def assemble_radial(
    params: ModelParams,
    mu: float,
    interval,
    bc: BoundaryCondition = BoundaryCondition(),
    mesh_nodes: int | None = None,
    c_beta: float | None = None,
) -> TridiagOperator:
    """Assemble P_mu on [a, b] with the given end conditions.

    c_beta overrides the model coupling (tests use 0 for the free case).
    """
    a, b = float(interval[0]), float(interval[1])
    if not (0.0 <= a < b <= params.x_max):
        raise ValueError(f"interval must satisfy 0 <= a < b <= x_max, got ({a}, {b})")
    if mu < 0:
        raise ValueError(f"mode value mu must be >= 0, got {mu!r}")
    m = params.mesh_nodes if mesh_nodes is None else int(mesh_nodes)
    if m < 3:
        raise ValueError(f"mesh_nodes must be >= 3 (degenerate interval), got {m}")
    cb = params.c_beta if c_beta is None else float(c_beta)
    h = (b - a) / (m + 1)

    nodes = [a + i * h for i in range(1, m + 1)]
    left_neumann = bc.left == NEUMANN and a > 0.0
    right_neumann = bc.right == NEUMANN
    if left_neumann:
        nodes.insert(0, a)
    if right_neumann:
        nodes.append(b)
    x = np.array(nodes)

    n_tot = x.size
    kin = np.full(n_tot, 2.0 / (h * h))
    if left_neumann:
        kin[0] = 1.0 / (h * h)
    if right_neumann:
        kin[-1] = 1.0 / (h * h)
    diag = kin + cb / (x * x) + mu * x ** params.beta
    off = np.full(n_tot - 1, -1.0 / (h * h))
    diag.setflags(write=False)
    off.setflags(write=False)
    return TridiagOperator(
        diag=diag,
        offdiag=off,
        mesh=Mesh(x, h, (a, b)),
        bc=bc,
        mu=float(mu),
        interval=(a, b),
        c_beta=cb,
        beta=params.beta,
    )


def sturm_count(op: TridiagOperator, lam: float) -> int:
    """Eigenvalues strictly below lam; ties at lam are not counted."""
    off2 = op.offdiag * op.offdiag
    return int(kernels.sturm_count(op.diag, off2, float(lam), kernels.pivmin_for(off2)))


def eigenvalues_below(op: TridiagOperator, lam: float, budget: int = DEFAULT_EIG_BUDGET) -> np.ndarray:
    """All eigenvalues below lam, ascending, bisected to 1e-12 relative."""
    off2 = op.offdiag * op.offdiag
    pivmin = kernels.pivmin_for(off2)
    k = int(kernels.sturm_count(op.diag, off2, float(lam), pivmin))
    if k > budget:
        raise BudgetExceededError(f"{k} eigenvalues below lambda={lam:g} exceed budget {budget}")
    out = np.empty(k)
    if k:
        glo, _ = kernels.gershgorin_bounds(op.diag, op.offdiag)
        kernels.bisect_ascending(op.diag, off2, float(lam), k, glo, pivmin, BISECT_RELTOL, out)
    return out


def eigenvector(op: TridiagOperator, alpha: float, seed: int = 0, orthogonal_to: np.ndarray | None = None) -> np.ndarray:
    """Eigenvector at alpha by inverse iteration, normalized to sum(v^2) h = 1.

    alpha must sit within ~1e-8 * ||T|| of a true eigenvalue. orthogonal_to
    may hold ell-2-orthonormal rows (earlier members of a degenerate cluster)
    to re-orthogonalize against.
    """
    m = len(op)
    if orthogonal_to is None:
        qmat = np.empty((0, m))
    else:
        # rows come back L2(dx)-normalized from this function; the kernel's
        # Gram-Schmidt needs ell-2-orthonormal rows
        qmat = np.ascontiguousarray(np.atleast_2d(orthogonal_to) * math.sqrt(op.mesh.h))
    out = np.empty(m)
    res = kernels.inverse_iteration(
        op.diag, op.offdiag, float(alpha), qmat, 0, qmat.shape[0], seed, 0, 0, EIGVEC_RTOL, out
    )
    if res < 0.0:
        raise ConvergenceError(
            f"inverse iteration failed at alpha={alpha!r}; cluster wider than tolerance"
        )
    return out / math.sqrt(op.mesh.h)


def dense_oracle_eigs(op: TridiagOperator) -> np.ndarray:
    """All eigenvalues via the dense LAPACK route; small matrices only."""
    if len(op) > DENSE_LIMIT:
        raise ValueError(f"dense oracle limited to {DENSE_LIMIT} nodes, got {len(op)}")
    return np.linalg.eigvalsh(op.dense())


def rescaled_problem(params: ModelParams, mu: float, interval) -> tuple[tuple[float, float], float]:
    """Map P_mu on [a, b] to the unit-coupling problem.

    Returns ((s a, s b), s^2) with s = mu**(1/(2+beta)): P_mu on [a, b] is
    unitarily equivalent to s^2 * P_1 on the stretched interval, and the
    discrete matrices on mapped meshes are exactly similar.
    """
    if mu <= 0:
        raise ValueError(f"rescaling needs mu > 0, got {mu!r}")
    a, b = float(interval[0]), float(interval[1])
    s = mu ** (1.0 / (2.0 + params.beta))
    return (s * a, s * b), s * s


def trace_plus_weighted(op: TridiagOperator, chi: np.ndarray, shift: float) -> float:
    """Positive part of Tr(D_chi (shift - T) D_chi), D_chi = diag(chi).

    Dense route for small operators, bisection extraction otherwise; the two
    agree to 1e-10 relative on overlap.
    """
    chi = np.asarray(chi, dtype=np.float64)
    if chi.shape != op.diag.shape:
        raise ValueError(f"chi must have {op.diag.shape[0]} values, got {chi.shape}")
    md = chi * chi * (shift - op.diag)
    mo = -chi[:-1] * chi[1:] * op.offdiag
    if len(op) <= DENSE_LIMIT:
        m = len(op)
        full = np.diag(md)
        idx = np.arange(m - 1)
        full[idx, idx + 1] = mo
        full[idx + 1, idx] = mo
        eigs = np.linalg.eigvalsh(full)
        return float(eigs[eigs > 0.0].sum())
    return float(kernels.trace_plus_tridiag(md, mo, mo * mo, BISECT_RELTOL))

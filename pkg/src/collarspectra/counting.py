"""Eigenvalue counting on collar subregions and envelope verification.

Counts below a threshold decompose over boundary modes,
N(lambda) = sum_j #{eigenvalues of P_{mu_j} < lambda}, with two rigorous
mode skips: on [B, x_max] the potential term alone gives P_mu >= mu B^beta,
and everywhere P_mu >= min_x (C/x^2 + mu x^beta) since the kinetic part is
positive semidefinite. Skipped modes provably contribute zero, so the skip
never changes a count, only the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .boundary import BoundarySpectrum
from .errors import SpectrumIncompleteError
from .params import ModelParams
from .radial import (
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    assemble_radial,
    mesh_nodes_for,
)

__all__ = [
    "TAIL",
    "SHELL",
    "CORE",
    "Region",
    "CountReport",
    "BRule",
    "j_cutoff",
    "min_potential",
    "sharp_skip_threshold",
    "envelope_value",
    "region_count",
    "full_count",
    "verify_upper_bounds",
    "verify_lower_bounds",
]

TAIL = "tail"
SHELL = "shell"
CORE = "core"


@dataclass(frozen=True)
class Region:
    """A radial subregion: tail [B, x_max], shell [B, 2B], or core [0, B]."""

    kind: str
    B: float
    bc: BoundaryCondition = BoundaryCondition(NEUMANN, NEUMANN)

    def __post_init__(self):
        if self.kind not in (TAIL, SHELL, CORE):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.B < 0 or (self.kind in (SHELL, CORE) and self.B <= 0):
            raise ValueError(f"region {self.kind} needs B > 0, got {self.B!r}")

    def interval(self, params: ModelParams) -> tuple[float, float]:
        if self.kind == TAIL:
            if self.B >= params.x_max:
                raise ValueError(f"tail region needs B < x_max, got B={self.B!r}")
            return (self.B, params.x_max)
        if self.kind == SHELL:
            if 2.0 * self.B > params.x_max:
                raise ValueError(f"shell [B, 2B] needs 2B <= x_max, got B={self.B!r}")
            return (self.B, 2.0 * self.B)
        if self.B > params.x_max:
            raise ValueError(f"core region needs B <= x_max, got B={self.B!r}")
        return (0.0, self.B)


@dataclass(frozen=True)
class CountReport:
    lam: float
    region: Region
    count: int
    bound_value: float
    ratio: float
    j_used: int


@dataclass(frozen=True)
class BRule:
    """Cut-point rule lambda -> B.

    'half-power'  B = value * lambda**-1/2 (value defaults to 1/2)
    'bootstrap'   B = lambda**(-1/2 + gamma) / (4/gamma + 3), gamma = 1/(n beta)
    'fixed'       B = value
    """

    kind: str = "half-power"
    value: float = 0.5

    def __post_init__(self):
        if self.kind not in ("half-power", "bootstrap", "fixed"):
            raise ValueError(f"unknown B rule {self.kind!r}")
        if self.value <= 0:
            raise ValueError(f"B rule coefficient must be positive, got {self.value!r}")

    def __call__(self, params: ModelParams, lam: float) -> float:
        if self.kind == "half-power":
            return self.value / math.sqrt(lam)
        if self.kind == "bootstrap":
            g = params.gamma
            return lam ** (-0.5 + g) / (4.0 / g + 3.0)
        return self.value


def j_cutoff(params: ModelParams, B: float, lam: float) -> float:
    """Tail skip threshold mu* = lambda / B^beta on [B, x_max].

    Modes with mu >= mu* satisfy P_mu >= mu B^beta >= lambda there and
    contribute zero count. B is clamped to x_max; B = 0 gives no tail skip
    (the min-potential skip below still applies).
    """
    if lam <= 0:
        raise ValueError(f"threshold must be positive, got {lam!r}")
    if B <= 0.0:
        return math.inf
    return lam / min(B, params.x_max) ** params.beta


def min_potential(params: ModelParams, mu, interval) -> np.ndarray | float:
    """min over [a, b] of C/x^2 + mu x^beta (a = 0 allowed; V -> inf there).

    The minimizer of the full-line potential is x* = (2C/(beta mu))**(1/(beta+2)),
    clipped into the interval. Vectorized over mu.
    """
    a, b = float(interval[0]), float(interval[1])
    cb, beta = params.c_beta, params.beta
    mu_arr = np.asarray(mu, dtype=np.float64)
    scalar = mu_arr.ndim == 0
    mu_arr = np.atleast_1d(mu_arr)
    out = np.empty_like(mu_arr)
    zero = mu_arr == 0.0
    out[zero] = cb / (b * b)
    pos = ~zero
    if np.any(pos):
        mp = mu_arr[pos]
        xstar = (2.0 * cb / (beta * mp)) ** (1.0 / (beta + 2.0))
        x = np.minimum(xstar, b)
        if a > 0:
            x = np.maximum(x, a)
        out[pos] = cb / (x * x) + mp * x ** beta
    return float(out[0]) if scalar else out


def sharp_skip_threshold(params: ModelParams, interval, threshold: float) -> float:
    """Smallest mu* with min_potential >= threshold; modes mu >= mu* skip.

    min_potential is strictly increasing in mu, so a bracketed bisection
    suffices; the returned value errs high so completeness checks against it
    are safe.
    """
    if min_potential(params, 0.0, interval) >= threshold:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        if min_potential(params, hi, interval) >= threshold:
            break
        lo, hi = hi, hi * 4.0
    else:
        raise ValueError("mode-skip threshold bracket failed")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if min_potential(params, mid, interval) >= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def envelope_value(params: ModelParams, lam: float, B: float, kind: str) -> float:
    """Counting envelope lambda^((n+1)/2) * B^(1 - beta n/2), log form at beta n = 2.

    Core regions carry the exact zero bound instead.
    """
    if kind == CORE:
        return 0.0
    bn = params.beta * params.n
    lead = lam ** ((params.n + 1) / 2.0)
    if B <= 0.0:
        # whole radial interval: principal counting term
        if bn == 2.0:
            return lead * max(math.log(lam), 1.0)
        return lam ** (params.d / 2.0)
    if bn == 2.0:
        return lead * (1.0 + abs(math.log(B)))
    return lead * B ** (1.0 - bn / 2.0)


def _kept_modes(params, spectrum, interval, threshold):
    """Modes that may contribute below threshold, plus the completeness check."""
    needed = sharp_skip_threshold(params, interval, threshold)
    if needed > spectrum.mu_cutoff:
        raise SpectrumIncompleteError(
            f"need boundary spectrum complete up to mu={needed:g}, "
            f"cutoff is {spectrum.mu_cutoff:g}"
        )
    if len(spectrum) == 0:
        return np.empty(0)
    vmin = min_potential(params, spectrum.mus, interval)
    return spectrum.mus[vmin < threshold]


def _mode_count_sum(params, mus, interval, bc, threshold):
    """Assemble the shared-mesh family once and sturm-count every mode."""
    if mus.size == 0:
        return 0, np.empty(0, np.int64)
    m = mesh_nodes_for(params, interval, threshold)
    base = assemble_radial(params, 0.0, interval, bc, mesh_nodes=m)
    xbeta = base.mesh.nodes ** params.beta
    off2 = base.offdiag * base.offdiag
    counts = kernels.mode_counts(
        base.diag, xbeta, off2, np.ascontiguousarray(mus), float(threshold), kernels.pivmin_for(off2)
    )
    return int(counts.sum()), counts


def region_count(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    region: Region,
    lam: float,
    threshold: float | None = None,
) -> CountReport:
    """Count model eigenvalues in the region below the threshold (default lam)."""
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    t = float(lam if threshold is None else threshold)
    interval = region.interval(params)
    mus = _kept_modes(params, spectrum, interval, t)
    total, _ = _mode_count_sum(params, mus, interval, region.bc, t)
    bound = envelope_value(params, lam, region.B, region.kind)
    if bound > 0.0:
        ratio = total / bound
    else:
        ratio = 0.0 if total == 0 else math.inf
    return CountReport(float(lam), region, total, bound, ratio, int(mus.size))


def full_count(params: ModelParams, spectrum: BoundarySpectrum, lam: float) -> int:
    """N(lambda) over the whole radial interval (Neumann at the interior cut)."""
    region = Region(TAIL, 0.0, BoundaryCondition(NEUMANN, NEUMANN))
    return region_count(params, spectrum, region, lam).count


def _check_upper_window(params, lam, B):
    lo = 0.5 / math.sqrt(lam)
    hi = params.eps / 2.0
    if not (lo <= B <= hi):
        raise ValueError(
            f"B = {B:g} outside [lambda^-1/2 / 2, eps/2] = [{lo:g}, {hi:g}] at lambda={lam:g}"
        )


def verify_upper_bounds(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    lambda_grid,
    b_rule: BRule = BRule(),
) -> list[CountReport]:
    """Neumann counts on tails and dyadic shells against their envelopes."""
    reports = []
    bc = BoundaryCondition(NEUMANN, NEUMANN)
    for lam in lambda_grid:
        B = b_rule(params, lam)
        _check_upper_window(params, lam, B)
        for kind in (TAIL, SHELL):
            reports.append(region_count(params, spectrum, Region(kind, B, bc), lam))
    return reports


def verify_lower_bounds(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    lambda_grid,
    b_rule: BRule,
    c_hat: float | None = None,
) -> list[CountReport]:
    """Dirichlet counts on tails and shells; needs B >= c_hat lambda^-1/2.

    c_hat defaults to sqrt(2 C), the smallest coefficient with
    C/B^2 <= lambda/2, which the lower-bound argument requires.
    """
    if c_hat is None:
        c_hat = math.sqrt(2.0 * params.c_beta)
    if c_hat < math.sqrt(2.0 * params.c_beta):
        raise ValueError(
            f"c_hat = {c_hat:g} < sqrt(2 C) = {math.sqrt(2.0 * params.c_beta):g}"
        )
    reports = []
    bc = BoundaryCondition(DIRICHLET, DIRICHLET)
    for lam in lambda_grid:
        B = b_rule(params, lam)
        if B * math.sqrt(lam) < c_hat * (1.0 - 1e-12):
            raise ValueError(f"B rule gives B < c_hat lambda^-1/2 at lambda={lam:g}")
        if B > params.eps / 2.0:
            raise ValueError(f"B = {B:g} > eps/2 at lambda={lam:g}")
        for kind in (TAIL, SHELL):
            reports.append(region_count(params, spectrum, Region(kind, B, bc), lam))
    return reports

"""Sweep orchestration: log-log rate fits, Weyl counting checks, and the
localisation (IMS) inequality at the discrete level.

The localisation check is an exact finite-dimensional statement: for each
mode matrix T and cutoff chi,

    lambda * sum_{alpha<lambda} <v, chi^2 v>
        <= sum_j Tr(chi (s - T_j) chi)_+  +  sum_{alpha<lambda} <v, W v>,

with s = 2 (1+delta)^2 lambda and W the trapezoid pairing of the cell-wise
(chi')^2 against v^2. The commutator correction -1/2 [chi,[chi,T]] that the
sharp identity produces is dominated by W via AM-GM, so the inequality holds
for the matrices themselves, not only asymptotically; violations beyond
rounding slack always indicate a bug.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .boundary import BoundarySpectrum
from .counting import BRule, _kept_modes, full_count, min_potential, sharp_skip_threshold
from .density import (
    DEFAULT_PAIR_BUDGET,
    _raise_status,
    assemble_density,
    moment_p,
    moment_report,
    tail_mass,
)
from .errors import SpectrumIncompleteError
from .params import POWER, ModelParams, eval_rate, theoretical_rate
from .radial import (
    BISECT_RELTOL,
    EIGVEC_RTOL,
    NEUMANN,
    BoundaryCondition,
    TridiagOperator,
    assemble_radial,
    mesh_nodes_for,
)

__all__ = [
    "SweepConfig",
    "FitResult",
    "ChiSpec",
    "LocalisationReport",
    "loglog_fit",
    "rate_points",
    "rate_check",
    "weyl_check",
    "localisation_check",
    "ims_relative_defect",
    "run_rate_sweep",
]

E_SQUARED = math.e ** 2

_FULL_BC = BoundaryCondition(NEUMANN, NEUMANN)


@dataclass(frozen=True)
class SweepConfig:
    """Grid and tolerances for rate/counting sweeps (log-spaced lambda grid)."""

    lambda_min: float = 100.0
    lambda_max: float = 1000.0
    points: int = 10
    p_values: tuple[float, ...] = (1.0, 2.0)
    b_rule: BRule = BRule()
    seed: int = 1234
    pair_budget: int = DEFAULT_PAIR_BUDGET
    slope_tol: float = 0.15
    ratio_band: float = 50.0

    def __post_init__(self):
        if not self.lambda_min > E_SQUARED:
            raise ValueError(f"lambda_min must exceed e^2 ~ {E_SQUARED:.4f}, got {self.lambda_min!r}")
        if not self.lambda_max > self.lambda_min:
            raise ValueError("lambda_max must exceed lambda_min")
        if self.points < 4:
            raise ValueError(f"need at least 4 grid points, got {self.points!r}")
        if any(p < 1 for p in self.p_values):
            raise ValueError("moment orders must be >= 1")

    def grid(self) -> np.ndarray:
        return np.geomspace(self.lambda_min, self.lambda_max, self.points)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    max_ratio: float | None = None
    min_ratio: float | None = None
    theory_slope: float | None = None


def loglog_fit(lams, values) -> FitResult:
    """Ordinary least squares of log(value) on log(lambda)."""
    lams = np.asarray(lams, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if lams.size < 4:
        raise ValueError(f"need at least 4 points for a fit, got {lams.size}")
    if np.any(values <= 0) or np.any(lams <= 0):
        raise ValueError("log-log fit needs positive grid and values")
    x = np.log(lams)
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return FitResult(float(slope), float(intercept), r2)


def _sweep_densities(params, spectrum, grid, seed, pair_budget, threads=1):
    def work(lam):
        return assemble_density(params, spectrum, float(lam), seed=seed, pair_budget=pair_budget)

    if threads <= 1:
        return [work(l) for l in grid]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(work, grid))


def rate_points(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    config: SweepConfig,
    p: float,
    use_tail: bool = False,
    threads: int = 1,
    densities=None,
):
    """(lambda, value, rate, ratio) rows for one observable over the grid.

    value is the truncated p-th moment, or for the p = 1 tail form the mass
    beyond A_lambda itself.
    """
    if use_tail and p != 1:
        raise ValueError("the tail form is the p = 1 statement")
    rate = theoretical_rate(params, p)
    grid = config.grid()
    if densities is None:
        densities = _sweep_densities(params, spectrum, grid, config.seed, config.pair_budget, threads)
    rows = []
    for lam, dens in zip(grid, densities):
        a_lam = eval_rate(rate, float(lam))
        value = tail_mass(dens, a_lam) if use_tail else moment_p(dens, p)
        rows.append((float(lam), value, a_lam, value / a_lam))
    return rows


def _fit_with_ratios(rows, theory_slope) -> FitResult:
    lams = [r[0] for r in rows]
    values = [r[1] for r in rows]
    ratios = [r[3] for r in rows]
    fit = loglog_fit(lams, values)
    return FitResult(
        fit.slope,
        fit.intercept,
        fit.r_squared,
        max_ratio=max(ratios),
        min_ratio=min(ratios),
        theory_slope=theory_slope,
    )


def rate_check(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    config: SweepConfig,
    p: float,
    use_tail: bool = False,
    threads: int = 1,
    densities=None,
) -> FitResult:
    """Fit the measured observable against the closed-form envelope.

    theory_slope is set only for pure-power envelopes; the log-corrected
    cases carry no slope claim and are judged by ratio boundedness.
    """
    rate = theoretical_rate(params, p)
    rows = rate_points(params, spectrum, config, p, use_tail, threads, densities)
    theory = rate.exponent if rate.kind == POWER else None
    return _fit_with_ratios(rows, theory)


def weyl_check(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    config: SweepConfig,
    threads: int = 1,
) -> FitResult:
    """Counting asymptotics over the grid.

    Off the critical line: log N against log lambda, theory slope d/2.
    At beta n = 2: N / lambda^((n+1)/2) regressed on log lambda (the fit is
    linear in that frame; r^2 close to 1 is the check), no slope claim.
    """
    grid = config.grid()

    def work(lam):
        return full_count(params, spectrum, float(lam))

    if threads <= 1:
        counts = [work(l) for l in grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            counts = list(ex.map(work, grid))
    counts = np.asarray(counts, dtype=np.float64)
    if np.any(counts <= 0):
        raise ValueError("counting grid reaches lambda below the ground state")
    if params.critical:
        x = np.log(grid)
        y = counts / grid ** ((params.n + 1) / 2.0)
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
        ratios = counts / (grid ** ((params.n + 1) / 2.0) * np.log(grid))
        return FitResult(float(slope), float(intercept), r2, float(ratios.max()), float(ratios.min()), None)
    fit = loglog_fit(grid, counts)
    ratios = counts / grid ** (params.d / 2.0)
    return FitResult(fit.slope, fit.intercept, fit.r_squared, float(ratios.max()), float(ratios.min()), params.d / 2.0)


# --- localisation -----------------------------------------------------------

LINEAR = "linear"
SMOOTHSTEP = "smoothstep"


@dataclass(frozen=True)
class ChiSpec:
    """Radial cutoff profile: a ramp over [a, b] or the power min(x^(p/2), 1).

    A degenerate ramp (a = b) is the sharp step at b; a = b = 0 gives
    chi identically 1.
    """

    mode: str
    a: float = 0.0
    b: float = 0.0
    shape: str = LINEAR
    power_p: float = 2.0

    def __post_init__(self):
        if self.mode not in ("ramp", "power"):
            raise ValueError(f"unknown chi mode {self.mode!r}")
        if self.mode == "ramp":
            if self.a < 0 or self.b < self.a:
                raise ValueError(f"ramp needs 0 <= a <= b, got ({self.a!r}, {self.b!r})")
            if self.shape not in (LINEAR, SMOOTHSTEP):
                raise ValueError(f"unknown ramp shape {self.shape!r}")
        elif self.power_p < 1:
            raise ValueError(f"power cutoff needs p >= 1, got {self.power_p!r}")

    def values(self, x: np.ndarray) -> np.ndarray:
        if self.mode == "power":
            return np.minimum(x ** (self.power_p / 2.0), 1.0)
        if self.b == self.a:
            return (x >= self.b).astype(np.float64)
        t = np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)
        if self.shape == SMOOTHSTEP:
            return t * t * (3.0 - 2.0 * t)
        return t


@dataclass(frozen=True)
class LocalisationReport:
    lam: float
    chi: ChiSpec
    lhs: float
    rhs: float
    trace_term: float
    deriv_term: float
    n_pairs: int
    holds: bool


def localisation_check(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    lam: float,
    chi_spec: ChiSpec,
    seed: int = 0,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> LocalisationReport:
    """Check the localisation inequality at one lambda.

    LHS sums <v, chi^2 v> over eigenpairs below lam; RHS is
    (trace term + derivative term)/lam with the trace shift 2 (1+delta)^2 lam.
    Eigen and trace sides share one mesh sized for the shift.
    """
    if chi_spec.mode == "ramp" and chi_spec.b > params.eps:
        raise ValueError(f"ramp must finish inside the collar: b <= eps = {params.eps:g}")
    shift = 2.0 * (1.0 + params.delta_slack) ** 2 * lam
    interval = (0.0, params.x_max)
    m = mesh_nodes_for(params, interval, shift)
    base = assemble_radial(params, 0.0, interval, _FULL_BC, mesh_nodes=m)
    x = base.mesh.nodes
    h = base.mesh.h
    xbeta = x ** params.beta
    off2 = base.offdiag * base.offdiag
    chi = chi_spec.values(x)
    chi2 = chi * chi
    wcell = ((chi[1:] - chi[:-1]) / h) ** 2

    mus_eig = _kept_modes(params, spectrum, interval, lam)
    lhs, der, npairs, status = kernels.localisation_sums(
        base.diag, xbeta, base.offdiag, off2, np.ascontiguousarray(mus_eig),
        float(lam), chi2, wcell, BISECT_RELTOL, EIGVEC_RTOL, seed, pair_budget,
    )
    _raise_status(status, npairs, pair_budget, lam)

    # trace side: restrict to the support block (rows with chi = 0 vanish
    # identically in chi (s - T) chi, so this is exact)
    sup = np.nonzero(chi > 0.0)[0]
    s0 = int(sup[0]) if sup.size else len(base)
    if s0 < len(base):
        supp_left = chi_spec.a if chi_spec.mode == "ramp" and chi_spec.a > 0 else 0.0
        needed = sharp_skip_threshold(params, (supp_left, params.x_max), shift)
        if needed > spectrum.mu_cutoff:
            raise SpectrumIncompleteError(
                f"trace side needs spectrum up to mu={needed:g}, cutoff {spectrum.mu_cutoff:g}"
            )
        vmin = min_potential(params, spectrum.mus, (supp_left, params.x_max))
        mus_tr = spectrum.mus[vmin < shift]
        trace = float(
            kernels.trace_plus_modes(
                np.ascontiguousarray(base.diag[s0:]),
                np.ascontiguousarray(xbeta[s0:]),
                np.ascontiguousarray(base.offdiag[s0:]),
                np.ascontiguousarray(mus_tr),
                float(shift),
                np.ascontiguousarray(chi[s0:]),
                BISECT_RELTOL,
            )
        )
    else:
        trace = 0.0
    rhs = (trace + der) / lam
    holds = lhs <= rhs * (1.0 + 1e-10) + 1e-12
    return LocalisationReport(float(lam), chi_spec, float(lhs), float(rhs), trace, float(der), int(npairs), bool(holds))


def ims_relative_defect(op: TridiagOperator, chi: np.ndarray) -> float:
    """Max-entry defect of the IMS identity, relative to the operator scale.

    chi T chi - (chi^2 T + T chi^2)/2 must equal the explicitly assembled
    correction with entries -(chi_i - chi_j)^2 T_ij / 2; the defect is pure
    rounding (~1e-16), and anything above 1e-12 means broken assembly.
    """
    chi = np.asarray(chi, dtype=np.float64)
    T = op.dense()
    D = np.diag(chi)
    lhs = D @ T @ D - 0.5 * (D @ D @ T + T @ D @ D)
    corr = -0.5 * (chi[:, None] - chi[None, :]) ** 2 * T
    scale = float(np.abs(T).max())
    return float(np.abs(lhs - corr).max() / max(scale, 1.0))


# --- sweep driver ------------------------------------------------------------


def run_rate_sweep(
    params: ModelParams,
    spectrum: BoundarySpectrum,
    config: SweepConfig,
    threads: int = 1,
) -> dict:
    """One full sweep: densities once per lambda, all observables from them.

    Returns a plain dict ready for serialization; 'ok' aggregates the
    configured tolerance checks (power slopes within slope_tol, log-form
    ratio spread within ratio_band).
    """
    grid = config.grid()
    densities = _sweep_densities(params, spectrum, grid, config.seed, config.pair_budget, threads)
    weyl = weyl_check(params, spectrum, config, threads=threads)
    moments = []
    for lam, dens in zip(grid, densities):
        for p in config.p_values:
            rep = moment_report(params, dens, float(p))
            moments.append(
                {
                    "lambda": rep.lam,
                    "p": rep.p,
                    "moment": rep.moment,
                    "wasserstein": rep.wasserstein,
                    "tails": [{"k": k, "F": f} for k, f in rep.tails],
                }
            )
    rates = []
    ok = True
    jobs: list[tuple[float, bool]] = []
    for p in config.p_values:
        jobs.append((float(p), False))
        if p == 1:
            jobs.append((1.0, True))
    for p, use_tail in jobs:
        rows = rate_points(params, spectrum, config, p, use_tail, densities=densities)
        rate = theoretical_rate(params, p)
        theory = rate.exponent if rate.kind == POWER else None
        fit = _fit_with_ratios(rows, theory)
        entry_ok = True
        if theory is not None and not use_tail:
            entry_ok = abs(fit.slope - theory) <= config.slope_tol
        if fit.min_ratio is not None and fit.min_ratio > 0:
            entry_ok = entry_ok and (fit.max_ratio / fit.min_ratio <= config.ratio_band)
        ok = ok and entry_ok
        rates.append(
            {
                "p": p,
                "form": "tail" if use_tail else "moment",
                "rate_kind": rate.kind,
                "points": [
                    {"lambda": r[0], "value": r[1], "rate": r[2], "ratio": r[3]} for r in rows
                ],
                "fit": _fit_dict(fit),
                "ok": entry_ok,
            }
        )
    return {
        "lambda_grid": [float(l) for l in grid],
        "n_lambda": [d.n_lambda for d in densities],
        "weyl": _fit_dict(weyl),
        "rates": rates,
        "moments": moments,
        "ok": bool(ok),
    }


def _fit_dict(fit: FitResult) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "max_ratio": fit.max_ratio,
        "min_ratio": fit.min_ratio,
        "theory_slope": fit.theory_slope,
    }

"""Command line front end: INI configuration, six subcommands, deterministic
CSV/JSON artifacts.

Every artifact embeds the parsed configuration as flat `section.key=value`
pairs; feeding those pairs back through RunConfig.from_flat reproduces the
run. Exit codes: 0 ok, 1 invariant failure, 2 config error, 3 infeasible.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis import (
    ChiSpec,
    SweepConfig,
    ims_relative_defect,
    localisation_check,
    run_rate_sweep,
)
from .boundary import (
    DEFAULT_MAX_ENTRIES,
    FLAT_TORUS,
    SYNTHETIC,
    BoundarySpectrum,
    flat_torus_spectrum,
    synthetic_weyl_spectrum,
)
from .counting import (
    CORE,
    SHELL,
    TAIL,
    BRule,
    Region,
    _kept_modes,
    min_potential,
    region_count,
    sharp_skip_threshold,
    verify_upper_bounds,
)
from .density import DEFAULT_PAIR_BUDGET, assemble_density, moment_report
from .errors import ConfigError, InfeasibleError
from .io import fmt17, write_csv, write_json
from .params import ModelParams, eval_rate, theoretical_rate
from .radial import (
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    assemble_radial,
    dense_oracle_eigs,
    eigenvalues_below,
    mesh_nodes_for,
    rescaled_problem,
    sturm_count,
)

__all__ = ["RunConfig", "main"]

COMMANDS = ("spectrum", "count", "density", "wasserstein", "rate-sweep", "verify")

_FULL_BC = BoundaryCondition(NEUMANN, NEUMANN)

# every legal flat key, in canonical echo order
_KEYS = (
    "model.n",
    "model.beta",
    "model.eps",
    "model.x_max",
    "model.mesh_nodes",
    "model.mesh_kappa",
    "model.delta_slack",
    "spectrum.source",
    "spectrum.mu_cutoff",
    "spectrum.radii",
    "spectrum.max_entries",
    "sweep.lambda_min",
    "sweep.lambda_max",
    "sweep.points",
    "sweep.p_values",
    "sweep.b_rule",
    "sweep.b_value",
    "sweep.pair_budget",
    "sweep.slope_tol",
    "sweep.ratio_band",
    "run.region",
    "run.threshold_factor",
    "run.lambda",
    "run.p",
    "run.threads",
    "run.out",
    "run.seed",
)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (file + flag overrides)."""

    model: ModelParams = ModelParams()
    source: str = SYNTHETIC
    mu_cutoff: float | None = None  # None: sized from the run's largest threshold
    radii: tuple[float, ...] | None = None
    max_entries: int = DEFAULT_MAX_ENTRIES
    lambda_min: float = 100.0
    lambda_max: float = 1000.0
    points: int = 10
    p_values: tuple[float, ...] = (1.0, 2.0)
    b_rule_kind: str = "half-power"
    b_value: float = 0.5
    pair_budget: int = DEFAULT_PAIR_BUDGET
    slope_tol: float = 0.15
    ratio_band: float = 50.0
    region: str = TAIL
    threshold_factor: float = 1.0
    lam: float | None = None
    p: float = 1.0
    threads: int = 1
    out: str = "out"
    seed: int = 1234

    def __post_init__(self):
        if self.source not in (SYNTHETIC, FLAT_TORUS):
            raise ConfigError(f"unknown spectrum source {self.source!r}")
        if self.source == FLAT_TORUS:
            radii = self.radii if self.radii is not None else (1.0,) * self.model.n
            if len(radii) != self.model.n:
                raise ConfigError(
                    f"flat-torus needs {self.model.n} radii, got {len(radii)}"
                )
            object.__setattr__(self, "radii", radii)
        if self.region not in (TAIL, SHELL, CORE):
            raise ConfigError(f"unknown region {self.region!r}")
        if self.threshold_factor <= 0:
            raise ConfigError("threshold_factor must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.p < 1:
            raise ConfigError("p must be >= 1")

    # -- conversion ------------------------------------------------------

    @classmethod
    def from_flat(cls, flat: dict) -> "RunConfig":
        for key in flat:
            if key not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")

        def get(key, cast, default):
            if key not in flat:
                return default
            try:
                return cast(flat[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {flat[key]!r}") from exc

        cutoff_raw = flat.get("spectrum.mu_cutoff", "auto")
        if isinstance(cutoff_raw, str) and cutoff_raw.strip().lower() == "auto":
            mu_cutoff = None
        else:
            mu_cutoff = get("spectrum.mu_cutoff", float, None)
        radii_raw = flat.get("spectrum.radii")
        radii = _parse_tuple(radii_raw) if radii_raw not in (None, "") else None
        lam_raw = flat.get("run.lambda")
        lam = None if lam_raw in (None, "") else get("run.lambda", float, None)
        try:
            model = ModelParams(
                n=get("model.n", int, 1),
                beta=get("model.beta", float, 2.0),
                eps=get("model.eps", float, 1.0),
                x_max=get("model.x_max", float, 1.0),
                mesh_nodes=get("model.mesh_nodes", int, 64),
                mesh_kappa=get("model.mesh_kappa", float, 10.0),
                delta_slack=get("model.delta_slack", float, 0.0),
            )
            return cls(
                model=model,
                source=get("spectrum.source", str, SYNTHETIC),
                mu_cutoff=mu_cutoff,
                radii=radii,
                max_entries=get("spectrum.max_entries", int, DEFAULT_MAX_ENTRIES),
                lambda_min=get("sweep.lambda_min", float, 100.0),
                lambda_max=get("sweep.lambda_max", float, 1000.0),
                points=get("sweep.points", int, 10),
                p_values=get("sweep.p_values", _parse_tuple, (1.0, 2.0)),
                b_rule_kind=get("sweep.b_rule", str, "half-power"),
                b_value=get("sweep.b_value", float, 0.5),
                pair_budget=get("sweep.pair_budget", int, DEFAULT_PAIR_BUDGET),
                slope_tol=get("sweep.slope_tol", float, 0.15),
                ratio_band=get("sweep.ratio_band", float, 50.0),
                region=get("run.region", str, TAIL),
                threshold_factor=get("run.threshold_factor", float, 1.0),
                lam=lam,
                p=get("run.p", float, 1.0),
                threads=get("run.threads", int, 1),
                out=get("run.out", str, "out"),
                seed=get("run.seed", int, 1234),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_flat(self) -> dict:
        """Flat echo; from_flat on the result reproduces this config exactly."""
        m = self.model
        flat = {
            "model.n": str(m.n),
            "model.beta": fmt17(m.beta),
            "model.eps": fmt17(m.eps),
            "model.x_max": fmt17(m.x_max),
            "model.mesh_nodes": str(m.mesh_nodes),
            "model.mesh_kappa": fmt17(m.mesh_kappa),
            "model.delta_slack": fmt17(m.delta_slack),
            "spectrum.source": self.source,
            "spectrum.mu_cutoff": "auto" if self.mu_cutoff is None else fmt17(self.mu_cutoff),
        }
        if self.radii is not None:
            flat["spectrum.radii"] = ",".join(fmt17(r) for r in self.radii)
        flat.update(
            {
                "spectrum.max_entries": str(self.max_entries),
                "sweep.lambda_min": fmt17(self.lambda_min),
                "sweep.lambda_max": fmt17(self.lambda_max),
                "sweep.points": str(self.points),
                "sweep.p_values": ",".join(fmt17(p) for p in self.p_values),
                "sweep.b_rule": self.b_rule_kind,
                "sweep.b_value": fmt17(self.b_value),
                "sweep.pair_budget": str(self.pair_budget),
                "sweep.slope_tol": fmt17(self.slope_tol),
                "sweep.ratio_band": fmt17(self.ratio_band),
                "run.region": self.region,
                "run.threshold_factor": fmt17(self.threshold_factor),
            }
        )
        if self.lam is not None:
            flat["run.lambda"] = fmt17(self.lam)
        # threads and out are execution topology, not run semantics: results
        # are byte-identical across thread counts, so the echo omits them
        flat.update({"run.p": fmt17(self.p), "run.seed": str(self.seed)})
        return flat

    # -- derived views ---------------------------------------------------

    def sweep_config(self) -> SweepConfig:
        try:
            return SweepConfig(
                lambda_min=self.lambda_min,
                lambda_max=self.lambda_max,
                points=self.points,
                p_values=self.p_values,
                b_rule=self.b_rule(),
                seed=self.seed,
                pair_budget=self.pair_budget,
                slope_tol=self.slope_tol,
                ratio_band=self.ratio_band,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def b_rule(self) -> BRule:
        try:
            return BRule(self.b_rule_kind, self.b_value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _parse_tuple(text) -> tuple[float, ...]:
    if isinstance(text, tuple):
        return tuple(float(v) for v in text)
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def load_config_file(path: str) -> dict:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    flat = {}
    for sect in cp.sections():
        if sect not in ("model", "spectrum", "sweep", "run"):
            raise ConfigError(f"unknown config section [{sect}]")
        for key, val in cp[sect].items():
            flat[f"{sect}.{key}"] = val
    return flat


# --- spectrum construction ----------------------------------------------


def build_spectrum(cfg: RunConfig, t_max: float) -> BoundarySpectrum:
    """Boundary spectrum covering every mode that can matter below t_max.

    With mu_cutoff auto, the cutoff is the full-interval sharp-skip
    threshold at t_max; regions are subintervals and region thresholds
    are <= t_max, so this cutoff dominates every completeness check.
    """
    params = cfg.model
    if cfg.mu_cutoff is not None:
        cutoff = cfg.mu_cutoff
    else:
        cutoff = sharp_skip_threshold(params, (0.0, params.x_max), t_max) * (1.0 + 1e-9)
        cutoff = max(cutoff, 1.0)
    if cfg.source == SYNTHETIC:
        return synthetic_weyl_spectrum(params.n, cutoff, cfg.max_entries)
    return flat_torus_spectrum(cfg.radii, cutoff, cfg.max_entries)


def _shift_cap(cfg: RunConfig, lam: float) -> float:
    return 2.0 * (1.0 + cfg.model.delta_slack) ** 2 * lam


def _require_lambda(cfg: RunConfig) -> float:
    if cfg.lam is None:
        raise ConfigError("this command needs --lambda (or [run] lambda)")
    if cfg.lam <= 0:
        raise ConfigError(f"lambda must be positive, got {cfg.lam!r}")
    return cfg.lam


def _outpath(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


# --- subcommands ----------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> int:
    lam = _require_lambda(cfg)
    params = cfg.model
    spec = build_spectrum(cfg, lam)
    interval = (0.0, params.x_max)
    _kept_modes(params, spec, interval, lam)  # completeness check
    vmin = min_potential(params, spec.mus, interval)
    idx = np.nonzero(np.atleast_1d(vmin) < lam)[0]
    m = mesh_nodes_for(params, interval, lam)

    def work(j):
        op = assemble_radial(params, float(spec.mus[j]), interval, _FULL_BC, mesh_nodes=m)
        return eigenvalues_below(op, lam, budget=cfg.pair_budget)

    if cfg.threads <= 1:
        per_mode = [work(j) for j in idx]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            per_mode = list(ex.map(work, idx))
    rows = []
    for j, eigs in zip(idx, per_mode):
        for k, alpha in enumerate(eigs, start=1):
            rows.append((float(alpha), int(j), k))
    rows.sort()
    out_rows = [(j, k, alpha) for alpha, j, k in rows]
    comments = dict(cfg.to_flat())
    comments["lambda"] = lam
    comments["count"] = len(out_rows)
    path = _outpath(cfg, "spectrum.csv")
    write_csv(path, ("j", "k", "alpha"), out_rows, comments)
    print(f"{path}: {len(out_rows)} eigenvalues below lambda={lam:g}")
    return 0


def _report_row(rep) -> tuple:
    bc = f"{rep.region.bc.left}-{rep.region.bc.right}"
    return (rep.lam, rep.region.B, rep.region.kind, bc, rep.count, rep.bound_value, rep.ratio, rep.j_used)


def _report_dict(rep) -> dict:
    return {
        "type": "count",
        "lambda": rep.lam,
        "B": rep.region.B,
        "kind": rep.region.kind,
        "bc": f"{rep.region.bc.left}-{rep.region.bc.right}",
        "count": rep.count,
        "bound_value": rep.bound_value,
        "ratio": rep.ratio,
        "j_used": rep.j_used,
    }


def cmd_count(cfg: RunConfig) -> int:
    params = cfg.model
    lams = [_require_lambda(cfg)] if cfg.lam is not None else list(cfg.sweep_config().grid())
    rule = cfg.b_rule()
    t_max = _shift_cap(cfg, max(lams)) * max(cfg.threshold_factor, 1.0)
    spec = build_spectrum(cfg, t_max)
    rows = []
    for lam in lams:
        lam = float(lam)
        B = rule(params, lam)
        region = Region(cfg.region, B)
        threshold = cfg.threshold_factor * lam if cfg.threshold_factor != 1.0 else None
        rep = region_count(params, spec, region, lam, threshold=threshold)
        rows.append(_report_row(rep))
    comments = dict(cfg.to_flat())
    path = _outpath(cfg, "counts.csv")
    write_csv(
        path,
        ("lambda", "B", "kind", "bc", "count", "bound_value", "ratio", "j_used"),
        rows,
        comments,
    )
    print(f"{path}: {len(rows)} rows")
    return 0


def cmd_density(cfg: RunConfig) -> int:
    lam = _require_lambda(cfg)
    params = cfg.model
    spec = build_spectrum(cfg, lam)
    dens = assemble_density(params, spec, lam, seed=cfg.seed, pair_budget=cfg.pair_budget)
    comments = dict(cfg.to_flat())
    comments["lambda"] = lam
    comments["n_lambda"] = dens.n_lambda
    path = _outpath(cfg, "density.csv")
    write_csv(path, ("x", "f"), zip(dens.grid.nodes, dens.values), comments)
    print(f"{path}: N(lambda)={dens.n_lambda} on {len(dens.values)} nodes")
    return 0


def cmd_wasserstein(cfg: RunConfig) -> int:
    lam = _require_lambda(cfg)
    params = cfg.model
    spec = build_spectrum(cfg, lam)
    dens = assemble_density(params, spec, lam, seed=cfg.seed, pair_budget=cfg.pair_budget)
    rep = moment_report(params, dens, cfg.p)
    payload = {
        "config_echo": cfg.to_flat(),
        "lambda": rep.lam,
        "p": rep.p,
        "moment": rep.moment,
        "wasserstein": rep.wasserstein,
        "tails": [{"k": k, "F": f} for k, f in rep.tails],
    }
    path = _outpath(cfg, "wasserstein.json")
    write_json(path, payload)
    print(f"{path}: W_{cfg.p:g}(lambda={lam:g}) = {rep.wasserstein:.6g}")
    return 0


def cmd_rate_sweep(cfg: RunConfig) -> int:
    params = cfg.model
    sweep = cfg.sweep_config()
    spec = build_spectrum(cfg, _shift_cap(cfg, cfg.lambda_max))
    result = run_rate_sweep(params, spec, sweep, threads=cfg.threads)
    count_reports = verify_upper_bounds(params, spec, sweep.grid(), sweep.b_rule)
    counts_ok = all(np.isfinite(r.ratio) for r in count_reports)
    rows = [_report_dict(r) for r in count_reports]
    rows += [dict(type="moment", **m) for m in result["moments"]]
    ok = bool(result["ok"] and counts_ok)
    payload = {
        "config_echo": cfg.to_flat(),
        "rows": rows,
        "fits": {"weyl": result["weyl"], "rates": result["rates"]},
        "lambda_grid": result["lambda_grid"],
        "n_lambda": result["n_lambda"],
        "ok": ok,
    }
    path = _outpath(cfg, "rate_sweep.json")
    write_json(path, payload)
    print(f"{path}: ok={str(ok).lower()}")
    return 0 if ok else 1


# --- verify ----------------------------------------------------------------


def _check_oracle(cfg: RunConfig, rng) -> tuple[bool, str]:
    params = cfg.model
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(10, 121))
        mu = float(10.0 ** rng.uniform(-1, 3))
        a = float(rng.uniform(0, 0.3)) if rng.random() < 0.5 else 0.0
        b = float(rng.uniform(a + 0.2, 1.0))
        bc = BoundaryCondition(
            DIRICHLET if rng.random() < 0.5 else NEUMANN,
            DIRICHLET if rng.random() < 0.5 else NEUMANN,
        )
        op = assemble_radial(params, mu, (a, b), bc, mesh_nodes=m)
        oracle = dense_oracle_eigs(op)
        eigs = eigenvalues_below(op, oracle[-1] + 1.0, budget=10 ** 6)
        if len(eigs) != len(oracle):
            return False, f"eigenvalue count mismatch {len(eigs)} vs {len(oracle)}"
        scale = max(1.0, float(np.abs(oracle).max()))
        dev = float(np.abs(eigs - oracle).max()) / scale
        worst = max(worst, dev)
        if dev > 1e-9:
            return False, f"eigenvalue deviation {dev:.3e}"
        for lam in np.linspace(oracle[0] - 1, oracle[-1] + 1, 7):
            want = int(np.searchsorted(oracle, lam, side="left"))
            got = sturm_count(op, float(lam))
            if got != want:
                return False, f"count mismatch at lambda={lam:g}: {got} vs {want}"
    return True, f"max relative eigenvalue deviation {worst:.3e}"


def _check_scaling(cfg: RunConfig, rng) -> tuple[bool, str]:
    params = cfg.model
    for _ in range(20):
        m = int(rng.integers(10, 200))
        mu = float(10.0 ** rng.uniform(-2, 3))
        a = float(rng.uniform(0, 0.4))
        b = float(rng.uniform(a + 0.1, 1.0))
        (sa, sb), s2 = rescaled_problem(params, mu, (a, b))
        op1 = assemble_radial(params, mu, (a, b), mesh_nodes=m)
        # the identity is interval-level; widen x_max so mu > 1 rescales stay legal
        params_s = replace(params, x_max=max(params.x_max, sb))
        op2 = assemble_radial(params_s, 1.0, (sa, sb), mesh_nodes=m)
        lam = float(10.0 ** rng.uniform(0.5, 4.0))
        c1 = sturm_count(op1, lam)
        c2 = sturm_count(op2, lam / s2)
        if c1 != c2:
            return False, f"counts differ: {c1} vs {c2} (mu={mu:g})"
    return True, "20 random triples agree exactly"


def _check_ims(cfg: RunConfig, rng) -> tuple[bool, str]:
    params = cfg.model
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(5, 80))
        mu = float(10.0 ** rng.uniform(-1, 2))
        a = float(rng.uniform(0, 0.5))
        b = float(rng.uniform(a + 0.1, 1.0))
        op = assemble_radial(params, mu, (a, b), mesh_nodes=m)
        chi = rng.random(len(op))
        worst = max(worst, ims_relative_defect(op, chi))
    ok = worst <= 1e-12
    return ok, f"max relative defect {worst:.3e}"


def _check_localisation(cfg: RunConfig, spec: BoundarySpectrum) -> tuple[bool, str]:
    params = cfg.model
    rate1 = theoretical_rate(params, 1.0)
    lams = np.geomspace(cfg.lambda_min, cfg.lambda_max, 3)
    n_checked = 0
    for lam in lams:
        lam = float(lam)
        a_lam = eval_rate(rate1, lam)
        specs = [
            ChiSpec("ramp", 0.0, 0.0),
            ChiSpec("ramp", a_lam / 2.0, min(a_lam, params.eps)),
            ChiSpec("power", power_p=2.0),
        ]
        for cs in specs:
            rep = localisation_check(params, spec, lam, cs, seed=cfg.seed, pair_budget=cfg.pair_budget)
            n_checked += 1
            if not rep.holds:
                return False, (
                    f"violated at lambda={lam:g} chi={cs.mode}: lhs={rep.lhs:.6g} rhs={rep.rhs:.6g}"
                )
    return True, f"{n_checked} (lambda, chi) cases hold"


def _check_core_zero(cfg: RunConfig, spec: BoundarySpectrum) -> tuple[bool, str]:
    params = cfg.model
    for lam in np.geomspace(cfg.lambda_min, cfg.lambda_max, cfg.points):
        lam = float(lam)
        B = 0.5 / math.sqrt(lam)
        rep = region_count(params, spec, Region(CORE, B), lam, threshold=3.0 * lam)
        if rep.count != 0:
            return False, f"core count {rep.count} != 0 at lambda={lam:g}"
    return True, f"zero on all {cfg.points} grid points"


def _check_bracketing(cfg: RunConfig, rng) -> tuple[bool, str]:
    params = cfg.model
    for _ in range(10):
        m = int(rng.integers(10, 150))
        mu = float(10.0 ** rng.uniform(-1, 3))
        a = float(rng.uniform(0, 0.4))
        b = float(rng.uniform(a + 0.2, 1.0))
        lam = float(10.0 ** rng.uniform(1, 4))
        op_d = assemble_radial(params, mu, (a, b), BoundaryCondition(DIRICHLET, DIRICHLET), mesh_nodes=m)
        op_n = assemble_radial(params, mu, (a, b), BoundaryCondition(NEUMANN, NEUMANN), mesh_nodes=m)
        cd = sturm_count(op_d, lam)
        cn = sturm_count(op_n, lam)
        if cd > cn:
            return False, f"Dirichlet {cd} > Neumann {cn} at lambda={lam:g}"
    return True, "Dirichlet <= Neumann on 10 random instances"


def cmd_verify(cfg: RunConfig) -> int:
    params = cfg.model
    rng = np.random.default_rng(cfg.seed)
    spec = build_spectrum(cfg, _shift_cap(cfg, cfg.lambda_max))
    checks = [
        ("oracle-equivalence", _check_oracle(cfg, rng)),
        ("scaling-identity", _check_scaling(cfg, rng)),
        ("ims-identity", _check_ims(cfg, rng)),
        ("dirichlet-neumann-order", _check_bracketing(cfg, rng)),
        ("core-zero-count", _check_core_zero(cfg, spec)),
        ("localisation", _check_localisation(cfg, spec)),
    ]
    all_ok = True
    results = []
    for name, (ok, detail) in checks:
        all_ok = all_ok and ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        results.append({"name": name, "ok": ok, "detail": detail})
    payload = {"config_echo": cfg.to_flat(), "checks": results, "ok": all_ok}
    path = _outpath(cfg, "verify.json")
    write_json(path, payload)
    print(f"{path}: ok={str(all_ok).lower()}")
    return 0 if all_ok else 1


# --- entry point -----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="PATH", help="INI config file")
    parent.add_argument("--lambda", dest="lam", type=float, help="spectral threshold")
    parent.add_argument("--p", type=float, help="moment / Wasserstein order")
    parent.add_argument("--beta", type=float, help="potential exponent")
    parent.add_argument("--n", type=int, help="boundary dimension")
    parent.add_argument("--threads", type=int, help="worker threads for sweeps")
    parent.add_argument("--out", help="output directory")
    parent.add_argument("--seed", type=int, help="RNG seed for iteration starts")
    parser = argparse.ArgumentParser(
        prog="collarspectra",
        description="Eigenvalue counts, spectral densities, and Wasserstein rates "
        "for the singular collar model operator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "list model eigenvalues below --lambda (CSV j,k,alpha)",
        "count": "region eigenvalue counts and envelopes (CSV)",
        "density": "averaged eigenfunction density at --lambda (CSV x,f)",
        "wasserstein": "moment and Wasserstein-p report at --lambda (JSON)",
        "rate-sweep": "full rate/Weyl sweep over the lambda grid (JSON)",
        "verify": "exact invariant suite; nonzero exit on any failure",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[parent], help=helps[name])
    return parser


_DISPATCH = {
    "spectrum": cmd_spectrum,
    "count": cmd_count,
    "density": cmd_density,
    "wasserstein": cmd_wasserstein,
    "rate-sweep": cmd_rate_sweep,
    "verify": cmd_verify,
}


def _apply_flags(flat: dict, args: argparse.Namespace) -> dict:
    overrides = {
        "run.lambda": args.lam,
        "run.p": args.p,
        "model.beta": args.beta,
        "model.n": args.n,
        "run.threads": args.threads,
        "run.out": args.out,
        "run.seed": args.seed,
    }
    for key, val in overrides.items():
        if val is not None:
            flat[key] = str(val)
    return flat


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        flat = load_config_file(args.config) if args.config else {}
        cfg = RunConfig.from_flat(_apply_flags(flat, args))
        return _DISPATCH[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

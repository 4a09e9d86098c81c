import math

import numpy as np
import pytest

from collarspectra.analysis import (
    ChiSpec,
    FitResult,
    LocalisationReport,
    SweepConfig,
    ims_relative_defect,
    localisation_check,
    loglog_fit,
    rate_check,
    rate_points,
    run_rate_sweep,
    weyl_check,
)
from collarspectra.boundary import synthetic_weyl_spectrum
from collarspectra.errors import SpectrumIncompleteError
from collarspectra.params import ModelParams
from collarspectra.radial import BoundaryCondition, assemble_radial

CRIT = ModelParams(n=1, beta=2.0)
SUPER = ModelParams(n=1, beta=4.0)


# ---------------------------------------------------------------- fits


def test_loglog_fit_exact_power():
    lams = np.geomspace(10, 1000, 12)
    fit = loglog_fit(lams, lams**-0.25)
    assert fit.slope == pytest.approx(-0.25, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    const = loglog_fit(lams, np.full(12, 3.7))
    assert const.slope == pytest.approx(0.0, abs=1e-12)


def test_loglog_fit_with_multiplicative_noise():
    lams = np.geomspace(10, 10000, 30)
    vals = lams**-0.5 * (1.0 + 0.01 * np.sin(np.log(lams)))
    fit = loglog_fit(lams, vals)
    assert -0.52 < fit.slope < -0.48


def test_loglog_fit_validation():
    with pytest.raises(ValueError):
        loglog_fit([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])  # too few
    with pytest.raises(ValueError):
        loglog_fit([1.0, 2.0, 3.0, 4.0], [1.0, -1.0, 1.0, 1.0])


def test_sweep_config_validation():
    SweepConfig()
    with pytest.raises(ValueError):
        SweepConfig(lambda_min=5.0)  # must exceed e^2
    with pytest.raises(ValueError):
        SweepConfig(lambda_min=200.0, lambda_max=100.0)
    with pytest.raises(ValueError):
        SweepConfig(points=3)
    with pytest.raises(ValueError):
        SweepConfig(p_values=(0.5,))
    grid = SweepConfig(lambda_min=100.0, lambda_max=400.0, points=6).grid()
    assert grid[0] == pytest.approx(100.0)
    assert grid[-1] == pytest.approx(400.0)
    assert grid.size == 6


# ---------------------------------------------------------------- cutoffs


def test_chi_spec_ramp_values():
    x = np.array([0.0, 0.3, 0.45, 0.6, 1.0])
    chi = ChiSpec("ramp", 0.3, 0.6)
    np.testing.assert_allclose(chi.values(x), [0.0, 0.0, 0.5, 1.0, 1.0])
    smooth = ChiSpec("ramp", 0.3, 0.6, "smoothstep")
    # 3t^2 - 2t^3 at t = 1/2 is 1/2; at t = 1/4 it is 5/32
    vals = smooth.values(np.array([0.45, 0.375]))
    assert vals[0] == pytest.approx(0.5)
    assert vals[1] == pytest.approx(5.0 / 32.0)


def test_chi_spec_degenerate_and_power():
    x = np.array([0.1, 0.5, 0.9])
    step = ChiSpec("ramp", 0.5, 0.5)
    np.testing.assert_allclose(step.values(x), [0.0, 1.0, 1.0])
    ident = ChiSpec("ramp")  # a = b = 0: chi is 1 everywhere on x > 0
    np.testing.assert_allclose(ident.values(x), [1.0, 1.0, 1.0])
    pw = ChiSpec("power", power_p=2.0)
    np.testing.assert_allclose(pw.values(x), [0.1, 0.5, 0.9])
    pw4 = ChiSpec("power", power_p=4.0)
    np.testing.assert_allclose(pw4.values(x), [0.01, 0.25, 0.81])


def test_chi_spec_validation():
    with pytest.raises(ValueError):
        ChiSpec("window")
    with pytest.raises(ValueError):
        ChiSpec("ramp", 0.5, 0.2)  # b < a
    with pytest.raises(ValueError):
        ChiSpec("ramp", -0.1, 0.2)
    with pytest.raises(ValueError):
        ChiSpec("ramp", 0.1, 0.2, "cubic")
    with pytest.raises(ValueError):
        ChiSpec("power", power_p=0.5)


# ---------------------------------------------------------------- localisation


@pytest.fixture(scope="module")
def loc_spectrum():
    # complete up to the trace-side shift for lambda <= 80
    return synthetic_weyl_spectrum(1, 9000.0)


def test_localisation_chi_one(loc_spectrum):
    # chi = 1: derivative term vanishes and the LHS is exactly the pair count
    rep = localisation_check(CRIT, loc_spectrum, 80.0, ChiSpec("ramp"), seed=5)
    assert isinstance(rep, LocalisationReport)
    assert rep.holds
    assert rep.deriv_term == 0.0
    assert rep.lhs == pytest.approx(rep.n_pairs, rel=1e-12)
    assert rep.rhs == pytest.approx((rep.trace_term + rep.deriv_term) / 80.0)


def test_localisation_ramp_and_power(loc_spectrum):
    for chi in (
        ChiSpec("ramp", 0.3, 0.6),
        ChiSpec("ramp", 0.3, 0.6, "smoothstep"),
        ChiSpec("power", power_p=2.0),
        ChiSpec("power", power_p=3.0),
    ):
        rep = localisation_check(CRIT, loc_spectrum, 80.0, chi, seed=5)
        assert rep.holds
        assert 0.0 < rep.lhs < rep.n_pairs + 1e-9
        assert rep.deriv_term > 0.0


def test_localisation_cutoff_must_end_inside_collar(loc_spectrum):
    params = ModelParams(n=1, beta=2.0, eps=0.5)
    with pytest.raises(ValueError):
        localisation_check(params, loc_spectrum, 80.0, ChiSpec("ramp", 0.3, 0.8))


def test_localisation_incomplete_spectrum():
    small = synthetic_weyl_spectrum(1, 100.0)
    with pytest.raises(SpectrumIncompleteError):
        localisation_check(CRIT, small, 80.0, ChiSpec("power", power_p=2.0))


def test_ims_defect_is_rounding_level():
    rng = np.random.default_rng(31)
    for _ in range(10):
        params = ModelParams(n=1, beta=float(rng.choice([2.0, 4.0])))
        a = float(rng.choice([0.0, 0.2]))
        op = assemble_radial(
            params,
            float(rng.uniform(0, 20)),
            (a, float(rng.uniform(a + 0.3, 1.0))),
            BoundaryCondition(),
            mesh_nodes=int(rng.integers(10, 80)),
        )
        chi = rng.uniform(0.0, 1.0, size=len(op))
        assert ims_relative_defect(op, chi) <= 1e-12


# ---------------------------------------------------------------- sweeps


@pytest.fixture(scope="module")
def small_cfg():
    return SweepConfig(lambda_min=100.0, lambda_max=400.0, points=6, seed=7)


def test_weyl_check_supercritical(small_cfg):
    spectrum = synthetic_weyl_spectrum(1, 2.4e6)
    fit = weyl_check(SUPER, spectrum, small_cfg)
    assert fit.theory_slope == 1.5  # d/2 with d = 3
    assert abs(fit.slope - 1.5) < 0.15
    assert fit.r_squared > 0.99
    assert 0.0 < fit.min_ratio <= fit.max_ratio


def test_weyl_check_critical(small_cfg):
    # log-corrected frame: N / lambda regressed on log lambda
    spectrum = synthetic_weyl_spectrum(1, 60000.0)
    fit = weyl_check(CRIT, spectrum, small_cfg)
    assert fit.theory_slope is None
    assert fit.r_squared > 0.9
    assert fit.slope > 0.0  # the log correction is visible as positive drift
    assert 0.0 < fit.min_ratio <= fit.max_ratio


def test_weyl_check_threads_agree(small_cfg):
    spectrum = synthetic_weyl_spectrum(1, 60000.0)
    a = weyl_check(CRIT, spectrum, small_cfg)
    b = weyl_check(CRIT, spectrum, small_cfg, threads=4)
    assert a == b


@pytest.fixture(scope="module")
def crit_sweep_spectrum():
    # density + weyl at lambda <= 250 keep modes up to lambda^2/3
    return synthetic_weyl_spectrum(1, 21000.0)


def test_rate_points_and_check(crit_sweep_spectrum):
    cfg = SweepConfig(lambda_min=100.0, lambda_max=250.0, points=4, seed=7)
    rows = rate_points(CRIT, crit_sweep_spectrum, cfg, p=1.0)
    assert len(rows) == 4
    for lam, value, rate, ratio in rows:
        assert value > 0 and rate > 0
        assert ratio == pytest.approx(value / rate)
    with pytest.raises(ValueError):
        rate_points(CRIT, crit_sweep_spectrum, cfg, p=2.0, use_tail=True)

    fit = rate_check(CRIT, crit_sweep_spectrum, cfg, p=1.0)
    assert fit.theory_slope is None  # log-corrected envelope carries no slope
    fit2 = rate_check(SUPER, synthetic_weyl_spectrum(1, 6.0e5), cfg, p=1.0)
    assert fit2.theory_slope == -0.25


def test_rate_check_accepts_precomputed_densities(crit_sweep_spectrum):
    from collarspectra.analysis import _sweep_densities

    cfg = SweepConfig(lambda_min=100.0, lambda_max=250.0, points=4, seed=7)
    dens = _sweep_densities(CRIT, crit_sweep_spectrum, cfg.grid(), cfg.seed, cfg.pair_budget)
    a = rate_check(CRIT, crit_sweep_spectrum, cfg, p=2.0, densities=dens)
    b = rate_check(CRIT, crit_sweep_spectrum, cfg, p=2.0)
    assert a == b


def test_run_rate_sweep_payload(crit_sweep_spectrum):
    cfg = SweepConfig(lambda_min=100.0, lambda_max=250.0, points=4, seed=7)
    out = run_rate_sweep(CRIT, crit_sweep_spectrum, cfg)
    assert set(out) == {"lambda_grid", "n_lambda", "weyl", "rates", "moments", "ok"}
    assert len(out["lambda_grid"]) == 4
    assert len(out["n_lambda"]) == 4
    assert all(n > 0 for n in out["n_lambda"])
    # p = 1 moment, p = 1 tail, p = 2 moment
    forms = [(r["p"], r["form"]) for r in out["rates"]]
    assert forms == [(1.0, "moment"), (1.0, "tail"), (2.0, "moment")]
    assert len(out["moments"]) == 8  # 4 lambdas x 2 moment orders
    for entry in out["rates"]:
        assert len(entry["points"]) == 4
        assert "slope" in entry["fit"]
    assert isinstance(out["ok"], bool)


def test_run_rate_sweep_threads_identical(crit_sweep_spectrum):
    cfg = SweepConfig(lambda_min=100.0, lambda_max=250.0, points=4, seed=7)
    a = run_rate_sweep(CRIT, crit_sweep_spectrum, cfg, threads=1)
    b = run_rate_sweep(CRIT, crit_sweep_spectrum, cfg, threads=4)
    assert a == b

import math

import numpy as np
import pytest

from collarspectra.boundary import synthetic_weyl_spectrum
from collarspectra.counting import (
    CORE,
    SHELL,
    TAIL,
    BRule,
    Region,
    envelope_value,
    full_count,
    j_cutoff,
    min_potential,
    region_count,
    sharp_skip_threshold,
    verify_lower_bounds,
    verify_upper_bounds,
)
from collarspectra.errors import SpectrumIncompleteError
from collarspectra.params import ModelParams
from collarspectra.radial import (
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    assemble_radial,
    dense_oracle_eigs,
    mesh_nodes_for,
    sturm_count,
)

BC_NN = BoundaryCondition(NEUMANN, NEUMANN)
BC_DD = BoundaryCondition(DIRICHLET, DIRICHLET)

CRIT = ModelParams(n=1, beta=2.0)  # C = 3/4, critical
SUPER = ModelParams(n=1, beta=4.0)  # C = 2


# ---------------------------------------------------------------- skips


def test_j_cutoff_values():
    assert j_cutoff(CRIT, 0.5, 4.0) == 16.0  # lambda / B^beta
    assert j_cutoff(SUPER, 0.5, 4.0) == 64.0
    # B beyond x_max clamps to x_max
    assert j_cutoff(CRIT, 5.0, 4.0) == 4.0
    # B = 0 gives no tail skip
    assert j_cutoff(CRIT, 0.0, 4.0) == math.inf
    with pytest.raises(ValueError):
        j_cutoff(CRIT, 0.5, 0.0)


def test_min_potential_closed_form():
    # beta = 2, C = 3/4: interior minimizer x* = (0.75/mu)^(1/4)
    # at mu = 0.75, x* = 1 and V = 0.75 + 0.75
    assert min_potential(CRIT, 0.75, (0.0, 1.0)) == pytest.approx(1.5)
    # mu = 0: V decreasing, min at right end
    assert min_potential(CRIT, 0.0, (0.0, 0.5)) == pytest.approx(3.0)
    # right-clipped minimizer
    assert min_potential(CRIT, 0.75, (0.0, 0.5)) == pytest.approx(
        0.75 / 0.25 + 0.75 * 0.25
    )
    # left-clipped minimizer: mu = 7500 puts x* = 0.1 below a = 0.2
    assert min_potential(CRIT, 7500.0, (0.2, 1.0)) == pytest.approx(
        0.75 / 0.04 + 7500.0 * 0.04
    )


def test_min_potential_vectorized_matches_scalar():
    mus = np.array([0.0, 0.3, 0.75, 12.0, 7500.0])
    vec = min_potential(CRIT, mus, (0.1, 0.9))
    for mu, v in zip(mus, vec):
        assert v == min_potential(CRIT, float(mu), (0.1, 0.9))


def test_min_potential_is_true_minimum():
    # grid check: the closed form minorises the potential on a fine grid
    x = np.linspace(0.05, 1.0, 2000)
    for mu in (0.0, 0.4, 3.0, 250.0):
        v_grid = CRIT.c_beta / x**2 + mu * x**CRIT.beta
        v_min = min_potential(CRIT, mu, (0.05, 1.0))
        assert v_min <= v_grid.min() + 1e-12
        assert v_min == pytest.approx(v_grid.min(), rel=1e-5)


def test_sharp_skip_threshold_bracket():
    t = 50.0
    mu_star = sharp_skip_threshold(CRIT, (0.3, 1.0), t)
    assert min_potential(CRIT, mu_star, (0.3, 1.0)) >= t
    assert min_potential(CRIT, mu_star * (1.0 - 1e-9), (0.3, 1.0)) < t
    # threshold already met at mu = 0
    assert sharp_skip_threshold(CRIT, (0.0, 0.1), 10.0) == 0.0


def test_skipped_modes_count_zero():
    # the skip is sound: a skipped mode has zero eigenvalues below threshold
    t = 50.0
    interval = (0.3, 1.0)
    mu_star = sharp_skip_threshold(CRIT, interval, t)
    m = mesh_nodes_for(CRIT, interval, t)
    for mu in (mu_star, mu_star * 1.5, mu_star * 4.0):
        op = assemble_radial(CRIT, mu, interval, BC_NN, mesh_nodes=m)
        assert sturm_count(op, t) == 0


# ---------------------------------------------------------------- envelopes


def test_envelope_values():
    # critical: lambda^((n+1)/2) (1 + |log B|)
    assert envelope_value(CRIT, 100.0, 0.1, TAIL) == pytest.approx(
        100.0 * (1.0 + abs(math.log(0.1)))
    )
    # supercritical beta n = 4: lambda^1 * B^-1
    assert envelope_value(SUPER, 100.0, 0.1, TAIL) == pytest.approx(1000.0)
    assert envelope_value(SUPER, 100.0, 0.1, SHELL) == pytest.approx(1000.0)
    # core bound is exactly zero
    assert envelope_value(SUPER, 100.0, 0.1, CORE) == 0.0
    # whole-interval forms
    assert envelope_value(CRIT, 100.0, 0.0, TAIL) == pytest.approx(100.0 * math.log(100.0))
    assert envelope_value(SUPER, 100.0, 0.0, TAIL) == pytest.approx(100.0**1.5)


def test_region_definitions():
    p = CRIT
    assert Region(TAIL, 0.25).interval(p) == (0.25, 1.0)
    assert Region(SHELL, 0.25).interval(p) == (0.25, 0.5)
    assert Region(CORE, 0.25).interval(p) == (0.0, 0.25)
    with pytest.raises(ValueError):
        Region("annulus", 0.1)
    with pytest.raises(ValueError):
        Region(SHELL, 0.0)
    with pytest.raises(ValueError):
        Region(TAIL, 1.0).interval(p)  # B >= x_max
    with pytest.raises(ValueError):
        Region(SHELL, 0.6).interval(p)  # 2B > x_max
    with pytest.raises(ValueError):
        Region(CORE, 1.5).interval(p)


def test_b_rules():
    assert BRule("half-power", 0.5)(CRIT, 4.0) == 0.25
    assert BRule("fixed", 0.3)(CRIT, 1e9) == 0.3
    g = SUPER.gamma  # 1/4
    expect = 100.0 ** (-0.5 + g) / (4.0 / g + 3.0)
    assert BRule("bootstrap")(SUPER, 100.0) == pytest.approx(expect)
    with pytest.raises(ValueError):
        BRule("cubic", 1.0)
    with pytest.raises(ValueError):
        BRule("fixed", 0.0)


# ---------------------------------------------------------------- counts


def brute_force_count(params, spectrum, interval, bc, threshold):
    """Per-mode dense diagonalization over the whole spectrum, no skips."""
    m = mesh_nodes_for(params, interval, threshold)
    total = 0
    for mu in spectrum.mus:
        op = assemble_radial(params, float(mu), interval, bc, mesh_nodes=m)
        total += int(np.sum(dense_oracle_eigs(op) < threshold))
    return total


def test_region_count_matches_brute_force_tail():
    lam = 50.0
    spectrum = synthetic_weyl_spectrum(1, 600.0)
    region = Region(TAIL, 0.3, BC_NN)
    rep = region_count(CRIT, spectrum, region, lam)
    expect = brute_force_count(CRIT, spectrum, (0.3, 1.0), BC_NN, lam)
    assert rep.count == expect
    assert rep.lam == lam
    assert rep.j_used <= len(spectrum)
    assert rep.ratio == pytest.approx(rep.count / rep.bound_value)


def test_region_count_matches_brute_force_shell_dirichlet():
    lam = 80.0
    spectrum = synthetic_weyl_spectrum(1, 2500.0)
    region = Region(SHELL, 0.2, BC_DD)
    rep = region_count(CRIT, spectrum, region, lam)
    expect = brute_force_count(CRIT, spectrum, (0.2, 0.4), BC_DD, lam)
    assert rep.count == expect


def test_region_count_supercritical():
    lam = 60.0
    spectrum = synthetic_weyl_spectrum(1, 8000.0)
    rep = region_count(SUPER, spectrum, Region(TAIL, 0.25, BC_NN), lam)
    expect = brute_force_count(SUPER, spectrum, (0.25, 1.0), BC_NN, lam)
    assert rep.count == expect


def test_full_count_matches_brute_force():
    lam = 30.0
    spectrum = synthetic_weyl_spectrum(1, 350.0)
    expect = brute_force_count(CRIT, spectrum, (0.0, 1.0), BC_NN, lam)
    assert full_count(CRIT, spectrum, lam) == expect


def test_core_count_zero_at_triple_threshold():
    # C/B^2 >= 3 lambda on the core when B = lambda^-1/2 / 2, so even the
    # tripled threshold sees nothing (mu = 0 already clears it: no modes kept)
    for params in (CRIT, SUPER):
        for lam in (100.0, 1000.0):
            B = 0.5 / math.sqrt(lam)
            spectrum = synthetic_weyl_spectrum(1, 1.0)  # empty is enough
            rep = region_count(params, spectrum, Region(CORE, B, BC_NN), lam, threshold=3.0 * lam)
            assert rep.count == 0
            assert rep.bound_value == 0.0
            assert rep.ratio == 0.0


def test_incomplete_spectrum_raises():
    spectrum = synthetic_weyl_spectrum(1, 10.0)
    with pytest.raises(SpectrumIncompleteError):
        region_count(CRIT, spectrum, Region(TAIL, 0.3, BC_NN), 50.0)


def test_region_count_validation():
    spectrum = synthetic_weyl_spectrum(1, 600.0)
    with pytest.raises(ValueError):
        region_count(CRIT, spectrum, Region(TAIL, 0.3, BC_NN), -5.0)


# ---------------------------------------------------------------- sweeps


def test_verify_upper_bounds_reports():
    # the lambda = 200 tail keeps modes up to mu ~ lambda^2 / 3 ~ 13334
    spectrum = synthetic_weyl_spectrum(1, 15000.0)
    lams = [100.0, 200.0]
    reports = verify_upper_bounds(CRIT, spectrum, lams, BRule("half-power", 0.5))
    assert len(reports) == 4  # tail + shell per lambda
    kinds = {(r.lam, r.region.kind) for r in reports}
    assert kinds == {(100.0, TAIL), (100.0, SHELL), (200.0, TAIL), (200.0, SHELL)}
    for r in reports:
        assert r.region.bc == BC_NN
        assert r.count >= 0
        assert math.isfinite(r.ratio)


def test_verify_upper_window_rejects_large_B():
    spectrum = synthetic_weyl_spectrum(1, 4000.0)
    with pytest.raises(ValueError):
        verify_upper_bounds(CRIT, spectrum, [100.0], BRule("fixed", 0.9))
    with pytest.raises(ValueError):
        # below lambda^-1/2 / 2
        verify_upper_bounds(CRIT, spectrum, [100.0], BRule("half-power", 0.4))


def test_verify_lower_bounds_dirichlet_and_chat():
    spectrum = synthetic_weyl_spectrum(1, 40000.0)
    reports = verify_lower_bounds(CRIT, spectrum, [400.0], BRule("half-power", 4.0))
    assert len(reports) == 2
    for r in reports:
        assert r.region.bc == BC_DD
    # c_hat below sqrt(2C) is rejected
    with pytest.raises(ValueError):
        verify_lower_bounds(CRIT, spectrum, [400.0], BRule("half-power", 4.0), c_hat=1.0)
    # B rule violating B >= c_hat lambda^-1/2 is rejected
    with pytest.raises(ValueError):
        verify_lower_bounds(CRIT, spectrum, [400.0], BRule("half-power", 1.0))


def test_dirichlet_at_most_neumann_counts():
    lam = 60.0
    spectrum = synthetic_weyl_spectrum(1, 800.0)
    for kind, B in ((TAIL, 0.3), (SHELL, 0.25)):
        c_d = region_count(CRIT, spectrum, Region(kind, B, BC_DD), lam).count
        c_n = region_count(CRIT, spectrum, Region(kind, B, BC_NN), lam).count
        assert c_d <= c_n

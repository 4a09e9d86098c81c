import math
from itertools import product

import numpy as np
import pytest

from collarspectra.boundary import (
    FLAT_TORUS,
    SYNTHETIC,
    BoundarySpectrum,
    count_below,
    dump_csv,
    flat_torus_spectrum,
    load_csv,
    synthetic_weyl_spectrum,
)
from collarspectra.errors import BudgetExceededError


def brute_torus(radii, cutoff):
    """Direct lattice enumeration, independently of the vectorised path."""
    k_max = [int(math.floor(r * math.sqrt(cutoff))) + 1 for r in radii]
    vals = []
    for ks in product(*[range(-km, km + 1) for km in k_max]):
        mu = sum((k / r) ** 2 for k, r in zip(ks, radii))
        if mu < cutoff:
            vals.append(mu)
    return np.sort(np.array(vals))


def test_synthetic_n1_squares():
    sp = synthetic_weyl_spectrum(1, 10.0)
    assert sp.source == SYNTHETIC
    np.testing.assert_allclose(sp.mus, [1.0, 4.0, 9.0])


def test_synthetic_strictly_below_cutoff():
    # 9 = 3^2 sits exactly on the cutoff and must be excluded
    sp = synthetic_weyl_spectrum(1, 9.0)
    np.testing.assert_allclose(sp.mus, [1.0, 4.0])
    # n = 2 gives mu_j = j
    sp2 = synthetic_weyl_spectrum(2, 5.0)
    np.testing.assert_allclose(sp2.mus, [1.0, 2.0, 3.0, 4.0])


def test_synthetic_empty():
    assert len(synthetic_weyl_spectrum(1, 1.0)) == 0
    assert len(synthetic_weyl_spectrum(1, 0.0)) == 0


def test_synthetic_count_matches_weyl_exactly():
    # the counting function of j**(2/n) is floor-like: N(mu) = #{j : j^(2/n) < mu}
    sp = synthetic_weyl_spectrum(2, 1000.0)
    for mu in (1.0, 2.5, 999.0, 1000.0):
        expect = sum(1 for j in range(1, 1100) if j ** (2.0 / 2) < mu)
        assert count_below(sp, mu) == expect


def test_flat_torus_circle():
    # unit circle: eigenvalues k^2 with multiplicity 2 for k >= 1
    sp = flat_torus_spectrum([1.0], 5.0)
    assert sp.source == FLAT_TORUS
    np.testing.assert_allclose(sp.mus, [0.0, 1.0, 1.0, 4.0, 4.0])


def test_flat_torus_matches_brute_force():
    for radii in ([1.0], [1.0, 1.0], [0.5, 1.3], [2.0, 0.7, 1.1]):
        sp = flat_torus_spectrum(radii, 7.5)
        np.testing.assert_allclose(sp.mus, brute_torus(radii, 7.5), atol=1e-12)


def test_flat_torus_2d_multiplicities():
    # square torus r = (1,1): mu = j^2 + k^2; below 2.5 that is {0, 1 x4, 2 x4}
    sp = flat_torus_spectrum([1.0, 1.0], 2.5)
    np.testing.assert_allclose(sp.mus, [0.0] + [1.0] * 4 + [2.0] * 4)


def test_flat_torus_zero_cutoff():
    assert len(flat_torus_spectrum([1.0, 2.0], 0.0)) == 0


def test_count_below_refuses_beyond_cutoff():
    sp = synthetic_weyl_spectrum(1, 10.0)
    assert count_below(sp, 10.0) == 3
    assert count_below(sp, 4.0) == 1  # strict: 4 itself not counted
    assert count_below(sp, 4.0000001) == 2
    with pytest.raises(ValueError):
        count_below(sp, 10.5)


def test_budget_errors():
    with pytest.raises(BudgetExceededError):
        synthetic_weyl_spectrum(1, 1e9, max_entries=1000)
    with pytest.raises(BudgetExceededError):
        flat_torus_spectrum([1.0, 1.0], 1e8, max_entries=1000)


def test_validation_errors():
    with pytest.raises(ValueError):
        synthetic_weyl_spectrum(0, 10.0)
    with pytest.raises(ValueError):
        synthetic_weyl_spectrum(1, -1.0)
    with pytest.raises(ValueError):
        flat_torus_spectrum([], 10.0)
    with pytest.raises(ValueError):
        flat_torus_spectrum([1.0, -2.0], 10.0)
    with pytest.raises(ValueError):
        BoundarySpectrum(np.array([2.0, 1.0]), "file", 10.0)  # unsorted
    with pytest.raises(ValueError):
        BoundarySpectrum(np.array([-1.0, 1.0]), "file", 10.0)  # negative


def test_csv_round_trip(tmp_path):
    sp = flat_torus_spectrum([0.9, 1.7], 23.456)
    path = tmp_path / "modes.csv"
    dump_csv(sp, path)
    back = load_csv(path)
    assert back.source == FLAT_TORUS
    assert back.mu_cutoff == sp.mu_cutoff
    assert back.radii == sp.radii
    # bit-exact round trip through 17 significant digits
    assert np.array_equal(back.mus, sp.mus)
    # LF endings only
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().splitlines()[3] == "mu"

"""Eigenvalue counts near the degenerate boundary, split by region.

The count below lambda decomposes over boundary modes mu_j into 1-D
tridiagonal counts, and the mode-skip rules make the tail/shell/core split
cheap. Core regions at B = lambda^-1/2 / 2 hold nothing even at threshold
3*lambda; tails and dyadic shells track their closed-form envelopes.
"""

import numpy as np

from collarspectra import (
    BRule,
    ModelParams,
    Region,
    full_count,
    region_count,
    sharp_skip_threshold,
    synthetic_weyl_spectrum,
    verify_lower_bounds,
    verify_upper_bounds,
)

params = ModelParams(n=1, beta=4.0)  # C_beta = 2, effective dimension d = 3
lam_max = 2000.0

# one spectrum, complete for every threshold we use below
cutoff = sharp_skip_threshold(params, (0.0, 1.0), lam_max) * 1.000001
spectrum = synthetic_weyl_spectrum(params.n, cutoff)
print(f"boundary modes below mu = {cutoff:.3g}: {len(spectrum)}")

print("\nN(lambda) and the Weyl-scale ratio N / lambda^(d/2):")
for lam in np.geomspace(100.0, lam_max, 6):
    N = full_count(params, spectrum, lam)
    print(f"  lambda = {lam:8.1f}   N = {N:6d}   ratio = {N / lam**1.5:.4f}")

print("\ncore [0, B] at threshold 3*lambda, B = lambda^-1/2 / 2 (exact zeros):")
for lam in (100.0, 1000.0):
    B = 0.5 / np.sqrt(lam)
    rep = region_count(params, spectrum, Region("core", B), lam, threshold=3.0 * lam)
    print(f"  lambda = {lam:8.1f}   count = {rep.count}")

# Neumann counts under the envelope lambda * B^-1 (beta*n = 4 here)
print("\nupper sweep, B = 2 lambda^-1/2, count/envelope per region:")
for rep in verify_upper_bounds(params, spectrum, np.geomspace(100.0, 1000.0, 5), BRule("half-power", 2.0)):
    print(f"  lambda = {rep.lam:8.1f}  {rep.region.kind:5s}  count = {rep.count:5d}  ratio = {rep.ratio:.4f}")

# Dirichlet floors on the same grid; B = 4 lambda^-1/2 keeps shells nonempty
print("\nlower sweep, B = 4 lambda^-1/2 (Dirichlet):")
for rep in verify_lower_bounds(params, spectrum, np.geomspace(100.0, 1000.0, 5), BRule("half-power", 4.0)):
    print(f"  lambda = {rep.lam:8.1f}  {rep.region.kind:5s}  count = {rep.count:5d}  ratio = {rep.ratio:.4f}")

# The discrete localisation inequality, checked as an exact matrix statement:
# lambda * sum <v, chi^2 v>  <=  sum_j Tr(chi (s - T_j) chi)_+  +  sum <v, W v>
# with s = 2 lambda and W the (chi')^2 cell pairing. Holds for every cutoff
# below, with room; the margin rhs/lhs is what the asymptotic argument spends.

import numpy as np

from collarspectra import (
    ChiSpec,
    ModelParams,
    eval_rate,
    ims_relative_defect,
    localisation_check,
    sharp_skip_threshold,
    synthetic_weyl_spectrum,
    theoretical_rate,
)
from collarspectra.radial import BoundaryCondition, assemble_radial

params = ModelParams(n=1, beta=2.0)
lam_top = 1000.0
spectrum = synthetic_weyl_spectrum(
    1, sharp_skip_threshold(params, (0.0, 1.0), 2.0 * lam_top) * 1.000001
)

rate = theoretical_rate(params, 1.0)
for lam in np.geomspace(100.0, lam_top, 5):
    a_lam = eval_rate(rate, float(lam))
    cutoffs = [
        ("ramp A/2 -> A ", ChiSpec("ramp", a_lam / 2.0, a_lam)),
        ("smoothstep    ", ChiSpec("ramp", a_lam / 2.0, a_lam, "smoothstep")),
        ("power x^1     ", ChiSpec("power", power_p=2.0)),
        ("power x^(3/2) ", ChiSpec("power", power_p=3.0)),
    ]
    for name, chi in cutoffs:
        rep = localisation_check(params, spectrum, float(lam), chi, seed=1)
        print(f"lambda = {lam:7.1f}  {name}  lhs = {rep.lhs:9.4f}  rhs = {rep.rhs:9.4f}"
              f"  margin = {rep.rhs / rep.lhs:6.3f}  holds = {rep.holds}")
    print()

# the identity behind it: chi T chi - (chi^2 T + T chi^2)/2 equals the
# explicit commutator correction entrywise, to rounding
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(20):
    op = assemble_radial(
        params,
        float(rng.uniform(0, 30)),
        (0.0, 1.0),
        BoundaryCondition(),
        mesh_nodes=int(rng.integers(20, 100)),
    )
    chi = rng.uniform(0.0, 1.0, size=len(op))
    worst = max(worst, ims_relative_defect(op, chi))
print(f"worst IMS defect over 20 random (T, chi): {worst:.3e}")

"""Boundary manifold spectra: the mode sequence mu_1 <= mu_2 <= ...

Two sources: a synthetic Weyl-law sequence mu_j = j**(2/n) (unit Weyl
constant), and exact flat-torus lattice sums sum_i (k_i / r_i)^2 with
multiplicity. Spectra are plain sorted arrays, complete strictly below
mu_cutoff; completeness is what the mode-skip logic in `counting` relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .errors import BudgetExceededError

__all__ = [
    "BoundarySpectrum",
    "synthetic_weyl_spectrum",
    "flat_torus_spectrum",
    "count_below",
    "dump_csv",
    "load_csv",
]

SYNTHETIC = "synthetic-weyl"
FLAT_TORUS = "flat-torus"

DEFAULT_MAX_ENTRIES = 20_000_000


@dataclass(frozen=True)
class BoundarySpectrum:
    """Sorted boundary eigenvalues, complete strictly below mu_cutoff."""

    mus: np.ndarray = field(repr=False)
    source: str
    mu_cutoff: float
    radii: tuple[float, ...] | None = None

    def __post_init__(self):
        mus = np.asarray(self.mus, dtype=np.float64)
        mus.setflags(write=False)
        object.__setattr__(self, "mus", mus)
        if mus.size and (np.any(np.diff(mus) < 0) or mus[0] < 0):
            raise ValueError("boundary spectrum must be sorted and nonnegative")

    def __len__(self) -> int:
        return int(self.mus.size)


def synthetic_weyl_spectrum(
    n: int, mu_cutoff: float, max_entries: int = DEFAULT_MAX_ENTRIES
) -> BoundarySpectrum:
    """Sequence mu_j = j**(2/n), j = 1, 2, ..., strictly below mu_cutoff."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if mu_cutoff < 0:
        raise ValueError(f"mu_cutoff must be nonnegative, got {mu_cutoff!r}")
    # j^(2/n) < cutoff  <=>  j < cutoff^(n/2)
    j_max = int(math.ceil(mu_cutoff ** (n / 2.0))) - 1 if mu_cutoff > 0 else 0
    # ceil can land on the boundary; trim exact ties (strictly below).
    while j_max >= 1 and float(j_max) ** (2.0 / n) >= mu_cutoff:
        j_max -= 1
    if j_max > max_entries:
        raise BudgetExceededError(
            f"synthetic spectrum would hold {j_max} entries > budget {max_entries}"
        )
    j = np.arange(1, j_max + 1, dtype=np.float64)
    return BoundarySpectrum(j ** (2.0 / n), SYNTHETIC, float(mu_cutoff))


def flat_torus_spectrum(
    radii, mu_cutoff: float, max_entries: int = DEFAULT_MAX_ENTRIES
) -> BoundarySpectrum:
    """Flat-torus eigenvalues sum_i (k_i/r_i)^2 < mu_cutoff, with multiplicity."""
    radii = tuple(float(r) for r in radii)
    if not radii or any(r <= 0 for r in radii):
        raise ValueError(f"torus radii must be positive, got {radii!r}")
    if mu_cutoff < 0:
        raise ValueError(f"mu_cutoff must be nonnegative, got {mu_cutoff!r}")
    if mu_cutoff == 0:
        return BoundarySpectrum(np.empty(0), FLAT_TORUS, 0.0, radii)
    k_max = [int(math.floor(r * math.sqrt(mu_cutoff))) for r in radii]
    total = 1
    for km in k_max:
        total *= 2 * km + 1
    if total > max_entries:
        raise BudgetExceededError(
            f"torus enumeration box holds {total} lattice points > budget {max_entries}"
        )
    axes = [np.arange(-km, km + 1, dtype=np.float64) / r for km, r in zip(k_max, radii)]
    grid = np.meshgrid(*axes, indexing="ij")
    mus = np.zeros_like(grid[0])
    for g in grid:
        mus += g * g
    mus = np.sort(mus[mus < mu_cutoff].ravel())
    return BoundarySpectrum(mus, FLAT_TORUS, float(mu_cutoff), radii)


def count_below(spectrum: BoundarySpectrum, mu: float) -> int:
    """Number of boundary eigenvalues strictly below mu; needs mu <= cutoff."""
    if mu > spectrum.mu_cutoff:
        raise ValueError(
            f"count_below({mu:g}) beyond spectrum cutoff {spectrum.mu_cutoff:g}: "
            "spectrum is incomplete there"
        )
    return int(np.searchsorted(spectrum.mus, mu, side="left"))


def dump_csv(spectrum: BoundarySpectrum, path) -> None:
    """One-column CSV (header 'mu'), 17 significant digits, LF endings."""
    lines = [f"# source={spectrum.source}", f"# mu_cutoff={spectrum.mu_cutoff:.17g}"]
    if spectrum.radii is not None:
        lines.append("# radii=" + ",".join(f"{r:.17g}" for r in spectrum.radii))
    lines.append("mu")
    lines.extend(f"{m:.17g}" for m in spectrum.mus)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_csv(path) -> BoundarySpectrum:
    """Inverse of dump_csv; values round-trip bit-exactly at 17 digits."""
    source, cutoff, radii = "file", math.inf, None
    mus = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line.lstrip("# ").partition("=")
                if key == "source":
                    source = val
                elif key == "mu_cutoff":
                    cutoff = float(val)
                elif key == "radii":
                    radii = tuple(float(r) for r in val.split(","))
                continue
            if line == "mu":
                continue
            mus.append(float(line))
    return BoundarySpectrum(np.asarray(mus), source, cutoff, radii)

"""Jitted numerical core: Sturm pivot counting, bisection eigenvalue
extraction, inverse-iteration eigenvectors, and the mode-sum drivers.

All kernels are deterministic: loops run in fixed index order, random starts
come from a counter-based generator keyed by (seed, mode, index), and nothing
here depends on thread scheduling. Kernels are compiled nogil so sweeps can
run mode batches on a thread pool.

Counting convention: sturm counts are the inertia at shift - 0, i.e. ties at
the shift are NOT counted as below. Pivots smaller than pivmin in magnitude
are replaced by +pivmin, which implements exactly that convention.
"""

from __future__ import annotations

import numpy as np
from numba import njit

DBL_MIN = 2.2250738585072014e-308
EPS = 2.220446049250313e-16

# Status codes returned by the drivers.
OK = 0
BUDGET_EXCEEDED = 1
NO_CONVERGENCE = 2

# splitmix64 constants (counter-based start vectors for inverse iteration)
_U1 = np.uint64(0x9E3779B97F4A7C15)
_U2 = np.uint64(0xBF58476D1CE4E5B9)
_U3 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.1102230246251565e-16  # 2**-53


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * _U2
    z = (z ^ (z >> _S27)) * _U3
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True, inline="always")
def _rng_next(state):
    state = state + _U1
    return state, np.float64(_mix64(state) >> _S11) * _INV53


@njit(cache=True, nogil=True)
def pivmin_for(off2):
    m1 = off2.shape[0]
    top = 1.0
    for i in range(m1):
        if off2[i] > top:
            top = off2[i]
    return DBL_MIN * top


@njit(cache=True, nogil=True)
def sturm_count(diag, off2, shift, pivmin):
    """Number of eigenvalues strictly below shift (LDL^T inertia)."""
    m = diag.shape[0]
    count = 0
    d = diag[0] - shift
    if -pivmin < d < pivmin:
        d = pivmin
    if d < 0.0:
        count += 1
    for i in range(1, m):
        d = diag[i] - shift - off2[i - 1] / d
        if -pivmin < d < pivmin:
            d = pivmin
        if d < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def gershgorin_bounds(diag, off):
    m = diag.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(m):
        r = 0.0
        if i > 0:
            r += abs(off[i - 1])
        if i < m - 1:
            r += abs(off[i])
        if diag[i] - r < lo:
            lo = diag[i] - r
        if diag[i] + r > hi:
            hi = diag[i] + r
    return lo, hi


@njit(cache=True, nogil=True)
def norm_bound(diag, off):
    """Infinity-norm bound on the operator (>= spectral radius)."""
    m = diag.shape[0]
    top = 0.0
    for i in range(m):
        r = abs(diag[i])
        if i > 0:
            r += abs(off[i - 1])
        if i < m - 1:
            r += abs(off[i])
        if r > top:
            top = r
    return top


@njit(cache=True, nogil=True)
def bisect_ascending(diag, off2, lam, k, glo, pivmin, reltol, out):
    """Fill out[:k] with the k eigenvalues below lam, ascending.

    Caller guarantees k == sturm_count(diag, off2, lam, pivmin). Each
    eigenvalue is isolated by bisection on the count to relative tolerance
    reltol; brackets warm-start at the previous eigenvalue's lower edge.
    """
    lo_base = glo
    for idx in range(1, k + 1):
        lo = lo_base
        hi = lam
        for _ in range(160):
            width = hi - lo
            tol = reltol * max(abs(lo), abs(hi))
            if width <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(diag, off2, mid, pivmin) >= idx:
                hi = mid
            else:
                lo = mid
        out[idx - 1] = 0.5 * (lo + hi)
        lo_base = lo
    return k


@njit(cache=True, nogil=True)
def _factor_tridiag(dl, dd, du, du2, ipiv, pivmin):
    """LU with partial pivoting of a tridiagonal, LAPACK gttrf layout."""
    m = dd.shape[0]
    for i in range(m - 1):
        if abs(dd[i]) >= abs(dl[i]):
            ipiv[i] = 0
            if abs(dd[i]) < pivmin:
                dd[i] = pivmin if dd[i] >= 0.0 else -pivmin
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] = dd[i + 1] - fact * du[i]
            if i < m - 2:
                du2[i] = 0.0
        else:
            ipiv[i] = 1
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            tmp = du[i]
            du[i] = dd[i + 1]
            dd[i + 1] = tmp - fact * dd[i + 1]
            if i < m - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    if abs(dd[m - 1]) < pivmin:
        dd[m - 1] = pivmin if dd[m - 1] >= 0.0 else -pivmin


@njit(cache=True, nogil=True)
def _solve_factored(dl, dd, du, du2, ipiv, b):
    """Solve the factored system in place, direction-preserving.

    When the shift sits on an eigenvalue the last pivot is ~pivmin and naive
    back substitution overflows; the whole vector is rescaled instead
    whenever an entry would exceed ~1e140 (small enough that sums of squared
    entries stay finite; callers renormalize, so only the direction matters).
    """
    m = dd.shape[0]
    for i in range(m - 1):
        if ipiv[i] == 0:
            b[i + 1] -= dl[i] * b[i]
        else:
            tmp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = tmp - dl[i] * b[i + 1]
    big = 1e140
    for i in range(m - 1, -1, -1):
        numer = b[i]
        if i < m - 1:
            numer -= du[i] * b[i + 1]
        if i < m - 2:
            numer -= du2[i] * b[i + 2]
        absak = abs(dd[i])
        if absak < 1.0:
            an = abs(numer)
            if an > absak * big:
                s = (absak * big) / an
                for j in range(m):
                    b[j] *= s
                numer *= s
        b[i] = numer / dd[i]


@njit(cache=True, nogil=True)
def _residual_norm(diag, off, alpha, v):
    m = diag.shape[0]
    acc = 0.0
    for i in range(m):
        r = (diag[i] - alpha) * v[i]
        if i > 0:
            r += off[i - 1] * v[i - 1]
        if i < m - 1:
            r += off[i] * v[i + 1]
        acc += r * r
    return np.sqrt(acc)


@njit(cache=True, nogil=True)
def inverse_iteration(diag, off, alpha, qmat, c_from, c_to, seed, mode_id, eig_id, rtol, out):
    """Inverse iteration for the eigenvector at alpha, written into out.

    Orthogonalizes against qmat[c_from:c_to] (earlier members of a
    near-degenerate cluster). Returns the ell-2 residual norm achieved, or
    -1.0 on failure. At most 5 solves per shift attempt; the shift is nudged
    by a few ulps between attempts.
    """
    m = diag.shape[0]
    dl = np.empty(m - 1)
    du = np.empty(m - 1)
    dd = np.empty(m)
    du2 = np.empty(m - 2 if m > 2 else 0)
    ipiv = np.empty(m - 1, np.int8)
    scale = norm_bound(diag, off)
    if scale <= 0.0:
        scale = 1.0
    pivmin = DBL_MIN * max(1.0, scale)
    state = _mix64(np.uint64(seed) ^ _mix64(np.uint64(mode_id) * _U3 + np.uint64(eig_id) + _U1))
    target = rtol * scale
    pert = 0.0
    for _attempt in range(4):
        shift = alpha + pert
        for i in range(m - 1):
            dl[i] = off[i]
            du[i] = off[i]
        for i in range(m):
            dd[i] = diag[i] - shift
        _factor_tridiag(dl, dd, du, du2, ipiv, pivmin)
        nrm = 0.0
        for i in range(m):
            state, u = _rng_next(state)
            out[i] = u - 0.5
            nrm += out[i] * out[i]
        nrm = np.sqrt(nrm)
        for i in range(m):
            out[i] /= nrm
        for _it in range(5):
            _solve_factored(dl, dd, du, du2, ipiv, out)
            for r in range(c_from, c_to):
                dot = 0.0
                for i in range(m):
                    dot += out[i] * qmat[r, i]
                for i in range(m):
                    out[i] -= dot * qmat[r, i]
            nrm = 0.0
            for i in range(m):
                nrm += out[i] * out[i]
            nrm = np.sqrt(nrm)
            if not np.isfinite(nrm) or nrm == 0.0:
                break
            for i in range(m):
                out[i] /= nrm
            res = _residual_norm(diag, off, alpha, out)
            if res <= target:
                return res
        pert = (pert + 4.0 * EPS * max(abs(alpha), EPS * scale)) * 2.0
    return -1.0


@njit(cache=True, nogil=True, inline="always")
def _cluster_tol(e):
    return 1e-10 * max(1.0, abs(e))


@njit(cache=True, nogil=True)
def extract_eigenpairs(diag, off, off2, lam, pivmin, reltol, rtol_vec, seed, mode_id, eigs, qmat):
    """All eigenpairs below lam of one tridiagonal; returns (k, status).

    eigs[:k] ascending; qmat[:k] ell-2-normalized rows, cluster members
    mutually orthogonalized.
    """
    m = diag.shape[0]
    glo, _ = gershgorin_bounds(diag, off)
    k = sturm_count(diag, off2, lam, pivmin)
    if k == 0:
        return 0, OK
    bisect_ascending(diag, off2, lam, k, glo, pivmin, reltol, eigs)
    c0 = 0
    for idx in range(k):
        if idx > 0 and eigs[idx] - eigs[idx - 1] > _cluster_tol(eigs[idx]):
            c0 = idx
        res = inverse_iteration(diag, off, eigs[idx], qmat, c0, idx, seed, mode_id, idx, rtol_vec, qmat[idx])
        if res < 0.0:
            return idx, NO_CONVERGENCE
    return k, OK


@njit(cache=True, nogil=True)
def mode_counts(base_diag, xbeta, off2, mus, shift, pivmin):
    """Per-mode sturm counts for the family diag = base_diag + mu * xbeta."""
    m = base_diag.shape[0]
    nj = mus.shape[0]
    counts = np.empty(nj, np.int64)
    dj = np.empty(m)
    for j in range(nj):
        mu = mus[j]
        for i in range(m):
            dj[i] = base_diag[i] + mu * xbeta[i]
        counts[j] = sturm_count(dj, off2, shift, pivmin)
    return counts


@njit(cache=True, nogil=True)
def density_accumulate(base_diag, xbeta, off, off2, mus, lam, reltol, rtol_vec, seed, pair_budget, dens_out):
    """Sum of squared ell-2-normalized eigenvectors over all pairs below lam.

    dens_out accumulates sum_j sum_k v_{jk}^2 node by node, modes in ascending
    j order (fixed reduction order). Returns (npairs, status).
    """
    m = base_diag.shape[0]
    pivmin = pivmin_for(off2)
    dj = np.empty(m)
    eigs = np.empty(m)
    npairs = 0
    for j in range(mus.shape[0]):
        mu = mus[j]
        for i in range(m):
            dj[i] = base_diag[i] + mu * xbeta[i]
        k = sturm_count(dj, off2, lam, pivmin)
        if k == 0:
            continue
        if npairs + k > pair_budget:
            return npairs, BUDGET_EXCEEDED
        qmat = np.empty((k, m))
        got, status = extract_eigenpairs(dj, off, off2, lam, pivmin, reltol, rtol_vec, seed, j, eigs, qmat)
        if status != OK:
            return npairs + got, status
        for r in range(k):
            for i in range(m):
                dens_out[i] += qmat[r, i] * qmat[r, i]
        npairs += k
    return npairs, OK


@njit(cache=True, nogil=True)
def localisation_sums(base_diag, xbeta, off, off2, mus, lam, chi2, wcell, reltol, rtol_vec, seed, pair_budget):
    """LHS and derivative sums over eigenpairs below lam.

    lhs  = sum_pairs sum_i chi2[i] v_i^2
    der  = sum_pairs sum_cells wcell[i] (v_i^2 + v_{i+1}^2)/2
    Returns (lhs, der, npairs, status).
    """
    m = base_diag.shape[0]
    pivmin = pivmin_for(off2)
    dj = np.empty(m)
    eigs = np.empty(m)
    lhs = 0.0
    der = 0.0
    npairs = 0
    for j in range(mus.shape[0]):
        mu = mus[j]
        for i in range(m):
            dj[i] = base_diag[i] + mu * xbeta[i]
        k = sturm_count(dj, off2, lam, pivmin)
        if k == 0:
            continue
        if npairs + k > pair_budget:
            return lhs, der, npairs, BUDGET_EXCEEDED
        qmat = np.empty((k, m))
        got, status = extract_eigenpairs(dj, off, off2, lam, pivmin, reltol, rtol_vec, seed, j, eigs, qmat)
        if status != OK:
            return lhs, der, npairs + got, status
        for r in range(k):
            for i in range(m):
                lhs += chi2[i] * qmat[r, i] * qmat[r, i]
            for i in range(m - 1):
                der += wcell[i] * 0.5 * (qmat[r, i] * qmat[r, i] + qmat[r, i + 1] * qmat[r, i + 1])
        npairs += k
    return lhs, der, npairs, OK


@njit(cache=True, nogil=True)
def trace_plus_tridiag(diag, off, off2, reltol):
    """Sum of positive eigenvalues of one symmetric tridiagonal, by bisection."""
    m = diag.shape[0]
    pivmin = pivmin_for(off2)
    glo, ghi = gershgorin_bounds(diag, off)
    if ghi <= 0.0:
        return 0.0
    scale = max(abs(glo), abs(ghi))
    t0 = 1e-14 * scale
    n_below = sturm_count(diag, off2, t0, pivmin)
    npos = m - n_below
    if npos == 0:
        return 0.0
    total = 0.0
    lo_base = t0 * 0.5
    for r in range(npos):
        idx = n_below + 1 + r
        lo = lo_base
        hi = ghi
        for _ in range(160):
            width = hi - lo
            tol = reltol * max(abs(lo), abs(hi))
            if width <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(diag, off2, mid, pivmin) >= idx:
                hi = mid
            else:
                lo = mid
        total += 0.5 * (lo + hi)
        lo_base = lo
    return total


@njit(cache=True, nogil=True)
def trace_plus_modes(base_diag, xbeta, off, mus, shift, chi, reltol):
    """Sum over modes of the positive part of Tr(chi (shift - T_j) chi)."""
    m = base_diag.shape[0]
    md = np.empty(m)
    mo = np.empty(m - 1)
    mo2 = np.empty(m - 1)
    for i in range(m - 1):
        mo[i] = -chi[i] * chi[i + 1] * off[i]
        mo2[i] = mo[i] * mo[i]
    total = 0.0
    for j in range(mus.shape[0]):
        mu = mus[j]
        for i in range(m):
            md[i] = chi[i] * chi[i] * (shift - (base_diag[i] + mu * xbeta[i]))
        total += trace_plus_tridiag(md, mo, mo2, reltol)
    return total


def warmup():
    """Compile-touch every kernel on tiny inputs (one-time JIT cost)."""
    diag = np.array([2.0, 2.0, 2.0])
    off = np.array([-1.0, -1.0])
    off2 = off * off
    pm = pivmin_for(off2)
    sturm_count(diag, off2, 1.0, pm)
    gershgorin_bounds(diag, off)
    norm_bound(diag, off)
    out = np.empty(3)
    bisect_ascending(diag, off2, 3.9, sturm_count(diag, off2, 3.9, pm), -1.0, pm, 1e-12, out)
    eigs = np.empty(3)
    qmat = np.empty((3, 3))
    extract_eigenpairs(diag, off, off2, 3.9, pm, 1e-12, 1e-8, 7, 0, eigs, qmat)
    mus = np.array([1.0, 2.0])
    xb = np.array([0.1, 0.2, 0.3])
    mode_counts(diag, xb, off2, mus, 3.0, pm)
    dens = np.zeros(3)
    density_accumulate(diag, xb, off, off2, mus, 3.9, 1e-12, 1e-8, 7, 100, dens)
    chi2 = np.array([0.0, 0.5, 1.0])
    wc = np.array([1.0, 1.0])
    localisation_sums(diag, xb, off, off2, mus, 3.9, chi2, wc, 1e-12, 1e-8, 7, 100)
    trace_plus_tridiag(diag, off, off2, 1e-12)
    trace_plus_modes(diag, xb, off, mus, 10.0, np.array([0.3, 0.6, 1.0]), 1e-12)

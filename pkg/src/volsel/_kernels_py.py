"""Pure-numpy implementations of the numerical kernels.

Mirrors the interface of the compiled extension module so the wrappers in
kernels.py can use either backend interchangeably.  Everything here favors
clarity over speed; the compiled version is the fast path.
"""
import numpy as np


def _esym(vals, qmax):
    """Elementary symmetric polynomials e_0..e_qmax of `vals`.

    Uses the ascending one-value-at-a-time recurrence, which only adds
    products of nonnegative terms when the inputs are nonnegative.
    """
    e = np.zeros(qmax + 1)
    e[0] = 1.0
    for lam in vals:
        e[1:] += lam * e[:-1]
    return e


def _jacobi(a, v, tol_factor, max_sweeps):
    """Cyclic Jacobi sweeps on the symmetric matrix `a`, in place.

    On success the diagonal of `a` holds the eigenvalues (unsorted) and the
    return value is the number of sweeps used.  Returns -1 if the
    off-diagonal norm is still above tol_factor * ||a||_F after max_sweeps
    sweeps.  When `v` is given it accumulates the rotations, so its columns
    end up as the eigenvectors.
    """
    n = a.shape[0]
    if n < 2:
        return 0
    fro = float(np.sqrt(np.sum(a * a)))
    off_tol = tol_factor * fro
    thresh = off_tol / (2.0 * n)
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = float(np.sqrt(2.0 * np.sum(a[iu] ** 2)))
        if off <= off_tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                h = aqq - app
                g = 100.0 * abs(apq)
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                gp = a[:, p].copy()
                gq = a[:, q].copy()
                a[:, p] = gp - s * (gq + tau * gp)
                a[:, q] = gq + s * (gp - tau * gq)
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                h = t * apq
                a[p, p] = app - h
                a[q, q] = aqq + h
                a[p, q] = 0.0
                a[q, p] = 0.0
                if v is not None:
                    gp = v[:, p].copy()
                    gq = v[:, q].copy()
                    v[:, p] = gp - s * (gq + tau * gp)
                    v[:, q] = gq + s * (gp - tau * gq)
    return -1


def jacobi_eigvals(g, tol_factor, max_sweeps):
    """Eigenvalues of a symmetric matrix; returns (values, sweeps)."""
    a = np.array(g, dtype=np.float64, copy=True)
    sweeps = _jacobi(a, None, tol_factor, max_sweeps)
    return np.diagonal(a).copy(), sweeps


def jacobi_eigh(g, tol_factor, max_sweeps):
    """Eigenvalues and eigenvectors; returns (values, vectors, sweeps)."""
    a = np.array(g, dtype=np.float64, copy=True)
    v = np.eye(a.shape[0])
    sweeps = _jacobi(a, v, tol_factor, max_sweeps)
    return np.diagonal(a).copy(), v, sweeps


def row_elem_pair(b, g, q, i0, i1, zero_tol, tol_factor, max_sweeps, need_pair):
    """Row weights from the projected Gram matrix, for rows i0..i1-1.

    For each row computes rn2[i] = ||b_i||^2 and, unless that is <= zero_tol,
    the elementary symmetric values e_q (and e_{q+1} when need_pair is set)
    of the eigenvalues of (I - P_i) G (I - P_i), where P_i projects onto b_i
    and G is the Gram matrix of the full row set.

    Rows where only e_0 or e_1 is needed use closed forms (e_0 = 1 and
    e_1 = tr(G) - b_i' G b_i / ||b_i||^2) and skip the eigensolve.

    Returns (rn2, eq, eq1, fail) where fail is the first row index whose
    eigensolve did not converge, or -1.
    """
    mblk = i1 - i0
    rn2 = np.zeros(mblk)
    eq = np.zeros(mblk)
    eq1 = np.zeros(mblk)
    qmax = q + 1 if need_pair else q
    tr_g = float(np.trace(g))
    for idx in range(mblk):
        bi = b[i0 + idx]
        r2 = float(bi @ bi)
        rn2[idx] = r2
        if r2 <= zero_tol:
            continue
        if q == 0 and not need_pair:
            eq[idx] = 1.0
            continue
        gb = g @ bi
        alpha = float(bi @ gb)
        if q == 0:
            eq[idx] = 1.0
            eq1[idx] = max(tr_g - alpha / r2, 0.0)
            continue
        if q == 1 and not need_pair:
            eq[idx] = max(tr_g - alpha / r2, 0.0)
            continue
        c = g - (np.outer(gb, bi) + np.outer(bi, gb)) / r2 \
            + (alpha / (r2 * r2)) * np.outer(bi, bi)
        sweeps = _jacobi(c, None, tol_factor, max_sweeps)
        if sweeps < 0:
            return rn2, eq, eq1, i0 + idx
        w = np.clip(np.diagonal(c), 0.0, None)
        e = _esym(w, qmax)
        eq[idx] = e[q]
        if need_pair:
            eq1[idx] = e[q + 1]
    return rn2, eq, eq1, -1

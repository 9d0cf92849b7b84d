# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cyclic Jacobi eigensolver and the per-row Gram loop.

Same interface as _kernels_py; see that module for the reference semantics.
"""
import numpy as np

from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc


cdef int _jacobi(double* a, double* v, Py_ssize_t n, double tol_factor,
                 int max_sweeps) noexcept nogil:
    # Cyclic sweeps on the row-major symmetric buffer a, destroyed in place.
    # Diagonal holds the eigenvalues on exit; columns of v (when not NULL)
    # accumulate the eigenvectors.  Returns sweeps used, or -1.
    cdef Py_ssize_t p, q, r, sweep
    cdef double fro = 0.0
    cdef double off, off_tol, thresh
    cdef double apq, app, aqq, h, g, theta, t, c, s, tau, gp, gq
    if n < 2:
        return 0
    for p in range(n * n):
        fro += a[p] * a[p]
    fro = sqrt(fro)
    off_tol = tol_factor * fro
    thresh = off_tol / (2.0 * n)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p * n + q] * a[p * n + q]
        off = sqrt(2.0 * off)
        if off <= off_tol:
            return <int> sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p * n + q]
                if fabs(apq) <= thresh:
                    continue
                app = a[p * n + p]
                aqq = a[q * n + q]
                h = aqq - app
                g = 100.0 * fabs(apq)
                if fabs(h) + g == fabs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                for r in range(n):
                    gp = a[r * n + p]
                    gq = a[r * n + q]
                    a[r * n + p] = gp - s * (gq + tau * gp)
                    a[r * n + q] = gq + s * (gp - tau * gq)
                for r in range(n):
                    a[p * n + r] = a[r * n + p]
                    a[q * n + r] = a[r * n + q]
                h = t * apq
                a[p * n + p] = app - h
                a[q * n + q] = aqq + h
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                if v != NULL:
                    for r in range(n):
                        gp = v[r * n + p]
                        gq = v[r * n + q]
                        v[r * n + p] = gp - s * (gq + tau * gp)
                        v[r * n + q] = gq + s * (gp - tau * gq)
    return -1


def jacobi_eigvals(g, double tol_factor, int max_sweeps):
    """Eigenvalues of a symmetric matrix; returns (values, sweeps)."""
    a_arr = np.array(g, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    w_arr = np.empty(n, dtype=np.float64)
    if n == 0:
        return w_arr, 0
    cdef double[:, ::1] a = a_arr
    cdef double[::1] w = w_arr
    cdef int sweeps
    cdef Py_ssize_t i
    with nogil:
        sweeps = _jacobi(&a[0, 0], NULL, n, tol_factor, max_sweeps)
        for i in range(n):
            w[i] = a[i, i]
    return w_arr, sweeps


def jacobi_eigh(g, double tol_factor, int max_sweeps):
    """Eigenvalues and eigenvectors; returns (values, vectors, sweeps)."""
    a_arr = np.array(g, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    v_arr = np.eye(n)
    w_arr = np.empty(n, dtype=np.float64)
    if n == 0:
        return w_arr, v_arr, 0
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef double[::1] w = w_arr
    cdef int sweeps
    cdef Py_ssize_t i
    with nogil:
        sweeps = _jacobi(&a[0, 0], &v[0, 0], n, tol_factor, max_sweeps)
        for i in range(n):
            w[i] = a[i, i]
    return w_arr, v_arr, sweeps


def row_elem_pair(b, g, Py_ssize_t q, Py_ssize_t i0, Py_ssize_t i1,
                  double zero_tol, double tol_factor, int max_sweeps,
                  bint need_pair):
    """Row weights from the projected Gram matrix, for rows i0..i1-1.

    Same contract as the pure-python version.
    """
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    g_arr = np.ascontiguousarray(g, dtype=np.float64)
    cdef double[:, ::1] bv = b_arr
    cdef double[:, ::1] gv = g_arr
    cdef Py_ssize_t n = bv.shape[1]
    cdef Py_ssize_t mblk = i1 - i0
    rn2_arr = np.zeros(mblk)
    eq_arr = np.zeros(mblk)
    eq1_arr = np.zeros(mblk)
    if mblk == 0 or n == 0:
        return rn2_arr, eq_arr, eq1_arr, -1
    cdef double[::1] rn2 = rn2_arr
    cdef double[::1] eq = eq_arr
    cdef double[::1] eq1 = eq1_arr
    cdef Py_ssize_t qmax = q + 1 if need_pair else q
    cdef double* cbuf = <double*> malloc(n * n * sizeof(double))
    cdef double* gb = <double*> malloc(n * sizeof(double))
    cdef double* e = <double*> malloc((qmax + 1) * sizeof(double))
    if cbuf == NULL or gb == NULL or e == NULL:
        free(cbuf)
        free(gb)
        free(e)
        raise MemoryError
    cdef Py_ssize_t i, idx, r, cc, j
    cdef double r2, alpha, trg, lam, acc, val
    cdef Py_ssize_t fail = -1
    cdef int sweeps
    trg = 0.0
    for r in range(n):
        trg += gv[r, r]
    with nogil:
        for idx in range(mblk):
            i = i0 + idx
            r2 = 0.0
            for r in range(n):
                r2 += bv[i, r] * bv[i, r]
            rn2[idx] = r2
            if r2 <= zero_tol:
                continue
            if q == 0 and not need_pair:
                eq[idx] = 1.0
                continue
            alpha = 0.0
            for r in range(n):
                acc = 0.0
                for cc in range(n):
                    acc += gv[r, cc] * bv[i, cc]
                gb[r] = acc
                alpha += acc * bv[i, r]
            if q == 0:
                eq[idx] = 1.0
                val = trg - alpha / r2
                eq1[idx] = val if val > 0.0 else 0.0
                continue
            if q == 1 and not need_pair:
                val = trg - alpha / r2
                eq[idx] = val if val > 0.0 else 0.0
                continue
            for r in range(n):
                for cc in range(n):
                    cbuf[r * n + cc] = gv[r, cc] \
                        - (gb[r] * bv[i, cc] + bv[i, r] * gb[cc]) / r2 \
                        + alpha * bv[i, r] * bv[i, cc] / (r2 * r2)
            sweeps = _jacobi(cbuf, NULL, n, tol_factor, max_sweeps)
            if sweeps < 0:
                fail = i
                break
            for j in range(qmax + 1):
                e[j] = 0.0
            e[0] = 1.0
            for r in range(n):
                lam = cbuf[r * n + r]
                if lam < 0.0:
                    lam = 0.0
                for j in range(qmax, 0, -1):
                    e[j] += lam * e[j - 1]
            eq[idx] = e[q]
            if need_pair:
                eq1[idx] = e[q + 1]
    free(cbuf)
    free(gb)
    free(e)
    return rn2_arr, eq_arr, eq1_arr, fail

"""Backend selection and wrappers for the numerical kernels.

The compiled extension is preferred when it imported cleanly; otherwise the
numpy fallback is used.  Set VOLSEL_PURE_PYTHON=1 to force the fallback, and
VOLSEL_THREADS to change the default row-loop thread count.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ConvergenceFailure

# Jacobi eigensolver controls: stop once the off-diagonal norm drops below
# JACOBI_TOL * ||G||_F, give up after JACOBI_MAX_SWEEPS sweeps.
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

if os.environ.get("VOLSEL_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"


def _default_threads():
    env = os.environ.get("VOLSEL_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def eigvals_sym(g, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi, unsorted."""
    g = np.ascontiguousarray(g, dtype=np.float64)
    w, sweeps = _impl.jacobi_eigvals(g, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceFailure(
            f"jacobi eigensolve did not converge in {max_sweeps} sweeps "
            f"(n={g.shape[0]})")
    return w


def eigh_sym(g, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigenvalues and eigenvectors (columns) of a symmetric matrix."""
    g = np.ascontiguousarray(g, dtype=np.float64)
    w, v, sweeps = _impl.jacobi_eigh(g, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceFailure(
            f"jacobi eigensolve did not converge in {max_sweeps} sweeps "
            f"(n={g.shape[0]})")
    return w, v


def row_elem_pair(b, g, q, zero_tol, need_pair=False, threads=None,
                  tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Per-row weights over all rows of b; see the backend modules.

    Returns (rn2, eq, eq1) arrays of length m.  Rows are independent, so the
    compiled backend can split them across threads; results are concatenated
    in row order either way.
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    m = b.shape[0]
    if threads is None:
        threads = _default_threads()
    threads = min(threads, max(1, m))
    if threads <= 1 or BACKEND != "cython" or m < 2 * threads:
        rn2, eq, eq1, fail = _impl.row_elem_pair(
            b, g, q, 0, m, zero_tol, tol, max_sweeps, need_pair)
        if fail >= 0:
            raise ConvergenceFailure(
                f"jacobi eigensolve did not converge for row {fail}")
        return rn2, eq, eq1
    bounds = np.linspace(0, m, threads + 1).astype(int)
    jobs = [(int(bounds[t]), int(bounds[t + 1])) for t in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(
            lambda ab: _impl.row_elem_pair(
                b, g, q, ab[0], ab[1], zero_tol, tol, max_sweeps, need_pair),
            jobs))
    for part in parts:
        if part[3] >= 0:
            raise ConvergenceFailure(
                f"jacobi eigensolve did not converge for row {part[3]}")
    rn2 = np.concatenate([part[0] for part in parts])
    eq = np.concatenate([part[1] for part in parts])
    eq1 = np.concatenate([part[2] for part in parts])
    return rn2, eq, eq1

"""Dense matrix helpers: Gram matrices, row projections, norms, thin SVD.

The eigensolver behind everything here is the cyclic Jacobi kernel from
kernels.py, so no LAPACK-backed factorization is involved on this side of
the library.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, NonFinite, RankError, ZeroRow

# Rows whose squared norm is at or below ZERO_ROW_FACTOR * ||A||_F^2 count
# as zero rows.  Multi-round algorithms freeze this threshold against their
# original input so later rounds do not drift with the shrinking residual.
ZERO_ROW_FACTOR = 1e-12


def as_matrix(a):
    """Validate array-like input as a finite float64 2-D C-ordered matrix."""
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise DomainError(f"expected a 2-D matrix, got ndim={out.ndim}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise DomainError(f"matrix must be nonempty, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise NonFinite("matrix entries must be finite")
    return out


def zero_row_threshold(a):
    """Squared-norm cutoff below which a row of `a` counts as zero."""
    a = np.asarray(a, dtype=np.float64)
    return ZERO_ROW_FACTOR * float(np.sum(a * a))


def frobenius_norm(a):
    a = as_matrix(a)
    return float(np.sqrt(np.sum(a * a)))


def gram(a):
    """A^T A as a symmetric matrix."""
    a = as_matrix(a)
    g = a.T @ a
    return 0.5 * (g + g.T)


def project_out_row(b, i, zero_tol=None):
    """Project every row of b orthogonal to row i.

    Returns b - b b_i b_i^T / ||b_i||^2; row i of the result is numerically
    zero.  Raises ZeroRow when ||b_i||^2 is at or below zero_tol (default:
    the zero-row threshold of b itself).
    """
    b = as_matrix(b)
    if not 0 <= i < b.shape[0]:
        raise DomainError(f"row index {i} out of range for {b.shape[0]} rows")
    if zero_tol is None:
        zero_tol = zero_row_threshold(b)
    bi = b[i]
    r2 = float(bi @ bi)
    if r2 <= zero_tol:
        raise ZeroRow(f"row {i} has squared norm {r2:.3e} <= {zero_tol:.3e}")
    return b - np.outer(b @ bi, bi) / r2


def gram_after_projection(g, bi, zero_tol=None):
    """Gram matrix of project_out_row's result, from the current Gram matrix.

    Uses the rank-two update
    (I - P) G (I - P) = G - (g_b b^T + b g_b^T)/||b||^2 + (b^T g_b) b b^T/||b||^4
    with g_b = G b, which avoids touching the rectangular matrix.
    """
    g = as_matrix(g)
    if g.shape[0] != g.shape[1]:
        raise DomainError(f"Gram matrix must be square, got {g.shape}")
    bi = np.ascontiguousarray(bi, dtype=np.float64).ravel()
    if bi.size != g.shape[0]:
        raise DomainError(f"row has {bi.size} entries, Gram matrix is {g.shape}")
    if zero_tol is None:
        zero_tol = ZERO_ROW_FACTOR * float(np.trace(g))
    r2 = float(bi @ bi)
    if r2 <= zero_tol:
        raise ZeroRow(f"pivot row has squared norm {r2:.3e} <= {zero_tol:.3e}")
    gb = g @ bi
    alpha = float(bi @ gb)
    out = g - (np.outer(gb, bi) + np.outer(bi, gb)) / r2 \
        + (alpha / (r2 * r2)) * np.outer(bi, bi)
    return 0.5 * (out + out.T)


def project_onto_subset(a, s):
    """Project each row of a onto the span of the rows indexed by s.

    An orthonormal basis of the subset rows is built by modified
    Gram-Schmidt with a drop tolerance, so linearly dependent subsets are
    fine; the projection uses whatever independent directions remain.
    """
    a = as_matrix(a)
    idx = np.atleast_1d(np.asarray(s, dtype=int))
    if idx.size == 0:
        raise DomainError("subset must be nonempty")
    if idx.min() < 0 or idx.max() >= a.shape[0]:
        raise DomainError(f"subset indices out of range for {a.shape[0]} rows")
    drop_tol = np.sqrt(zero_row_threshold(a))
    basis = []
    for i in idx:
        v = a[i].copy()
        for _ in range(2):
            for qv in basis:
                v -= (qv @ v) * qv
        nv = float(np.sqrt(v @ v))
        if nv > drop_tol:
            basis.append(v / nv)
    if not basis:
        return np.zeros_like(a)
    qmat = np.array(basis)
    return (a @ qmat.T) @ qmat


@dataclass
class SVDFactors:
    """Thin SVD: s holds nonincreasing singular values, columns of U and V
    the corresponding left and right singular vectors."""
    s: np.ndarray
    U: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return int(self.s.size)

    def reconstruct(self):
        return (self.U * self.s) @ self.V.T


def thin_svd(a, drop_tol=None):
    """Thin SVD via Jacobi eigendecomposition of the Gram matrix.

    Works on A^T A when m >= n and transposes internally otherwise.
    Singular values at or below drop_tol (default: the square root of the
    zero-row threshold, i.e. 1e-6 ||A||_F) are dropped together with their
    vectors.  Left vectors are re-orthonormalized with modified
    Gram-Schmidt since forming A V / sigma alone loses orthogonality for
    small singular values.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        f = thin_svd(a.T, drop_tol=drop_tol)
        return SVDFactors(s=f.s, U=f.V, V=f.U)
    if drop_tol is None:
        drop_tol = np.sqrt(zero_row_threshold(a))
    w, v = kernels.eigh_sym(gram(a))
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    sig = np.sqrt(np.clip(w, 0.0, None))
    keep = sig > drop_tol
    sig = sig[keep]
    v = np.ascontiguousarray(v[:, keep])
    if sig.size == 0:
        return SVDFactors(s=sig, U=np.zeros((m, 0)), V=np.zeros((n, 0)))
    u = (a @ v) / sig
    for j in range(u.shape[1]):
        for _ in range(2):
            for l in range(j):
                u[:, j] -= (u[:, l] @ u[:, j]) * u[:, l]
        u[:, j] /= float(np.sqrt(u[:, j] @ u[:, j]))
    return SVDFactors(s=sig, U=u, V=v)


def numerical_rank(a):
    """Number of singular values above the drop tolerance."""
    return thin_svd(a).rank


def spectral_norm(a):
    """Largest singular value (no singular vectors computed)."""
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        a = a.T
    w = kernels.eigvals_sym(gram(a))
    top = float(np.max(w, initial=0.0))
    return float(np.sqrt(max(top, 0.0)))


def best_rank_k(a, k):
    """Best rank-k approximation by truncating the thin SVD."""
    a = as_matrix(a)
    f = thin_svd(a)
    if not 1 <= k <= f.rank:
        raise RankError(f"k={k} outside 1..numerical rank {f.rank}")
    return (f.U[:, :k] * f.s[:k]) @ f.V[:, :k].T

"""Characteristic polynomials of symmetric PSD matrices.

Coefficients are produced from eigenvalues through the elementary-symmetric
recurrence, which only ever adds products of nonnegative terms, so there is
no catastrophic cancellation for PSD inputs.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .matrix import as_matrix, gram


def elementary_symmetric(vals, kmax):
    """e_0..e_kmax of the given values.

    Feeds the values in one at a time with e_j += v * e_{j-1}; for
    nonnegative input every intermediate is nonnegative.
    """
    vals = np.asarray(vals, dtype=np.float64).ravel()
    e = np.zeros(kmax + 1)
    e[0] = 1.0
    for lam in vals:
        e[1:] += lam * e[:-1]
    return e


@dataclass(frozen=True)
class CharPolyCoeffs:
    """Coefficients c_0..c_n of det(xI - M) in ascending powers of x."""
    coeffs: np.ndarray

    @property
    def degree(self):
        return int(self.coeffs.size - 1)

    def coeff(self, j):
        """c_j, the coefficient of x^j."""
        if not 0 <= j <= self.degree:
            raise DomainError(f"coefficient index {j} outside 0..{self.degree}")
        return float(self.coeffs[j])

    def minor_sum(self, k):
        """|c_{n-k}|: the sum of all k-by-k principal minors for PSD M."""
        if not 0 <= k <= self.degree:
            raise DomainError(f"minor order {k} outside 0..{self.degree}")
        return abs(float(self.coeffs[self.degree - k]))


def charpoly_from_eigenvalues(lambdas):
    """Coefficients of prod_j (x - lambda_j) for nonnegative eigenvalues.

    Slightly negative values (roundoff from an eigensolver) are clipped to
    zero; anything below -1e-9 times the trace raises DomainError.
    """
    lams = np.asarray(lambdas, dtype=np.float64).ravel()
    tr = float(lams.sum())
    floor = -1e-9 * max(tr, 0.0)
    if np.any(lams < floor):
        raise DomainError(
            f"eigenvalue {lams.min():.3e} below PSD tolerance {floor:.3e}")
    lams = np.clip(lams, 0.0, None)
    n = lams.size
    e = elementary_symmetric(lams, n)
    coeffs = ((-1.0) ** np.arange(n + 1) * e)[::-1].copy()
    return CharPolyCoeffs(coeffs)


def charpoly_direct(m):
    """Characteristic polynomial of a symmetric PSD matrix.

    Eigenvalues come from the Jacobi kernel, then the coefficients from
    charpoly_from_eigenvalues.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DomainError(f"matrix must be square, got {m.shape}")
    atol = 1e-12 * float(np.max(np.abs(m), initial=0.0))
    if float(np.max(np.abs(m - m.T), initial=0.0)) > atol:
        raise DomainError("matrix is not symmetric")
    w = kernels.eigvals_sym(m)
    return charpoly_from_eigenvalues(w)


def subset_det_sum(a, k):
    """Sum of det(A_S A_S^T) over all row subsets S of size k.

    Equals |c_{n-k}(A^T A)|, so no enumeration is involved.
    """
    a = as_matrix(a)
    n = a.shape[1]
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside 1..{n}")
    return charpoly_direct(gram(a)).minor_sum(k)

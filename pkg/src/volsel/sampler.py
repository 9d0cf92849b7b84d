"""Volume sampling of row subsets.

A k-subset S is drawn with probability proportional to det(A_S A_S^T) by
picking one row per round; the per-round weights come from characteristic
polynomial coefficients of the projected Gram matrix.  Two interchangeable
subroutines compute those weights: one downdates the Gram matrix per
candidate row, the other reuses a single SVD of the current residual.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .charpoly import elementary_symmetric
from .errors import Degenerate, DomainError, RankError
from .matrix import (as_matrix, gram, gram_after_projection, project_out_row,
                     thin_svd, zero_row_threshold)

# A round counts as rank-degenerate when e_{q+1} of the Gram eigenvalues
# falls below RANK_TOL * lambda_max * e_q, i.e. the remaining rank cannot
# support q more picks beyond the current one.
RANK_TOL = 1e-12


@dataclass
class MarginalVector:
    """Per-row weights p_i for one sampling round (t of k)."""
    weights: np.ndarray
    t: int
    k: int

    def total(self):
        return float(self.weights.sum())

    def normalized(self):
        s = self.total()
        if s <= 0.0:
            raise Degenerate(f"all weights vanished at round {self.t}")
        return MarginalVector(self.weights / s, self.t, self.k)


@dataclass
class SelectionResult:
    """An ordered pick of row indices plus the audit trail that produced it.

    per_round_marginals holds one normalized MarginalVector per round.  The
    optional fields are filled by the variants that use them: expectations
    by the deterministic selector, sketch_dim/sketch_seed by the
    sketch-then-sample path.
    """
    indices: list
    per_round_marginals: list
    seed: Optional[int] = None
    expectations: Optional[list] = None
    sketch_dim: Optional[int] = None
    sketch_seed: Optional[int] = None


def _row_norms_sq(b):
    return np.einsum("ij,ij->i", b, b)


def _check_round(t, k):
    if not 1 <= k:
        raise DomainError(f"k must be positive, got {k}")
    if not 1 <= t <= k:
        raise DomainError(f"round {t} outside 1..{k}")


def marginals_gram(g, b, t, k, zero_tol=None, threads=None):
    """Round-t weights from the Gram matrix: p_i = ||b_i||^2 e_q(C_i^T C_i).

    Here q = k - t, C_i is b with every row projected orthogonal to row i,
    and e_q is the q-th elementary symmetric sum of eigenvalues (the
    absolute characteristic polynomial coefficient |c_{n-k+t}|).  Rows with
    squared norm at or below zero_tol get weight zero.  Raises Degenerate
    when the remaining rank cannot complete the subset.
    """
    b = as_matrix(b)
    _check_round(t, k)
    if zero_tol is None:
        zero_tol = zero_row_threshold(b)
    q = k - t
    rn2 = _row_norms_sq(b)
    if q == 0:
        p = np.where(rn2 > zero_tol, rn2, 0.0)
    else:
        g = as_matrix(g)
        lam = np.clip(kernels.eigvals_sym(g), 0.0, None)
        e = elementary_symmetric(lam, q + 1)
        if e[q + 1] <= RANK_TOL * float(lam.max(initial=0.0)) * e[q]:
            raise Degenerate(
                f"rank of the residual matrix is below {q + 1} at round {t}")
        _, eq, _ = kernels.row_elem_pair(b, g, q, zero_tol, need_pair=False,
                                         threads=threads)
        p = rn2 * eq
        p[rn2 <= zero_tol] = 0.0
    if not np.any(p > 0.0):
        raise Degenerate(f"all row weights vanished at round {t}")
    return MarginalVector(p, t, k)


def _leave_one_out(lam, c):
    """e_c of lam with entry j removed, for every j, via prefix/suffix sums."""
    r = lam.size
    pre = np.zeros((r + 1, c + 1))
    pre[0, 0] = 1.0
    for j in range(1, r + 1):
        pre[j] = pre[j - 1]
        pre[j, 1:] += lam[j - 1] * pre[j - 1, :-1]
    suf = np.zeros((r + 1, c + 1))
    suf[r, 0] = 1.0
    for j in range(r - 1, -1, -1):
        suf[j] = suf[j + 1]
        suf[j, 1:] += lam[j] * suf[j + 1, :-1]
    out = np.zeros(r)
    for a in range(c + 1):
        out += pre[:r, a] * suf[1:, c - a]
    return out


def marginals_svd(b, t, k, zero_tol=None, drop_tol=None):
    """Round-t weights from one SVD of b instead of per-row Gram downdates.

    With eigenvalues lam_j = sigma_j^2 and left vectors u_j of b,

        p_i = | ||b_i||^2 e_q(lam) - sum_j lam_j^2 (u_j)_i^2 e_{q-1}(lam \\ lam_j) |

    which is the same characteristic-polynomial coefficient the Gram
    subroutine computes, written against the spectrum of b itself.
    """
    b = as_matrix(b)
    _check_round(t, k)
    if zero_tol is None:
        zero_tol = zero_row_threshold(b)
    q = k - t
    rn2 = _row_norms_sq(b)
    if q == 0:
        p = np.where(rn2 > zero_tol, rn2, 0.0)
    else:
        f = thin_svd(b, drop_tol=drop_tol)
        if f.rank <= q:
            raise Degenerate(
                f"rank of the residual matrix is {f.rank} <= {q} at round {t}")
        lam = f.s ** 2
        eq = elementary_symmetric(lam, q)[q]
        loo = _leave_one_out(lam, q - 1)
        p = np.abs(rn2 * eq - (f.U ** 2) @ (lam * lam * loo))
        p[rn2 <= zero_tol] = 0.0
    if not np.any(p > 0.0):
        raise Degenerate(f"all row weights vanished at round {t}")
    return MarginalVector(p, t, k)


def _draw_index(rng, probs):
    # single uniform per round; inverse transform over the positive weights,
    # with a cut-point tie resolving to the lower index
    pos = np.flatnonzero(probs > 0.0)
    c = np.cumsum(probs[pos])
    u = rng.random() * c[-1]
    j = int(np.searchsorted(c, u, side="left"))
    if j >= pos.size:
        j = pos.size - 1
    return int(pos[j])


def volume_sample(a, k, seed=0, subroutine="gram", threads=None):
    """Draw an ordered k-tuple of distinct rows by volume sampling.

    The induced set distribution is P(S) proportional to det(A_S A_S^T).
    Each round draws one row from the current marginal vector, then
    projects the residual matrix orthogonal to it.  Identical inputs and
    seed give identical results.
    """
    a = as_matrix(a)
    m, n = a.shape
    if subroutine not in ("gram", "svd"):
        raise DomainError(f"unknown subroutine {subroutine!r}")
    if not 1 <= k <= min(m, n):
        raise RankError(f"k={k} outside 1..min(m, n)={min(m, n)}")
    zero_tol = zero_row_threshold(a)
    drop_tol = float(np.sqrt(zero_tol))
    rng = np.random.default_rng(seed)
    b = a.copy()
    g = None
    indices = []
    rounds = []
    for t in range(1, k + 1):
        q = k - t
        if subroutine == "gram":
            if q > 0 and g is None:
                g = gram(b)
            mv = marginals_gram(g, b, t, k, zero_tol=zero_tol,
                                threads=threads)
        else:
            mv = marginals_svd(b, t, k, zero_tol=zero_tol, drop_tol=drop_tol)
        mv = mv.normalized()
        i = _draw_index(rng, mv.weights)
        indices.append(i)
        rounds.append(mv)
        if t < k:
            if g is not None:
                g = gram_after_projection(g, b[i], zero_tol=zero_tol)
            b = project_out_row(b, i, zero_tol=zero_tol)
    return SelectionResult(indices=indices, per_round_marginals=rounds,
                           seed=seed)

"""Deterministic row selection by conditional expectation.

Each round scores every remaining row by the expected squared residual
that committing to it would leave behind, then keeps the row with the
smallest score.  The final subset S satisfies

    ||A - proj_S(A)||_F^2 <= (k + 1) ||A - A_k||_F^2

where A_k is the best rank-k approximation, and the corresponding
spectral-norm bound carries an extra (n - k) factor.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .charpoly import elementary_symmetric
from .errors import Degenerate, RankError
from .matrix import (as_matrix, gram, gram_after_projection, project_out_row,
                     zero_row_threshold)
from .sampler import MarginalVector, SelectionResult, _check_round

# Rows whose e_q coefficient is at or below COEFF_FACTOR times the
# unprojected e_q are infeasible: picking them would kill the remaining
# volume even though the row itself is nonzero.
COEFF_FACTOR = 1e-12


@dataclass
class ConditionalScore:
    """Score of one candidate row in one round.

    ratio is e_{q+1}(C_i^T C_i) / e_q(C_i^T C_i); the conditional expected
    residual after picking row i is (q + 1) times that.  Infeasible rows
    carry ratio = inf.
    """
    row: int
    ratio: float
    feasible: bool


def _score_arrays(g, b, q, zero_tol, threads):
    rn2 = np.einsum("ij,ij->i", b, b)
    _, eq, eq1 = kernels.row_elem_pair(b, g, q, zero_tol, need_pair=True,
                                       threads=threads)
    lam = np.clip(kernels.eigvals_sym(g), 0.0, None)
    scale = elementary_symmetric(lam, q)[q]
    feas = (rn2 > zero_tol) & (eq > COEFF_FACTOR * scale)
    return rn2, eq, eq1, feas


def conditional_scores(g, b, t, k, zero_tol=None, threads=None):
    """Score every row for round t of a deterministic k-row selection."""
    b = as_matrix(b)
    g = as_matrix(g)
    _check_round(t, k)
    if zero_tol is None:
        zero_tol = zero_row_threshold(b)
    q = k - t
    rn2, eq, eq1, feas = _score_arrays(g, b, q, zero_tol, threads)
    if not np.any(feas):
        raise Degenerate(f"no feasible row at round {t}")
    out = []
    for i in range(b.shape[0]):
        if feas[i]:
            out.append(ConditionalScore(i, float(eq1[i] / eq[i]), True))
        else:
            out.append(ConditionalScore(i, float("inf"), False))
    return out


def derandomized_select(a, k, threads=None):
    """Pick k rows deterministically with the (k + 1) residual guarantee.

    Runs the sampling recursion but replaces each random draw by the row
    minimizing the conditional expected residual.  The expectations list in
    the result records that expectation after each pick; it never
    increases from round to round.
    """
    a = as_matrix(a)
    m, n = a.shape
    if not 1 <= k <= min(m, n):
        raise RankError(f"k={k} outside 1..min(m, n)={min(m, n)}")
    zero_tol = zero_row_threshold(a)
    b = a.copy()
    g = gram(b)
    indices = []
    rounds = []
    expectations = []
    for t in range(1, k + 1):
        q = k - t
        rn2, eq, eq1, feas = _score_arrays(g, b, q, zero_tol, threads)
        cand = np.flatnonzero(feas)
        if cand.size == 0:
            raise Degenerate(f"no feasible row at round {t}")
        best = int(cand[0])
        for i in cand[1:]:
            # compare eq1[i]/eq[i] < eq1[best]/eq[best] without dividing;
            # strict < keeps the lowest index on ties
            if eq1[i] * eq[best] < eq1[best] * eq[i]:
                best = int(i)
        expectations.append(float((q + 1) * eq1[best] / eq[best]))
        p = rn2 * eq
        p[~feas] = 0.0
        rounds.append(MarginalVector(p, t, k).normalized())
        indices.append(best)
        if t < k:
            g = gram_after_projection(g, b[best], zero_tol=zero_tol)
            b = project_out_row(b, best, zero_tol=zero_tol)
    return SelectionResult(indices=indices, per_round_marginals=rounds,
                           expectations=expectations)

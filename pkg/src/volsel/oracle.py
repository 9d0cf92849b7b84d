"""Brute-force ground truth for the sampling and selection code.

Everything here goes through exhaustive enumeration and numpy.linalg
(LU determinants, SVD projectors, dense solves) rather than the Jacobi
kernels the library itself uses, so the two sides of every comparison
share no linear algebra.  Costs are exponential in k; the enumeration
guard keeps callers honest.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .charpoly import CharPolyCoeffs
from .errors import (Degenerate, DomainError, IllConditioned,
                     InfeasiblePrefix, TooLarge)
from .matrix import as_matrix

# Refuse to enumerate more than this many subsets.
ENUM_GUARD = 10 ** 6

# Subset determinants at or below DET_FLOOR_FACTOR times the largest one
# count as zero when building distributions.
DET_FLOOR_FACTOR = 1e-12


def subset_determinant(a, s):
    """det(A_S A_S^T) for the rows listed in s, clipped at zero."""
    a = as_matrix(a)
    idx = list(s)
    if len(idx) == 0:
        return 1.0
    if len(set(idx)) != len(idx):
        return 0.0
    rows = a[np.asarray(idx, dtype=np.intp)]
    return max(float(np.linalg.det(rows @ rows.T)), 0.0)


@dataclass
class SubsetDistribution:
    """Exact volume sampling target: P(S) proportional to det(A_S A_S^T)."""
    k: int
    entries: dict
    normalizer: float

    def prob(self, s):
        return self.entries.get(tuple(sorted(s)), 0.0)


def _check_guard(m, k):
    if math.comb(m, k) > ENUM_GUARD:
        raise TooLarge(f"C({m}, {k}) = {math.comb(m, k)} subsets "
                       f"exceeds the enumeration guard {ENUM_GUARD}")


def _all_subset_dets(a, k):
    m = a.shape[0]
    _check_guard(m, k)
    return {s: subset_determinant(a, s)
            for s in itertools.combinations(range(m), k)}


def brute_force_distribution(a, k):
    """Enumerate every k-subset and normalize the determinants."""
    a = as_matrix(a)
    m = a.shape[0]
    if not 1 <= k <= m:
        raise DomainError(f"k={k} outside 1..m={m}")
    dets = _all_subset_dets(a, k)
    top = max(dets.values())
    if top <= 0.0:
        raise Degenerate(f"every {k}-subset of rows is singular")
    floor = DET_FLOOR_FACTOR * top
    kept = {s: (d if d > floor else 0.0) for s, d in dets.items()}
    z = sum(kept.values())
    return SubsetDistribution(k=k,
                              entries={s: d / z for s, d in kept.items()},
                              normalizer=z)


def tv_distance(p, q):
    """Total variation distance between two subset distributions."""
    pe = getattr(p, "entries", p)
    qe = getattr(q, "entries", q)
    keys = set(pe) | set(qe)
    return 0.5 * sum(abs(pe.get(s, 0.0) - qe.get(s, 0.0)) for s in keys)


def _supersets(m, k, fixed):
    """All k-subsets of range(m) containing every index in fixed."""
    fixed = sorted(set(fixed))
    rest = [i for i in range(m) if i not in fixed]
    for extra in itertools.combinations(rest, k - len(fixed)):
        yield tuple(sorted(fixed + list(extra)))


def exact_marginal(a, prefix, i, k):
    """P(X_t = i | X_1..X_{t-1} = prefix) for ordered volume sampling.

    Every ordering of a set S is equally likely, so the conditional is

        sum over S containing prefix+{i} of det_S
        -------------------------------------------------
        (k - t + 1) * sum over S containing prefix of det_S

    with t = len(prefix) + 1.  Rows already in the prefix have probability
    zero; a prefix no k-subset extends raises InfeasiblePrefix.
    """
    a = as_matrix(a)
    m = a.shape[0]
    prefix = [int(j) for j in prefix]
    t = len(prefix) + 1
    if not 1 <= k <= m:
        raise DomainError(f"k={k} outside 1..m={m}")
    if not 1 <= t <= k:
        raise DomainError(f"prefix of length {t - 1} leaves no round for k={k}")
    if len(set(prefix)) != len(prefix):
        raise DomainError("prefix repeats a row")
    if any(not 0 <= j < m for j in prefix + [int(i)]):
        raise DomainError("row index out of range")
    _check_guard(m, k)
    i = int(i)
    if i in prefix:
        return 0.0
    dets = _all_subset_dets(a, k)
    top = max(dets.values())
    den = sum(dets[s] for s in _supersets(m, k, prefix))
    if den <= DET_FLOOR_FACTOR * top:
        raise InfeasiblePrefix(
            f"prefix {tuple(prefix)} has no nonsingular completion")
    num = sum(dets[s] for s in _supersets(m, k, prefix + [i]))
    return num / ((k - t + 1) * den)


def _project_rows(a, s):
    """Project every row of a onto the row space of a[s], via SVD."""
    idx = np.asarray(sorted(set(int(j) for j in s)), dtype=np.intp)
    rows = a[idx]
    u, sig, vt = np.linalg.svd(rows, full_matrices=False)
    if sig.size == 0 or sig[0] <= 0.0:
        return np.zeros_like(a)
    keep = sig > sig[0] * max(rows.shape) * np.finfo(np.float64).eps
    basis = vt[keep]
    return (a @ basis.T) @ basis


def expected_residual_given(a, prefix, k):
    """E[||A - proj_S(A)||_F^2 | S contains prefix] under volume sampling."""
    a = as_matrix(a)
    m = a.shape[0]
    prefix = [int(j) for j in prefix]
    if not 1 <= k <= m:
        raise DomainError(f"k={k} outside 1..m={m}")
    if len(prefix) > k or len(set(prefix)) != len(prefix):
        raise DomainError(f"bad prefix {tuple(prefix)} for k={k}")
    _check_guard(m, k)
    dets = _all_subset_dets(a, k)
    top = max(dets.values())
    den = 0.0
    num = 0.0
    for s in _supersets(m, k, prefix):
        d = dets[s]
        if d <= DET_FLOOR_FACTOR * top:
            continue
        den += d
        diff = a - _project_rows(a, s)
        num += d * float(np.sum(diff * diff))
    if den <= 0.0:
        raise InfeasiblePrefix(
            f"prefix {tuple(prefix)} has no nonsingular completion")
    return num / den


def expected_residual(a, k):
    """E[||A - proj_S(A)||_F^2] over volume-sampled k-subsets S."""
    return expected_residual_given(a, (), k)


@dataclass
class CheckResult:
    """Outcome of one identity check: scaled residual and the two sides."""
    ok: bool
    lhs: float
    rhs: float
    residual: float


def verify_det_division(a, s, t):
    """Check det(A_{S+T} A_{S+T}^T) = det(A_S A_S^T) det(B_T B_T^T).

    B is A with every row projected orthogonal to the span of the S rows.
    The residual is scaled by the larger side, floored at a small multiple
    of the Hadamard bound over the union so that near-singular unions,
    where both sides cancel to roundoff, still compare fairly.  S may be
    empty, in which case both sides reduce to det(A_T A_T^T).
    """
    a = as_matrix(a)
    s = [int(j) for j in s]
    t = [int(j) for j in t]
    if set(s) & set(t):
        raise DomainError(f"subsets overlap: {sorted(set(s) & set(t))}")
    union = s + t
    if any(not 0 <= j < a.shape[0] for j in union):
        raise DomainError("row index out of range")
    rows_u = a[np.asarray(union, dtype=np.intp)]
    lhs = float(np.linalg.det(rows_u @ rows_u.T)) if union else 1.0
    if s:
        rows_s = a[np.asarray(s, dtype=np.intp)]
        det_s = float(np.linalg.det(rows_s @ rows_s.T))
        b = a - _project_rows(a, s)
    else:
        det_s = 1.0
        b = a
    if t:
        rows_bt = b[np.asarray(t, dtype=np.intp)]
        det_bt = float(np.linalg.det(rows_bt @ rows_bt.T))
    else:
        det_bt = 1.0
    rhs = det_s * det_bt
    hadamard = 1.0
    for j in union:
        hadamard *= float(a[j] @ a[j])
    scale = max(abs(lhs), abs(rhs), 1e-4 * hadamard, np.finfo(np.float64).tiny)
    residual = abs(lhs - rhs) / scale
    return CheckResult(ok=residual <= 1e-8, lhs=lhs, rhs=rhs,
                       residual=residual)


def verify_matrix_det_lemma(m, u, v):
    """Check det(M + u v^T) = (1 + v^T M^{-1} u) det(M) for invertible M."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DomainError(f"M must be square, got shape {m.shape}")
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if u.size != m.shape[0] or v.size != m.shape[0]:
        raise DomainError("u and v must match the order of M")
    cond = float(np.linalg.cond(m))
    if not cond <= 1e12:
        raise IllConditioned(f"cond(M) = {cond:.3e} exceeds 1e12")
    det_m = float(np.linalg.det(m))
    lhs = float(np.linalg.det(m + np.outer(u, v)))
    rhs = (1.0 + float(v @ np.linalg.solve(m, u))) * det_m
    scale = max(abs(lhs), abs(rhs), 1e-6 * abs(det_m),
                np.finfo(np.float64).tiny)
    residual = abs(lhs - rhs) / scale
    return CheckResult(ok=residual <= 1e-8, lhs=lhs, rhs=rhs,
                       residual=residual)


def lower_bound_matrix(n, eps):
    """The n x (n+1) matrix whose best single row is sqrt(n)/2 off optimal.

    Row i is e_1 + eps * e_{i+2} (first column all ones, eps on the
    superdiagonal).  Its singular values are sqrt(n + eps^2) once and eps
    with multiplicity n - 1, and projecting onto any one row leaves
    spectral residual eps * sqrt(n + eps^2) / sqrt(1 + eps^2).
    """
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    a = np.zeros((n, n + 1))
    a[:, 0] = 1.0
    a[np.arange(n), np.arange(1, n + 1)] = eps
    return a


def block_lower_bound_matrix(n, eps, blocks):
    """Block-diagonal stack of `blocks` copies of lower_bound_matrix(n, eps)."""
    if blocks < 1:
        raise DomainError(f"blocks must be positive, got {blocks}")
    one = lower_bound_matrix(n, eps)
    out = np.zeros((blocks * n, blocks * (n + 1)))
    for b in range(blocks):
        out[b * n:(b + 1) * n, b * (n + 1):(b + 1) * (n + 1)] = one
    return out


def faddeev_leverrier(m):
    """Characteristic polynomial by the trace recurrence, no eigenvalues.

    Exact in exact arithmetic but cancellation-prone in floats, which is
    what makes it a useful independent cross-check for the eigenvalue
    path.  Guarded to small orders where float64 keeps it trustworthy.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape[1] != n:
        raise DomainError(f"matrix must be square, got shape {m.shape}")
    if n > 12:
        raise DomainError(f"order {n} exceeds the cross-check guard 12")
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    mk = m.copy()
    for j in range(1, n + 1):
        coeffs[n - j] = -float(np.trace(mk)) / j
        if j < n:
            mk = m @ (mk + coeffs[n - j] * np.eye(n))
    return CharPolyCoeffs(coeffs=coeffs)

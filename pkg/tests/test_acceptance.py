"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single "[criterion NN] PASS/FAIL: ..." line with the
measured numbers, then asserts.  Runtime budgets are enforced inside the
tests that state one.
"""

import itertools
import math
import time
from collections import Counter

import numpy as np
import pytest

from volsel import (approx_volume_sample, charpoly_direct, derandomized_select,
                    gram, gram_after_projection, marginals_gram, marginals_svd,
                    project_out_row, subset_det_sum, volume_sample,
                    zero_row_threshold)
from volsel.cli import RunConfig, load_fixture, run
from volsel.errors import Degenerate, InfeasiblePrefix, ZeroRow
from volsel.oracle import (brute_force_distribution, exact_marginal,
                           expected_residual, faddeev_leverrier,
                           lower_bound_matrix, tv_distance,
                           verify_det_division, verify_matrix_det_lemma)


@pytest.fixture
def report(capsys):
    def _report(num, ok, detail):
        line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}: {detail}"
        with capsys.disabled():
            print(line, flush=True)
        assert ok, line

    return _report


def np_tails(a, k):
    """(squared Frobenius tail past rank k, sigma_{k+1}) via numpy's SVD."""
    s = np.linalg.svd(a, compute_uv=False)
    tail = float(np.sum(s[k:] ** 2))
    nxt = float(s[k]) if k < s.size else 0.0
    return tail, nxt


def np_residual(a, rows):
    """a minus its projection onto the span of the given rows, via numpy."""
    sub = a[list(rows)]
    u, s, vt = np.linalg.svd(sub, full_matrices=False)
    v = vt[s > s[0] * max(sub.shape) * np.finfo(np.float64).eps]
    return a - a @ v.T @ v


def test_criterion_01(report):
    t0 = time.perf_counter()
    a = load_fixture()
    k = 3
    n_draws = 200_000
    exact = brute_force_distribution(a, k)
    counts = Counter()
    for j in range(n_draws):
        res = volume_sample(a, k, seed=j, subroutine="gram")
        counts[tuple(sorted(res.indices))] += 1
    emp = {s: c / n_draws for s, c in counts.items()}
    tv = tv_distance(exact, emp)
    dt = time.perf_counter() - t0
    ok = tv <= 0.02 and dt <= 60.0
    report(1, ok,
           f"tv={tv:.4f} (limit 0.02) over {n_draws} draws, {dt:.1f}s (limit 60s)")


def test_criterion_02(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    worst = 0.0
    checked = 0
    disagree = 0
    for inst in range(20):
        m = int(rng.integers(3, 9))
        n = int(rng.integers(2, 6))
        k = int(rng.integers(1, min(3, m, n) + 1))
        a = rng.standard_normal((m, n))
        if inst % 7 == 3:
            a[int(rng.integers(m))] = 0.0
        ztol = zero_row_threshold(a)
        for t_len in range(k):
            for prefix in itertools.combinations(range(m), t_len):
                try:
                    b = a.copy()
                    g = gram(b)
                    for r in prefix:
                        g = gram_after_projection(g, b[r], zero_tol=ztol)
                        b = project_out_row(b, r, zero_tol=ztol)
                    lib = marginals_gram(g, b, t_len + 1, k,
                                         zero_tol=ztol).normalized().weights
                except (ZeroRow, Degenerate):
                    lib = None
                try:
                    ex = np.array([exact_marginal(a, prefix, i, k)
                                   for i in range(m)])
                except InfeasiblePrefix:
                    ex = None
                if (lib is None) != (ex is None):
                    disagree += 1
                    continue
                if lib is None:
                    continue
                worst = max(worst, float(np.max(np.abs(lib - ex))))
                checked += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and disagree == 0 and dt <= 120.0
    report(2, ok,
           f"max |marginals_gram - exact_marginal| = {worst:.2e} "
           f"(limit 1e-9) over {checked} feasible prefixes, "
           f"{disagree} feasibility disagreements, {dt:.1f}s (limit 120s)")


def test_criterion_03(report):
    rng = np.random.default_rng(303)
    worst = 0.0
    rounds = 0
    for _ in range(50):
        m = int(rng.integers(5, 21))
        n = int(rng.integers(2, 11))
        k = int(rng.integers(1, min(5, m, n) + 1))
        a = rng.standard_normal((m, n))
        ztol = zero_row_threshold(a)
        dtol = math.sqrt(ztol)
        b = a.copy()
        g = gram(b)
        for t in range(1, k + 1):
            pg = marginals_gram(g, b, t, k, zero_tol=ztol).normalized().weights
            ps = marginals_svd(b, t, k, zero_tol=ztol,
                               drop_tol=dtol).normalized().weights
            worst = max(worst, float(np.max(np.abs(pg - ps))))
            rounds += 1
            i = int(rng.choice(m, p=pg))
            if t < k:
                g = gram_after_projection(g, b[i], zero_tol=ztol)
                b = project_out_row(b, i, zero_tol=ztol)
    ok = worst <= 1e-8
    report(3, ok,
           f"max per-entry |svd - gram| = {worst:.2e} (limit 1e-8) "
           f"over {rounds} rounds of 50 instances")


def test_criterion_04(report):
    rng = np.random.default_rng(404)
    fro_bad = spec_bad = 0
    worst_fro = worst_spec = 0.0
    for _ in range(100):
        m = int(rng.integers(5, 51))
        n = int(rng.integers(2, 21))
        k = int(rng.integers(1, min(8, m, n) + 1))
        a = rng.standard_normal((m, n))
        res = derandomized_select(a, k)
        diff = np_residual(a, res.indices)
        fro_sq = float(np.sum(diff * diff))
        spec_sq = float(np.linalg.svd(diff, compute_uv=False)[0]) ** 2
        tail, sig_next = np_tails(a, k)
        slack = 1e-9 * float(np.sum(a * a))
        fro_bound = (k + 1) * tail
        spec_bound = (k + 1) * (n - k) * sig_next ** 2
        if fro_sq > fro_bound * (1 + 1e-8) + slack:
            fro_bad += 1
        if spec_sq > spec_bound * (1 + 1e-8) + slack:
            spec_bad += 1
        if fro_bound > 0:
            worst_fro = max(worst_fro, fro_sq / fro_bound)
        if spec_bound > 0:
            worst_spec = max(worst_spec, spec_sq / spec_bound)
    ok = fro_bad == 0 and spec_bad == 0
    report(4, ok,
           f"frobenius bound violated {fro_bad}/100, spectral {spec_bad}/100 "
           f"(worst lhs/bound ratios {worst_fro:.3f}, {worst_spec:.3f})")


def test_criterion_05(report):
    rng = np.random.default_rng(505)
    worst = 0.0
    bound_bad = 0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(n, 10))
        k = int(rng.integers(1, n))
        a = rng.standard_normal((m, n))
        er = expected_residual(a, k)
        cp = charpoly_direct(gram(a))
        ident = (k + 1) * cp.minor_sum(k + 1) / cp.minor_sum(k)
        worst = max(worst, abs(er - ident) / ident)
        tail, _ = np_tails(a, k)
        if er > (k + 1) * tail * (1 + 1e-8):
            bound_bad += 1
    ok = worst <= 1e-8 and bound_bad == 0
    report(5, ok,
           f"max rel |expected_residual - (k+1)|c_(n-k-1)|/|c_(n-k)|| = "
           f"{worst:.2e} (limit 1e-8), bound violated {bound_bad}/20")


def test_criterion_06(report):
    rng = np.random.default_rng(606)
    dd_bad = md_bad = 0
    worst_dd = worst_md = 0.0
    for _ in range(1000):
        m = int(rng.integers(2, 9))
        n = int(rng.integers(1, 7))
        a = rng.standard_normal((m, n))
        perm = rng.permutation(m)
        s_len = int(rng.integers(0, min(2, m - 1) + 1))
        t_len = int(rng.integers(1, min(2, m - s_len) + 1))
        s = tuple(int(x) for x in perm[:s_len])
        t = tuple(int(x) for x in perm[s_len:s_len + t_len])
        r = verify_det_division(a, s, t)
        worst_dd = max(worst_dd, r.residual)
        dd_bad += 0 if r.ok else 1

        nn = int(rng.integers(2, 7))
        mm = rng.standard_normal((nn, nn))
        r2 = verify_matrix_det_lemma(mm, rng.standard_normal(nn),
                                     rng.standard_normal(nn))
        worst_md = max(worst_md, r2.residual)
        md_bad += 0 if r2.ok else 1
    for _ in range(25):
        m = int(rng.integers(4, 9))
        n = int(rng.integers(2, 7))
        a = rng.standard_normal((m, n))
        a[1] = a[0]
        r = verify_det_division(a, (0, 1), (2,))
        dd_bad += 0 if r.ok else 1
        nn = int(rng.integers(2, 7))
        r2 = verify_matrix_det_lemma(rng.standard_normal((nn, nn)),
                                     np.zeros(nn), rng.standard_normal(nn))
        md_bad += 0 if r2.ok else 1
    ok = dd_bad == 0 and md_bad == 0
    report(6, ok,
           f"det-division failures {dd_bad}, det-lemma failures {md_bad} "
           f"over 1000+25 instances each; max residuals {worst_dd:.2e}, "
           f"{worst_md:.2e} (limit 1e-8)")


def test_criterion_07(report):
    worst_ratio = worst_sig = 0.0
    min_margin = np.inf
    for n in (4, 25, 100):
        for eps in (0.01, 0.1):
            a = lower_bound_matrix(n, eps)
            s = np.linalg.svd(a, compute_uv=False)
            sig1 = math.sqrt(n + eps * eps)
            worst_sig = max(worst_sig, abs(s[0] - sig1) / sig1,
                            abs(s[1] - eps) / eps)
            expect = math.sqrt((n + eps * eps) / (1 + eps * eps))
            for i in range(n):
                diff = np_residual(a, (i,))
                ratio = float(np.linalg.svd(diff,
                                            compute_uv=False)[0]) / s[1]
                worst_ratio = max(worst_ratio, abs(ratio - expect) / expect)
                min_margin = min(min_margin, ratio - math.sqrt(n) / 2.0)
    ok = worst_ratio <= 1e-6 and worst_sig <= 1e-8 and min_margin >= 0.0
    report(7, ok,
           f"max rel error of spectral ratio {worst_ratio:.2e} (limit 1e-6), "
           f"sigma errors {worst_sig:.2e} (limit 1e-8), "
           f"min margin over sqrt(n)/2 = {min_margin:.3f}")


def test_criterion_08(report):
    rng = np.random.default_rng(808)
    worst_minor = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(n, 11))
        a = rng.standard_normal((m, n))
        for k in range(1, n + 1):
            fast = subset_det_sum(a, k)
            slow = 0.0
            for sub in itertools.combinations(range(m), k):
                rows = a[list(sub)]
                slow += float(np.linalg.det(rows @ rows.T))
            worst_minor = max(worst_minor, abs(fast - slow) / abs(slow))
    worst_cp = 0.0
    for _ in range(20):
        x = rng.standard_normal((8, 6))
        mm = gram(x)
        c1 = charpoly_direct(mm).coeffs
        c2 = faddeev_leverrier(mm).coeffs
        scale = np.abs(c2) + np.max(np.abs(c2))
        worst_cp = max(worst_cp, float(np.max(np.abs(c1 - c2) / scale)))
    ok = worst_minor <= 1e-8 and worst_cp <= 1e-7
    report(8, ok,
           f"max rel |subset_det_sum - exhaustive| = {worst_minor:.2e} "
           f"(limit 1e-8); max rel charpoly coeff gap = {worst_cp:.2e} "
           f"(limit 1e-7)")


def test_criterion_09(report):
    rng = np.random.default_rng(909)
    a = rng.standard_normal((50, 200))
    rn2 = np.einsum("ij,ij->i", a, a)
    p = rn2 / rn2.sum()
    sel = p >= 1.0 / (2 * a.shape[0])
    n_draws = 200_000

    def attempt(base):
        counts = np.zeros(a.shape[0])
        for j in range(n_draws):
            res = approx_volume_sample(a, 1, 0.25, seed=base + j)
            counts[res.indices[0]] += 1
        ratio = counts[sel] / (n_draws * p[sel])
        return float(ratio.min()), float(ratio.max())

    lo, hi = attempt(0)
    ok = lo >= 0.7 and hi <= 1.3
    if not ok:
        lo, hi = attempt(n_draws)
        ok = lo >= 0.7 and hi <= 1.3
    report(9, ok,
           f"empirical/exact frequency ratios in [{lo:.3f}, {hi:.3f}] "
           f"(window [0.7, 1.3]) for {int(sel.sum())}/{a.shape[0]} rows "
           f"with p >= 1/(2m), {n_draws} draws")


def test_criterion_10(report):
    rng = np.random.default_rng(1010)
    a = rng.standard_normal((2000, 200))
    t0 = time.perf_counter()
    res = volume_sample(a, 10, seed=7, subroutine="svd")
    dt = time.perf_counter() - t0
    code, rep = run(RunConfig(command="bench", seed=1))
    bench_ok = code == 0 and all(
        len(e["per_round"]) == rep["k"]
        and all(r["gram_s"] >= 0.0 and r["svd_s"] >= 0.0
                for r in e["per_round"])
        for e in rep["sizes"])
    ok = dt <= 300.0 and len(set(res.indices)) == 10 and bench_ok
    report(10, ok,
           f"2000x200 k=10 sample took {dt:.1f}s (limit 300s); "
           f"bench per-round timings for both subroutines: "
           f"{'present' if bench_ok else 'missing'}")

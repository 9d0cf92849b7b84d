"""Command-line front end.

Subcommands: sample, select, approx-sample, verify, lowerbound, bench.
Reports are JSON on stdout with sorted keys, so a fixed input and config
produce byte-identical output; `bench` is the one exception since it
reports wall-clock timings.  Row indices are 1-based in every report and
0-based everywhere inside the library.
"""
import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from . import oracle
from .errors import (DomainError, NonFinite, NonRectangular, ParseError,
                     VolselError)
from .matrix import (frobenius_norm, gram, gram_after_projection,
                     project_onto_subset, project_out_row, spectral_norm,
                     thin_svd, zero_row_threshold)
from .sampler import marginals_gram, marginals_svd, volume_sample
from .select import derandomized_select
from .sketch import approx_volume_sample

COMMANDS = ("sample", "select", "approx-sample", "verify", "lowerbound",
            "bench")

# A verify run fails when the empirical distribution sits farther than
# this from the enumerated one in total variation.
TV_THRESHOLD = 0.02

FIXTURE_NAME = "fixture_7x4.csv"


@dataclass
class RunConfig:
    """Everything one CLI invocation needs, with documented defaults."""
    command: str
    input: Optional[str] = None
    k: int = 1
    eps: float = 0.25
    seed: int = 0
    subroutine: str = "gram"
    trials: int = 200000
    output: str = "json"
    threads: Optional[int] = None
    n: int = 25
    c_dim: float = 4.0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.k < 1:
            raise DomainError(f"k must be at least 1, got {self.k}")
        if self.seed < 0:
            raise DomainError(f"seed must be nonnegative, got {self.seed}")
        if self.subroutine not in ("gram", "svd"):
            raise DomainError(f"unknown subroutine {self.subroutine!r}")
        if self.trials < 1:
            raise DomainError(f"trials must be positive, got {self.trials}")
        if self.output not in ("json", "csv"):
            raise DomainError(f"unknown output format {self.output!r}")


def _parse_csv(fh):
    rows = []
    rownums = []
    width = None
    header_allowed = True
    for rn, rec in enumerate(csv.reader(fh), start=1):
        if not rec or all(c.strip() == "" for c in rec):
            continue
        vals = []
        bad = None
        for cn, cell in enumerate(rec, start=1):
            try:
                vals.append(float(cell.strip()))
            except ValueError:
                bad = (cn, cell.strip())
                break
        if bad is not None:
            if header_allowed:
                # first populated row may be a header; skip it once
                header_allowed = False
                continue
            raise ParseError(f"cannot parse {bad[1]!r} as a number",
                             rn, bad[0])
        header_allowed = False
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise NonRectangular(
                f"row {rn} has {len(vals)} values, expected {width}")
        rows.append(vals)
        rownums.append(rn)
    if not rows:
        raise ParseError("no numeric data rows", 1, 1)
    a = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise NonFinite(
            f"non-finite value at row {rownums[int(i)]}, column {int(j) + 1}")
    return a


def ingest_csv(path):
    """Read a rectangular numeric CSV, skipping one optional header row."""
    with open(path, newline="") as fh:
        return _parse_csv(fh)


def load_fixture():
    """The bundled 7x4 demo matrix used by `verify` when no input is given."""
    ref = resources.files("volsel").joinpath("data").joinpath(FIXTURE_NAME)
    with ref.open("r", newline="") as fh:
        return _parse_csv(fh)


def _one_based(indices):
    return [int(i) + 1 for i in indices]


def _marginal_lists(result):
    return [mv.weights.tolist() for mv in result.per_round_marginals]


def _require_input(cfg):
    if cfg.input is None:
        raise DomainError(f"{cfg.command} requires --input")
    return ingest_csv(cfg.input)


def _run_sample(cfg):
    a = _require_input(cfg)
    res = volume_sample(a, cfg.k, seed=cfg.seed, subroutine=cfg.subroutine,
                        threads=cfg.threads)
    report = {
        "command": "sample",
        "k": cfg.k,
        "seed": cfg.seed,
        "subroutine": cfg.subroutine,
        "indices": _one_based(res.indices),
        "per_round_marginals": _marginal_lists(res),
    }
    return 0, report


def _tail_spectrum(a, k):
    """(sum of squared singular values past k, sigma_{k+1}) of a."""
    f = thin_svd(a)
    fro_sq = frobenius_norm(a) ** 2
    head = float(np.sum(f.s[:k] ** 2))
    tail_sq = max(fro_sq - head, 0.0)
    sig_next = float(f.s[k]) if k < f.s.size else 0.0
    return tail_sq, sig_next


def _run_select(cfg):
    a = _require_input(cfg)
    res = derandomized_select(a, cfg.k, threads=cfg.threads)
    n = a.shape[1]
    diff = a - project_onto_subset(a, res.indices)
    fro_res_sq = float(np.sum(diff * diff))
    spec_res_sq = spectral_norm(diff) ** 2
    tail_sq, sig_next = _tail_spectrum(a, cfg.k)
    fro_bound = (cfg.k + 1) * tail_sq
    spec_bound = (cfg.k + 1) * (n - cfg.k) * sig_next ** 2
    slack = 1e-9 * frobenius_norm(a) ** 2
    fro_ok = fro_res_sq <= fro_bound * (1.0 + 1e-8) + slack
    spec_ok = spec_res_sq <= spec_bound * (1.0 + 1e-8) + slack
    report = {
        "command": "select",
        "k": cfg.k,
        "indices": _one_based(res.indices),
        "expectations": [float(e) for e in res.expectations],
        "frobenius_residual_sq": fro_res_sq,
        "frobenius_bound": fro_bound,
        "frobenius_certified": bool(fro_ok),
        "spectral_residual_sq": spec_res_sq,
        "spectral_bound": spec_bound,
        "spectral_certified": bool(spec_ok),
    }
    return (0 if fro_ok and spec_ok else 2), report


def _run_approx_sample(cfg):
    a = _require_input(cfg)
    res = approx_volume_sample(a, cfg.k, cfg.eps, seed=cfg.seed,
                               c_dim=cfg.c_dim, threads=cfg.threads)
    report = {
        "command": "approx-sample",
        "k": cfg.k,
        "eps": cfg.eps,
        "seed": cfg.seed,
        "sketch_dim": int(res.sketch_dim),
        "sketch_seed": int(res.sketch_seed),
        "sketched": bool(res.sketch_dim < a.shape[1]),
        "indices": _one_based(res.indices),
        "per_round_marginals": _marginal_lists(res),
    }
    return 0, report


def _run_verify(cfg):
    a = load_fixture() if cfg.input is None else ingest_csv(cfg.input)
    dist = oracle.brute_force_distribution(a, cfg.k)
    counts = {}
    for j in range(cfg.trials):
        res = volume_sample(a, cfg.k, seed=cfg.seed + j,
                            subroutine=cfg.subroutine, threads=cfg.threads)
        s = tuple(sorted(res.indices))
        counts[s] = counts.get(s, 0) + 1
    empirical = {s: c / cfg.trials for s, c in counts.items()}
    tv = oracle.tv_distance(dist.entries, empirical)
    table = [{
        "subset": _one_based(s),
        "exact": float(dist.entries[s]),
        "empirical": float(empirical.get(s, 0.0)),
    } for s in sorted(dist.entries)]
    ok = tv <= TV_THRESHOLD
    report = {
        "command": "verify",
        "k": cfg.k,
        "seed": cfg.seed,
        "subroutine": cfg.subroutine,
        "trials": cfg.trials,
        "tv_distance": float(tv),
        "tv_threshold": TV_THRESHOLD,
        "passed": bool(ok),
        "table": table,
    }
    return (0 if ok else 2), report


def _run_lowerbound(cfg):
    a = oracle.lower_bound_matrix(cfg.n, cfg.eps)
    n, eps = cfg.n, cfg.eps
    f = thin_svd(a)
    sigma1 = float(f.s[0])
    sigma2 = float(f.s[1])
    sigma1_exact = math.sqrt(n + eps ** 2)
    sigma2_exact = eps
    ratios = []
    for i in range(n):
        diff = a - project_onto_subset(a, [i])
        ratios.append(spectral_norm(diff) / sigma2)
    min_ratio = min(ratios)
    ratio_exact = math.sqrt(n + eps ** 2) / math.sqrt(1 + eps ** 2)
    bound = math.sqrt(n) / 2.0
    ok = (abs(sigma1 - sigma1_exact) <= 1e-8 * sigma1_exact
          and abs(sigma2 - sigma2_exact) <= 1e-8 * sigma2_exact
          and min_ratio >= bound * (1.0 - 1e-9))
    report = {
        "command": "lowerbound",
        "n": n,
        "eps": eps,
        "sigma1": sigma1,
        "sigma1_closed_form": sigma1_exact,
        "sigma2": sigma2,
        "sigma2_closed_form": sigma2_exact,
        "ratios": [float(r) for r in ratios],
        "ratio_closed_form": ratio_exact,
        "min_ratio": float(min_ratio),
        "bound": bound,
        "passed": bool(ok),
    }
    return (0 if ok else 2), report


def _run_bench(cfg):
    sizes = [(120, 8), (120, 16), (120, 32), (120, 64)]
    k = 4
    entries = []
    for m, n in sizes:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, n]))
        a = rng.standard_normal((m, n))
        zero_tol = zero_row_threshold(a)
        draw = np.random.default_rng(cfg.seed)
        b = a.copy()
        g = gram(b)
        per_round = []
        gram_total = 0.0
        svd_total = 0.0
        for t in range(1, k + 1):
            t0 = time.perf_counter()
            mv = marginals_gram(g, b, t, k, zero_tol=zero_tol,
                                threads=cfg.threads)
            t1 = time.perf_counter()
            marginals_svd(b, t, k, zero_tol=zero_tol)
            t2 = time.perf_counter()
            gram_total += t1 - t0
            svd_total += t2 - t1
            per_round.append({"round": t, "gram_s": t1 - t0,
                              "svd_s": t2 - t1})
            w = mv.weights
            pos = np.flatnonzero(w > 0)
            c = np.cumsum(w[pos])
            i = int(pos[min(int(np.searchsorted(c, draw.random() * c[-1])),
                            pos.size - 1)])
            if t < k:
                g = gram_after_projection(g, b[i], zero_tol=zero_tol)
                b = project_out_row(b, i, zero_tol=zero_tol)
        entries.append({"m": m, "n": n, "per_round": per_round,
                        "gram_total_s": gram_total, "svd_total_s": svd_total})
    crossover = None
    for e in entries:
        if e["svd_total_s"] < e["gram_total_s"]:
            crossover = e["n"]
            break
    report = {
        "command": "bench",
        "k": k,
        "seed": cfg.seed,
        "sizes": entries,
        "crossover_cols": crossover,
    }
    return 0, report


_RUNNERS = {
    "sample": _run_sample,
    "select": _run_select,
    "approx-sample": _run_approx_sample,
    "verify": _run_verify,
    "lowerbound": _run_lowerbound,
    "bench": _run_bench,
}


def run(cfg):
    """Execute one command; returns (exit_code, report dict)."""
    if cfg.output == "csv" and cfg.command not in ("sample", "select",
                                                   "approx-sample"):
        raise DomainError(
            f"csv output only lists selected indices; {cfg.command} "
            "has none")
    return _RUNNERS[cfg.command](cfg)


def _add_common(p, *, need_input, input_required=True):
    if need_input:
        p.add_argument("--input", required=input_required,
                       help="path to a numeric CSV matrix")
    p.add_argument("--k", type=int, default=1, help="subset size (default 1)")
    p.add_argument("--seed", type=int, default=0,
                   help="RNG seed (default 0)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap; falls back to VOLSEL_THREADS, then 1")
    p.add_argument("--output", choices=("json", "csv"), default="json",
                   help="report format (default json)")


def build_parser():
    top = argparse.ArgumentParser(
        prog="volsel",
        description="Volume sampling and deterministic row selection.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw k rows by volume sampling")
    _add_common(p, need_input=True)
    p.add_argument("--subroutine", choices=("gram", "svd"), default="gram")

    p = sub.add_parser("select", help="deterministic k-row selection")
    _add_common(p, need_input=True)

    p = sub.add_parser("approx-sample",
                       help="volume sampling on a Gaussian sketch")
    _add_common(p, need_input=True)
    p.add_argument("--eps", type=float, default=0.25,
                   help="sketch accuracy in (0, 0.5] (default 0.25)")
    p.add_argument("--c-dim", type=float, default=4.0, dest="c_dim",
                   help="sketch dimension constant (default 4.0)")

    p = sub.add_parser("verify",
                       help="compare sampler frequencies to enumeration")
    _add_common(p, need_input=True, input_required=False)
    p.add_argument("--subroutine", choices=("gram", "svd"), default="gram")
    p.add_argument("--trials", type=int, default=200000,
                   help="number of draws (default 200000)")

    p = sub.add_parser("lowerbound",
                       help="evaluate the hard instance for k = 1 selection")
    p.add_argument("--n", type=int, default=25, help="rows (default 25)")
    p.add_argument("--eps", type=float, default=0.1,
                   help="superdiagonal entry (default 0.1)")
    p.add_argument("--output", choices=("json", "csv"), default="json")

    p = sub.add_parser("bench",
                       help="time both marginal subroutines per round")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--output", choices=("json", "csv"), default="json")
    return top


def _config_from_args(args):
    fields = ("input", "k", "eps", "seed", "subroutine", "trials",
              "threads", "output", "n", "c_dim")
    kw = {f: getattr(args, f) for f in fields if hasattr(args, f)}
    if kw.get("threads") is None and os.environ.get("VOLSEL_THREADS"):
        kw["threads"] = int(os.environ["VOLSEL_THREADS"])
    return RunConfig(command=args.command, **kw)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        code, report = run(cfg)
    except (VolselError, OSError, ValueError) as exc:
        print(f"volsel: error: {exc}", file=sys.stderr)
        return 1
    if cfg.output == "csv":
        print(",".join(str(i) for i in report["indices"]))
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())

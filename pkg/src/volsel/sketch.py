"""Column sketching for approximate volume sampling.

A Gaussian random projection R with d = O(k^2 log m / eps^2) columns
compresses A to AR while distorting every k-subset volume by at most a
(1 +- eps)-ish factor, so volume sampling the sketch approximates volume
sampling A at a fraction of the cost when n is large.
"""
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RankError
from .matrix import as_matrix
from .sampler import volume_sample


@dataclass
class ProjectionConfig:
    """Shape and seeding of one Gaussian sketch.

    d grows as c_dim * k^2 * ln(m) / eps^2; c_dim = 4.0 keeps the subset
    volume distortion within the eps budget with comfortable margin.
    """
    k: int
    eps: float
    m: int
    c_dim: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be positive, got {self.k}")
        if not 0.0 < self.eps <= 0.5:
            raise DomainError(f"eps must lie in (0, 0.5], got {self.eps}")
        if self.m < 1:
            raise DomainError(f"m must be positive, got {self.m}")
        if self.seed < 0:
            raise DomainError(f"seed must be nonnegative, got {self.seed}")
        if self.c_dim <= 0.0:
            raise DomainError(f"c_dim must be positive, got {self.c_dim}")

    @property
    def d(self):
        raw = self.c_dim * self.k ** 2 * math.log(self.m) / self.eps ** 2
        return max(1, int(math.ceil(raw)))


def gaussian_sketch(a, cfg, row_block=None):
    """Multiply a by an n x d Gaussian matrix with entries N(0, 1/d).

    Column j of the projection is generated from an independent stream
    keyed by (cfg.seed, j), so the sketch is reproducible entry for entry
    regardless of how the multiply is blocked.  row_block only controls
    memory use for tall inputs; it never changes the result.
    """
    a = as_matrix(a)
    m, n = a.shape
    if cfg.m != m:
        raise DomainError(f"config expects {cfg.m} rows, matrix has {m}")
    d = cfg.d
    r = np.empty((n, d))
    for j in range(d):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, j]))
        r[:, j] = rng.standard_normal(n)
    r /= math.sqrt(d)
    if row_block is None or row_block >= m:
        return a @ r
    parts = [a[lo:lo + row_block] @ r for lo in range(0, m, row_block)]
    return np.vstack(parts)


def approx_volume_sample(a, k, eps, seed=0, c_dim=4.0, threads=None):
    """Volume sample a sketch of a instead of a itself.

    When the sketch would be at least as wide as a, the exact sampler runs
    unchanged (same seed, same draws).  A sketch that loses too much rank
    for k picks is retried once with the next sketch seed; the sampling
    seed is never touched, so the randomness of the draw stays attributable
    to `seed`.
    """
    a = as_matrix(a)
    m, n = a.shape
    if not 1 <= k <= min(m, n):
        raise RankError(f"k={k} outside 1..min(m, n)={min(m, n)}")
    cfg = ProjectionConfig(k=k, eps=eps, m=m, c_dim=c_dim, seed=seed)
    d = cfg.d
    if d >= n:
        res = volume_sample(a, k, seed=seed, subroutine="gram",
                            threads=threads)
        return dataclasses.replace(res, sketch_dim=d, sketch_seed=seed)
    last = None
    for sketch_seed in (seed, seed + 1):
        sk = gaussian_sketch(a, dataclasses.replace(cfg, seed=sketch_seed))
        try:
            res = volume_sample(sk, k, seed=seed, subroutine="gram",
                                threads=threads)
        except RankError as exc:
            last = exc
            continue
        return dataclasses.replace(res, sketch_dim=d,
                                   sketch_seed=sketch_seed)
    raise RankError(
        f"sketch lost rank for k={k} twice (seeds {seed}, {seed + 1})"
    ) from last

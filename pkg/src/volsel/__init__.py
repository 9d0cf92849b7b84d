"""Volume sampling and deterministic row selection for dense matrices.

The sampler draws k-subsets of rows with probability proportional to
det(A_S A_S^T); the deterministic selector derandomizes it and certifies
||A - proj_S(A)||_F^2 <= (k+1) ||A - A_k||_F^2.  The `oracle` submodule
holds the brute-force enumeration counterparts used to verify both.
"""
from .charpoly import (CharPolyCoeffs, charpoly_direct,
                       charpoly_from_eigenvalues, elementary_symmetric,
                       subset_det_sum)
from .errors import (ConvergenceFailure, Degenerate, DomainError,
                     IllConditioned, InfeasiblePrefix, NonFinite,
                     NonRectangular, ParseError, RankError, TooLarge,
                     VolselError, ZeroRow)
from .kernels import BACKEND
from .matrix import (SVDFactors, best_rank_k, frobenius_norm, gram,
                     gram_after_projection, numerical_rank,
                     project_onto_subset, project_out_row, spectral_norm,
                     thin_svd, zero_row_threshold)
from .sampler import (MarginalVector, SelectionResult, marginals_gram,
                      marginals_svd, volume_sample)
from .select import ConditionalScore, conditional_scores, derandomized_select
from .sketch import ProjectionConfig, approx_volume_sample, gaussian_sketch

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CharPolyCoeffs",
    "ConditionalScore",
    "ConvergenceFailure",
    "Degenerate",
    "DomainError",
    "IllConditioned",
    "InfeasiblePrefix",
    "MarginalVector",
    "NonFinite",
    "NonRectangular",
    "ParseError",
    "ProjectionConfig",
    "RankError",
    "SVDFactors",
    "SelectionResult",
    "TooLarge",
    "VolselError",
    "ZeroRow",
    "approx_volume_sample",
    "best_rank_k",
    "charpoly_direct",
    "charpoly_from_eigenvalues",
    "conditional_scores",
    "derandomized_select",
    "elementary_symmetric",
    "frobenius_norm",
    "gaussian_sketch",
    "gram",
    "gram_after_projection",
    "marginals_gram",
    "marginals_svd",
    "numerical_rank",
    "project_onto_subset",
    "project_out_row",
    "spectral_norm",
    "subset_det_sum",
    "thin_svd",
    "volume_sample",
    "zero_row_threshold",
    "__version__",
]

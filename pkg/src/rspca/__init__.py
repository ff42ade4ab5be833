"""Row-sparse PCA solvers: primal search, certified dual bounds, scaling.

The problem: maximize Tr(V^T A V) over d-by-r matrices V with orthonormal
columns and at most k nonzero rows. ``primal`` finds feasible solutions,
``dualbound`` certifies upper bounds through a branch-and-bound over a convex
relaxation, ``submatrix`` scales the bound to larger d, ``oracle`` solves
tiny instances exactly.
"""

from .errors import (GuardError, InputError, NotPsdError, NumericalError,
                     ParseError)
from .geometry import (MembershipResult, OrthonormalSparseFactor,
                       cr1_membership_approx, cr2_membership, rho_constants,
                       sample_feasible)
from .kernels import BACKEND, available_backends
from .instances import (SampleMatrix, SpikedSpec, draw_spiked_samples,
                        generate_spiked_instance, load_matrix,
                        population_spiked, sample_covariance, save_dense_csv,
                        top_diagonal_subinstance)
from .linalg import (EigenDecomposition, SymmetricMatrix, eigendecompose,
                     psd_sqrt, submatrix, top_r_eigsum)
from .oracle import brute_force_opt, local_search_exact_neighborhood
from .primal import (PrimalSolution, SwapScores, exact_support_objective,
                     greedy_search, multistart, proxy_objective, swap_scores)
from .dualbound import (CipModel, DualBoundReport, SpectralPrep, baseline1,
                        branch_and_bound, build_cip_model,
                        check_affine_guarantee, pla_additive_term,
                        pla_gap_bound, solve_node_relaxation, spectral_prep)
from .submatrix_bound import (CrossCheckResult, SubmatrixPlan,
                              cross_term_bound, proposition_cross_check,
                              submatrix_upper_bound)

__all__ = [
    "BACKEND",
    "CipModel",
    "CrossCheckResult",
    "DualBoundReport",
    "EigenDecomposition",
    "GuardError",
    "InputError",
    "MembershipResult",
    "NotPsdError",
    "NumericalError",
    "OrthonormalSparseFactor",
    "ParseError",
    "PrimalSolution",
    "SampleMatrix",
    "SpectralPrep",
    "SpikedSpec",
    "SubmatrixPlan",
    "SwapScores",
    "SymmetricMatrix",
    "available_backends",
    "baseline1",
    "branch_and_bound",
    "brute_force_opt",
    "build_cip_model",
    "check_affine_guarantee",
    "cr1_membership_approx",
    "cr2_membership",
    "cross_term_bound",
    "draw_spiked_samples",
    "eigendecompose",
    "exact_support_objective",
    "generate_spiked_instance",
    "greedy_search",
    "load_matrix",
    "local_search_exact_neighborhood",
    "multistart",
    "pla_additive_term",
    "pla_gap_bound",
    "population_spiked",
    "proposition_cross_check",
    "proxy_objective",
    "psd_sqrt",
    "rho_constants",
    "sample_covariance",
    "sample_feasible",
    "save_dense_csv",
    "solve_node_relaxation",
    "spectral_prep",
    "submatrix",
    "submatrix_upper_bound",
    "swap_scores",
    "top_diagonal_subinstance",
    "top_r_eigsum",
]

__version__ = "0.1.0"

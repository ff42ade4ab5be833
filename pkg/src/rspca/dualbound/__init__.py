"""Certified upper bounds: spectral prep, LP relaxation model, search."""

from .model import CipModel, build_cip_model, lift_factor
from .prep import (
    GuaranteeCheck,
    SpectralPrep,
    baseline1,
    check_affine_guarantee,
    pla_additive_term,
    pla_gap_bound,
    spectral_prep,
)
from .solver import (
    CutPool,
    DualBoundReport,
    IncumbentRecord,
    NodeResult,
    branch_and_bound,
    root_windows,
    solve_node_relaxation,
)

__all__ = [
    "CipModel",
    "CutPool",
    "DualBoundReport",
    "GuaranteeCheck",
    "IncumbentRecord",
    "NodeResult",
    "SpectralPrep",
    "baseline1",
    "branch_and_bound",
    "build_cip_model",
    "check_affine_guarantee",
    "lift_factor",
    "pla_additive_term",
    "pla_gap_bound",
    "root_windows",
    "solve_node_relaxation",
    "spectral_prep",
]

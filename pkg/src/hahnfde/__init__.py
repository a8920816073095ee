"""Infinite systems of Caputo fractional BVPs in the generalized Hahn space h_d."""

from .bvp import (
    BvpSpec,
    ConstantsReport,
    RhsFamily,
    bracket,
    check_existence,
    double_integral_crosscheck,
    green_apply,
    kappa,
    kappa_abs,
)
from .fraccalc import Grid, caputo_monomial, gamma, kernel_weights, rl_integral
from .mnc import (
    MncEstimate,
    VectorFamily,
    hausdorff_mnc,
    hu_constants,
    hu_experiment,
    mnc_axiom_suite,
    unit_sphere_family,
)
from .picard import SolveReport, picard_solve, refinement_study, residual, truncation_study
from .problems import PROBLEMS, make_spec
from .seqspace import HahnVector, WeightSequence, ak_defect, forward_difference, hahn_norm, section

__version__ = "0.1.0"

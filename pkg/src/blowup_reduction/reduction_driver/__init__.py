"""The finite-dimensional reduced problem: constrained critical points of the
weight, the d-equation and its sign dichotomy, and error-term scaling fits."""

from blowup_reduction.reduction_driver.critical_search import (
    DegreeEvidence,
    boundary_critical_search,
    candidate_at,
    classify,
    stability_degree_test,
    tangential_gradient,
    tangential_hessian,
)
from blowup_reduction.reduction_driver.dichotomy import (
    ConcentrationCandidate,
    DichotomyResult,
    EpsilonSide,
    Stability,
    admissible_side,
    reduced_gradient_d,
    solve_d0,
)
from blowup_reduction.reduction_driver.inequalities import InequalityProbe, power_inequality_probe
from blowup_reduction.reduction_driver.scaling import (
    FitRejected,
    ModelGeometry,
    ScalingFit,
    error_scaling_fit,
    fit_norms,
    geometric_grid,
    remainder_bound_check,
    term_norms,
    validate_epsilon_grid,
)

__all__ = [
    "ConcentrationCandidate",
    "DegreeEvidence",
    "DichotomyResult",
    "EpsilonSide",
    "FitRejected",
    "InequalityProbe",
    "ModelGeometry",
    "ScalingFit",
    "Stability",
    "admissible_side",
    "boundary_critical_search",
    "candidate_at",
    "classify",
    "error_scaling_fit",
    "fit_norms",
    "geometric_grid",
    "reduced_gradient_d",
    "remainder_bound_check",
    "solve_d0",
    "stability_degree_test",
    "tangential_gradient",
    "tangential_hessian",
    "term_norms",
    "validate_epsilon_grid",
    "power_inequality_probe",
]

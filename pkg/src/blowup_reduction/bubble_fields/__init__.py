from blowup_reduction.bubble_fields.bubble import (
    Bubble,
    bubble_eval,
    bubble_gradient,
    bubble_residual,
    kernel_eval,
    kernel_residual,
    laplacian_fd,
    richardson_ratio,
)
from blowup_reduction.bubble_fields.corrector import (
    CorrectorField,
    corrector_boundary_flux_check,
    corrector_eval,
    corrector_normal_derivative_fd,
    neumann_datum,
    projection_expansion,
)

__all__ = [
    "Bubble",
    "CorrectorField",
    "bubble_eval",
    "bubble_gradient",
    "bubble_residual",
    "corrector_boundary_flux_check",
    "corrector_eval",
    "corrector_normal_derivative_fd",
    "kernel_eval",
    "kernel_residual",
    "laplacian_fd",
    "neumann_datum",
    "projection_expansion",
    "richardson_ratio",
]

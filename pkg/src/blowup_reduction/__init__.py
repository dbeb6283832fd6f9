"""Numerical engine for boundary concentration of the anisotropic Neumann
problem near higher critical Sobolev exponents.

The package evaluates the bubble ansatz and its half-space corrector,
boundary charts and the weighted curvature, the closed-form constants of the
reduced-energy expansion, and the sign logic selecting the admissible side of
the exponent perturbation.
"""

__version__ = "0.1.0"


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature does not reach its tolerance."""

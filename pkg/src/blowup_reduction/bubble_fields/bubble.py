"""The standard bubble U_{delta,xi} on R^n and its linearization kernels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from blowup_reduction import DomainError
from blowup_reduction.special_functions import bubble_normalization


@dataclass(frozen=True)
class Bubble:
    """U(x) = alpha_n delta^((n-2)/2) / (delta^2 + |x - xi|^2)^((n-2)/2)."""

    n: int
    delta: float = 1.0
    xi: np.ndarray = field(default=None)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 5:
            raise DomainError(f"bubble dimension must be an integer >= 5, got {self.n}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        xi = np.zeros(self.n) if self.xi is None else np.asarray(self.xi, dtype=float)
        if xi.shape != (self.n,):
            raise DomainError(f"center must have shape ({self.n},), got {xi.shape}")
        xi = xi.copy()
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

    @property
    def alpha(self) -> float:
        return bubble_normalization(self.n)

    @property
    def p(self) -> float:
        return (self.n + 2.0) / (self.n - 2.0)

    def _r2(self, x):
        d = np.asarray(x, dtype=float) - self.xi
        return np.einsum("...i,...i->...", d, d), d


def bubble_eval(b: Bubble, x):
    """Bubble value at ``x``; ``x`` may be a single point or an (..., n) array."""
    r2, _ = b._r2(x)
    n, dl = b.n, b.delta
    return b.alpha * dl ** ((n - 2) / 2.0) * (dl * dl + r2) ** (-(n - 2) / 2.0)


def bubble_gradient(b: Bubble, x):
    """Gradient in x, shape (..., n)."""
    r2, d = b._r2(x)
    n, dl = b.n, b.delta
    scale = -b.alpha * (n - 2) * dl ** ((n - 2) / 2.0) * (dl * dl + r2) ** (-n / 2.0)
    return scale[..., None] * d


def kernel_eval(b: Bubble, j: int, x):
    """Z^0 = dU/d(delta) for j = 0, Z^j = dU/d(xi_j) for 1 <= j <= n."""
    if int(j) != j or not 0 <= j <= b.n:
        raise DomainError(f"kernel index must lie in 0..{b.n}, got {j}")
    r2, d = b._r2(x)
    n, dl = b.n, b.delta
    if j == 0:
        return (
            b.alpha
            * (n - 2) / 2.0
            * dl ** ((n - 4) / 2.0)
            * (r2 - dl * dl)
            / (dl * dl + r2) ** (n / 2.0)
        )
    return b.alpha * (n - 2) * dl ** ((n - 2) / 2.0) * d[..., j - 1] / (dl * dl + r2) ** (n / 2.0)


def laplacian_fd(f, x, h: float):
    """Second-order central-difference Laplacian of ``f`` at a single point."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    steps = h * np.eye(n)
    # all 2n+1 stencil points in one call
    pts = np.concatenate([x[None, :], x + steps, x - steps])
    vals = np.asarray(f(pts), dtype=float)
    return (vals[1:].sum() - 2 * n * vals[0]) / (h * h)


def bubble_residual(b: Bubble, x, h: float = 1e-3) -> float:
    """|-Delta_h U(x) - U(x)^p| with the (2n+1)-point stencil; O(h^2) as h -> 0."""
    if not h > 0:
        raise DomainError("finite-difference step must be positive")
    u = bubble_eval(b, x)
    return float(abs(-laplacian_fd(lambda y: bubble_eval(b, y), x, h) - u**b.p))


def kernel_residual(b: Bubble, j: int, x, h: float = 1e-3) -> float:
    """|-Delta_h Z^j - p U^(p-1) Z^j| at ``x``; the linearized equation residual."""
    if not h > 0:
        raise DomainError("finite-difference step must be positive")
    u = bubble_eval(b, x)
    z = kernel_eval(b, j, x)
    lap = laplacian_fd(lambda y: kernel_eval(b, j, y), x, h)
    return float(abs(-lap - b.p * u ** (b.p - 1.0) * z))


def richardson_ratio(residual, h: float) -> float:
    """residual(h) / residual(h/2); tends to 4 for a second-order scheme."""
    return residual(h) / residual(h / 2.0)

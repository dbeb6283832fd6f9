"""Gamma-function integrals and dimension constants.

The family

    I(q, p) = int_0^inf r^q / (1 + r)^p dr = Gamma(q+1) Gamma(p-q-1) / Gamma(p)

converges iff p - q > 1.  It is evaluated both in closed form and by adaptive
quadrature; the two routes are kept independent so one can check the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from blowup_reduction import DomainError, QuadratureError

# math.gamma overflows just above 171.
_GAMMA_DIRECT_MAX = 170.0


@dataclass(frozen=True)
class GammaIntegralQuery:
    q: float
    p: float

    def __post_init__(self):
        if not self.q >= 0:
            raise DomainError(f"exponent q must be nonnegative, got {self.q}")
        if not self.p > 0:
            raise DomainError(f"exponent p must be positive, got {self.p}")
        if not self.p - self.q > 1:
            raise DomainError(
                f"integral diverges: need p - q > 1, got q={self.q}, p={self.p}"
            )


def _query(q, p=None) -> GammaIntegralQuery:
    if isinstance(q, GammaIntegralQuery):
        return q
    return GammaIntegralQuery(float(q), float(p))


def _gamma_ratio(a: float, b: float, c: float) -> float:
    """Gamma(a) Gamma(b) / Gamma(c) for positive arguments."""
    if max(a, b, c) <= _GAMMA_DIRECT_MAX:
        return math.gamma(a) * math.gamma(b) / math.gamma(c)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(c))


def gamma_integral_closed(q, p=None) -> float:
    """Closed form of ``I(q, p)``.

    Accepts either a :class:`GammaIntegralQuery` or the two exponents.
    """
    query = _query(q, p)
    return _gamma_ratio(query.q + 1.0, query.p - query.q - 1.0, query.p)


def gamma_integral_quadrature(q, p=None, tol: float = 1e-12, limit: int = 200) -> float:
    """Adaptive Gauss-Kronrod evaluation of ``I(q, p)``.

    The half line is split at r = 1 and the tail is mapped back onto (0, 1]
    with r = 1/t, which turns it into int_0^1 t^(p-q-2) / (1+t)^p dt.  Both
    pieces carry an algebraic endpoint factor, handled by QUADPACK's
    Gauss-Kronrod rule for algebraic weights (QAWS).

    Raises QuadratureError when the combined error estimate exceeds ``tol``.
    """
    query = _query(q, p)
    if not tol > 0:
        raise DomainError("tol must be positive")
    qq, pp = query.q, query.p

    def smooth(t):
        return (1.0 + t) ** (-pp)

    opts = dict(weight="alg", epsabs=tol / 4.0, epsrel=1e-14, limit=limit)
    v1, e1 = integrate.quad(smooth, 0.0, 1.0, wvar=(qq, 0.0), **opts)
    v2, e2 = integrate.quad(smooth, 0.0, 1.0, wvar=(pp - qq - 2.0, 0.0), **opts)
    err = e1 + e2
    if not np.isfinite(v1 + v2) or err > tol:
        raise QuadratureError(
            f"I({qq}, {pp}) quadrature error estimate {err:.3e} exceeds tol {tol:.3e}"
        )
    return v1 + v2


def check_recurrences(q: float, p: float) -> tuple[float, float]:
    """Residuals of the two shift identities

        I(q, p+1)   = (p-q-1)/p     * I(q, p)
        I(q+1, p+1) = (q+1)/(p-q-1) * I(q, p+1)

    both evaluated with the closed form.
    """
    GammaIntegralQuery(float(q), float(p))
    i_qp = gamma_integral_closed(q, p)
    i_qp1 = gamma_integral_closed(q, p + 1.0)
    i_q1p1 = gamma_integral_closed(q + 1.0, p + 1.0)
    r1 = abs(i_qp1 - (p - q - 1.0) / p * i_qp)
    r2 = abs(i_q1p1 - (q + 1.0) / (p - q - 1.0) * i_qp1)
    return r1, r2


def sphere_measure(k: int) -> float:
    """Surface measure of the unit k-sphere S^k in R^(k+1)."""
    if k < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {k}")
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


@dataclass(frozen=True)
class DimensionConstants:
    n: int
    alpha_n: float
    omega_n_minus_2: float
    omega_n_minus_1: float

    @property
    def p(self) -> float:
        """Critical power (n+2)/(n-2)."""
        return (self.n + 2.0) / (self.n - 2.0)


def bubble_normalization(n: int) -> float:
    """alpha_n = [n(n-2)]^((n-2)/4); defined for any n >= 3."""
    return float(n * (n - 2)) ** ((n - 2) / 4.0)


def dimension_constants(n: int) -> DimensionConstants:
    if int(n) != n or n < 5:
        raise DomainError(f"dimension must be an integer >= 5, got {n}")
    n = int(n)
    return DimensionConstants(
        n=n,
        alpha_n=bubble_normalization(n),
        omega_n_minus_2=sphere_measure(n - 2),
        omega_n_minus_1=sphere_measure(n - 1),
    )

"""Half-space corrector phi_0 and the two-term expansion of the projected bubble.

phi_0 is the harmonic function on the upper half-space R^n_+ = {x_n > 0},
vanishing at infinity, whose normal derivative on {x_n = 0} is

    d phi_0 / d x_n = alpha_n (n-2)/2 sum_i k_i x_i^2 / (1 + |x'|^2)^(n/2).

With the Neumann Green function of the half-space this reads

    phi_0(x) = -(alpha_n / omega_{n-1}) sum_i k_i
               int_{R^(n-1)} y_i^2 (1+|y'|^2)^(-n/2) |x - y'|^(2-n) dy'.

The quadratic form sum_i k_i y_i^2 splits into H |y'|^2 (H the mean of the
k_i) plus a traceless part, which restricted to the unit sphere is a degree-2
spherical harmonic.  The Funk-Hecke formula then reduces each piece to a
radial integral times an angular moment; the angular moments are Gauss
hypergeometric functions and the radial integral is done adaptively.  A
second evaluator does the angular integral by quadrature as well, giving an
independent 2D route.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from blowup_reduction import DomainError, QuadratureError
from blowup_reduction.bubble_fields._hypergeometric import hyp2f1_shifted
from blowup_reduction.bubble_fields.bubble import Bubble, bubble_eval
from blowup_reduction.special_functions import bubble_normalization, sphere_measure

FAR_FIELD_RADIUS = 1e4


@dataclass(frozen=True)
class CorrectorField:
    curvatures: tuple
    n: int = None
    tol: float = 1e-11
    far_field_radius: float = FAR_FIELD_RADIUS
    # derived constants, fixed at construction
    _mean: float = field(init=False, repr=False)
    _traceless: np.ndarray = field(init=False, repr=False)
    _prefactor: float = field(init=False, repr=False)

    def __post_init__(self):
        k = np.asarray(self.curvatures, dtype=float).ravel()
        n = len(k) + 1 if self.n is None else int(self.n)
        if n < 5:
            raise DomainError(f"corrector needs n >= 5, got {n}")
        if len(k) != n - 1:
            raise DomainError(f"expected {n - 1} principal curvatures, got {len(k)}")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        object.__setattr__(self, "curvatures", tuple(float(v) for v in k))
        object.__setattr__(self, "n", n)
        mean = float(k.mean())
        traceless = k - mean
        traceless.setflags(write=False)
        object.__setattr__(self, "_mean", mean)
        object.__setattr__(self, "_traceless", traceless)
        pref = -bubble_normalization(n) * sphere_measure(n - 3) / sphere_measure(n - 1)
        object.__setattr__(self, "_prefactor", pref)

    @property
    def is_zero(self) -> bool:
        return not any(self.curvatures)


def neumann_datum(c: CorrectorField, xp) -> float:
    """Prescribed normal derivative of phi_0 at the boundary point (x', 0)."""
    xp = np.asarray(xp, dtype=float)
    k = np.asarray(c.curvatures)
    n = c.n
    return float(
        bubble_normalization(n) * (n - 2) / 2.0 * (k @ (xp * xp)) / (1.0 + xp @ xp) ** (n / 2.0)
    )


# -- angular moments ---------------------------------------------------------


def _angular_moments(n: int, rho: float, s: float, xn: float) -> tuple[float, float]:
    """Funk-Hecke moments of |x - y'|^(2-n) over the sphere |y'| = s in R^(n-1).

    Returns (M0, M2) with

        M0 = int_{-1}^{1} K(t) (1-t^2)^((n-4)/2) dt,
        M2 = int_{-1}^{1} K(t) P2(t) (1-t^2)^((n-4)/2) dt,

    K(t) = (A - B t)^(-(n-2)/2), A = rho^2 + s^2 + xn^2, B = 2 rho s, and
    P2(t) = ((n-1) t^2 - 1)/(n-2) the degree-2 Legendre polynomial on S^(n-2).
    """
    m = (n - 2) / 2.0
    nu = (n - 4) / 2.0
    a, b = m / 2.0, (m + 1.0) / 2.0
    big_a = rho * rho + s * s + xn * xn
    big_b = 2.0 * rho * s
    gap = (rho - s) ** 2 + xn * xn
    # y = 1 - (B/A)^2 computed without cancellation
    y = gap * (big_a + big_b) / (big_a * big_a)
    scale = big_a ** (-m)
    if y <= 0.0:
        # on the singular circle itself; measure zero for the radial integral
        return math.inf, math.inf
    m0 = scale * special.beta(0.5, nu + 1.0) * hyp2f1_shifted(a, b, 0, y)
    # int K (1-t^2)^(nu+1) dt, finite at y = 0
    m1 = scale * special.beta(0.5, nu + 2.0) * hyp2f1_shifted(a, b, 1, y)
    # t^2 = 1 - (1 - t^2)
    m_t2 = m0 - m1
    return m0, ((n - 1) * m_t2 - m0) / (n - 2)


def _angular_moments_quad(n: int, rho: float, s: float, xn: float, tol: float):
    m = (n - 2) / 2.0
    nu = (n - 4) / 2.0
    gap = (rho - s) ** 2 + xn * xn
    big_b = 2.0 * rho * s

    def kern(u, ell):
        # u = 1 - t, so A - B t = gap + B u
        t = 1.0 - u
        w = (u * (2.0 - u)) ** nu * (gap + big_b * u) ** (-m)
        return w if ell == 0 else w * ((n - 1) * t * t - 1.0) / (n - 2)

    pts = None
    if big_b > 0 and gap / big_b < 1.0:
        c = gap / big_b
        pts = [v for v in (c, 10 * c, 100 * c) if v < 2.0]
    out = []
    for ell in (0, 2):
        v, _ = integrate.quad(kern, 0.0, 2.0, args=(ell,), points=pts, epsabs=0.0,
                              epsrel=tol, limit=400)
        out.append(v)
    return tuple(out)


# -- radial integral ------------------------------------------------------------


def _radial_integrals(c: CorrectorField, rho: float, xn: float, homogeneous: bool,
                      angular="closed"):
    """Radial integrals of the isotropic (H) and traceless parts."""
    n = c.n
    need_traceless = rho > 0 and np.any(c._traceless != 0.0)

    if angular == "closed":
        def moments(s):
            return _angular_moments(n, rho, s, xn)
    else:
        def moments(s):
            return _angular_moments_quad(n, rho, s, xn, c.tol)

    def weight(s):
        if homogeneous:
            return 1.0
        return s**n * (1.0 + s * s) ** (-n / 2.0)

    cache = {}

    def integrand(s, ell):
        if s not in cache:
            cache[s] = moments(s)
        return weight(s) * cache[s][0 if ell == 0 else 1]

    breaks = [0.0]
    if rho > 0:
        breaks.append(rho)
    breaks.append(2.0 * rho + xn + 1.0)
    results = []
    for ell in (0, 2):
        if ell == 2 and not need_traceless:
            results.append(0.0)
            continue
        total, err = 0.0, 0.0
        segments = list(zip(breaks[:-1], breaks[1:])) + [(breaks[-1], math.inf)]
        for lo, hi in segments:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, e = integrate.quad(integrand, lo, hi, args=(ell,), epsabs=0.0,
                                      epsrel=c.tol, limit=400)
            total += v
            err += e
        if not math.isfinite(total) or err > 1e3 * c.tol * max(abs(total), 1e-300) + 1e-14:
            raise QuadratureError(
                f"corrector radial quadrature did not converge (estimate {err:.2e})"
            )
        results.append(total)
    return results[0], results[1]


def _evaluate(c: CorrectorField, x, homogeneous=False, angular="closed") -> float:
    xp, xn = x[:-1], float(x[-1])
    rho = float(np.linalg.norm(xp))
    i_iso, i_2 = _radial_integrals(c, rho, xn, homogeneous, angular)
    y2 = float(c._traceless @ (xp / rho) ** 2) if rho > 0 else 0.0
    return c._prefactor * (c._mean * i_iso + y2 * i_2)


def corrector_eval(c: CorrectorField, x, angular: str = "closed") -> float:
    """phi_0 at a point of the closed upper half-space.

    ``angular="quadrature"`` evaluates the angular moments by adaptive
    quadrature instead of the hypergeometric closed form (slower; used as a
    cross-check).  Beyond ``c.far_field_radius`` the field is replaced by its
    leading homogeneous term |x|^(3-n) phi_hom(x/|x|), where phi_hom solves
    the same problem with datum alpha_n (n-2)/2 sum k_i y_i^2 / |y'|^n.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (c.n,):
        raise DomainError(f"point must have shape ({c.n},), got {x.shape}")
    if x[-1] < 0:
        raise DomainError("corrector is defined on the upper half-space x_n >= 0")
    if c.is_zero:
        return 0.0
    r = float(np.linalg.norm(x))
    if r > c.far_field_radius:
        return r ** (3.0 - c.n) * _evaluate(c, x / r, homogeneous=True, angular=angular)
    return _evaluate(c, x, angular=angular)


def corrector_normal_derivative_fd(c: CorrectorField, xp, h: float = 1e-3) -> float:
    """One-sided second-order difference d phi_0/d x_n at (x', 0)."""
    if not h > 0:
        raise DomainError("finite-difference step must be positive")
    xp = np.asarray(xp, dtype=float)
    f = [corrector_eval(c, np.append(xp, j * h)) for j in range(3)]
    return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)


def corrector_boundary_flux_check(c: CorrectorField, xp, h: float = 1e-3) -> float:
    """|finite-difference normal derivative - prescribed Neumann datum| at (x', 0)."""
    return abs(corrector_normal_derivative_fd(c, xp, h) - neumann_datum(c, xp))


def projection_expansion(b: Bubble, c: CorrectorField, x) -> float:
    """U(x) - delta^((4-n)/2) phi_0((x - xi)/delta).

    The chart at xi has its inner normal along +x_n, so x - xi must have a
    nonnegative last coordinate.
    """
    if b.n != c.n:
        raise DomainError("bubble and corrector dimensions differ")
    x = np.asarray(x, dtype=float)
    u = float(bubble_eval(b, x))
    if c.is_zero:
        return u
    y = (x - b.xi) / b.delta
    return u - b.delta ** ((4.0 - b.n) / 2.0) * corrector_eval(c, y)

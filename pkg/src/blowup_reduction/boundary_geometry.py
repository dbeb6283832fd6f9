"""Boundary charts, weight fields and the weighted curvature.

Conventions: near a boundary point the domain is {x_n > rho(x')} with the
inner unit normal along +x_n, so convex domains have positive principal
curvatures.  Every boundary point carries its own chart; nothing global is
meshed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from blowup_reduction import DomainError


class ConsistencyError(ValueError):
    """Dimensions of an orbit description do not add up."""


# -- charts ------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryChart:
    """Graph chart x_n = rho(x') of the boundary near a point.

    ``graph`` is the exact chart function when known; otherwise the quadratic
    model 1/2 sum k_i x_i^2 is used.  ``origin`` and ``normal`` (inner unit
    normal) locate the chart in ambient coordinates when it came from a
    global boundary description.
    """

    curvatures: tuple
    cubic_bound: float = 0.0
    radius: float = 1.0
    graph: Optional[Callable] = field(default=None, compare=False)
    origin: Optional[np.ndarray] = field(default=None, compare=False)
    normal: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        k = tuple(float(v) for v in np.ravel(self.curvatures))
        if not k:
            raise DomainError("a chart needs at least one principal curvature")
        if self.cubic_bound < 0:
            raise DomainError("cubic_bound must be nonnegative")
        if not self.radius > 0:
            raise DomainError("chart radius must be positive")
        object.__setattr__(self, "curvatures", k)

    @property
    def n(self) -> int:
        return len(self.curvatures) + 1

    def quadratic_model(self, xp) -> float:
        xp = np.asarray(xp, dtype=float)
        return 0.5 * float(np.dot(self.curvatures, xp * xp))

    def rho(self, xp) -> float:
        if self.graph is not None:
            return float(self.graph(np.asarray(xp, dtype=float)))
        return self.quadratic_model(xp)

    def remainder_ratio(self, xp) -> float:
        """|rho - quadratic model| / |x'|^3 (0 at the origin)."""
        xp = np.asarray(xp, dtype=float)
        r = float(np.linalg.norm(xp))
        if r == 0:
            return 0.0
        return abs(self.rho(xp) - self.quadratic_model(xp)) / r**3


def mean_curvature(chart: BoundaryChart) -> float:
    """H = arithmetic mean of the principal curvatures."""
    return float(math.fsum(chart.curvatures) / len(chart.curvatures))


# -- weights -----------------------------------------------------------------


@dataclass(frozen=True)
class WeightField:
    """Positive coefficient a(x) with its gradient.

    ``exponents`` holds (M_1, ..., M_m) when a is the product power
    x_1^(M_1 - 1) ... x_m^(M_m - 1).
    """

    value: Callable
    gradient: Callable
    dim: int
    exponents: Optional[tuple] = None
    label: str = ""

    def __call__(self, x) -> float:
        return float(self.value(np.asarray(x, dtype=float)))

    def grad(self, x) -> np.ndarray:
        return np.asarray(self.gradient(np.asarray(x, dtype=float)), dtype=float)

    def normal_derivative(self, xi, nu) -> float:
        return float(self.grad(xi) @ np.asarray(nu, dtype=float))

    def scaled(self, factor: float) -> "WeightField":
        if not factor > 0:
            raise DomainError("weights may only be scaled by positive factors")
        return WeightField(
            value=lambda x: factor * self.value(x),
            gradient=lambda x: factor * np.asarray(self.gradient(x)),
            dim=self.dim,
            exponents=None,
            label=f"{factor}*({self.label})",
        )

    def check_positive(self, points) -> float:
        """Minimum of a over ``points``; raises if it is not strictly positive."""
        vals = [self(p) for p in np.atleast_2d(points)]
        lo = min(vals)
        if not lo > 0:
            raise DomainError(f"weight is not positive on the sample (min {lo})")
        return lo


def product_power_weight(exponents: Sequence[int], dim: int) -> WeightField:
    """a(x) = x_1^(M_1-1) ... x_m^(M_m-1) on R^dim, each M_i >= 2."""
    M = tuple(int(v) for v in exponents)
    if not M or any(v < 2 for v in M):
        raise DomainError(f"product-power exponents must all be >= 2, got {M}")
    if len(M) > dim:
        raise DomainError("more product factors than coordinates")
    powers = np.array([v - 1 for v in M], dtype=float)
    m = len(M)

    def value(x):
        return float(np.prod(x[:m] ** powers))

    def gradient(x):
        g = np.zeros(dim)
        base = x[:m] ** powers
        for i in range(m):
            others = np.prod(np.delete(base, i))
            g[i] = powers[i] * x[i] ** (powers[i] - 1.0) * others
        return g

    label = "*".join(f"x{i + 1}^{int(p)}" for i, p in enumerate(powers))
    return WeightField(value=value, gradient=gradient, dim=dim, exponents=M, label=label)


def constant_weight(c: float, dim: int) -> WeightField:
    if not c > 0:
        raise DomainError("constant weight must be positive")
    return WeightField(
        value=lambda x: float(c),
        gradient=lambda x: np.zeros(dim),
        dim=dim,
        label=str(c),
    )


def expression_weight(expr: str, dim: int, gradient: Optional[Sequence[str]] = None) -> WeightField:
    """Weight from an expression in x1..x<dim>; the gradient is symbolic
    unless given explicitly as a list of expressions."""
    import sympy as sp

    syms = sp.symbols(f"x1:{dim + 1}")
    local = {str(s): s for s in syms}
    f = sp.sympify(expr, locals=local)
    if gradient is None:
        grads = [sp.diff(f, s) for s in syms]
    else:
        if len(gradient) != dim:
            raise DomainError(f"gradient needs {dim} components")
        grads = [sp.sympify(g, locals=local) for g in gradient]
    f_num = sp.lambdify(syms, f, "numpy")
    g_num = [sp.lambdify(syms, g, "numpy") for g in grads]
    return WeightField(
        value=lambda x: float(f_num(*x)),
        gradient=lambda x: np.array([float(g(*x)) for g in g_num]),
        dim=dim,
        label=str(f),
    )


def weight_from_config(block: dict, dim: int) -> WeightField:
    """Build a weight from a config block.

    Recognized kinds::

        {kind: product_power, exponents: [2, 3]}
        {kind: constant, value: 1.5}
        {kind: expression, value: "x1 + x2**2", gradient: [...]}   # gradient optional
    """
    kind = block.get("kind")
    if kind == "product_power":
        return product_power_weight(block["exponents"], dim)
    if kind == "constant":
        return constant_weight(float(block.get("value", 1.0)), dim)
    if kind == "expression":
        return expression_weight(block["value"], dim, block.get("gradient"))
    raise DomainError(f"unknown weight kind {kind!r}")


def chart_from_config(block: dict) -> BoundaryChart:
    return BoundaryChart(
        curvatures=tuple(block["curvatures"]),
        cubic_bound=float(block.get("cubic_bound", 0.0)),
        radius=float(block.get("radius", 1.0)),
    )


# -- weighted curvature --------------------------------------------------------


def weighted_curvature_value(a_value: float, normal_derivative: float, mean_curv: float, n: int) -> float:
    """(2/(n-1)) d_nu a / a - H from scalar data."""
    if not a_value > 0:
        raise ZeroDivisionError(f"weight must be positive at the boundary point, got {a_value}")
    return 2.0 / (n - 1) * normal_derivative / a_value - mean_curv


def weighted_curvature(a: WeightField, chart: BoundaryChart, xi=None, nu=None) -> float:
    """Weighted curvature of ``a`` at ``xi`` with the chart's curvatures.

    ``xi`` and ``nu`` default to the chart's origin and inner normal.
    """
    xi = chart.origin if xi is None else xi
    nu = chart.normal if nu is None else nu
    if xi is None or nu is None:
        raise DomainError("boundary point and inner normal are required")
    return weighted_curvature_value(a(xi), a.normal_derivative(xi, nu), mean_curvature(chart), chart.n)


def weight_normal_ratio(a: WeightField, xi, nu) -> float:
    """d_nu a / a for a product-power weight: sum (M_i - 1) nu_i / x_i."""
    if a.exponents is None:
        raise DomainError("weight_normal_ratio needs a product-power weight")
    xi = np.asarray(xi, dtype=float)
    nu = np.asarray(nu, dtype=float)
    m = len(a.exponents)
    if np.any(xi[:m] <= 0):
        raise DomainError("product-power coordinates must be positive")
    return float(sum((a.exponents[i] - 1) * nu[i] / xi[i] for i in range(m)))


# -- exponents and orbits --------------------------------------------------------


def critical_exponent(N: int, h: int) -> float:
    """2(N-h)/(N-h-2) for 0 <= h <= N-3, +inf for h = N-2."""
    if int(N) != N or int(h) != h or not 0 <= h <= N - 2:
        raise DomainError(f"need integers with 0 <= h <= N-2, got N={N}, h={h}")
    if h == N - 2:
        return math.inf
    return 2.0 * (N - h) / (N - h - 2)


@dataclass(frozen=True)
class OrbitDescriptor:
    N: int
    M_list: tuple
    m: int
    h: int
    n_reduced: int

    @property
    def sphere_dimensions(self) -> tuple:
        """The orbit is a product of spheres S^(M_i - 1)."""
        return tuple(M - 1 for M in self.M_list)

    def describe(self) -> str:
        return " x ".join(f"S^{d}" for d in self.sphere_dimensions)


def orbit_descriptor(N: int, M_list: Sequence[int], m: Optional[int] = None,
                     n: Optional[int] = None) -> OrbitDescriptor:
    """Bookkeeping for the symmetry reduction R^N -> R^n, n = N - h, h = sum M_i - m."""
    M = tuple(int(v) for v in M_list)
    m = len(M) if m is None else int(m)
    if m != len(M):
        raise ConsistencyError(f"m={m} but {len(M)} block sizes were given")
    if any(v < 2 for v in M):
        raise ConsistencyError(f"every block size must be >= 2, got {M}")
    total = sum(M)
    if total > N:
        raise ConsistencyError(f"blocks use {total} coordinates but N={N}")
    h = total - m
    n_red = N - h
    if n is not None and n != n_red:
        raise ConsistencyError(f"N={N}, M={M} give n={n_red}, not {n}")
    return OrbitDescriptor(N=int(N), M_list=M, m=m, h=h, n_reduced=n_red)


def torus_threshold(H_at_min: float, n: int) -> float:
    """Distance a* from the axis at which the weighted curvature of a = x_1
    vanishes at the innermost boundary point (nu_1 = +1)."""
    if not H_at_min > 0:
        raise DomainError("the threshold needs a strictly convex cross-section (H > 0)")
    return 2.0 / ((n - 1) * H_at_min)


# -- level-set boundaries --------------------------------------------------------


@dataclass(frozen=True)
class LevelSetBoundary:
    """Boundary {F = 0} of a domain {F < 0}.

    Supplies what the constrained search needs: projection onto the boundary,
    inner normals, tangent bases and local charts.
    """

    F: Callable
    grad: Callable
    hess: Callable
    dim: int
    label: str = ""

    def project(self, x, tol: float = 1e-15, max_iter: int = 100) -> np.ndarray:
        """Newton projection along the gradient direction."""
        x = np.asarray(x, dtype=float).copy()
        for _ in range(max_iter):
            f = self.F(x)
            g = self.grad(x)
            step = f / (g @ g) * g
            x -= step
            if np.linalg.norm(step) <= tol * max(1.0, np.linalg.norm(x)):
                break
        return x

    def inner_normal(self, x) -> np.ndarray:
        g = self.grad(x)
        return -g / np.linalg.norm(g)

    def tangent_basis(self, x) -> np.ndarray:
        """Orthonormal basis of the tangent space as rows, shape (dim-1, dim)."""
        nu = self.inner_normal(x)
        # complete nu to an orthonormal basis; the last dim-1 columns are tangent
        q, _ = np.linalg.qr(np.column_stack([nu, np.eye(self.dim)]))
        return q[:, 1 : self.dim].T

    def principal_curvatures(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Curvatures with respect to the inner normal and their directions."""
        g = self.grad(x)
        T = self.tangent_basis(x)
        shape = T @ self.hess(x) @ T.T / np.linalg.norm(g)
        k, vecs = np.linalg.eigh(shape)
        return k, vecs.T @ T

    def chart(self, x) -> BoundaryChart:
        k, _ = self.principal_curvatures(x)
        return BoundaryChart(
            curvatures=tuple(k),
            origin=np.asarray(x, dtype=float),
            normal=self.inner_normal(x),
        )


def ellipsoid_boundary(center, semi_axes) -> LevelSetBoundary:
    """sum ((x_i - c_i)/s_i)^2 = 1; a sphere when all semi-axes agree."""
    c = np.asarray(center, dtype=float)
    s = np.asarray(semi_axes, dtype=float)
    if c.shape != s.shape or np.any(s <= 0):
        raise DomainError("ellipsoid needs positive semi-axes matching the center")
    w = 1.0 / s**2
    return LevelSetBoundary(
        F=lambda x: float(np.sum(w * (x - c) ** 2) - 1.0),
        grad=lambda x: 2.0 * w * (x - c),
        hess=lambda x: np.diag(2.0 * w),
        dim=len(c),
        label=f"ellipsoid(center={c.tolist()}, axes={s.tolist()})",
    )


def torus_cross_section(n: int, axis_distance: float, radius: float) -> dict:
    """Extremal points of a = x_1 on the sphere of given radius centered at
    distance ``axis_distance`` from the rotation axis, with their weighted
    curvatures; the innermost point has nu_1 = +1, the outermost nu_1 = -1."""
    if not 0 < radius < axis_distance:
        raise DomainError("the cross-section must stay off the axis (0 < radius < distance)")
    H = 1.0 / radius
    a_min = axis_distance - radius
    a_max = axis_distance + radius
    h_min = weighted_curvature_value(a_min, 1.0, H, n)
    h_max = weighted_curvature_value(a_max, -1.0, H, n)
    return {
        "n": n,
        "mean_curvature": H,
        "a_min": a_min,
        "a_max": a_max,
        "threshold": torus_threshold(H, n),
        "H_a_min_point": h_min,
        "H_a_max_point": h_max,
    }

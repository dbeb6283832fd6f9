"""Critical points of a weight constrained to a boundary, and their stability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from blowup_reduction import DomainError
from blowup_reduction.boundary_geometry import (
    LevelSetBoundary,
    WeightField,
    mean_curvature,
    weighted_curvature_value,
)
from blowup_reduction.reduction_driver.dichotomy import (
    ConcentrationCandidate,
    EpsilonSide,
    Stability,
    admissible_side,
    solve_d0,
)

GRADIENT_TOL = 1e-10
NEWTON_SWITCH = 1e-5
HESSIAN_STEP = 1e-4
EIGEN_TOL = 1e-8


def tangential_gradient(a: WeightField, boundary: LevelSetBoundary, x) -> np.ndarray:
    g = a.grad(x)
    nu = boundary.inner_normal(x)
    return g - (g @ nu) * nu


def _retract(boundary: LevelSetBoundary, x, frame, t) -> np.ndarray:
    return boundary.project(x + frame.T @ t)


def tangential_hessian(a: WeightField, boundary: LevelSetBoundary, x, h: float = HESSIAN_STEP):
    """Central-difference Hessian of t -> a(retract(x + T^T t)) at t = 0."""
    frame = boundary.tangent_basis(x)
    k = frame.shape[0]
    f = lambda t: a(_retract(boundary, x, frame, np.asarray(t, dtype=float)))
    f0 = f(np.zeros(k))
    H = np.zeros((k, k))
    E = np.eye(k) * h
    for i in range(k):
        H[i, i] = (f(E[i]) - 2.0 * f0 + f(-E[i])) / (h * h)
        for j in range(i + 1, k):
            v = (f(E[i] + E[j]) - f(E[i] - E[j]) - f(-E[i] + E[j]) + f(-E[i] - E[j])) / (4 * h * h)
            H[i, j] = H[j, i] = v
    return H


def classify(eigenvalues, tol: float = EIGEN_TOL) -> Stability:
    ev = np.asarray(eigenvalues)
    if np.all(ev < -tol):
        return Stability.MAX
    if np.all(ev > tol):
        return Stability.MIN
    if np.all(np.abs(ev) > tol):
        return Stability.NONDEGENERATE
    return Stability.UNSTABLE


def _flow(a, boundary, x, direction, gtol, max_iter):
    """Projected gradient ascent (+1) or descent (-1) with backtracking.

    Stops early once the gradient is below ``gtol``; the caller finishes with
    Newton steps, which converge much faster near a nondegenerate point.
    """
    step = 1.0
    g = tangential_gradient(a, boundary, x)
    for _ in range(max_iter):
        gn = np.linalg.norm(g)
        if gn <= gtol:
            return x, gn, True
        fx = a(x)
        while step > 1e-14:
            y = boundary.project(x + direction * step * g)
            if direction * (a(y) - fx) >= 0.5 * step * gn * gn:
                break
            step *= 0.5
        else:
            return x, gn, False
        x = y
        g = tangential_gradient(a, boundary, x)
        step = min(step * 2.0, 1e3)
    return x, float(np.linalg.norm(g)), False


def _newton_polish(a, boundary, x, gtol, iters=20):
    """Newton steps on the tangential gradient; stops if they stop helping."""
    g = tangential_gradient(a, boundary, x)
    for _ in range(iters):
        gn = np.linalg.norm(g)
        if gn <= gtol:
            break
        frame = boundary.tangent_basis(x)
        H = tangential_hessian(a, boundary, x)
        try:
            t = -np.linalg.solve(H, frame @ g)
        except np.linalg.LinAlgError:
            break
        y = _retract(boundary, x, frame, t)
        gy = tangential_gradient(a, boundary, y)
        if np.linalg.norm(gy) >= gn:
            break
        x, g = y, gy
    return x, float(np.linalg.norm(g))


def candidate_at(a: WeightField, boundary: LevelSetBoundary, x, *, c4: Optional[float] = None,
                 c5: Optional[float] = None, gradient_norm: float = 0.0, converged: bool = True,
                 eig_tol: float = EIGEN_TOL) -> ConcentrationCandidate:
    """Classify a boundary point and attach its weighted curvature.

    Where the weight is not positive the weighted curvature is undefined;
    it is reported as NaN and no side is admissible.
    """
    chart = boundary.chart(x)
    if a(x) > 0:
        ha = weighted_curvature_value(a(x), a.normal_derivative(x, chart.normal),
                                      mean_curvature(chart), chart.n)
    else:
        ha = float("nan")
    ev = np.linalg.eigvalsh(tangential_hessian(a, boundary, x))
    stability = classify(ev, eig_tol)
    side = admissible_side(ha)
    d0 = None
    if c4 is not None and c5 is not None and side is not EpsilonSide.NONE:
        d0 = solve_d0(c4, c5, ha, side).d0
    return ConcentrationCandidate(
        xi0=np.asarray(x, dtype=float),
        H_a=float(ha),
        epsilon_side=side,
        d0=d0,
        stability=stability,
        a_value=a(x),
        hessian_eigenvalues=tuple(float(v) for v in ev),
        gradient_norm=gradient_norm,
        converged=converged,
    )


def boundary_critical_search(a: WeightField, boundary: LevelSetBoundary, seed_points: Iterable,
                             *, directions=(1, -1), gtol: float = GRADIENT_TOL,
                             max_iter: int = 5000, merge_tol: float = 1e-6,
                             c4: Optional[float] = None, c5: Optional[float] = None,
                             eig_tol: float = EIGEN_TOL) -> list[ConcentrationCandidate]:
    """Run projected gradient ascent and descent from every seed.

    Limits closer than ``merge_tol`` are merged; non-converged runs are kept
    and flagged.  The result is sorted by coordinates.
    """
    if a.dim != boundary.dim:
        raise DomainError("weight and boundary dimensions differ")
    limits = []
    for seed in seed_points:
        x0 = boundary.project(np.asarray(seed, dtype=float))
        for direction in directions:
            x, gn, ok = _flow(a, boundary, x0, direction, max(gtol, NEWTON_SWITCH), max_iter)
            if gn > gtol:
                x, gn = _newton_polish(a, boundary, x, gtol)
                ok = gn <= gtol
            limits.append((x, gn, ok))
    merged = []
    for x, gn, ok in limits:
        for i, (y, gy, oky) in enumerate(merged):
            if np.linalg.norm(x - y) <= merge_tol:
                if gn < gy:
                    merged[i] = (x, gn, ok or oky)
                break
        else:
            merged.append((x, gn, ok))
    merged.sort(key=lambda item: tuple(np.round(item[0], 8)))
    return [
        candidate_at(a, boundary, x, c4=c4, c5=c5, gradient_norm=gn, converged=ok, eig_tol=eig_tol)
        for x, gn, ok in merged
    ]


# -- stability -------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeEvidence:
    stable: bool
    inconclusive: bool
    degree: Optional[int]
    min_gradient: float
    method: str

    def __bool__(self) -> bool:
        return self.stable


def _coordinate_field(a, boundary, xi):
    frame = boundary.tangent_basis(xi)

    def G(t):
        y = _retract(boundary, xi, frame, np.asarray(t, dtype=float))
        return frame @ tangential_gradient(a, boundary, y)

    return G, frame.shape[0]


def _sphere_directions(k: int, count: int, rng) -> np.ndarray:
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        th = np.linspace(0.0, 2 * math.pi, count, endpoint=False)
        return np.column_stack([np.cos(th), np.sin(th)])
    v = rng.standard_normal((count, k))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _winding_number(values: np.ndarray) -> Optional[int]:
    ang = np.arctan2(values[:, 1], values[:, 0])
    d = np.diff(np.append(ang, ang[0]))
    d = (d + math.pi) % (2 * math.pi) - math.pi
    if np.max(np.abs(d)) > 0.5 * math.pi:
        return None
    return int(round(d.sum() / (2 * math.pi)))


def stability_degree_test(a: WeightField, boundary: LevelSetBoundary, candidate,
                          box_radius: float = 1e-2, samples: int = 256, seed: int = 0,
                          floor: float = 1e-12) -> DegreeEvidence:
    """Evidence that the candidate is a C^1-stable critical point.

    The tangential gradient is written in tangent coordinates around xi0 and
    sampled on the sphere of radius ``box_radius``.  It must not vanish there
    and must carry a nonzero degree: a consistent sign of the radial component
    (extrema), the sign change in one dimension, the winding number in two,
    and otherwise agreement with the linearization strong enough that the
    degree equals sign det of the Jacobian.
    """
    xi = candidate.xi0 if hasattr(candidate, "xi0") else np.asarray(candidate, dtype=float)
    G, k = _coordinate_field(a, boundary, xi)
    rng = np.random.default_rng(seed)
    dirs = _sphere_directions(k, samples, rng)
    vals = np.array([G(box_radius * d) for d in dirs])
    mags = np.linalg.norm(vals, axis=1)
    gmin = float(mags.min())
    if gmin < floor:
        return DegreeEvidence(False, True, None, gmin, "vanishing")

    radial = np.einsum("ij,ij->i", vals, dirs)
    if np.all(radial < 0) or np.all(radial > 0):
        # homotopic to -/+ identity through nonvanishing fields
        deg = (-1) ** k if radial[0] < 0 else 1
        return DegreeEvidence(True, False, deg, gmin, "radial")
    if k == 1:
        deg = int((np.sign(vals[0, 0]) - np.sign(vals[1, 0])) / 2)
        return DegreeEvidence(deg != 0, False, deg, gmin, "sign-change")
    if k == 2:
        w = _winding_number(vals)
        if w is not None:
            return DegreeEvidence(w != 0, False, w, gmin, "winding")
    # linearization: |G(t) - J t| < |J t| on the sphere implies deg = sign det J
    h = box_radius * 1e-3
    J = np.column_stack([(G(h * e) - G(-h * e)) / (2 * h) for e in np.eye(k)])
    lin = box_radius * dirs @ J.T
    if np.all(np.linalg.norm(vals - lin, axis=1) < np.linalg.norm(lin, axis=1)):
        deg = int(np.sign(np.linalg.det(J)))
        return DegreeEvidence(deg != 0, False, deg, gmin, "linearization")
    return DegreeEvidence(False, True, None, gmin, "undetermined")

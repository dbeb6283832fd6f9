import math

import numpy as np
import pytest
from scipy import integrate

from blowup_reduction import DomainError
from blowup_reduction.bubble_fields import (
    Bubble,
    CorrectorField,
    bubble_eval,
    corrector_boundary_flux_check,
    corrector_eval,
    corrector_normal_derivative_fd,
    laplacian_fd,
    neumann_datum,
    projection_expansion,
)
from blowup_reduction.special_functions import bubble_normalization, sphere_measure

UMBILIC = CorrectorField((1.0, 1.0, 1.0, 1.0))
MIXED = CorrectorField((2.0, -1.0, 0.5, 0.3))


def test_zero_curvature_gives_zero():
    c = CorrectorField((0.0,) * 4)
    assert c.is_zero
    assert corrector_eval(c, np.array([0.3, 1, 2, 0, 0.5])) == 0.0
    assert corrector_boundary_flux_check(c, np.array([0.4, 0.1, 0, 0])) == 0.0


def test_construction_checks():
    with pytest.raises(DomainError):
        CorrectorField((1.0, 1.0, 1.0))  # n = 4
    with pytest.raises(DomainError):
        CorrectorField((1.0,) * 4, n=6)
    with pytest.raises(DomainError):
        corrector_eval(UMBILIC, np.array([0, 0, 0, 0, -0.1]))
    with pytest.raises(DomainError):
        corrector_eval(UMBILIC, np.zeros(4))


def test_datum_vanishes_at_origin():
    assert neumann_datum(UMBILIC, np.zeros(4)) == 0.0


def test_datum_formula():
    xp = np.array([0.5, -1.0, 0.2, 0.7])
    k = np.array(MIXED.curvatures)
    expected = bubble_normalization(5) * 1.5 * np.sum(k * xp**2) / (1 + xp @ xp) ** 2.5
    assert neumann_datum(MIXED, xp) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("xp", [[1.0, 0, 0, 0], [0.5, -0.5, 0.2, 0.0], [0.0, 0.0, 1.5, -0.3]])
def test_flux_mismatch(xp):
    assert corrector_boundary_flux_check(UMBILIC, np.array(xp), h=1e-3) <= 1e-3
    assert corrector_boundary_flux_check(MIXED, np.array(xp), h=1e-3) <= 1e-3


def test_flux_converges_with_step():
    xp = np.array([1.0, 0, 0, 0])
    coarse = corrector_boundary_flux_check(MIXED, xp, h=4e-3)
    fine = corrector_boundary_flux_check(MIXED, xp, h=1e-3)
    assert fine < coarse


def test_linear_in_curvature():
    rng = np.random.default_rng(5)
    k1, k2 = rng.normal(size=4), rng.normal(size=4)
    c1, c2, c12 = CorrectorField(k1), CorrectorField(k2), CorrectorField(k1 + 2 * k2)
    for _ in range(5):
        x = np.append(rng.normal(size=4), rng.uniform(0, 2))
        lhs = corrector_eval(c12, x)
        rhs = corrector_eval(c1, x) + 2 * corrector_eval(c2, x)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_doubling_curvatures_doubles_field():
    rng = np.random.default_rng(6)
    k = rng.normal(size=4)
    c, c2 = CorrectorField(k), CorrectorField(2 * k)
    for _ in range(20):
        x = np.append(rng.normal(size=4), rng.uniform(0, 2))
        assert corrector_eval(c2, x) == pytest.approx(2 * corrector_eval(c, x), rel=1e-12, abs=1e-14)


def test_closed_and_quadrature_angular_routes_agree():
    rng = np.random.default_rng(7)
    for _ in range(4):
        x = np.append(rng.normal(size=4), rng.uniform(0.1, 2))
        a = corrector_eval(MIXED, x)
        b = corrector_eval(MIXED, x, angular="quadrature")
        assert a == pytest.approx(b, rel=1e-9)


def test_brute_force_green_integral_at_axis_point():
    # on the axis x = (0, ..., 0, t) with equal curvatures the integral is radial
    t = 0.8
    n = 5
    alpha = bubble_normalization(n)

    def f(r):
        return r * r * (1 + r * r) ** (-n / 2) * (r * r + t * t) ** (-(n - 2) / 2) * r ** (n - 2)

    radial, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    expected = -alpha / sphere_measure(n - 1) * sphere_measure(n - 2) * radial
    assert corrector_eval(UMBILIC, np.array([0, 0, 0, 0, t])) == pytest.approx(expected, rel=1e-9)


def test_harmonic_in_interior():
    x = np.array([0.4, -0.3, 0.2, 0.1, 0.9])
    h = 2e-2
    lap = laplacian_fd(lambda y: np.array([corrector_eval(MIXED, p) for p in np.atleast_2d(y)]).reshape(np.shape(y)[:-1]), x, h)
    scale = abs(corrector_eval(MIXED, x)) / h**2
    assert abs(lap) <= 1e-5 * scale


def test_decay_slope():
    r = np.geomspace(10, 1e3, 8)
    ray = np.ones(5) / math.sqrt(5)
    vals = [abs(corrector_eval(UMBILIC, s * ray)) for s in r]
    slope = np.polyfit(np.log(r), np.log(vals), 1)[0]
    assert abs(slope + 2) <= 0.05 * 2


def test_far_field_is_continuous_across_switch():
    # the homogeneous far field differs from the full field at relative order 1/|x|
    ray = np.array([0.3, 0.2, -0.1, 0.4, 0.8])
    ray /= np.linalg.norm(ray)
    r = UMBILIC.far_field_radius
    inner = corrector_eval(UMBILIC, r * (1 - 1e-6) * ray)
    outer = corrector_eval(UMBILIC, r * (1 + 1e-6) * ray)
    assert outer == pytest.approx(inner, rel=1e-3)


def test_normal_derivative_step_checked():
    with pytest.raises(DomainError):
        corrector_normal_derivative_fd(UMBILIC, np.zeros(4), h=0)


def test_projection_reduces_to_bubble_without_curvature():
    b = Bubble(5, 0.3, np.zeros(5))
    c = CorrectorField((0.0,) * 4)
    x = np.array([0.1, 0.2, 0, -0.1, 0.05])
    assert projection_expansion(b, c, x) == bubble_eval(b, x)


def test_projection_correction_homogeneity():
    y = np.array([0.3, 0.1, -0.2, 0.0, 0.4])
    corr = []
    for delta in (0.2, 0.1):
        b = Bubble(5, delta)
        corr.append(bubble_eval(b, delta * y) - projection_expansion(b, UMBILIC, delta * y))
    assert corr[1] / corr[0] == pytest.approx(2 ** (-(4 - 5) / 2), rel=1e-12)


def test_projection_ratio_at_center():
    phi0 = corrector_eval(UMBILIC, np.zeros(5))
    for delta in (0.5, 0.05):
        b = Bubble(5, delta)
        u = bubble_eval(b, np.zeros(5))
        ratio = (u - projection_expansion(b, UMBILIC, np.zeros(5))) / u
        assert ratio == pytest.approx(delta * phi0 / bubble_normalization(5), rel=1e-12)


def test_projection_dimension_mismatch():
    with pytest.raises(DomainError):
        projection_expansion(Bubble(6), UMBILIC, np.zeros(6))

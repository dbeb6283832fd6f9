import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from blowup_reduction import DomainError
from blowup_reduction.bubble_fields import (
    Bubble,
    bubble_eval,
    bubble_gradient,
    bubble_residual,
    kernel_eval,
    kernel_residual,
    laplacian_fd,
    richardson_ratio,
)

A5 = 15 ** 0.75


def test_value_at_center():
    assert bubble_eval(Bubble(5), np.zeros(5)) == pytest.approx(A5, rel=1e-15)
    assert bubble_eval(Bubble(5), np.zeros(5)) == pytest.approx(7.621991, abs=5e-7)


def test_value_at_center_delta_two():
    assert bubble_eval(Bubble(5, delta=2.0), np.zeros(5)) == pytest.approx(A5 * 2 ** -1.5, rel=1e-15)


def test_decay_exponent():
    r = np.geomspace(1e2, 1e4, 20)
    x = np.zeros((r.size, 5))
    x[:, 0] = r
    slope = np.polyfit(np.log(r), np.log(bubble_eval(Bubble(5), x)), 1)[0]
    assert abs(-slope - 3) <= 0.03


def test_construction_checks():
    with pytest.raises(DomainError):
        Bubble(4)
    with pytest.raises(DomainError):
        Bubble(5, delta=0.0)
    with pytest.raises(DomainError):
        Bubble(5, xi=np.zeros(4))
    b = Bubble(5, xi=np.ones(5))
    with pytest.raises(ValueError):
        b.xi[0] = 3.0


def test_isometry_invariance():
    rng = np.random.default_rng(0)
    for _ in range(10):
        xi = rng.normal(size=5)
        x = rng.normal(size=5) * 2
        shift = rng.normal(size=5)
        Q = np.linalg.qr(rng.normal(size=(5, 5)))[0]
        b = Bubble(5, delta=rng.uniform(0.3, 3), xi=xi)
        base = bubble_eval(b, x)
        moved = bubble_eval(Bubble(5, b.delta, xi + shift), x + shift)
        rotated = bubble_eval(b, xi + Q @ (x - xi))
        assert moved == pytest.approx(base, rel=1e-13)
        assert rotated == pytest.approx(base, rel=1e-13)


def test_kernel_examples():
    b = Bubble(5)
    assert kernel_eval(b, 0, np.zeros(5)) == pytest.approx(-1.5 * A5, rel=1e-15)
    assert kernel_eval(b, 0, np.zeros(5)) == pytest.approx(-11.432987, abs=5e-7)
    xi = np.array([0.3, -1, 2, 0, 1])
    assert kernel_eval(Bubble(5, 1.3, xi), 1, xi) == 0.0


def test_kernel_index_range():
    with pytest.raises(DomainError):
        kernel_eval(Bubble(5), 6, np.zeros(5))
    with pytest.raises(DomainError):
        kernel_eval(Bubble(5), -1, np.zeros(5))


def test_kernel_zero_matches_delta_difference():
    rng = np.random.default_rng(1)
    h = 1e-5
    for x in rng.uniform(-2, 2, size=(100, 5)):
        fd = (bubble_eval(Bubble(5, 1 + h), x) - bubble_eval(Bubble(5, 1 - h), x)) / (2 * h)
        assert abs(kernel_eval(Bubble(5), 0, x) - fd) <= 1e-8


def test_kernel_j_matches_center_difference():
    rng = np.random.default_rng(2)
    h = 1e-6
    for x in rng.uniform(-2, 2, size=(20, 5)):
        for j in range(1, 6):
            e = np.zeros(5)
            e[j - 1] = h
            fd = (bubble_eval(Bubble(5, 1.0, e), x) - bubble_eval(Bubble(5, 1.0, -e), x)) / (2 * h)
            assert kernel_eval(Bubble(5), j, x) == pytest.approx(fd, abs=1e-7)


def test_kernel_parity():
    rng = np.random.default_rng(4)
    xi = rng.normal(size=5)
    b = Bubble(5, 0.7, xi)
    for r in rng.uniform(0.1, 3, size=10):
        for i in range(1, 6):
            e = np.zeros(5)
            e[i - 1] = r
            assert kernel_eval(b, i, xi + e) == pytest.approx(-kernel_eval(b, i, xi - e), rel=1e-14)
            assert kernel_eval(b, 0, xi + e) == pytest.approx(kernel_eval(b, 0, xi - e), rel=1e-14)


def test_gradient_matches_differences():
    b = Bubble(6, 0.8, np.full(6, 0.1))
    x = np.array([0.4, -0.2, 0.9, 0.0, 1.1, -0.5])
    h = 1e-6
    fd = [(bubble_eval(b, x + h * e) - bubble_eval(b, x - h * e)) / (2 * h) for e in np.eye(6)]
    assert np.allclose(bubble_gradient(b, x), fd, atol=1e-7)


def test_laplacian_stencil_on_quadratic():
    f = lambda x: np.sum(x**2, axis=-1)
    assert laplacian_fd(f, np.array([0.3, 1.0, -2.0]), 1e-2) == pytest.approx(6.0, rel=1e-9)


def test_residual_order_at_reference_point():
    b = Bubble(5)
    x = np.array([1.0, 0, 0, 0, 0])
    h = 1e-2
    ratio = bubble_residual(b, x, h) / bubble_residual(b, x, h / 2)
    assert abs(ratio - 4) <= 0.2
    assert richardson_ratio(lambda s: bubble_residual(b, x, s), h) == pytest.approx(ratio)


def test_residual_small_at_default_step():
    b = Bubble(5)
    x = np.array([1.0, 0, 0, 0, 0])
    assert bubble_residual(b, x, 1e-3) <= 1e-4 * bubble_eval(b, x) ** b.p


@pytest.mark.parametrize("j", [0, 1, 3])
def test_kernel_residual_second_order(j):
    b = Bubble(5)
    x = np.array([0.7, -0.4, 0.2, 0.5, 0.1])
    ratio = richardson_ratio(lambda s: kernel_residual(b, j, x, s), 1e-2)
    assert abs(ratio - 4) <= 0.2


def test_step_must_be_positive():
    with pytest.raises(DomainError):
        bubble_residual(Bubble(5), np.zeros(5), 0.0)


def test_rotation_helper_is_available():
    # scipy rotations give a second isometry family in 3 of the 5 coordinates
    R = Rotation.from_euler("xyz", [0.3, -1.1, 2.0]).as_matrix()
    Q = np.eye(5)
    Q[:3, :3] = R
    b = Bubble(5, 1.4)
    x = np.array([0.5, 0.2, -0.3, 1.0, 0.0])
    assert bubble_eval(b, Q @ x) == pytest.approx(bubble_eval(b, x), rel=1e-14)

import numpy as np
import pytest

from blowup_reduction import DomainError
from blowup_reduction.reduction_driver import (
    FitRejected,
    ModelGeometry,
    error_scaling_fit,
    fit_norms,
    geometric_grid,
    remainder_bound_check,
    term_norms,
    validate_epsilon_grid,
)

GRID = geometric_grid(0.1, 0.1, 6)


@pytest.fixture(scope="module")
def norms():
    return {d: term_norms(ModelGeometry(d=d), GRID) for d in (1.0, 2.0)}


@pytest.mark.parametrize("term", ["I2", "I3"])
def test_linear_terms_exponent(term):
    fit = error_scaling_fit(5, term, GRID)
    assert fit.exponent == pytest.approx(1.0, abs=0.1)
    assert fit.r_squared >= 0.99
    assert not fit.log_coefficient_flag


def test_i1_prefers_log_model():
    fit = error_scaling_fit(5, "I1", GRID)
    assert fit.log_coefficient_flag
    assert fit.ss_log < fit.ss_power
    assert fit.r_squared >= 0.99


@pytest.mark.parametrize("term", ["I1", "I2", "I3"])
def test_resolution_invariance(term):
    e1 = error_scaling_fit(5, term, GRID, resolution=1).exponent
    e2 = error_scaling_fit(5, term, GRID, resolution=2).exponent
    assert abs(e1 - e2) <= 0.02


def test_doubling_d_doubles_linear_terms(norms):
    for term in ("I2", "I3"):
        ratio = np.asarray(norms[2.0][term]) / np.asarray(norms[1.0][term])
        assert ratio[-1] == pytest.approx(2.0, rel=1e-3)


def test_doubling_d_changes_i1_by_bounded_factor(norms):
    # I1 depends on d through ln delta; its ratio tends to 1 as eps -> 0
    ratio = np.asarray(norms[2.0]["I1"]) / np.asarray(norms[1.0]["I1"])
    assert np.all(np.diff(ratio) > 0)
    assert 0.5 < ratio[0] < ratio[-1] < 1.0


def test_total_fit_on_decade_grid():
    fit = remainder_bound_check(GRID)
    assert fit.r_squared >= 0.99
    total = np.asarray(fit.norms)
    i1 = np.asarray(fit.extra["I1"])
    assert np.all(i1 / total > 0.5)


def test_total_fit_on_halving_grid_is_rejected():
    # on 0.1 * 2^-k the curvature of the log-norm is not yet resolved
    grid = 0.1 * 2.0 ** -np.arange(6)
    with pytest.raises(FitRejected) as info:
        remainder_bound_check(grid)
    assert 0.9 < info.value.fit.r_squared < 0.99


def test_total_tends_to_zero():
    fit = remainder_bound_check(GRID)
    total = np.asarray(fit.norms)
    assert np.all(np.diff(total) < 0)
    assert total[-1] < 1e-3 * total[0]


def test_fit_norms_exact_power_law():
    eps = geometric_grid(0.1, 0.5, 8)
    fit = fit_norms(eps, 3.0 * eps**1.5, "I2")
    assert fit.exponent == pytest.approx(1.5, abs=1e-12)
    assert fit.coefficient == pytest.approx(3.0, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_norms_exact_log_model():
    eps = geometric_grid(0.1, 0.1, 6)
    fit = fit_norms(eps, eps * (0.2 + 2.0 * np.abs(np.log(eps))), "I1")
    assert fit.log_coefficient_flag and fit.ss_log < 1e-20


def test_fit_rejection_carries_fit():
    eps = geometric_grid(0.1, 0.5, 6)
    noisy = eps * np.array([1.0, 5.0, 0.2, 3.0, 0.1, 4.0])
    with pytest.raises(FitRejected) as info:
        fit_norms(eps, noisy, "I2")
    assert info.value.fit.r_squared < 0.99
    assert fit_norms(eps, noisy, "I2", reject=False).r_squared < 0.99


@pytest.mark.parametrize(
    "grid",
    [[0.1, 0.01, 0.001], [0.2, 0.02, 0.002, 2e-4, 2e-5, 2e-6], [0.1, 0.05, 0.02, 0.01, 0.005, 0.002], [-0.1] * 6],
)
def test_grid_validation(grid):
    with pytest.raises(DomainError):
        validate_epsilon_grid(grid)


def test_geometry_validation():
    with pytest.raises(DomainError):
        ModelGeometry(n=4)
    with pytest.raises(DomainError):
        ModelGeometry(d=0.0)
    with pytest.raises(DomainError):
        error_scaling_fit(5, "I4", GRID)

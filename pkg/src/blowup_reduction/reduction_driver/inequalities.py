"""Monte Carlo probe of the elementary power inequalities used for the error terms.

For a > 0, b real and beta > 0, beta != 1:

  (A) ||a+b|^beta - a^beta|  <= c min{|b|^beta, a^(beta-1)|b|}     (beta < 1)
                              <= c (|b|^beta + a^(beta-1)|b|)      (beta > 1)
  (B) ||a+b|^beta (a+b) - a^(beta+1) - (1+beta) a^beta b|
                              <= c min{|b|^(beta+1), a^(beta-1) b^2}  (beta < 1)
                              <= c max{|b|^(beta+1), a^(beta-1) b^2}  (beta > 1)

The constants c(beta) are not known in closed form; the probe estimates them
by maximizing the ratio lhs/bound and then validates on a fresh sample.  Both
ratios are homogeneous in (a, b), so the sample maximum is polished by a 1D
search in t = b/a and compared with the |t| -> infinity limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from blowup_reduction import DomainError


def _bounds(a, b, beta):
    ab = np.abs(b)
    lhs1 = np.abs(np.abs(a + b) ** beta - a**beta)
    lhs2 = np.abs(np.sign(a + b) * np.abs(a + b) ** (beta + 1) - a ** (beta + 1) - (1 + beta) * a**beta * b)
    if beta < 1:
        rhs1 = np.minimum(ab**beta, a ** (beta - 1) * ab)
        rhs2 = np.minimum(ab ** (beta + 1), a ** (beta - 1) * b * b)
    else:
        rhs1 = ab**beta + a ** (beta - 1) * ab
        rhs2 = np.maximum(ab ** (beta + 1), a ** (beta - 1) * b * b)
    return lhs1, rhs1, lhs2, rhs2


def _ratios(a, b, beta):
    lhs1, rhs1, lhs2, rhs2 = _bounds(a, b, beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(rhs1 > 0, lhs1 / rhs1, 0.0)
        r2 = np.where(rhs2 > 0, lhs2 / rhs2, 0.0)
    return r1, r2


def _sample(rng, samples):
    # log-uniform magnitudes so both |b| << a and |b| >> a are covered
    a = 10.0 ** rng.uniform(-4, 4, samples)
    b = rng.choice([-1.0, 1.0], samples) * 10.0 ** rng.uniform(-4, 4, samples) * a
    return a, b


@dataclass(frozen=True)
class InequalityProbe:
    beta: float
    c_first: float
    c_second: float
    validation_first: float
    validation_second: float

    @property
    def max_ratio(self) -> float:
        return max(self.validation_first, self.validation_second)

    @property
    def validated(self) -> bool:
        tol = 1.0 + 1e-6
        return self.validation_first <= self.c_first * tol and self.validation_second <= self.c_second * tol


def _polish(which: int, beta: float, t_best: float) -> float:
    """Local maximum of the ratio in t = b/a near a sampled maximizer, a = 1."""

    def neg(log_abs_t):
        t = np.copysign(np.exp(log_abs_t), t_best)
        return -float(_ratios(np.array([1.0]), np.array([t]), beta)[which][0])

    x0 = np.log(abs(t_best))
    res = optimize.minimize_scalar(neg, bounds=(x0 - 0.5, x0 + 0.5), method="bounded",
                                   options={"xatol": 1e-12})
    far = max(-neg(np.log(1e12)), float(_ratios(np.ones(1), -np.full(1, 1e12), beta)[which][0]))
    return max(-res.fun, far)


def power_inequality_probe(beta: float, samples: int = 100_000, seed: int = 0) -> InequalityProbe:
    """Estimate c(beta) for both inequalities and re-check on fresh samples."""
    if not beta > 0 or beta == 1:
        raise DomainError("beta must be positive and different from 1")
    rng = np.random.default_rng(seed)
    a, b = _sample(rng, samples)
    r1, r2 = _ratios(a, b, beta)
    c = []
    for which, r in enumerate((r1, r2)):
        i = int(np.argmax(r))
        c.append(float(max(r[i], _polish(which, beta, b[i] / a[i]))))
    a, b = _sample(rng, samples)
    v1, v2 = _ratios(a, b, beta)
    return InequalityProbe(
        beta=beta,
        c_first=c[0],
        c_second=c[1],
        validation_first=float(v1.max()),
        validation_second=float(v2.max()),
    )

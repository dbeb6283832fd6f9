"""Leading-order d-gradient of the reduced energy and the sign dichotomy."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from blowup_reduction import DomainError


class EpsilonSide(str, enum.Enum):
    """Side from which the exponent approaches the critical one.

    ABOVE: eps > 0 (supercritical), BELOW: eps < 0 (subcritical).
    """

    ABOVE = "above"
    BELOW = "below"
    NONE = "none"

    @property
    def sign(self) -> int:
        return {"above": 1, "below": -1, "none": 0}[self.value]

    @classmethod
    def from_sign(cls, s) -> "EpsilonSide":
        if isinstance(s, EpsilonSide):
            return s
        if isinstance(s, str):
            return cls(s)
        return cls.ABOVE if s > 0 else cls.BELOW if s < 0 else cls.NONE


class Stability(str, enum.Enum):
    MIN = "min"
    MAX = "max"
    NONDEGENERATE = "nondegenerate"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class ConcentrationCandidate:
    xi0: np.ndarray
    H_a: float
    epsilon_side: EpsilonSide
    d0: Optional[float]
    stability: Stability
    a_value: float = float("nan")
    hessian_eigenvalues: tuple = ()
    gradient_norm: float = 0.0
    converged: bool = True

    def as_dict(self) -> dict:
        return {
            "xi0": [float(v) for v in self.xi0],
            "H_a": self.H_a,
            "epsilon_side": self.epsilon_side.value,
            "d0": self.d0,
            "stability": self.stability.value,
            "a_value": self.a_value,
            "hessian_eigenvalues": [float(v) for v in self.hessian_eigenvalues],
            "gradient_norm": self.gradient_norm,
            "converged": self.converged,
        }


def reduced_gradient_d(c4: float, c5: float, H_a: float, d: float, epsilon: float) -> float:
    """[c4 Ha + c5/d] eps for eps > 0 and [-c4 Ha + c5/d] eps for eps < 0 (o(1) dropped)."""
    if not d > 0:
        raise DomainError("d must be positive")
    if epsilon == 0:
        raise DomainError("epsilon must be nonzero")
    s = 1.0 if epsilon > 0 else -1.0
    return (s * c4 * H_a + c5 / d) * epsilon


@dataclass(frozen=True)
class DichotomyResult:
    side: EpsilonSide
    d0: Optional[float]

    @property
    def admissible(self) -> bool:
        return self.d0 is not None


def admissible_side(H_a: float) -> EpsilonSide:
    """eps > 0 needs Ha < 0, eps < 0 needs Ha > 0; Ha = 0 admits neither."""
    return EpsilonSide.from_sign(-np.sign(H_a))


def solve_d0(c4: float, c5: float, H_a: float, epsilon_sign) -> DichotomyResult:
    """Positive root of the leading d-gradient on the requested side, if any."""
    if not (c4 > 0 and c5 > 0):
        raise DomainError("c4 and c5 must be positive")
    side = EpsilonSide.from_sign(epsilon_sign)
    if side is EpsilonSide.NONE:
        raise DomainError("epsilon_sign must select a side")
    if H_a == 0 or admissible_side(H_a) is not side:
        return DichotomyResult(EpsilonSide.NONE, None)
    d0 = -(c5 / c4) / H_a if side is EpsilonSide.ABOVE else (c5 / c4) / H_a
    return DichotomyResult(side, d0)

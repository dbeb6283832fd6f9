"""Gauss 2F1 in the logarithmic cases c = a + b + m, m in {0, 1}, near z = 1.

scipy's hyp2f1 loses accuracy (and eventually returns inf) as z -> 1 in these
cases; the corrector integrals sit exactly on that edge when the evaluation
point approaches the boundary.  Both series below are in powers of y = 1 - z.
"""

from __future__ import annotations

import math

from scipy import special

_SWITCH = 0.05
_MAX_TERMS = 200


def hyp2f1_shifted(a: float, b: float, m: int, y: float) -> float:
    """2F1(a, b; a + b + m; 1 - y) for m in {0, 1} and 0 < y <= 1."""
    if m not in (0, 1):
        raise ValueError("only c - a - b in {0, 1} is supported")
    if y >= _SWITCH:
        return float(special.hyp2f1(a, b, a + b + m, 1.0 - y))
    log_y = math.log(y)
    if m == 0:
        # sum_k (a)_k (b)_k / k!^2 [2 psi(k+1) - psi(a+k) - psi(b+k) - ln y] y^k
        pref = math.gamma(a + b) / (math.gamma(a) * math.gamma(b))
        coef, total = 1.0, 0.0
        for k in range(_MAX_TERMS):
            bracket = (
                2.0 * special.digamma(k + 1.0)
                - special.digamma(a + k)
                - special.digamma(b + k)
                - log_y
            )
            term = coef * bracket
            total += term
            if k > 2 and abs(term) < 1e-17 * abs(total):
                break
            coef *= (a + k) * (b + k) / ((k + 1.0) ** 2) * y
        return pref * total
    # m == 1:
    # G(a+b+1)/(G(a+1)G(b+1))
    #   + y G(a+b+1)/(G(a)G(b)) sum_k (a+1)_k (b+1)_k / (k!(k+1)!) y^k
    #       [ln y - psi(k+1) - psi(k+2) + psi(a+k+1) + psi(b+k+1)]
    g = math.gamma(a + b + 1.0)
    head = g / (math.gamma(a + 1.0) * math.gamma(b + 1.0))
    pref = g / (math.gamma(a) * math.gamma(b))
    coef, total = 1.0, 0.0
    for k in range(_MAX_TERMS):
        bracket = (
            log_y
            - special.digamma(k + 1.0)
            - special.digamma(k + 2.0)
            + special.digamma(a + k + 1.0)
            + special.digamma(b + k + 1.0)
        )
        term = coef * bracket
        total += term
        if k > 2 and abs(term) < 1e-17 * abs(total):
            break
        coef *= (a + k + 1.0) * (b + k + 1.0) / ((k + 1.0) * (k + 2.0)) * y
    return head + y * pref * total

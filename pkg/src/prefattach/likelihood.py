"""Log-likelihood of observed degree counts under the GPA limit distribution.

With truncation level ``l`` every vertex of degree ``i >= l`` contributes
``log f(i) - log F(l - 1)``, i.e. the pmf conditioned on ``degree >= l``.
At ``l = 0`` this is the plain product of limiting probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degrees import DegreeCounts
from .errors import InputError
from .limit import DEFAULT_TOL, LimitModel, solve_model
from .pref import PrefParams

__all__ = ["LogLik", "MAX_DEGREE", "log_likelihood", "log_conditional_pmf"]

MAX_DEGREE = 10**8


@dataclass(frozen=True)
class LogLik:
    value: float
    lambda_star: float
    l: int

    def __float__(self):
        return self.value


def log_conditional_pmf(m: LimitModel, ks, l: int, form: str = "beta") -> np.ndarray:
    """``log P(degree = k | degree >= l)`` for each k in ``ks`` (all ``>= l``).

    ``form="beta"`` uses the Beta-ratio pmf past ``k0``; ``form="difference"``
    uses ``F(k - 1) - F(k)``.
    """
    ks = np.asarray(ks, dtype=np.int64)
    if form == "beta":
        logf = m.log_pmf(ks)
    elif form == "difference":
        logf = np.log(m.pmf_difference(ks))
    else:
        raise InputError(f"unknown pmf form {form!r}")
    return logf - m.log_survival(l - 1)


def log_likelihood(d: DegreeCounts, p: PrefParams, l: int | None = None, *,
                   tol: float = DEFAULT_TOL, form: str = "beta") -> LogLik:
    l = d.l if l is None else int(l)
    if l < 0:
        raise InputError("truncation level must be nonnegative")
    ks, ns = d.arrays(modeled_only=False)
    keep = ks >= l
    ks, ns = ks[keep], ns[keep]
    if ks.size == 0:
        raise InputError(f"no vertices with degree >= {l}")
    if ks[-1] > MAX_DEGREE:
        raise InputError(f"degree {ks[-1]} exceeds the supported maximum {MAX_DEGREE}")
    m = solve_model(p, tol)
    terms = log_conditional_pmf(m, ks, l, form)
    return LogLik(float(np.dot(ns, terms)), m.lambda_star, l)

"""Piecewise power/linear preference function for preferential attachment.

Below the changeover degree ``k0`` the attachment weight grows like a power of
the degree; from ``k0`` on it grows linearly with slope ``beta``::

    b(k) = k**alpha + epsilon                          k < k0
    b(k) = k0**alpha + epsilon + beta * (k - k0)       k >= k0

``0**alpha`` is taken to be 0 for every ``alpha > 0`` so that ``b(0) = epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputError

__all__ = ["PrefParams", "pref_eval", "pref_values", "pref_diff_limit"]


@dataclass(frozen=True)
class PrefParams:
    alpha: float
    beta: float
    epsilon: float
    k0: int

    def __post_init__(self):
        for name in ("alpha", "beta", "epsilon"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
                raise InputError(f"{name} must be a finite positive real, got {value!r}")
            object.__setattr__(self, name, float(value))
        k0 = self.k0
        if isinstance(k0, (float, np.floating)):
            if not float(k0).is_integer():
                raise InputError(f"k0 must be an integer, got {k0!r}")
            k0 = int(k0)
        if not isinstance(k0, (int, np.integer)) or isinstance(k0, bool) or k0 < 1:
            raise InputError(f"k0 must be an integer >= 1, got {k0!r}")
        object.__setattr__(self, "k0", int(k0))

    @property
    def threshold_weight(self) -> float:
        """``b(k0) = k0**alpha + epsilon``, where the linear regime starts."""
        return self.k0**self.alpha + self.epsilon

    @cached_property
    def head_weights(self) -> np.ndarray:
        """``b(0), ..., b(k0 - 1)`` as a read-only array."""
        out = pref_values(self, np.arange(self.k0))
        out.setflags(write=False)
        return out

    def as_tuple(self) -> tuple[float, float, float, int]:
        return (self.alpha, self.beta, self.epsilon, self.k0)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "epsilon": self.epsilon, "k0": self.k0}


def pref_eval(p: PrefParams, k: int) -> float:
    if k < 0:
        raise InputError(f"degree must be nonnegative, got {k}")
    if k < p.k0:
        value = (k**p.alpha if k > 0 else 0.0) + p.epsilon
    else:
        value = p.threshold_weight + p.beta * (k - p.k0)
    if not value > 0:
        raise ArithmeticError(f"preference weight b({k}) = {value} is not positive")
    return value


def pref_values(p: PrefParams, ks) -> np.ndarray:
    """Vectorised :func:`pref_eval` over an integer array of degrees."""
    ks = np.asarray(ks)
    if ks.size and ks.min() < 0:
        raise InputError("degrees must be nonnegative")
    kf = ks.astype(float)
    with np.errstate(over="ignore"):
        head = np.power(kf, p.alpha) + p.epsilon  # 0.0**alpha == 0.0 for alpha > 0
    tail = p.threshold_weight + p.beta * (kf - p.k0)
    out = np.where(ks < p.k0, head, tail)
    if out.size and not np.all(out > 0):
        raise ArithmeticError("preference weights must be positive")
    return out


def pref_diff_limit(p: PrefParams) -> float:
    """Limit of ``b(k + 1) - b(k)``; exactly ``beta`` since b is linear past k0."""
    return p.beta

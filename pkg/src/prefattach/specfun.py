"""Cancellation-free log-gamma ratios.

``gammaln(x) - gammaln(x + c)`` loses about ``eps * gammaln(x)`` in absolute
terms, which for ``x`` in the thousands is already ~1e-12.  For large
arguments the Stirling series is differenced term by term instead.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

__all__ = ["log_gamma_ratio", "log_beta_ratio"]

# B_{2j} / (2j (2j - 1)) for j = 1..7
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
_ASYMPTOTIC_MIN = 12.0


def _stirling_tail(w):
    inv = 1.0 / w
    inv2 = inv * inv
    acc = np.zeros_like(w)
    for coef in reversed(_STIRLING):
        acc = acc * inv2 + coef
    return acc * inv


def log_gamma_ratio(x, c):
    """Return ``log(Gamma(x) / Gamma(x + c))`` for ``x > 0``, ``c >= 0``."""
    x, c = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(c, dtype=float))
    out = np.empty(x.shape, dtype=float)
    big = x >= _ASYMPTOTIC_MIN
    if np.any(~big):
        xs, cs = x[~big], c[~big]
        out[~big] = gammaln(xs) - gammaln(xs + cs)
    if np.any(big):
        xb, cb = x[big], c[big]
        w = xb + cb
        # (x - 1/2) log x - (x + c - 1/2) log(x + c) + c, rearranged
        main = -(xb - 0.5) * np.log1p(cb / xb) - cb * np.log(w) + cb
        out[big] = main + _stirling_tail(xb) - _stirling_tail(w)
    return out if out.ndim else float(out)


def _log1pmx(u):
    # log1p(u) - u, series for small u where the subtraction would cancel
    u = np.asarray(u, dtype=float)
    shape = u.shape
    u = np.atleast_1d(u)
    small = np.abs(u) < 0.25
    out = np.log1p(u) - u
    if np.any(small):
        us = u[small]
        acc = np.zeros_like(us)
        for j in range(40, 1, -1):
            acc = acc * us + (-1.0) ** (j + 1) / j
        out[small] = acc * us * us
    return out.reshape(shape)


def log_gamma_ratio_shift(x, c, n):
    """Return ``log_gamma_ratio(x + n, c) - log_gamma_ratio(x, c)`` for scalar x, c.

    Both ratios are of size ``c log x`` while their difference is only about
    ``-c log1p(n / x)``, so the Stirling terms are differenced before summing.
    """
    n = np.asarray(n, dtype=float)
    x = float(x)
    c = float(c)
    if x < _ASYMPTOTIC_MIN:
        return log_gamma_ratio(x + n, c) - log_gamma_ratio(x, c)
    xn = x + n
    # (x - 1/2) log1p(c/x) = c - log1p(c/x)/2 + x * log1pmx(c/x)
    half_logs = -0.5 * np.log1p(c * n / (x * (xn + c)))
    rem = x * _log1pmx(c / x) - xn * _log1pmx(c / xn)
    tails = (_stirling_tail(xn) - _stirling_tail(np.asarray(x))) - (
        _stirling_tail(xn + c) - _stirling_tail(np.asarray(x + c))
    )
    out = half_logs + rem - c * np.log1p(n / (x + c)) + tails
    return out if out.ndim else float(out)


def log_beta_ratio(a, b, shift):
    """Return ``log(B(a + shift, 1 + b) / B(a, b))``.

    Expands to ``log b + [lnG(a+shift) - lnG(a+shift+1+b)] - [lnG(a) - lnG(a+b)]``
    so every gamma difference goes through :func:`log_gamma_ratio`.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shift = np.asarray(shift, dtype=float)
    out = np.log(b) + log_gamma_ratio(a + shift, 1.0 + b) - log_gamma_ratio(a, b)
    return out

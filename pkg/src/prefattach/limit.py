"""Limiting degree distribution of the GPA tree with the piecewise preference.

The survival function has product form ``prod_{i<=k} b(i) / (lam + b(i))``
where ``lam`` is the Malthusian parameter, the unique root of
``rho_hat(lam) = 1`` on ``(beta, inf)``.  Past ``k0`` the product telescopes
into gamma-function ratios, so everything here is evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, SolverError
from .pref import PrefParams, pref_values
from .specfun import log_beta_ratio, log_gamma_ratio, log_gamma_ratio_shift

__all__ = [
    "DEFAULT_TOL",
    "LimitModel",
    "IgpParams",
    "XiGrid",
    "rho_hat",
    "solve_lambda_star",
    "solve_model",
    "tail_index",
    "survival",
    "pmf",
    "igp_approx",
    "igp_survival",
    "omega_diag",
    "omega_gpa",
    "xi_grid",
    "gamma_ratio_sum",
]

DEFAULT_TOL = 1e-10
MAX_BRACKET_STEPS = 200


def _log_head_factors(p: PrefParams, lam: float) -> np.ndarray:
    # log(b(i) / (lam + b(i))) for i = 0..k0-1
    return -np.log1p(lam / p.head_weights)


def _rho_hat_delta(p: PrefParams, delta: float) -> float:
    # rho_hat at lam = beta + delta; delta carried separately so the pole
    # term keeps full relative precision when lam is within ulps of beta.
    lam = p.beta + delta
    cum = np.cumsum(_log_head_factors(p, lam))
    head = float(np.sum(np.exp(cum)))
    return head + p.threshold_weight / delta * math.exp(cum[-1])


def rho_hat(p: PrefParams, lam: float) -> float:
    """Laplace transform of the reproduction intensity, summed over n >= 1."""
    if not lam > p.beta:
        raise InputError(f"rho_hat requires lambda > beta ({lam} <= {p.beta})")
    return _rho_hat_delta(p, lam - p.beta)


def _solve_log_delta(p: PrefParams, tol: float) -> float:
    def f(u: float) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            return math.log(_rho_hat_delta(p, math.exp(u)))

    log_beta = math.log(p.beta)
    lo = log_beta + math.log(1e-9)
    hi = log_beta
    steps = 0
    f_lo = f(lo)
    while not f_lo > 0:
        lo -= math.log(1e3)
        steps += 1
        # below this lam rounds to beta
        if steps > MAX_BRACKET_STEPS or lo < log_beta - 36.0:
            raise SolverError(f"cannot bracket lambda* from below for {p}")
        f_lo = f(lo)
    f_hi = f(hi)
    while not f_hi < 0:
        if not math.isfinite(f_hi):
            raise SolverError(f"rho_hat is not finite for {p}")
        hi += math.log(2.0)
        steps += 1
        if steps > MAX_BRACKET_STEPS:
            raise SolverError(f"cannot bracket lambda* from above for {p}")
        f_hi = f(hi)
    if not math.isfinite(f_lo):
        raise SolverError(f"rho_hat is not finite for {p}")

    u = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    # brentq stops on bracket width; polish by bisection if the residual is still loose
    a, b = (lo, hi)
    for _ in range(200):
        r = _rho_hat_delta(p, math.exp(u)) - 1.0
        if abs(r) <= tol:
            return u
        if r > 0:
            a = u
        else:
            b = u
        u_next = 0.5 * (a + b)
        if u_next == u:
            break
        u = u_next
    raise SolverError(f"residual {r:.3g} above tolerance {tol:g} for {p}")


def solve_lambda_star(p: PrefParams, tol: float = DEFAULT_TOL) -> float:
    """Malthusian parameter: the root of ``rho_hat(lam) = 1`` with ``lam > beta``."""
    if not tol > 0:
        raise InputError("tol must be positive")
    return p.beta + math.exp(_solve_log_delta(p, tol))


@dataclass(frozen=True)
class LimitModel:
    params: PrefParams
    lambda_star: float
    delta: float
    log_prefix: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_params(cls, p: PrefParams, tol: float = DEFAULT_TOL) -> "LimitModel":
        delta = math.exp(_solve_log_delta(p, tol))
        lam = p.beta + delta
        log_prefix = np.cumsum(_log_head_factors(p, lam))
        log_prefix.setflags(write=False)
        return cls(p, lam, delta, log_prefix)

    @property
    def xi(self) -> float:
        return self.params.beta / self.lambda_star

    @property
    def _tail_shape(self) -> tuple[float, float]:
        # (x, y) = ((k0^a + eps) / beta, lam / beta)
        p = self.params
        return p.threshold_weight / p.beta, self.lambda_star / p.beta

    def log_survival(self, k) -> np.ndarray | float:
        """``log F(k)`` for integer ``k >= -1``; ``log F(-1) = 0``."""
        k = np.asarray(k, dtype=np.int64)
        if k.size and k.min() < -1:
            raise InputError("survival is defined for k >= -1")
        k0 = self.params.k0
        out = np.zeros(k.shape, dtype=float)
        head = (k >= 0) & (k < k0)
        out[head] = self.log_prefix[k[head]]
        tail = k >= k0
        if np.any(tail):
            x, y = self._tail_shape
            n = (k[tail] - k0 + 1).astype(float)
            out[tail] = self.log_prefix[-1] + log_gamma_ratio_shift(x, y, n)
        return out if out.ndim else float(out)

    def log_pmf(self, k) -> np.ndarray | float:
        """Log probability mass; the Beta-ratio form is used for ``k >= k0``."""
        k = np.asarray(k, dtype=np.int64)
        if k.size and k.min() < 0:
            raise InputError("pmf is defined for k >= 0")
        p = self.params
        lam = self.lambda_star
        out = np.empty(k.shape, dtype=float)
        head = k < p.k0
        if np.any(head):
            kh = k[head]
            prev = np.where(kh > 0, self.log_prefix[np.maximum(kh - 1, 0)], 0.0)
            out[head] = prev - np.log1p(p.head_weights[kh] / lam)
        tail = ~head
        if np.any(tail):
            x, y = self._tail_shape
            out[tail] = self.log_prefix[-1] + log_beta_ratio(x, y, (k[tail] - p.k0).astype(float))
        return out if out.ndim else float(out)

    def log_pmf_product(self, k) -> np.ndarray | float:
        """Log pmf as ``lam / (lam + b(k)) * F(k - 1)`` for every k."""
        k = np.asarray(k, dtype=np.int64)
        out = self.log_survival(k - 1) - np.log1p(pref_values(self.params, k) / self.lambda_star)
        return out

    def survival(self, k):
        return np.exp(self.log_survival(k))

    def pmf(self, k):
        return np.exp(self.log_pmf(k))

    def pmf_difference(self, k):
        """pmf as ``F(k - 1) - F(k)``, evaluated as ``F(k-1) * -expm1(log ratio)``."""
        k = np.asarray(k, dtype=np.int64)
        upper = self.log_survival(k - 1)
        return np.exp(upper) * -np.expm1(self.log_survival(k) - upper)


@lru_cache(maxsize=4096)
def _cached_model(alpha: float, beta: float, epsilon: float, k0: int, tol: float) -> LimitModel:
    return LimitModel.from_params(PrefParams(alpha, beta, epsilon, k0), tol)


def solve_model(p: PrefParams, tol: float = DEFAULT_TOL) -> LimitModel:
    """Memoised :meth:`LimitModel.from_params` keyed on the exact parameter values."""
    return _cached_model(p.alpha, p.beta, p.epsilon, p.k0, tol)


def tail_index(m: LimitModel) -> float:
    return m.params.beta / m.lambda_star


def survival(m: LimitModel, k):
    return m.survival(k)


def pmf(m: LimitModel, k):
    return m.pmf(k)


@dataclass(frozen=True)
class IgpParams:
    xi: float
    sigma: float
    v: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise InputError("IGP scale must be positive")
        if not self.xi > 0:
            raise InputError("only the heavy-tailed IGP (xi > 0) is supported")


def igp_approx(m: LimitModel) -> IgpParams:
    """Stirling approximation of the tail beyond ``k0 - 1`` by an integer GP."""
    p = m.params
    return IgpParams(xi=p.beta / m.lambda_star, sigma=p.threshold_weight / m.lambda_star, v=p.k0 - 1)


def igp_survival(g: IgpParams, x):
    """``P(X > x | X > v) = (1 + xi (x - v) / sigma) ** (-1 / xi)``."""
    x = np.asarray(x, dtype=float)
    if x.size and x.min() < g.v:
        raise InputError(f"IGP survival needs x >= v = {g.v}")
    out = np.power(1.0 + g.xi * (x - g.v) / g.sigma, -1.0 / g.xi)
    return out if out.ndim else float(out)


def omega_diag(sf: Callable[[int], float], k: int) -> float:
    """Omega statistic from survival values at k, k+1, k+2.

    Tends to ``1/a`` for regularly varying tails ``F(k) ~ k**-a`` and to 0 for
    geometric-like tails.
    """
    f0, f1, f2 = (float(sf(k)), float(sf(k + 1)), float(sf(k + 2)))
    if not (f0 > 0 and f1 > 0 and f2 > 0):
        raise InputError(f"survival must be positive at k={k}..{k + 2}")
    if not (f0 > f1 > f2):
        raise InputError(f"survival must be strictly decreasing at k={k}..{k + 2}")
    return 1.0 / math.log(f1 / f2) - 1.0 / math.log(f0 / f1)


def omega_gpa(m: LimitModel, k: int) -> float:
    """Omega for the product-form survival, without forming survival values.

    ``F(j) / F(j + 1) = 1 + lam / b(j + 1)``, which stays meaningful long after
    ``F`` itself underflows.
    """
    b1, b2 = pref_values(m.params, [k + 1, k + 2])
    lam = m.lambda_star
    return 1.0 / math.log1p(lam / b2) - 1.0 / math.log1p(lam / b1)


@dataclass
class XiGrid:
    alphas: np.ndarray
    betas: np.ndarray
    epsilon: float
    k0: int
    lambda_star: np.ndarray  # shape (len(alphas), len(betas)); nan where invalid
    xi: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.xi)

    def contour_cells(self, level: float = 0.5) -> list[tuple[int, int]]:
        """Cells on either side of the ``xi = level`` contour (4-neighbourhood)."""
        s = np.sign(self.xi - level)
        cells = set(zip(*np.nonzero(s == 0)))
        na, nb = s.shape
        for i in range(na):
            for j in range(nb):
                for di, dj in ((1, 0), (0, 1)):
                    ii, jj = i + di, j + dj
                    if ii < na and jj < nb and s[i, j] * s[ii, jj] < 0:
                        cells.add((i, j))
                        cells.add((ii, jj))
        return sorted((int(i), int(j)) for i, j in cells)

    def rows(self):
        for i, a in enumerate(self.alphas):
            for j, b in enumerate(self.betas):
                yield (float(a), float(b), self.epsilon, self.k0, float(self.lambda_star[i, j]), float(self.xi[i, j]))


def xi_grid(alpha_values: Sequence[float], beta_values: Sequence[float], epsilon: float, k0: int,
            tol: float = DEFAULT_TOL) -> XiGrid:
    alphas = np.asarray(alpha_values, dtype=float)
    betas = np.asarray(beta_values, dtype=float)
    if alphas.size == 0 or betas.size == 0:
        raise InputError("alpha and beta ranges must be nonempty")
    lam = np.full((alphas.size, betas.size), np.nan)
    xi = np.full_like(lam, np.nan)
    errors = {}
    for i, a in enumerate(alphas):
        for j, b in enumerate(betas):
            try:
                m = LimitModel.from_params(PrefParams(a, b, epsilon, k0), tol)
            except (SolverError, InputError) as exc:
                errors[(i, j)] = str(exc)
                continue
            lam[i, j] = m.lambda_star
            xi[i, j] = m.xi
    return XiGrid(alphas, betas, float(epsilon), int(k0), lam, xi, errors)


def gamma_ratio_sum(x: float, y: float, terms: int) -> float:
    """Partial sum of ``Gamma(n + x) / Gamma(n + x + y)`` over ``n < terms``.

    Tends to ``Gamma(x) / ((y - 1) Gamma(x + y - 1))`` when ``y > 1``.
    """
    if terms < 1:
        raise InputError("terms must be >= 1")
    n = np.arange(terms, dtype=float)
    vals = np.exp(log_gamma_ratio(x + n, y))
    # smallest terms first
    return float(math.fsum(vals[::-1]))

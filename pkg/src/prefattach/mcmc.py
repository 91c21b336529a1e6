"""Adaptive Metropolis-Hastings for the preference parameters.

Two blocks per iteration:

* A: joint Gaussian random walk on ``(log alpha, log beta, log epsilon)``
  whose covariance follows the scaled empirical covariance of the
  latest half of the chain once ``adapt_start`` iterations have passed.
* B: integer move on ``k0``; a reflected +-{1..w} step, or with small
  probability a uniform draw over the whole prior support.

Priors: ``alpha, beta, epsilon ~ Gamma(shape=1, rate=0.01)`` and ``k0``
uniform on ``{1, ..., 10000}``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .degrees import DegreeCounts
from .errors import GPAError, InputError, SamplerError
from .likelihood import log_likelihood
from .limit import DEFAULT_TOL, solve_model
from .pref import PrefParams, pref_values

__all__ = [
    "Priors",
    "SamplerConfig",
    "Chain",
    "PosteriorSummary",
    "fit",
    "fit_chains",
    "posterior_summary",
    "posterior_survival_band",
    "posterior_pref_band",
    "effective_sample_size",
    "CHAIN_COLUMNS",
]

CHAIN_COLUMNS = ("alpha", "beta", "epsilon", "k0", "lambda_star", "log_post")
ACCEPT_A = 1
ACCEPT_B = 2


@dataclass(frozen=True)
class Priors:
    rate_alpha: float = 0.01
    rate_beta: float = 0.01
    rate_epsilon: float = 0.01
    k0_max: int = 10000

    def log_prior(self, alpha: float, beta: float, epsilon: float, k0: int) -> float:
        if not (alpha > 0 and beta > 0 and epsilon > 0 and 1 <= k0 <= self.k0_max):
            return -math.inf
        # Gamma(1, rate) is Exponential(rate)
        return (
            math.log(self.rate_alpha) - self.rate_alpha * alpha
            + math.log(self.rate_beta) - self.rate_beta * beta
            + math.log(self.rate_epsilon) - self.rate_epsilon * epsilon
            - math.log(self.k0_max)
        )


@dataclass(frozen=True)
class SamplerConfig:
    iterations: int = 50_000
    burn_in: int = 10_000
    adapt_start: int = 1_000
    adapt_every: int = 50
    scale: float = 2.38**2 / 3
    jitter: float = 1e-6
    initial_step: float = 0.05
    k0_step: int = 5
    k0_global_prob: float = 0.1
    tol: float = DEFAULT_TOL
    use_likelihood: bool = True
    init: tuple | None = None  # (alpha, beta, epsilon, k0)

    def __post_init__(self):
        if self.iterations < 1:
            raise InputError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise InputError("burn_in must be in [0, iterations)")
        if self.k0_step < 1:
            raise InputError("k0_step must be >= 1")
        if not 0 <= self.k0_global_prob <= 1:
            raise InputError("k0_global_prob must be in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Chain:
    draws: np.ndarray  # (iterations, 6) in CHAIN_COLUMNS order
    accepted: np.ndarray  # bit flags per iteration: 1 = block A, 2 = block B
    config: SamplerConfig
    seed: int | None
    l: int
    proposal_cov: np.ndarray = field(repr=False)
    running_mean: np.ndarray = field(repr=False)  # adaptation window statistics
    running_cov: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.draws)

    def column(self, name: str, burn_in: int = 0) -> np.ndarray:
        return self.draws[burn_in:, CHAIN_COLUMNS.index(name)]

    def acceptance_rates(self, start: int = 0) -> dict:
        acc = self.accepted[start:]
        if acc.size == 0:
            return {"block_a": float("nan"), "block_b": float("nan")}
        return {
            "block_a": float(np.mean(acc & ACCEPT_A > 0)),
            "block_b": float(np.mean(acc & ACCEPT_B > 0)),
        }


class _Target:
    """Log posterior with the log-transform Jacobian for the continuous block."""

    def __init__(self, data, l, priors, cfg, loglik_fn):
        self.data = data
        self.l = l
        self.priors = priors
        self.cfg = cfg
        self.loglik_fn = loglik_fn

    def __call__(self, z: np.ndarray, k0: int) -> tuple[float, float]:
        alpha, beta, epsilon = (math.exp(z[0]), math.exp(z[1]), math.exp(z[2]))
        lp = self.priors.log_prior(alpha, beta, epsilon, k0)
        if not math.isfinite(lp):
            return -math.inf, math.nan
        lam = math.nan
        ll = 0.0
        if self.loglik_fn is not None:
            ll = float(self.loglik_fn(alpha, beta, epsilon, k0))
        elif self.cfg.use_likelihood:
            try:
                with np.errstate(all="ignore"):
                    res = log_likelihood(self.data, PrefParams(alpha, beta, epsilon, k0), self.l, tol=self.cfg.tol)
            except (GPAError, ArithmeticError, ValueError):
                return -math.inf, math.nan
            ll, lam = res.value, res.lambda_star
        if not math.isfinite(ll):
            return -math.inf, lam
        return ll + lp + float(z.sum()), lam


def _initial_state(data: DegreeCounts | None, cfg: SamplerConfig) -> tuple[np.ndarray, int]:
    if cfg.init is not None:
        alpha, beta, epsilon, k0 = cfg.init
        return np.log([alpha, beta, epsilon]), int(k0)
    k0 = 1
    if data is not None:
        ks, ns = data.arrays(modeled_only=True)
        cdf = np.cumsum(ns) / ns.sum()
        k0 = int(ks[np.searchsorted(cdf, 0.9)])
    return np.zeros(3), max(1, k0)


def _reflect(k: int, upper: int) -> int:
    # mirror about 1/2 and upper + 1/2 keeps the integer walk symmetric
    while k < 1 or k > upper:
        if k < 1:
            k = 1 - k
        if k > upper:
            k = 2 * upper + 1 - k
    return k


def fit(data: DegreeCounts | None, l: int | None = None, cfg: SamplerConfig | None = None,
        seed: int | np.random.SeedSequence | None = 0, priors: Priors | None = None,
        loglik_fn: Callable[[float, float, float, int], float] | None = None) -> Chain:
    """Run one adaptive MH chain.

    ``loglik_fn(alpha, beta, epsilon, k0)`` replaces the GPA likelihood when
    given (used to check the sampler against closed-form targets).
    """
    cfg = cfg or SamplerConfig()
    priors = priors or Priors()
    if data is not None:
        l = data.l if l is None else int(l)
        if l < 0:
            raise InputError("truncation level must be nonnegative")
        if cfg.use_likelihood and loglik_fn is None and l >= data.M:
            raise InputError(f"truncation level {l} leaves no degree range to fit (max degree {data.M})")
    elif cfg.use_likelihood and loglik_fn is None:
        raise InputError("data is required unless the likelihood is disabled")
    l = 0 if l is None else l

    rng = np.random.default_rng(seed)
    target = _Target(data, l, priors, cfg, loglik_fn)
    z, k0 = _initial_state(data, cfg)
    if cfg.init is None:
        k0 = min(max(k0, 1), priors.k0_max)
    logp, lam = target(z, k0)
    if not math.isfinite(logp):
        raise SamplerError(
            f"initial log-posterior is not finite at (alpha, beta, epsilon, k0) = "
            f"{tuple(np.exp(z).round(6))} {k0}; supply a different init"
        )

    n = cfg.iterations
    draws = np.empty((n, len(CHAIN_COLUMNS)))
    accepted = np.zeros(n, dtype=np.int8)
    dim = 3
    log_hist = np.empty((n, dim))
    mean = z.copy()
    cov = np.zeros((dim, dim))
    prop_cov = np.eye(dim) * cfg.initial_step**2
    chol = np.linalg.cholesky(prop_cov)
    log_u = np.log(rng.random((n, 2)))
    normals = rng.standard_normal((n, dim))
    k_moves = rng.random((n, 2))
    w = cfg.k0_step

    for it in range(n):
        # block A: continuous parameters on the log scale
        z_new = z + chol @ normals[it]
        logp_new, lam_new = target(z_new, k0)
        if log_u[it, 0] < logp_new - logp:
            z, logp, lam = z_new, logp_new, lam_new
            accepted[it] |= ACCEPT_A

        # block B: changeover degree
        if k_moves[it, 0] < cfg.k0_global_prob:
            k_new = 1 + int(k_moves[it, 1] * priors.k0_max)
        else:
            step = 1 + int(k_moves[it, 1] * 2 * w)
            step = step if step <= w else w - step
            k_new = _reflect(k0 + step, priors.k0_max)
        if k_new != k0:
            logp_new, lam_new = target(z, k_new)
            if log_u[it, 1] < logp_new - logp:
                k0, logp, lam = k_new, logp_new, lam_new
                accepted[it] |= ACCEPT_B
        else:
            accepted[it] |= ACCEPT_B

        ez = np.exp(z)
        draws[it] = (ez[0], ez[1], ez[2], k0, lam, logp)
        log_hist[it] = z

        t = it + 1
        if t >= cfg.adapt_start and t % cfg.adapt_every == 0:
            # covariance of the latest half of the history; forgets the initial transient
            window = log_hist[t // 2:t]
            mean = window.mean(axis=0)
            cov = np.atleast_2d(np.cov(window, rowvar=False))
            prop_cov = cfg.scale * cov + cfg.jitter * np.eye(dim)
            chol = np.linalg.cholesky(prop_cov)

    return Chain(
        draws=draws,
        accepted=accepted,
        config=cfg,
        seed=None if isinstance(seed, np.random.SeedSequence) else seed,
        l=l,
        proposal_cov=prop_cov,
        running_mean=mean,
        running_cov=cov,
    )


def _fit_job(args):
    data, l, cfg, seed_seq = args
    return fit(data, l, cfg, seed_seq)


def fit_chains(data: DegreeCounts, l: int | None = None, cfg: SamplerConfig | None = None,
               seed: int = 0, chains: int = 1, workers: int = 1) -> list[Chain]:
    """Independent chains seeded from ``SeedSequence(seed).spawn(chains)``."""
    if chains < 1:
        raise InputError("chains must be >= 1")
    seqs = np.random.SeedSequence(seed).spawn(chains)
    jobs = [(data, l, cfg, s) for s in seqs]
    if workers > 1 and chains > 1:
        with ProcessPoolExecutor(max_workers=min(workers, chains)) as pool:
            out = list(pool.map(_fit_job, jobs))
    else:
        out = [_fit_job(j) for j in jobs]
    for c in out:
        c.seed = seed
    return out


def effective_sample_size(x: np.ndarray) -> float:
    """ESS from the initial monotone sequence of autocorrelation pairs."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        return float(n)
    xc = x - x.mean()
    var = xc @ xc / n
    if var == 0:
        return float("nan")
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, size)
    acf = np.fft.irfft(f * np.conj(f), size)[:n] / (n * var)
    tau = -1.0
    prev = math.inf
    for k in range(0, n - 1, 2):
        pair = acf[k] + acf[k + 1]
        if pair <= 0:
            break
        pair = min(pair, prev)
        prev = pair
        tau += 2 * pair
    return float(n / max(tau, 1e-12))


@dataclass
class PosteriorSummary:
    parameters: dict
    xi: dict
    ess: dict
    acceptance: dict
    n_draws: int
    burn_in: int
    degenerate: bool
    config: dict

    def to_dict(self) -> dict:
        return asdict(self)


def _describe(x: np.ndarray) -> dict:
    q = np.quantile(x, [0.025, 0.5, 0.975])
    return {"mean": float(np.mean(x)), "median": float(q[1]), "q025": float(q[0]), "q975": float(q[2])}


def _retained(chains: Chain | Sequence[Chain], burn_in: int | None) -> tuple[np.ndarray, list[Chain], int]:
    chains = [chains] if isinstance(chains, Chain) else list(chains)
    if not chains:
        raise InputError("no chains given")
    b = chains[0].config.burn_in if burn_in is None else burn_in
    for c in chains:
        if not 0 <= b < len(c):
            raise InputError(f"burn_in {b} must be smaller than the chain length {len(c)}")
    return np.concatenate([c.draws[b:] for c in chains]), chains, b


def posterior_summary(chains: Chain | Sequence[Chain], burn_in: int | None = None) -> PosteriorSummary:
    kept, chains, b = _retained(chains, burn_in)
    params = {}
    ess = {}
    for j, name in enumerate(CHAIN_COLUMNS[:5]):
        col = kept[:, j]
        params[name] = _describe(col)
        ess[name] = float(sum(effective_sample_size(c.draws[b:, j]) for c in chains))
    xi = kept[:, 1] / kept[:, 4]
    xi_summary = _describe(xi) if np.all(np.isfinite(xi)) else None
    rates = [c.acceptance_rates(b) for c in chains]
    acceptance = {k: float(np.mean([r[k] for r in rates])) for k in ("block_a", "block_b")}
    degenerate = bool(np.all(kept[:, :4] == kept[0, :4]))
    return PosteriorSummary(
        parameters=params,
        xi=xi_summary,
        ess=ess,
        acceptance=acceptance,
        n_draws=int(kept.shape[0]),
        burn_in=b,
        degenerate=degenerate,
        config=chains[0].config.to_dict(),
    )


def _thin(kept: np.ndarray, max_draws: int | None) -> np.ndarray:
    if max_draws is None or kept.shape[0] <= max_draws:
        return kept
    idx = np.linspace(0, kept.shape[0] - 1, max_draws).round().astype(int)
    return kept[idx]


def _band(values: np.ndarray, level: float) -> dict:
    lo, hi = (1 - level) / 2, 1 - (1 - level) / 2
    q = np.quantile(values, [lo, 0.5, hi], axis=0)
    return {"median": q[1], "lower": q[0], "upper": q[2]}


def posterior_survival_band(chains: Chain | Sequence[Chain], ks, level: float = 0.95,
                            burn_in: int | None = None, max_draws: int | None = 1000,
                            conditional_on: int | None = None) -> dict:
    """Pointwise median and central ``level`` interval of the survival function.

    ``conditional_on=l`` returns ``F(k) / F(l - 1)``, matching a fit truncated at l.
    """
    kept, chains, _ = _retained(chains, burn_in)
    kept = _thin(kept, max_draws)
    ks = np.asarray(ks, dtype=np.int64)
    tol = chains[0].config.tol
    curves = np.empty((kept.shape[0], ks.size))
    for i, row in enumerate(kept):
        m = solve_model(PrefParams(row[0], row[1], row[2], int(row[3])), tol)
        logs = m.log_survival(ks)
        if conditional_on is not None:
            logs = logs - m.log_survival(conditional_on - 1)
        curves[i] = np.exp(logs)
    out = _band(curves, level)
    out["k"] = ks
    return out


def posterior_pref_band(chains: Chain | Sequence[Chain], ks, level: float = 0.95,
                        burn_in: int | None = None, max_draws: int | None = 1000) -> dict:
    kept, _, _ = _retained(chains, burn_in)
    kept = _thin(kept, max_draws)
    ks = np.asarray(ks, dtype=np.int64)
    with np.errstate(over="ignore"):
        curves = np.array([pref_values(PrefParams(r[0], r[1], r[2], int(r[3])), ks) for r in kept])
    out = _band(curves, level)
    out["k"] = ks
    return out

"""Generalized preferential attachment with a piecewise power/linear preference."""

__version__ = "0.1.0"

from .errors import GPAError, InputError, SamplerError, SolverError
from .pref import PrefParams, pref_diff_limit, pref_eval, pref_values
from .limit import (
    IgpParams,
    LimitModel,
    gamma_ratio_sum,
    igp_approx,
    igp_survival,
    omega_diag,
    omega_gpa,
    pmf,
    rho_hat,
    solve_lambda_star,
    solve_model,
    survival,
    tail_index,
    xi_grid,
)
from .degrees import DegreeCounts, load_counts, parse_edge_list, truncate, write_counts
from .sim import empirical_survival, empirical_survival_at, simulate, simulate_edge_list
from .likelihood import LogLik, log_likelihood
from .mcmc import (
    Chain,
    PosteriorSummary,
    Priors,
    SamplerConfig,
    fit,
    fit_chains,
    posterior_pref_band,
    posterior_summary,
    posterior_survival_band,
)

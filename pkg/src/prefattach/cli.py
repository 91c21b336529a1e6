"""Command-line interface: ``prefattach {theory,grid,simulate,ingest,fit}``.

Every subcommand writes its outputs plus a ``provenance.json`` into ``--out``
(default: ``$PREFATTACH_OUT`` or the current directory).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .degrees import MODES, UNDIRECTED_TOTAL, load_counts, parse_edge_list, truncate, write_counts
from .errors import InputError, SamplerError, SolverError
from .io import provenance, write_csv, write_json
from .limit import igp_approx, solve_model, xi_grid
from .mcmc import (
    ACCEPT_A,
    ACCEPT_B,
    SamplerConfig,
    fit_chains,
    posterior_pref_band,
    posterior_summary,
    posterior_survival_band,
)
from .pref import PrefParams
from .sim import empirical_survival, empirical_survival_at, simulate

log = logging.getLogger("prefattach")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_SAMPLER = 4
OUT_ENV = "PREFATTACH_OUT"


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUT_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params(args) -> PrefParams:
    return PrefParams(args.alpha, args.beta, args.epsilon, args.k0)


def _finish(out: Path, command: str, config: dict, outputs: list[Path]) -> int:
    path = out / "provenance.json"
    write_json(path, provenance(command, config, outputs))
    for p in outputs:
        print(p)
    print(path)
    return EXIT_OK


def cmd_theory(args) -> int:
    if args.kmax < 0:
        raise InputError("--kmax must be >= 0")
    p = _params(args)
    m = solve_model(p)
    out = _out_dir(args)
    ks = np.arange(args.kmax + 1)
    curve = write_csv(out / "theory_curve.csv", ["k", "survival", "pmf"],
                      zip(ks, m.survival(ks), m.pmf(ks)))
    g = igp_approx(m)
    info = write_json(out / "theory.json", {
        "params": p.to_dict(),
        "lambda_star": m.lambda_star,
        "xi": m.xi,
        "igp": {"xi": g.xi, "sigma": g.sigma, "v": g.v},
    })
    return _finish(out, "theory", {"params": p.to_dict(), "kmax": args.kmax}, [curve, info])


def cmd_grid(args) -> int:
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)
    betas = np.linspace(args.beta_min, args.beta_max, args.beta_steps)
    grid = xi_grid(alphas, betas, args.epsilon, args.k0)
    out = _out_dir(args)
    header = ["alpha", "beta", "epsilon", "k0", "lambda_star", "xi"]
    table = write_csv(out / "xi_grid.csv", header, grid.rows())
    cells = grid.contour_cells(0.5)
    contour = write_csv(out / "xi_contour.csv", ["alpha", "beta", "xi"],
                        ((alphas[i], betas[j], grid.xi[i, j]) for i, j in cells))
    summary = write_json(out / "grid.json", {
        "cells": int(grid.xi.size),
        "valid_cells": int(grid.valid.sum()),
        "invalid": [{"alpha": alphas[i], "beta": betas[j], "error": msg} for (i, j), msg in grid.errors.items()],
        "contour_level": 0.5,
        "contour_cells": len(cells),
    })
    config = {k: getattr(args, k) for k in ("alpha_min", "alpha_max", "alpha_steps", "beta_min",
                                            "beta_max", "beta_steps", "epsilon", "k0")}
    _finish(out, "grid", config, [table, contour, summary])
    if not grid.valid.any():
        print("error: no grid cell could be solved", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_simulate(args) -> int:
    p = _params(args)
    counts = simulate(p, args.n, args.m, args.seed)
    out = _out_dir(args)
    with (out / "degree_counts.csv").open("w") as fh:
        write_counts(counts, fh)
    outputs = [out / "degree_counts.csv", write_json(out / "degree_counts.json", {**counts.meta, **counts.summary()})]
    if args.survival:
        es = empirical_survival(counts)
        outputs.append(write_csv(out / "empirical_survival.csv", ["k", "survival"], sorted(es.items())))
    config = {"params": p.to_dict(), "n": args.n, "m": args.m, "seed": args.seed}
    return _finish(out, "simulate", config, outputs)


def cmd_ingest(args) -> int:
    path = Path(args.input)
    with path.open() as fh:
        counts = parse_edge_list(fh, args.mode)
    if args.l:
        counts = truncate(counts, args.l)
    out = _out_dir(args)
    with (out / "degree_counts.csv").open("w") as fh:
        write_counts(counts, fh)
    meta = {**counts.meta, **counts.summary(), "source": str(path),
            "self_loops": "count 2 under undirected-total, 1 under directed-in",
            "multi_edges": "counted with multiplicity"}
    outputs = [out / "degree_counts.csv", write_json(out / "degree_counts.json", meta)]
    return _finish(out, "ingest", {"input": str(path), "mode": args.mode, "l": args.l}, outputs)


def _degree_grid(lo: int, hi: int, points: int = 200) -> np.ndarray:
    lo = max(lo, 0)
    grid = np.unique(np.round(np.geomspace(lo + 1, hi + 1, points)).astype(np.int64) - 1)
    return grid[(grid >= lo) & (grid <= hi)]


def cmd_fit(args) -> int:
    with open(args.counts) as fh:
        counts = load_counts(fh)
    if args.l >= counts.M:
        raise InputError(f"--l {args.l} must be below the maximum degree {counts.M}")
    counts = truncate(counts, args.l)
    cfg = SamplerConfig(iterations=args.iters, burn_in=args.burnin)
    chains = fit_chains(counts, args.l, cfg, seed=args.seed, chains=args.chains, workers=args.workers)
    out = _out_dir(args)
    outputs = []
    for c_idx, chain in enumerate(chains):
        rows = ((i, *row[:3], int(row[3]), row[4], row[5], int(acc))
                for i, (row, acc) in enumerate(zip(chain.draws, chain.accepted)))
        outputs.append(write_csv(
            out / f"chain_{c_idx}.csv",
            ["iter", "alpha", "beta", "epsilon", "k0", "lambda_star", "log_post", "accepted_block"],
            rows,
        ))
    summary = posterior_summary(chains)
    doc = summary.to_dict()
    doc["accepted_block_flags"] = {"block_a": ACCEPT_A, "block_b": ACCEPT_B}
    doc["data"] = {**counts.summary(), "source": str(args.counts)}
    doc["seed"] = args.seed
    doc["chains"] = args.chains
    outputs.append(write_json(out / "summary.json", doc))

    ks = _degree_grid(args.l, counts.M)
    sb = posterior_survival_band(chains, ks, conditional_on=args.l)
    emp = empirical_survival_at(counts, ks, conditional_on=args.l)
    outputs.append(write_csv(out / "survival_band.csv", ["k", "empirical", "median", "lower", "upper"],
                             zip(ks, emp, sb["median"], sb["lower"], sb["upper"])))
    pb = posterior_pref_band(chains, _degree_grid(0, counts.M))
    outputs.append(write_csv(out / "pref_band.csv", ["k", "median", "lower", "upper"],
                             zip(pb["k"], pb["median"], pb["lower"], pb["upper"])))
    config = {"counts": str(args.counts), "l": args.l, "seed": args.seed, "chains": args.chains,
              "sampler": cfg.to_dict()}
    return _finish(out, "fit", config, outputs)


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, required=True, help="power exponent below k0")
    p.add_argument("--beta", type=float, required=True, help="linear slope from k0 on")
    p.add_argument("--epsilon", type=float, required=True, help="offset added to every weight")
    p.add_argument("--k0", type=int, required=True, help="changeover degree (integer >= 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prefattach", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    out_help = f"output directory (default: ${OUT_ENV} or the current directory)"

    p = sub.add_parser("theory", help="limiting survival/pmf curve, lambda* and xi")
    _add_params(p)
    p.add_argument("--kmax", type=int, default=1000, help="largest degree in the curve (default 1000)")
    p.add_argument("--out", help=out_help)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("grid", help="tail index xi over an (alpha, beta) grid")
    for name in ("alpha", "beta"):
        p.add_argument(f"--{name}-min", type=float, required=True, help=f"smallest {name}")
        p.add_argument(f"--{name}-max", type=float, required=True, help=f"largest {name}")
        p.add_argument(f"--{name}-steps", type=int, default=20, help=f"number of {name} values (default 20)")
    p.add_argument("--epsilon", type=float, required=True, help="offset, fixed over the grid")
    p.add_argument("--k0", type=int, required=True, help="changeover degree, fixed over the grid")
    p.add_argument("--out", help=out_help)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("simulate", help="grow a GPA network and write its in-degree counts")
    _add_params(p)
    p.add_argument("--n", type=int, default=100_000, help="final number of vertices (default 100000)")
    p.add_argument("--m", type=int, default=1, help="edges added per new vertex (default 1)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--survival", action="store_true", help="also write the empirical survival")
    p.add_argument("--out", help=out_help)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="edge list to degree-count CSV")
    p.add_argument("--input", required=True, help="KONECT-style edge list ('%%' or '#' comments)")
    p.add_argument("--mode", choices=MODES, default=UNDIRECTED_TOTAL,
                   help="degree definition (default undirected-total)")
    p.add_argument("--l", type=int, default=0, help="record a truncation level in the metadata (default 0)")
    p.add_argument("--out", help=out_help)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="adaptive MCMC fit of (alpha, beta, epsilon, k0)")
    p.add_argument("--counts", required=True, help="degree-count CSV with header degree,count")
    p.add_argument("--l", type=int, default=0, help="truncation level: model degrees >= l only (default 0)")
    p.add_argument("--iters", type=int, default=50_000, help="iterations per chain (default 50000)")
    p.add_argument("--burnin", type=int, default=10_000, help="burn-in iterations (default 10000)")
    p.add_argument("--chains", type=int, default=1, help="independent chains (default 1)")
    p.add_argument("--workers", type=int, default=1, help="processes used for chains (default 1)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out", help=out_help)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SamplerError as exc:
        print(f"sampler error: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

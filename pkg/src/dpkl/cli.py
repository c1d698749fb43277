"""Command line interface: ``dpkl check | elicit | simulate | densities``.

Exit codes: 0 success, 2 usage error, 3 data/parse error, 4 numerical failure.
"""

import argparse
import sys
import warnings

import numpy as np

from . import __version__
from .distributions import FITTABLE_FAMILIES, canonical_family, fit_mle, parse_model_spec
from .divergence import expected_prior_kl, window_size
from .exceptions import (
    DegenerateBinningError,
    EstimatorError,
    FitError,
    InputError,
    NumericalError,
)
from .io import dump_json, dump_tsv, fmt4, ingest
from .relative_belief import (
    CheckConfig,
    CheckFailure,
    PriorDominanceWarning,
    RBReport,
    check_one,
    run_check,
    simulate,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
DEFAULT_A_GRID = (1.0, 5.0, 10.0)


class UsageError(Exception):
    pass


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return value


def _count(minimum):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value
    return parse


def _family(text):
    try:
        return canonical_family(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed_options(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--seed", type=_count(0), help="master seed (required for reproducibility)")
    group.add_argument("--random-seed", action="store_true",
                       help="draw a fresh seed and print it to stderr")


def _mc_options(p):
    p.add_argument("--a", type=_positive_float, action="append", metavar="A",
                   help="DP concentration; repeat for a grid (default: 1 5 10)")
    p.add_argument("--N", type=_count(4), default=200, help="truncation level (default 200)")
    p.add_argument("--M", type=_count(2), default=20, help="prior quantile bins (default 20)")
    p.add_argument("--i0", type=_count(1), default=1, help="bins defining d* (default 1)")
    p.add_argument("--r1", type=_count(1), default=2000, help="prior draws (default 2000)")
    p.add_argument("--r2", type=_count(1), default=2000, help="posterior draws (default 2000)")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers (results unchanged)")
    _seed_options(p)


def _format_option(p, default="json"):
    p.add_argument("--format", choices=("json", "tsv"), default=default)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dpkl",
        description="Bayesian nonparametric model checking with Dirichlet process priors "
                    "and a spacing-based Kullback-Leibler divergence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="relative belief check of a model against a data file")
    p.add_argument("--data", required=True, help="numeric text file")
    p.add_argument("--family", required=True, type=_family,
                   help=f"model family: {', '.join(FITTABLE_FAMILIES)}")
    _mc_options(p)
    _format_option(p)

    p = sub.add_parser("elicit", help="expected prior divergence for each a")
    p.add_argument("--a", type=_positive_float, action="append", required=True, metavar="A")
    p.add_argument("--N", type=_count(4), default=200)
    p.add_argument("--m", type=_count(1), default=None, help="half-window (default from N)")
    _format_option(p, default="tsv")

    p = sub.add_parser("simulate", help="repeat the check on data simulated from a truth")
    p.add_argument("--truth", required=True,
                   help="data generator, e.g. normal:0,1  cauchy:0,1  t:0.5  "
                        "mixture:0.5,-2,1,2,1  gumbel:0,1")
    p.add_argument("--family", required=True, type=_family)
    p.add_argument("--n", type=_count(2), default=20, help="sample size (default 20)")
    p.add_argument("--replications", type=_count(1), default=10)
    _mc_options(p)
    _format_option(p)

    p = sub.add_parser("densities", help="dump raw prior and posterior divergence draws")
    p.add_argument("--data", required=True)
    p.add_argument("--family", required=True, type=_family)
    _mc_options(p)
    _format_option(p, default="tsv")
    return parser


def _resolve_seed(args):
    if args.seed is not None:
        return args.seed
    seed = int(np.random.SeedSequence().entropy % (2**63))
    print(f"dpkl: using --seed {seed}", file=sys.stderr)
    return seed


def _configs(args, seed):
    grid = args.a or list(DEFAULT_A_GRID)
    try:
        return [CheckConfig(a, seed=seed, N=args.N, M=args.M, i0=args.i0, r1=args.r1, r2=args.r2)
                for a in grid]
    except InputError as exc:
        raise UsageError(str(exc)) from None


def _common_config(args, seed):
    return {"N": args.N, "M": args.M, "i0": args.i0, "r1": args.r1, "r2": args.r2, "seed": seed}


def _check_rows(entries):
    header = ["a", "d_star", "rb0", "strength", "at_resolution_limit",
              "d_star_4dp", "rb0_4dp", "strength_4dp", "error"]
    rows = []
    for e in entries:
        if isinstance(e, RBReport):
            rows.append([e.config.a, e.d_star, e.rb0, e.strength, e.at_resolution_limit,
                         fmt4(e.d_star), fmt4(e.rb0), fmt4(e.strength), ""])
        else:
            rows.append([e.config.a, None, None, None, None, "", "", "", e.error])
    return header, rows


def _entry_dict(e):
    out = e.to_dict()
    if isinstance(e, RBReport):
        out["display"] = {"d_star": fmt4(e.d_star), "rb0": fmt4(e.rb0),
                          "strength": fmt4(e.strength)}
    return out


def cmd_check(args):
    seed = _resolve_seed(args)
    configs = _configs(args, seed)
    x = ingest(args.data)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PriorDominanceWarning)
        entries = run_check(x, args.family, configs, n_jobs=args.jobs)
    for w in caught:
        print(f"dpkl: warning: {w.message}", file=sys.stderr)
    model = fit_mle(args.family, x)
    config = _common_config(args, seed)
    if args.format == "json":
        out = dump_json({
            "command": "check",
            "data": {"path": str(args.data), "n": int(x.size)},
            "family": args.family,
            "model": {"family": model.family, "params": list(model.params)},
            "config": config,
            "a_grid": [c.a for c in configs],
            "reports": [_entry_dict(e) for e in entries],
        })
    else:
        header, rows = _check_rows(entries)
        comments = [f"family={args.family} n={x.size} model={model}",
                    " ".join(f"{k}={v}" for k, v in config.items())]
        out = dump_tsv(header, rows, comments)
    sys.stdout.write(out)
    return EXIT_NUMERIC if any(isinstance(e, CheckFailure) for e in entries) else EXIT_OK


def cmd_elicit(args):
    m = args.m if args.m is not None else window_size(args.N)
    if m > (args.N - 1) // 2:
        raise UsageError(f"--m {m} is too large for --N {args.N}")
    if m < 2:
        raise UsageError("the expected divergence formula needs m >= 2 "
                         "(m = 1 is not supported; use a larger --N or --m)")
    rows = [(a, expected_prior_kl(a, args.N, m)) for a in args.a]
    if args.format == "json":
        out = dump_json({
            "command": "elicit",
            "config": {"N": args.N, "m": m},
            "rows": [{"a": a, "expected_kl": v, "display": fmt4(v)} for a, v in rows],
        })
    else:
        out = dump_tsv(["a", "expected_kl", "expected_kl_4dp"],
                       [[a, v, fmt4(v)] for a, v in rows],
                       [f"N={args.N} m={m}"])
    sys.stdout.write(out)
    return EXIT_OK


def cmd_simulate(args):
    seed = _resolve_seed(args)
    configs = _configs(args, seed)
    try:
        truth = parse_model_spec(args.truth)
    except InputError as exc:
        raise UsageError(str(exc)) from None
    grid = [c.a for c in configs]
    result = simulate(truth, args.family, args.n, args.replications, grid, seed,
                      n_jobs=args.jobs, N=args.N, M=args.M, i0=args.i0, r1=args.r1, r2=args.r2)
    config = _common_config(args, seed)
    if args.format == "json":
        out = dump_json({
            "command": "simulate",
            "truth": {"family": truth.family, "params": list(truth.params)},
            "family": args.family,
            "n": args.n,
            "replications": args.replications,
            "config": config,
            "a_grid": grid,
            "aggregate": result["aggregate"],
            "runs": [[_entry_dict(e) for e in run] for run in result["replications"]],
        })
    else:
        header = ["a", "completed", "failed", "median_rb0", "median_strength", "mean_rb0",
                  "fraction_rb0_above_1", "median_rb0_4dp", "median_strength_4dp"]
        rows = [[g["a"], g["completed"], g["failed"], g["median_rb0"], g["median_strength"],
                 g["mean_rb0"], g["fraction_rb0_above_1"], fmt4(g["median_rb0"]),
                 fmt4(g["median_strength"])] for g in result["aggregate"]]
        comments = [f"truth={truth} family={args.family} n={args.n} "
                    f"replications={args.replications}",
                    " ".join(f"{k}={v}" for k, v in config.items())]
        out = dump_tsv(header, rows, comments)
    sys.stdout.write(out)
    return EXIT_OK


def cmd_densities(args):
    seed = _resolve_seed(args)
    configs = _configs(args, seed)
    if len(configs) != 1:
        raise UsageError("densities takes exactly one --a")
    cfg = configs[0]
    x = ingest(args.data)
    model = fit_mle(args.family, x)
    from .relative_belief import generate_posterior_sample, generate_prior_sample

    prior = generate_prior_sample(cfg, n_jobs=args.jobs)
    posterior = generate_posterior_sample(cfg, x, model, n_jobs=args.jobs)
    summary = {"prior": prior.summary(), "posterior": posterior.summary()}
    config = dict(_common_config(args, seed), a=cfg.a)
    if args.format == "json":
        out = dump_json({
            "command": "densities",
            "family": args.family,
            "model": {"family": model.family, "params": list(model.params)},
            "config": config,
            "summary": summary,
            "prior": prior.draws.tolist(),
            "posterior": posterior.draws.tolist(),
        })
    else:
        comments = [f"family={args.family} model={model}",
                    " ".join(f"{k}={v}" for k, v in config.items())]
        for kind, s in summary.items():
            comments.append(kind + " " + " ".join(f"{k}={v!r}" for k, v in s.items()))
        rows = [["prior", v] for v in prior.draws] + [["posterior", v] for v in posterior.draws]
        out = dump_tsv(["kind", "divergence"], rows, comments)
    sys.stdout.write(out)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "elicit": cmd_elicit,
    "simulate": cmd_simulate,
    "densities": cmd_densities,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dpkl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"dpkl {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FitError, EstimatorError, NumericalError, DegenerateBinningError) as exc:
        print(f"dpkl {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

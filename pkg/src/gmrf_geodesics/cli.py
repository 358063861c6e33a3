"""Command-line interface.

Subcommands: sample, metric, entropy, geodesic, reverse, table, validate.
Every command is deterministic given --seed and its flags, writes output
files without timestamps, and prints a single JSON line to stdout.

Exit codes: 0 success, 1 validation tolerance failure, 2 usage error,
3 divergence, 4 domain/numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .christoffel import christoffel_specialized
from .errors import DivergenceError, DomainError, GmrfError, InvalidInputError, NumericalError
from .geodesic import (IntegratorConfig, curve_summary, euclidean_distance,
                       integrate, reverse_run, write_curve_csv, write_summary_json)
from .metric import entropy, inverse_metric, metric_derivatives, metric_tensor
from .model import (McmcConfig, ModelParams, export_field_csv, sample_field)
from .oracles import mc_fisher
from .patches import independence_stats, patch_stats
from .table import (TableConfig, default_config_json, load_table_config,
                    run_table, write_runs_csv, write_summary_csv)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_DOMAIN = 4


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return tuple(float(p) for p in parts)


def _pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected H,W, got {text!r}")
    return tuple(int(p) for p in parts)


def _add_theta_flags(p):
    p.add_argument("--mu", type=float, required=True, help="field mean")
    p.add_argument("--sigma2", type=float, required=True, help="field variance")
    p.add_argument("--beta", type=float, required=True, help="inverse temperature")


def _add_chain_flags(p, burnin_default=100):
    p.add_argument("--lattice", type=_pair, default=(64, 64), metavar="H,W")
    p.add_argument("--burnin", type=int, default=burnin_default,
                   help="sweeps from a cold start")
    p.add_argument("--sweeps", type=int, default=5,
                   help="sweeps per refresh when warm-starting")
    p.add_argument("--threshold", type=float, default=50.0,
                   help="divergence threshold in units of sqrt(sigma2)")
    p.add_argument("--cap", type=float, default=1e18,
                   help="soft amplitude cap in units of sqrt(sigma2)")


def _add_common_flags(p):
    p.add_argument("--seed", type=int, default=0, help="RNG seed (PCG64)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--json", action="store_true", help="print the JSON summary only")


def _mcmc_config(args) -> McmcConfig:
    return McmcConfig(lattice_size=args.lattice, burn_in_sweeps=args.burnin,
                      sweeps_per_sample=args.sweeps, seed=args.seed,
                      divergence_threshold=args.threshold, amplitude_cap=args.cap)


def _emit(args, payload: dict) -> None:
    print(json.dumps(payload))


def _outdir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _stats_for(args):
    """Patch statistics: analytic independence or estimated from one field."""
    if args.analytic:
        return independence_stats(args.sigma2)
    params = ModelParams(args.mu, args.sigma2, args.beta)
    field = sample_field(params, cfg=_mcmc_config(args))
    return patch_stats(field)


def cmd_sample(args) -> int:
    params = ModelParams(args.mu, args.sigma2, args.beta)
    field = sample_field(params, cfg=_mcmc_config(args))
    out = _outdir(args) / "field.csv"
    export_field_csv(field, out)
    _emit(args, {"file": str(out), "dims": list(field.dims),
                 "mean": float(field.values.mean()),
                 "variance": float(field.values.var()),
                 "seed": args.seed})
    return EXIT_OK


def cmd_metric(args) -> int:
    params = ModelParams(args.mu, args.sigma2, args.beta)
    stats = _stats_for(args)
    g = metric_tensor(params, stats)
    payload = {"theta": [args.mu, args.sigma2, args.beta], "g": g.g.tolist()}
    if args.inverse or args.christoffel:
        g_inv = inverse_metric(g, args.lam)
        payload["g_inv"] = g_inv.g_inv.tolist()
        payload["lambda"] = args.lam
    if args.derivatives or args.christoffel:
        dg = metric_derivatives(params, stats)
        payload["dg_dtheta2"] = dg.dg_dtheta2.tolist()
        payload["dg_dtheta3"] = dg.dg_dtheta3.tolist()
    if args.christoffel:
        chris = christoffel_specialized(g_inv, dg)
        payload.update(chris.to_json_dict())
    if args.out != Path("."):
        out = _outdir(args) / "metric.json"
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        payload["file"] = str(out)
    _emit(args, payload)
    return EXIT_OK


def cmd_entropy(args) -> int:
    params = ModelParams(args.mu, args.sigma2, args.beta)
    stats = _stats_for(args)
    e = entropy(params, stats)
    _emit(args, {"theta": [args.mu, args.sigma2, args.beta],
                 "h_beta": e.h_beta, "h_gauss": e.h_gauss})
    return EXIT_OK


def _integrator_config(args) -> IntegratorConfig:
    return IntegratorConfig(a=args.a, b=args.b, n=args.steps, lam=args.lam,
                            mode=args.mode, mcmc=_mcmc_config(args),
                            refresh=args.refresh)


def _geodesic_stats(args):
    if args.analytic:
        return independence_stats(args.start[1])
    return None


def cmd_geodesic(args) -> int:
    cfg = _integrator_config(args)
    curve = integrate(args.start, args.tangent, cfg, stats=_geodesic_stats(args))
    out = _outdir(args)
    write_curve_csv(curve, out / "geodesic_curve.csv")
    summary = curve_summary(curve, cfg, seed=args.seed)
    write_summary_json(summary, out / "geodesic_summary.json")
    _emit(args, summary)
    return EXIT_OK if curve.completed else EXIT_DIVERGED


def cmd_reverse(args) -> int:
    cfg = _integrator_config(args)
    stats = _geodesic_stats(args)
    forward = integrate(args.start, args.tangent, cfg, stats=stats)
    out = _outdir(args)
    write_curve_csv(forward, out / "reverse_forward_curve.csv")
    if not forward.completed:
        _emit(args, {"error": "forward run diverged",
                     "diverged_at": forward.diverged_at})
        return EXIT_DIVERGED
    result = reverse_run(forward, cfg, stats=stats)
    write_curve_csv(result.curve, out / "reverse_reversed_curve.csv")
    with open(out / "reverse_divergence.csv", "w", encoding="utf-8") as fh:
        fh.write("t,divergence\n")
        h = cfg.h
        for i, val in enumerate(result.divergence):
            fh.write("%.12g,%.12g\n" % (cfg.a + i * h, val))
    summary = {
        "forward": curve_summary(forward, cfg, seed=args.seed),
        "reversed": curve_summary(result.curve, cfg, seed=args.seed),
        "max_divergence": float(np.max(result.divergence)),
        "endpoint_return_error": float(result.divergence[-1]),
    }
    write_summary_json(summary, out / "reverse_summary.json")
    _emit(args, summary)
    return EXIT_OK if result.curve.completed else EXIT_DIVERGED


def cmd_table(args) -> int:
    if args.dump_default_config:
        print(json.dumps(default_config_json(), indent=2))
        return EXIT_OK
    if args.config is not None:
        cfg = load_table_config(args.config)
    else:
        cfg = TableConfig()
    if args.repeats is not None:
        cfg.repeats = args.repeats
    if args.seed != 0:
        cfg.master_seed = args.seed
    runs, aggregates = run_table(cfg)
    out = _outdir(args)
    write_runs_csv(runs, out / "table_runs.csv")
    write_summary_csv(aggregates, out / "table_summary.csv")
    notes = {str(a["row"]): a["notes"] for a in aggregates if a["notes"]}
    _emit(args, {"rows": len(cfg.rows), "repeats": cfg.repeats,
                 "runs": len(runs),
                 "diverged_runs": sum(r.diverged for r in runs),
                 "notes": notes,
                 "runs_csv": str(out / "table_runs.csv"),
                 "summary_csv": str(out / "table_summary.csv")})
    return EXIT_OK


def cmd_validate(args) -> int:
    params = ModelParams(*args.theta)
    report = mc_fisher(params, cfg=_mcmc_config(args), n_fields=args.fields)
    out = _outdir(args) / "validate_report.json"
    payload = report.to_json_dict()
    off = [(0, 1), (0, 2)]
    se_ok = all(abs(report.estimate[i, j]) <= args.se_factor * report.stderr[i, j]
                for i, j in off)
    diag_ok = report.max_rel_error_diag <= args.tol_diag
    payload["diag_within_tolerance"] = bool(diag_ok)
    payload["offdiag_within_se"] = bool(se_ok)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    _emit(args, {"file": str(out), "max_rel_error_diag": report.max_rel_error_diag,
                 "diag_within_tolerance": bool(diag_ok),
                 "offdiag_within_se": bool(se_ok)})
    return EXIT_OK if (diag_ok and se_ok) else EXIT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmrf-geodesics",
        description="Geodesic distances on the Gaussian-Markov random field manifold")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a field outcome and export it as CSV")
    _add_theta_flags(p)
    _add_chain_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_sample)

    for name, fn, extra in (("metric", cmd_metric, True), ("entropy", cmd_entropy, False)):
        p = sub.add_parser(name, help=f"evaluate the {name} at a parameter point")
        _add_theta_flags(p)
        p.add_argument("--analytic", action="store_true",
                       help="use exact independence statistics instead of sampling")
        _add_chain_flags(p)
        _add_common_flags(p)
        p.add_argument("--lambda", dest="lam", type=float, default=0.01,
                       help="inverse-metric regularizer")
        if extra:
            p.add_argument("--inverse", action="store_true")
            p.add_argument("--derivatives", action="store_true")
            p.add_argument("--christoffel", action="store_true")
        p.set_defaults(func=fn)

    for name, fn in (("geodesic", cmd_geodesic), ("reverse", cmd_reverse)):
        p = sub.add_parser(name, help=f"run a {name} integration")
        p.add_argument("--start", type=_triple, required=True, metavar="MU,SIGMA2,BETA")
        p.add_argument("--tangent", type=_triple, required=True, metavar="A1,A2,A3")
        p.add_argument("--a", type=float, default=0.0)
        p.add_argument("--b", type=float, default=5.0)
        p.add_argument("--steps", type=int, default=200)
        p.add_argument("--mode", choices=("mcmc", "frozen"), default="mcmc")
        p.add_argument("--refresh", choices=("warm", "cold"), default="warm")
        p.add_argument("--analytic", action="store_true",
                       help="frozen mode with exact independence statistics")
        p.add_argument("--lambda", dest="lam", type=float, default=0.01)
        _add_chain_flags(p)
        _add_common_flags(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("table", help="batch geodesic-vs-Euclidean comparison")
    p.add_argument("--config", type=Path, default=None, help="JSON table configuration")
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--dump-default-config", action="store_true",
                   help="print the built-in configuration as JSON and exit")
    _add_common_flags(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("validate", help="Monte-Carlo Fisher information check")
    p.add_argument("--theta", type=_triple, required=True, metavar="MU,SIGMA2,BETA")
    p.add_argument("--fields", type=int, default=30)
    p.add_argument("--tol-diag", type=float, default=0.10)
    p.add_argument("--se-factor", type=float, default=3.0)
    _add_chain_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.simplefilter("default")
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_DIVERGED
    except (DomainError, InvalidInputError, NumericalError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_DOMAIN
    except GmrfError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

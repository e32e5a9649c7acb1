"""Command-line front end.

Every subcommand is a thin adapter over a library function.  Single
predictions go to stdout as JSON; datasets go to CSV files (``--out -``
writes to stdout).  Every output carries the seed and the full config.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import experiments as E
from .bounds import BoundParams
from .formats import PRESETS, make_format
from .moments import kernel_predictions

FORMAT_CHOICES = ("bfloat16", "fp16", "fp32", "fp64-carrier", "fp64", "bf16", "half", "single", "double")


def _ints(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or comma list, got {text!r}") from None


def _common(p, *, dims=True, dists=True, trials=True, kernel=True):
    if kernel:
        p.add_argument("--kernel", choices=E.KERNELS, default="dot", help="kernel to analyse (default: dot)")
    p.add_argument("--format", choices=FORMAT_CHOICES, default="fp32", help="target floating-point format (default: fp32)")
    if dists:
        p.add_argument("--dist-x", default="uniform:0,1",
                       help="entries of x / A as family:params, e.g. uniform:0,1, gaussian:mean,variance (default: uniform:0,1)")
        p.add_argument("--dist-y", default="uniform:0,1", help="entries of y / B, same syntax (default: uniform:0,1)")
    if dims:
        p.add_argument("--n", type=_ints, default=[1000], help="inner dimension or matrix order; integer or comma grid (default: 1000)")
        p.add_argument("--m", type=_ints, default=[10], help="rows of A, or Wishart degrees of freedom for trisolve/lu (default: 10)")
        p.add_argument("--p", type=_ints, default=[10], help="columns of B for matmul (default: 10)")
    if trials:
        p.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials per grid point, >= 100 (default: 10000)")
        p.add_argument("--seed", type=int, default=E.DEFAULT_SEED, help=f"random seed (default: {E.DEFAULT_SEED})")
    p.add_argument("--config", help="JSON file whose keys override the flags (keys use flag names, dashes or underscores)")


def _bound_flags(p):
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="tail parameter lambda > 0 of PB1/PB2 (default: 1.0)")
    p.add_argument("--zeta", type=float, default=1e-16, help="failure probability zeta in (0,1) of DB2/PB3 (default: 1e-16)")
    p.add_argument("--eta", type=float, default=0.1, help="failure probability eta in (0,1] of the Chebyshev bound (default: 0.1)")


def _out_flag(p, default):
    p.add_argument("--out", default=default, help=f"output CSV path, '-' for stdout (default: {default})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rounderr", description="Predict and simulate rounding errors of random linear algebra.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("predict", help="analytic error moments as JSON")
    _common(p, trials=False)
    p.add_argument("--method", choices=("exact_rational", "fast_float", "asymptotic"), default="exact_rational",
                   help="evaluator (default: exact_rational)")
    p.add_argument("--out", default="-", help="output JSON path, '-' for stdout (default: -)")

    p = sub.add_parser("simulate", help="Monte Carlo MSE against the prediction, as CSV")
    _common(p)
    p.add_argument("--order", choices=("sequential", "sum_first"), default="sequential",
                   help="subtraction order in substitution and LU (default: sequential)")
    p.add_argument("--block", type=int, default=1000, help="trials per RNG block (default: 1000)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default: 1)")
    _out_flag(p, "simulate.csv")

    p = sub.add_parser("compare-bounds", help="simulated inner-product MSE next to five worst-case bounds")
    _common(p, kernel=False)
    _bound_flags(p)
    _out_flag(p, "bounds.csv")

    p = sub.add_parser("figures", help="dataset behind one figure")
    p.add_argument("--id", type=int, required=True, choices=E.FIGURES, help="figure id")
    p.add_argument("--trials", type=int, help="trials per grid point (default: figure specific)")
    p.add_argument("--seed", type=int, default=E.DEFAULT_SEED, help=f"random seed (default: {E.DEFAULT_SEED})")
    p.add_argument("--n", type=_ints, help="override the n grid")
    p.add_argument("--m", type=_ints, help="override the m grid")
    p.add_argument("--p", type=_ints, help="override the p grid")
    p.add_argument("--config", help="JSON file of overrides")
    _out_flag(p, "figure.csv")

    p = sub.add_parser("validate-model", help="long inner product with dependent inputs: variance track and delta histograms")
    p.add_argument("--format", choices=FORMAT_CHOICES, default="fp32", help="target format (default: fp32)")
    p.add_argument("--n", type=int, default=10**6, help="total length of the inner product (default: 1000000)")
    p.add_argument("--stride", type=int, default=10**4, help="checkpoint spacing in terms (default: 10000)")
    p.add_argument("--trials", type=int, default=1000, help="independent trials (default: 1000)")
    p.add_argument("--seed", type=int, default=E.DEFAULT_SEED, help=f"random seed (default: {E.DEFAULT_SEED})")
    p.add_argument("--independent", action="store_true", help="draw y independently of x (control run)")
    p.add_argument("--hist-out", help="delta histogram CSV (default: <out stem>.hist.csv)")
    p.add_argument("--config", help="JSON file of overrides")
    _out_flag(p, "validate.csv")

    p = sub.add_parser("pipeline", help="stage-by-stage errors of the normal-equation solve of H^T H x = H^T z")
    p.add_argument("--format", choices=FORMAT_CHOICES, default="fp32", help="target format (default: fp32)")
    p.add_argument("--m", type=int, default=1050, help="rows of H (default: 1050)")
    p.add_argument("--n", type=int, default=5, help="columns of H (default: 5)")
    p.add_argument("--trials", type=int, default=10000, help="trials (default: 10000)")
    p.add_argument("--seed", type=int, default=E.DEFAULT_SEED, help=f"random seed (default: {E.DEFAULT_SEED})")
    p.add_argument("--config", help="JSON file of overrides")
    _out_flag(p, "pipeline.csv")

    p = sub.add_parser("formats", help="list the format presets as JSON")
    p.add_argument("--out", default="-", help="output JSON path, '-' for stdout (default: -)")
    return ap


def _apply_config(args):
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    rename = {"lambda": "lam", "n_grid": "n", "m_grid": "m", "p_grid": "p"}
    for key, val in cfg.items():
        k = rename.get(key.replace("-", "_"), key.replace("-", "_"))
        if k not in vars(args) or k in ("command", "config"):
            raise ValueError(f"unknown config key {key!r} for {args.command}")
        if k in ("n", "m", "p") and isinstance(getattr(args, k), list):
            val = _ints(val if isinstance(val, list) else str(val))
        setattr(args, k, val)
    return args


def _write(text: str, out: str):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _one(vals, name):
    if len(vals) != 1:
        raise ValueError(f"--{name} takes a single value here")
    return vals[0]


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args = _apply_config(args)
    cmd = args.command
    if cmd == "formats":
        rows = [{"name": f.name, "t": f.t, "u": f.u, "e_min": f.e_min, "e_max": f.e_max,
                 "x_min": f.x_min, "x_max": f.x_max} for f in PRESETS.values()]
        _write(json.dumps(rows, indent=2) + "\n", args.out)
        return 0
    if cmd == "predict":
        fmt = make_format(args.format)
        res = []
        for n in args.n:
            for m in args.m:
                res += kernel_predictions(args.kernel, n, fmt.u, m=m, p=_one(args.p, "p") if args.kernel == "matmul" else None,
                                          dist_x=args.dist_x, dist_y=args.dist_y, method=args.method)
        payload = res[0] if len(res) == 1 else res
        _write(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    if cmd in ("simulate", "compare-bounds"):
        kw = {}
        if cmd == "simulate":
            kw = {"kernel": args.kernel, "order": args.order, "block": args.block, "workers": args.workers}
        else:
            BoundParams(args.lam, args.zeta, args.eta)
            kw = {"kernel": "dot", "bounds": True, "lam": args.lam, "zeta": args.zeta, "eta": args.eta}
        cfg = E.ExperimentConfig(format=args.format, dist_x=args.dist_x, dist_y=args.dist_y, n_grid=args.n,
                                 m_grid=args.m, p_grid=args.p, trials=args.trials, seed=args.seed, **kw)
        _write(E.mc_mse(cfg).to_csv(), args.out)
        return 0
    if cmd == "figures":
        ov = {"seed": args.seed}
        if args.trials is not None:
            ov["trials"] = args.trials
        for flag, key in (("n", "n_grid"), ("m", "m_grid"), ("p", "p_grid")):
            if getattr(args, flag) is not None:
                ov[key] = getattr(args, flag)
        _write(E.reproduce_figure(args.id, ov).to_csv(), args.out)
        return 0
    if cmd == "validate-model":
        res = E.model_validity_probe(args.n, args.stride, args.format, args.seed, trials=args.trials,
                                     dependent=not args.independent)
        meta = {"experiment": "validate-model", "n_total": args.n, "stride": args.stride, "format": args.format,
                "trials": args.trials, "seed": args.seed, "dependent": not args.independent,
                "early_ratio": res.early_ratio, "late_ratio": res.late_ratio, "overflow_at": res.overflow_at}
        panel = "dependent" if res.dependent else "independent"
        _write(E.MseReport(meta, args.seed, E.PROBE_COLUMNS, res.rows(panel)).to_csv(), args.out)
        hist = args.hist_out
        if hist is None:
            hist = "-" if args.out == "-" else args.out.rsplit(".", 1)[0] + ".hist.csv"
        cols = ("window", "bin_left", "bin_right", "empirical_density", "analytic_density")
        _write(E.MseReport(meta, args.seed, cols, res.histogram_rows()).to_csv(), hist)
        return 0
    if cmd == "pipeline":
        _write(E.zf_ls_pipeline(args.m, args.n, args.format, trials=args.trials, seed=args.seed).to_csv(), args.out)
        return 0
    raise AssertionError(cmd)


def main(argv=None) -> int:
    try:
        return run(argv)
    except (ValueError, OverflowError, ZeroDivisionError, OSError) as exc:
        print(f"rounderr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

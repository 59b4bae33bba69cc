"""Command-line entry point.

Exit codes: 0 on success, 1 for runtime or I/O failures, 2 for usage and
domain errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__, experiments, montecarlo
from .config import ConfigError, CommandConfig, check_required, load_config
from .experiments import SweepSpec, fmt
from .special import ConvergenceError, DomainError

EXIT_RUNTIME = 1
EXIT_USAGE = 2

# argparse dest -> parameter name
_FLAG_PARAMS = {
    "model": "model", "sigma_n_db": "sigma_n_db", "rho_db": "rho_db",
    "sigma_delta_db": "sigma_delta_db", "pw": "p_w", "gamma": "gamma",
    "epsilon": "epsilon", "method": "method", "rb": "rb", "rw": "rw",
    "alpha": "alpha", "sigma_b_db": "sigma_b_db", "seed": "seed",
    "trials": "trials", "workers": "workers", "sigma_w_sq": "sigma_w_sq",
    "n": "n_samples",
}


class UsageError(Exception):
    pass


def _model_args(p):
    p.add_argument("--model", choices=experiments.MODELS,
                   help="logu: bounded log-uniform; logn: log-normal; gauss: Gaussian surrogate of logn")
    p.add_argument("--sigma-n-db", type=float, help="nominal noise power at the warden (dB)")
    p.add_argument("--rho-db", type=float, help="bounded uncertainty half-width (dB)")
    p.add_argument("--sigma-delta-db", type=float, help="std of the dB noise offset")


def _mc_args(p):
    p.add_argument("--seed", type=int, help="64-bit seed for the PCG64 substreams")
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--workers", type=int, help="threads for Monte Carlo blocks")


def _common(p):
    p.add_argument("--config", help="TOML experiment file; flags override its values")
    p.add_argument("--json", action="store_true", help="print a JSON detail object")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertnu",
        description="Covertness metrics, power thresholds and covert rates under warden noise uncertainty.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="gamma*, average covert probability, outage, worst case")
    _common(p)
    _model_args(p)
    p.add_argument("--pw", type=float, help="received signal power at the warden (linear)")
    p.add_argument("--gamma", type=float, help="fixed detection threshold (default: optimal)")
    p.add_argument("--epsilon", type=float, help="covertness level used for the outage event")

    p = sub.add_parser("threshold", help="received-power threshold at the warden")
    _common(p)
    _model_args(p)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--method", choices=experiments.METHODS)
    _mc_args(p)

    p = sub.add_parser("rate", help="covert rate in bits per real channel use")
    _common(p)
    _model_args(p)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--rb", type=float, help="Alice-Bob distance")
    p.add_argument("--rw", type=float, help="Alice-warden distance")
    p.add_argument("--alpha", type=float, help="path-loss exponent")
    p.add_argument("--sigma-b-db", type=float, help="Bob's noise power in dB (default: nominal)")

    p = sub.add_parser("simulate", help="sample-level radiometer simulation")
    _common(p)
    p.add_argument("--sigma-w-sq", type=float, help="true noise power at the warden")
    p.add_argument("--pw", type=float)
    p.add_argument("--n", type=int, help="samples per observation")
    p.add_argument("--gamma", type=float)
    _mc_args(p)

    p = sub.add_parser("sweep", help="parameter sweep written as CSV + JSON")
    p.add_argument("--config", help="TOML sweep file")
    p.add_argument("--figure", choices=("fig1", "fig2a", "fig2b"), help="built-in preset")
    p.add_argument("--name")
    p.add_argument("--axis", choices=experiments.AXES)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--outputs", help="comma-separated: " + ",".join(experiments.OUTPUTS))
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="fixed parameter (repeatable)")
    p.add_argument("--epsilons", help="comma-separated epsilon family for fig2 presets")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out-dir", help=f"output directory (default: ${experiments.OUTPUT_DIR_ENV} or .)")
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    return parser


def _params(args, command: str) -> dict:
    params = {}
    if args.config:
        cfg = load_config(args.config, require=False)
        if not isinstance(cfg, CommandConfig) or cfg.command != command:
            raise UsageError(f"{args.config} is not a {command} config")
        params.update(cfg.params)
    for dest, name in _FLAG_PARAMS.items():
        value = getattr(args, dest, None)
        if value is not None:
            params[name] = value
    check_required(command, params)
    return experiments.resolve(params)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def cmd_metrics(args) -> int:
    params = _params(args, "metrics")
    rep = experiments.report(params)
    _emit({"model": params["model"], "p_w": params["p_w"], **rep})
    return 0


def cmd_threshold(args) -> int:
    params = _params(args, "threshold")
    value = experiments.threshold(params)
    nominal = 10 ** (params["sigma_n_db"] / 10)
    rel_db = 10 * math.log10(value / nominal) if value > 0 else -math.inf
    if args.json:
        _emit({"model": params["model"], "epsilon": params["epsilon"],
               "method": params["method"], "threshold": value,
               "threshold_db_rel_nominal": rel_db})
    else:
        print(f"{fmt(value)}\t{fmt(rel_db)} dB rel. nominal")
    return 0


def cmd_rate(args) -> int:
    params = _params(args, "rate")
    value = experiments.rate(params)
    if args.json:
        _emit({"model": params["model"], "epsilon": params["epsilon"],
               "threshold": experiments.threshold(params, "closed"),
               "rate": value, "units": "bits per real channel use"})
    else:
        print(fmt(value))
    return 0


def cmd_simulate(args) -> int:
    params = _params(args, "simulate")
    fa, md = montecarlo.simulate_detector(
        params["sigma_w_sq"], params["p_w"], params["n_samples"], params["gamma"],
        experiments.mc_config(params))
    _emit({"p_fa": fa.estimate, "p_fa_ci": fa.half_width,
           "p_md": md.estimate, "p_md_ci": md.half_width,
           "xi": fa.estimate + md.estimate, "trials": fa.trials, "seed": params["seed"]})
    return 0


def _sweep_specs(args) -> list[SweepSpec]:
    if args.figure and args.config:
        raise UsageError("use either --figure or --config, not both")
    if args.figure:
        eps = None
        if args.epsilons:
            eps = tuple(float(e) for e in args.epsilons.split(","))
        specs = experiments.preset(args.figure, eps) if eps else experiments.preset(args.figure)
    elif args.config:
        spec = load_config(args.config)
        if not isinstance(spec, SweepSpec):
            raise UsageError(f"{args.config} is not a sweep config")
        specs = [spec]
    else:
        if args.axis is None or args.start is None or args.stop is None or args.points is None:
            raise UsageError("sweep needs --figure, --config, or --axis/--start/--stop/--points")
        specs = [SweepSpec(axis=args.axis, start=args.start, stop=args.stop,
                           points=args.points, outputs=("rate",))]

    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials

    out = []
    for spec in specs:
        d = spec.to_dict()
        for key in ("axis", "start", "stop", "points", "name"):
            if getattr(args, key) is not None:
                d[key] = getattr(args, key)
        if args.outputs:
            d["outputs"] = [o.strip() for o in args.outputs.split(",") if o.strip()]
        d["fixed"] = {**d["fixed"], **overrides}
        if len(specs) > 1 and args.name:
            d["name"] = f"{args.name}_{spec.name}"
        out.append(SweepSpec(**d))
    return out


def cmd_sweep(args) -> int:
    specs = _sweep_specs(args)
    for spec in specs:
        result = experiments.run_sweep(spec)
        try:
            paths = experiments.save(result, args.out_dir, gnuplot=args.gnuplot)
        except OSError as exc:
            print(f"covertnu: cannot write output: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        _emit({"name": spec.name, "rows": len(result.rows), **paths})
    return 0


COMMANDS = {"metrics": cmd_metrics, "threshold": cmd_threshold, "rate": cmd_rate,
            "simulate": cmd_simulate, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, DomainError, ValueError) as exc:
        print(f"covertnu {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, OSError) as exc:
        print(f"covertnu {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

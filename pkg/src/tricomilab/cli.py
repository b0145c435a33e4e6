"""Command-line driver: ``tricomilab <kind> [--config PATH] [--out DIR] ...``.

Exit codes: 0 on success (blowups and failed contractions are results),
2 on invalid configuration, 1 on infrastructure failure.
"""

import argparse
import json
import sys

from .errors import DomainError, InputError, UsageError
from .experiments import KINDS, ExperimentConfig, load_config, run_experiment, specfun_eval

__all__ = ["main", "build_parser"]


def _float_list(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _str_list(text):
    return [v for v in (s.strip() for s in text.split(",")) if v]


# (flag, dotted parameter path, type) per experiment kind
_KIND_FLAGS = {
    "simulate": [("--p", "nl.p", float), ("--epsilon", "data.epsilon", float),
                 ("--variant", "nl.variant", str), ("--T-end", "ctl.T_end", float),
                 ("--dx", "grid.dx", float), ("--record-stride", "ctl.record_stride", int)],
    "linear-decay": [("--epsilon", "data.epsilon", float), ("--t-min", "t_min", float),
                     ("--t-max", "t_max", float), ("--count", "count", int),
                     ("--route", "route", str)],
    "blowup-scan": [("--p", "p", _float_list), ("--epsilon", "epsilon", _float_list),
                    ("--T-end", "T_end", float), ("--dx", "dx", float),
                    ("--variant", "variant", str), ("--record-stride", "record_stride", int)],
    "picard": [("--p", "p", float), ("--epsilon", "epsilon", float), ("--k-max", "k_max", int),
               ("--T-num", "T_num", float), ("--dx", "dx", float), ("--gamma", "gamma", float)],
    "exponents": [("--m", "m", int), ("--n", "n", int), ("--p-eval", "p_eval", float)],
    "specfun-table": [("--t-min", "t_min", float), ("--t-max", "t_max", float),
                      ("--count", "count", int), ("--functions", "functions", _str_list)],
    "strichartz-scan": [("--p", "p", float), ("--t-horizon", "t_horizon", float),
                        ("--count", "count", int), ("--sample", "sample", int)],
}


def _dest(path):
    return "opt_" + path.replace(".", "__")


def build_parser():
    parser = argparse.ArgumentParser(prog="tricomilab",
                                     description="Semilinear Tricomi equation laboratory.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        sp.add_argument("--config", metavar="PATH", help="YAML configuration file")
        sp.add_argument("--out", metavar="DIR", help="output directory (default: results)")
        sp.add_argument("--seed", type=int, metavar="N", help="seed for corpus sampling")
        sp.add_argument("--workers", type=int, metavar="N", help="process pool size")
        for flag, path, typ in _KIND_FLAGS[kind]:
            sp.add_argument(flag, dest=_dest(path), type=typ, default=None)
    sf = sub.add_parser("specfun", help="debug access to the special functions")
    sfs = sf.add_subparsers(dest="action", required=True)
    ev = sfs.add_parser("eval", help="evaluate one function at given points")
    ev.add_argument("name")
    ev.add_argument("x", nargs="+", type=float)
    ev.add_argument("--param", type=float, default=None,
                    help="order / parameter (bessel_k: nu, hyp0f1: b, gauss_hyp: gamma)")
    return parser


def _config_from_args(args):
    overrides = {}
    for _, path, _ in _KIND_FLAGS[args.kind]:
        val = getattr(args, _dest(path))
        if val is not None:
            overrides[path] = val
    kw = dict(out=args.out, seed=args.seed, workers=args.workers, overrides=overrides)
    if args.config:
        cfg = load_config(args.config, **kw)
        if cfg.kind != args.kind:
            raise UsageError("kind", f"config file is for {cfg.kind!r}, command is {args.kind!r}")
        return cfg
    return ExperimentConfig.from_mapping({"kind": args.kind}, **kw)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.kind == "specfun":
            try:
                vals = specfun_eval(args.name, args.x, args.param)
            except (DomainError, InputError) as exc:
                raise UsageError("x", str(exc)) from None
            print(json.dumps({"name": args.name, "x": args.x, "param": args.param,
                              "values": vals}, sort_keys=True))
            return 0
        cfg = _config_from_args(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        status, paths = run_experiment(cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return status


if __name__ == "__main__":
    sys.exit(main())

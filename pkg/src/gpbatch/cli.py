"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 configuration error,
3 runtime or numerical error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import diag, env, schedule
from .errors import ConfigurationError, GPBatchError
from .harness import load_config, run_experiment
from .kernels import KernelSpec

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.output_dir:
        from dataclasses import replace
        config = replace(config, output_dir=args.output_dir)
    result, _ = run_experiment(config)
    for name in result.policies:
        print(f"{name:>16}: mean R_T = {result.final(name):.4f} "
              f"(half-std {result.half_std[name][-1]:.4f})")
    print(f"wrote {config.output_dir}/raw.csv, summary.csv, schedule.txt")
    return EXIT_OK


def _cmd_schedule(args) -> int:
    kind = schedule.Kind(args.kind)
    if kind is schedule.Kind.CONSTANT_MATERN and args.nu is None:
        raise ConfigurationError("--nu is required for const-matern")
    s = schedule.make_schedule(kind, args.T, args.B, nu=args.nu, d=args.d,
                               normalize=args.normalize)
    print(s)
    return EXIT_OK


def _cmd_diag(args) -> int:
    if args.kernel == "matern":
        spec = KernelSpec.matern(args.nu, args.lengthscale, args.d)
    else:
        spec = KernelSpec.se(args.lengthscale, args.d)
    X = env.build_grid(args.d, args.per_axis, args.lo, args.hi)
    if args.gamma:
        ts = [int(t) for t in args.t.split(",")]
        print(diag.format_report([diag.greedy_max_gain(spec, args.lam, X, t) for t in ts]))
    print(f"C1(lambda={args.lam:g}) = {diag.c1(args.lam):.6f}")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_all
    return EXIT_OK if run_all(verbose=True) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gpbatch", description="Batched GP bandit experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="execute an experiment config")
    r.add_argument("--config", required=True)
    r.add_argument("--output-dir")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("schedule", help="print a batch schedule")
    s.add_argument("--T", type=int, required=True)
    s.add_argument("--kind", choices=[k.value for k in schedule.Kind], required=True)
    s.add_argument("--B", type=int)
    s.add_argument("--nu", type=float)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--normalize", action="store_true")
    s.set_defaults(func=_cmd_schedule)

    d = sub.add_parser("diag", help="information-gain report")
    d.add_argument("--gamma", action="store_true", help="tabulate greedy (and exhaustive) gain")
    d.add_argument("--t", default="1,2,4,8,16,32")
    d.add_argument("--kernel", choices=["se", "matern"], default="se")
    d.add_argument("--nu", type=float, default=2.5)
    d.add_argument("--lengthscale", type=float, default=0.5)
    d.add_argument("--lam", type=float, default=1.0)
    d.add_argument("--d", type=int, default=1)
    d.add_argument("--per-axis", type=int, default=50)
    d.add_argument("--lo", type=float, default=0.0)
    d.add_argument("--hi", type=float, default=1.0)
    d.set_defaults(func=_cmd_diag)

    t = sub.add_parser("selftest", help="run reduced-scale property checks")
    t.set_defaults(func=_cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GPBatchError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

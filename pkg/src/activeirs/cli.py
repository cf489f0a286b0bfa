"""Command-line entry point: ``activeirs {single,convergence,rate-vs-n,flops}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .beamformers import METHODS, run_method
from .channel import sample_channel


def _emit(dataset: harness.Dataset, out: str | None) -> None:
    if out:
        dataset.write(out)
    else:
        dataset.to_csv(sys.stdout)


def _config(args) -> harness.ExperimentConfig:
    cfg = harness.parse_config(Path(args.config)) if args.config else harness.parse_config("")
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip()) if args.methods else None
    return harness.with_overrides(cfg, base_seed=args.seed, trials=args.trials, methods=methods)


def cmd_single(args) -> None:
    cfg = _config(args)
    n = args.n if args.n is not None else cfg.n_list[0]
    params = cfg.params(n)
    ch = sample_channel(cfg.geometry, cfg.pathloss, params, cfg.base_seed)
    rows = []
    for m in cfg.methods:
        res = run_method(m, ch, params, cfg.tolerances)
        rows.append((m, n, res.rate_bits, res.iterations))
    _emit(harness.Dataset(("method", "n", "rate_bits", "iterations"), rows), args.out)


def cmd_convergence(args) -> None:
    cfg = _config(args)
    _emit(harness.run_convergence(cfg), args.out or cfg.output_path)


def cmd_rate_vs_n(args) -> None:
    cfg = _config(args)
    _emit(harness.run_rate_vs_n(cfg), args.out or cfg.output_path)


def cmd_flops(args) -> None:
    cfg = _config(args)
    cp = cfg.complexity
    if cp is None:
        samples = harness.run_trials(cfg, cfg.convergence_n, methods=harness.PROPOSED)
        cp = harness.measure_complexity_params(samples)
    print(f"# L1={cp.l1} L2={cp.l2} L3={cp.l3} L4={cp.l4}", file=sys.stderr)
    _emit(harness.run_flops(cfg, cp), args.out or cfg.output_path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="activeirs", description="Active-IRS beamformer experiments (CSV output).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI-style experiment config")
    common.add_argument("--seed", type=int, metavar="U64", help="override base seed")
    common.add_argument("--trials", type=int, metavar="K", help="override trial count")
    common.add_argument("--methods", metavar="LIST",
                        help=f"comma-separated subset of {','.join(METHODS)}")
    common.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("single", parents=[common], help="rates of every method on one channel")
    p.add_argument("--n", type=int, help="IRS elements (default: first entry of n_list)")
    p.set_defaults(func=cmd_single)
    sub.add_parser("convergence", parents=[common],
                   help="per-iteration traces").set_defaults(func=cmd_convergence)
    sub.add_parser("rate-vs-n", parents=[common],
                   help="mean rate against element count").set_defaults(func=cmd_rate_vs_n)
    sub.add_parser("flops", parents=[common],
                   help="FLOP models with measured iteration counts").set_defaults(func=cmd_flops)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"activeirs: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

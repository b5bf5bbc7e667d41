"""Command-line entry point: ``permchan {analyze,simulate,degrade,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 LP infeasible.
"""

from __future__ import annotations

import argparse
import json
import sys

from permchan.capacity import capacity_bounds
from permchan.channel import load_channel
from permchan.degradation import degradation_feasibility, doeblin_witness, extremal_erasure_probability
from permchan.errors import PermchanError
from permchan.matrix import RANK_TOL, build_profile, doeblin_coefficient

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3


def _dump(obj):
    print(json.dumps(obj, indent=2))


def _fail(msg):
    print(f"permchan: error: {msg}", file=sys.stderr)
    return EXIT_INPUT


def cmd_analyze(args):
    try:
        ch = load_channel(args.channel)
        profile = build_profile(ch, args.rank_tol)
    except (OSError, PermchanError) as exc:
        return _fail(f"{args.channel}: {exc}")
    _dump({"profile": profile.to_dict(), "capacity_bounds": capacity_bounds(ch, profile).to_dict()})
    return EXIT_OK


def cmd_simulate(args):
    from permchan.harness import ExperimentConfig, format_csv, run_experiment, write_csv

    try:
        config = ExperimentConfig.from_file(args.config)
        results = run_experiment(config, args.workers)
    except (OSError, PermchanError) as exc:
        return _fail(f"{args.config}: {exc}")
    if config.output is not None:
        write_csv(results, config.output)
        print(f"wrote {len(results)} rows to {config.output}", file=sys.stderr)
    else:
        sys.stdout.write(format_csv(results))
    return EXIT_OK


def _doeblin_report(ch):
    eta = doeblin_coefficient(ch)
    out = {"doeblin_coefficient": eta, "bisection": extremal_erasure_probability(ch)}
    if 0.0 < eta < 1.0:
        q_z = ch.matrix.min(axis=0) / eta
        out["witness"] = doeblin_witness(ch, eta, q_z).matrix.tolist()
    return out


def cmd_degrade(args):
    try:
        dom = load_channel(args.dominator, min_size=1)
        deg = load_channel(args.degraded, min_size=1)
        wit = degradation_feasibility(dom, deg)
    except (OSError, PermchanError) as exc:
        return _fail(str(exc))
    report = {"feasible": wit is not None}
    if wit is not None:
        report["residual"] = wit.residual
        report["witness"] = wit.intermediate.matrix.tolist()
    if args.eta:
        report["doeblin"] = _doeblin_report(deg)
    _dump(report)
    return EXIT_OK if wit is not None else EXIT_INFEASIBLE


def cmd_verify(args):
    from permchan.verify import FIXTURE_DIR, run_suite

    try:
        ok, report = run_suite("full" if args.full else "fast", args.fixtures or FIXTURE_DIR)
    except (OSError, PermchanError, ValueError) as exc:
        return _fail(str(exc))
    _dump(report)
    for f in report["failed"]:
        print(f"FAILED {f['invariant']}: {f['name']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(
        prog="permchan", description="Noisy permutation channel analysis and simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="profile a channel and bound its capacity")
    p.add_argument("channel", help="channel JSON file")
    p.add_argument("--rank-tol", type=float, default=RANK_TOL,
                   help="relative singular-value cutoff (default %(default)g)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run a seeded Monte Carlo experiment")
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("--workers", type=int, default=None, help="worker threads (overrides config)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("degrade", help="test whether one channel is a degraded version of another")
    p.add_argument("dominator")
    p.add_argument("degraded")
    p.add_argument("--eta", action="store_true",
                   help="also report the Doeblin coefficient and erasure witness of the degraded channel")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("verify", help="run the oracle regression suite")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--fast", action="store_true", help="small exact checks only (default)")
    g.add_argument("--full", action="store_true", help="add Monte Carlo and LP checks")
    p.add_argument("--fixtures", help="fixture directory (default: bundled fixtures)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

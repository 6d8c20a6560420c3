"""Command-line entry point: ``mdwarf --algo m-dwarf --topo chain:3 --out results/``."""

from __future__ import annotations

import argparse
import sys

from .experiment import ExperimentConfig, aggregate, run_batch
from .node import PRESETS
from .radio import ConfigError
from .topology import TopologyError


def _node_period(text: str) -> tuple[int, int]:
    try:
        node, period = text.split(":")
        return int(node), int(period)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NODE:PERIOD, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdwarf", description=__doc__)
    p.add_argument("--algo", choices=sorted(PRESETS), default="m-dwarf")
    p.add_argument("--relay", action=argparse.BooleanOptionalAction, default=None,
                   help="override the preset's relative time relaying")
    p.add_argument("--absorb", action=argparse.BooleanOptionalAction, default=None,
                   help="override the preset's force absorption")
    p.add_argument("--rule", choices=["force", "midpoint"], default=None)
    p.add_argument("--topo", required=True,
                   help="chain:N, ring:N, star:N, complete:N, grid:RxC or file:PATH")
    p.add_argument("--period", type=float, default=1000.0, help="period T in ms")
    p.add_argument("--periods", type=int, default=300)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="run r uses seed + r")
    p.add_argument("--airtime", type=float, default=2.0, help="frame airtime in ms")
    p.add_argument("--start-window", type=float, default=None,
                   help="initial firing offsets drawn from [0, W) ms (default: one period)")
    p.add_argument("--alpha", type=float, default=0.95, help="midpoint jump size")
    p.add_argument("--epsilon", type=float, default=None, help="convergence threshold in ms (default 0.02 T)")
    p.add_argument("--window", type=int, default=10, help="periods the error must stay below epsilon")
    p.add_argument("--late-start", type=_node_period, action="append", default=[], metavar="NODE:PERIOD")
    p.add_argument("--stop", type=_node_period, action="append", default=[], metavar="NODE:PERIOD")
    p.add_argument("--messages", action="store_true", help="also dump every firing message")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig(
            topology=args.topo,
            algo=args.algo,
            relay=args.relay,
            absorb=args.absorb,
            rule=args.rule,
            alpha=args.alpha,
            T=args.period,
            periods=args.periods,
            runs=args.runs,
            seed=args.seed,
            airtime=args.airtime,
            start_window=args.start_window,
            epsilon=args.epsilon,
            window=args.window,
            late_start=dict(args.late_start),
            stop=dict(args.stop),
            record_messages=args.messages,
        )
        rows = run_batch(cfg, args.out, jobs=max(1, args.jobs))
    except (ConfigError, TopologyError, ValueError, OSError) as exc:
        print(f"mdwarf: error: {exc}", file=sys.stderr)
        return 2
    frac, median = aggregate(rows)
    med = "n/a" if median is None else f"{median:g}"
    print(f"{len(rows)} runs, converged {frac:.0%}, median convergence period {med}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

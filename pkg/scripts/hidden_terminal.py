"""3-node chain with and without relaying: how often do the end nodes collide?

    python3 scripts/hidden_terminal.py --runs 20
"""

import argparse
import statistics
from collections import defaultdict

from mdwarf.experiment import ExperimentConfig, run_one


def cofire_fraction(trace, airtime, last):
    per_period = defaultdict(dict)
    for f in trace.firings:
        per_period[f.period][f.node] = f.time
    hits = 0
    for p in range(trace.periods - last, trace.periods):
        fired = per_period.get(p, {})
        if 0 in fired and 2 in fired and abs(fired[0] - fired[2]) < airtime:
            hits += 1
    return hits / last


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--periods", type=int, default=300)
    ap.add_argument("--last", type=int, default=50, help="trailing periods to inspect")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'algo':<10} {'converged':>9} {'co-fire':>8} {'max err':>8} {'collisions':>10}")
    for algo in ("dwarf", "m-dwarf", "desync", "ext-desync"):
        cfg = ExperimentConfig(topology="chain:3", algo=algo, periods=args.periods, runs=args.runs, seed=args.seed)
        topo = cfg.load_topology()
        res = [run_one(cfg, r, topo) for r in range(args.runs)]
        conv = sum(r.converged for r in res) / len(res)
        cof = statistics.mean(cofire_fraction(r.trace, cfg.airtime, args.last) for r in res)
        err = statistics.median(r.report.final_error[1] for r in res)
        coll = statistics.mean(r.report.total_collisions for r in res)
        print(f"{algo:<10} {conv:>9.0%} {cof:>8.0%} {err:>8.1f} {coll:>10.1f}")


if __name__ == "__main__":
    main()

"""Fraction of converged runs per algorithm and network size on complete graphs.

Writes a tidy CSV (algo, nodes, converged, median_period) and echoes it.
"""

import argparse
import csv
import statistics
import sys

from mdwarf.experiment import ExperimentConfig, run_one


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--algos", nargs="+", default=["dwarf", "m-dwarf", "desync", "ext-desync"])
    ap.add_argument("--sizes", nargs="+", type=int, default=[2, 4, 8, 16])
    ap.add_argument("--topo", default="complete", help="generator name, e.g. complete or ring")
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--periods", type=int, default=300)
    ap.add_argument("--airtime", type=float, default=2.0)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout only)")
    args = ap.parse_args()

    rows = []
    for algo in args.algos:
        for n in args.sizes:
            cfg = ExperimentConfig(topology=f"{args.topo}:{n}", algo=algo, periods=args.periods, runs=args.runs,
                                   airtime=args.airtime)
            topo = cfg.load_topology()
            res = [run_one(cfg, r, topo) for r in range(args.runs)]
            done = [r.report.convergence_period for r in res if r.converged]
            med = statistics.median(done) if done else ""
            rows.append([algo, n, f"{len(done) / len(res):.2f}", med])

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["algo", "nodes", "converged", "median_period"])
    w.writerows(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            cw = csv.writer(fh, lineterminator="\n")
            cw.writerow(["algo", "nodes", "converged", "median_period"])
            cw.writerows(rows)


if __name__ == "__main__":
    main()

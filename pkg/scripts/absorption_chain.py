"""Four-node chain 2-0-1-3: relaying alone versus relaying with force absorption.

Prints the final phases of one run per variant and, over a batch, how often
nodes 2 and 3 end up sharing a slot.
"""

import argparse
import statistics
from pathlib import Path

from mdwarf.experiment import ExperimentConfig, run_one

EDGES = Path(__file__).resolve().parents[1] / "data" / "shared_slot_chain.edges"


def circ(a, b, T):
    d = abs(a - b) % T
    return min(d, T - d)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=30)
    ap.add_argument("--periods", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=10.0, help="co-phase tolerance in ms")
    args = ap.parse_args()

    for algo in ("relay-dwarf", "m-dwarf"):
        cfg = ExperimentConfig(topology=f"file:{EDGES}", algo=algo, periods=args.periods, runs=args.runs,
                               seed=args.seed)
        topo = cfg.load_topology()
        res = [run_one(cfg, r, topo) for r in range(args.runs)]
        ph = res[0].report.final_phases
        shown = "  ".join(f"{i}:{ph[i]:7.1f}" for i in sorted(ph))
        shared = sum(circ(r.report.final_phases[2], r.report.final_phases[3], cfg.T) <= args.tol for r in res)
        err = statistics.median(r.report.final_error[1] for r in res)
        print(f"{algo:<12} run 0 phases  {shown}")
        print(f"{'':<12} nodes 2,3 share a slot in {shared}/{len(res)} runs, median max error {err:.1f} ms")


if __name__ == "__main__":
    main()

"""Seeded batches of simulation runs with per-run and summary CSV output."""

from __future__ import annotations

import csv
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .metrics import MetricsReport, evaluate, write_firings_csv, write_metrics_csv
from .node import ProtocolConfig
from .radio import RadioConfig, Trace, run_simulation
from .topology import Topology, parse_topology_spec

SUMMARY_COLUMNS = [
    "run",
    "seed",
    "converged",
    "convergence_period",
    "final_mean_err_ms",
    "final_max_err_ms",
    "fairness",
    "total_collisions",
]


@dataclass
class ExperimentConfig:
    topology: str
    algo: str = "m-dwarf"
    relay: bool | None = None
    absorb: bool | None = None
    rule: str | None = None
    alpha: float = 0.95
    T: float = 1000.0
    periods: int = 300
    runs: int = 100
    seed: int = 0
    airtime: float = 2.0
    start_window: float | None = None
    epsilon: float | None = None
    window: int = 10
    late_start: dict[int, int] = field(default_factory=dict)
    stop: dict[int, int] = field(default_factory=dict)
    record_messages: bool = False

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.periods < 1:
            raise ValueError("periods must be >= 1")

    def protocol(self) -> ProtocolConfig:
        overrides = {"alpha": self.alpha}
        for name in ("relay", "absorb", "rule"):
            if getattr(self, name) is not None:
                overrides[name] = getattr(self, name)
        return ProtocolConfig.preset(self.algo, **overrides)

    def radio(self) -> RadioConfig:
        return RadioConfig(airtime=self.airtime, start_window=self.start_window)

    def load_topology(self) -> Topology:
        return parse_topology_spec(self.topology)

    @property
    def eps(self) -> float:
        return 0.02 * self.T if self.epsilon is None else self.epsilon

    @property
    def converge_from(self) -> int:
        """Convergence is only counted once the last late node has joined."""
        return max(self.late_start.values(), default=0)


@dataclass
class RunResult:
    run: int
    seed: int
    trace: Trace
    report: MetricsReport

    @property
    def converged(self) -> bool:
        return self.report.convergence_period is not None

    def summary_row(self) -> list:
        mean, mx = self.report.final_error
        cp = self.report.convergence_period
        return [
            self.run,
            self.seed,
            int(self.converged),
            "" if cp is None else cp,
            _fmt(mean),
            _fmt(mx),
            _fmt(self.report.fairness),
            self.report.total_collisions,
        ]


def _fmt(x) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6f}"


def run_one(cfg: ExperimentConfig, run: int, topology: Topology | None = None) -> RunResult:
    topo = topology if topology is not None else cfg.load_topology()
    seed = cfg.seed + run
    trace = run_simulation(
        topo,
        cfg.protocol(),
        cfg.radio(),
        cfg.T,
        cfg.periods,
        seed,
        late_start=cfg.late_start,
        stop=cfg.stop,
        record_messages=cfg.record_messages,
    )
    report = evaluate(trace, topo, epsilon=cfg.eps, window=cfg.window, start=cfg.converge_from)
    trace.final_states = []
    return RunResult(run, seed, trace, report)


def _run_and_write(args) -> list:
    cfg, run, out_dir = args
    res = run_one(cfg, run)
    out = Path(out_dir)
    write_firings_csv(res.trace, out / f"run_{run:04d}_firings.csv")
    write_metrics_csv(res.report, out / f"run_{run:04d}_metrics.csv")
    if cfg.record_messages:
        _write_messages(res.trace, out / f"run_{run:04d}_messages.csv")
    return res.summary_row()


def _write_messages(trace: Trace, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time_ms", "message"])
        for t, wire in trace.messages:
            w.writerow([f"{t:.6f}", wire])


def aggregate(rows: list[list]) -> tuple[float, float | None]:
    """Fraction of converged runs and the median convergence period among them."""
    periods = [r[3] for r in rows if r[2]]
    frac = len(periods) / len(rows) if rows else 0.0
    return frac, (statistics.median(periods) if periods else None)


def run_batch(cfg: ExperimentConfig, out_dir: str | os.PathLike, jobs: int = 1) -> list[list]:
    """Run every seed, write per-run CSVs and ``summary.csv``; return summary rows.

    On any failure the files this call created are removed again.
    """
    cfg.load_topology()  # fail fast on a bad topology before touching the disk
    out = Path(out_dir)
    created_dir = not out.exists()
    out.mkdir(parents=True, exist_ok=True)
    before = set(os.listdir(out))
    try:
        tasks = [(cfg, r, str(out)) for r in range(cfg.runs)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_run_and_write, tasks))
        else:
            rows = [_run_and_write(t) for t in tasks]
        frac, median = aggregate(rows)
        with open(out / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_COLUMNS)
            w.writerows(rows)
            w.writerow(["all", "", _fmt(frac), "" if median is None else median, "", "", "", ""])
        return rows
    except BaseException:
        for name in set(os.listdir(out)) - before:
            try:
                os.remove(out / name)
            except OSError:
                pass
        if created_dir:
            try:
                out.rmdir()
            except OSError:
                pass
        raise

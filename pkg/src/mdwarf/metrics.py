"""Desynchronization error, convergence, fairness and CSV output.

Metrics are omniscient: they read true firing times from the trace and
the true topology, never node-local estimates.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import networkx as nx

from .radio import Trace
from .topology import Topology

NAN = float("nan")


def phase_groups(topology: Topology, members: set[int]) -> dict[int, int]:
    """Number of distinct slots each node's two-hop neighbourhood needs.

    Nodes more than two hops apart may share a slot. The count is a greedy
    colouring of the interference graph restricted to the neighbourhood.
    """
    out = {}
    for i in members:
        C = sorted(topology.within_two_hops(i) & members)
        g = nx.Graph()
        g.add_nodes_from(C)
        for a in C:
            for b in topology.within_two_hops(a) & members:
                if b != a and b in g:
                    g.add_edge(a, b)
        colours = nx.greedy_color(g, strategy="DSATUR")
        out[i] = 1 + max(colours.values())
    return out


def next_gaps(snapshot: Mapping[int, float], topology: Topology, T: float) -> dict[int, float]:
    """Forward distance from each node to its next phase neighbour within two hops."""
    gaps = {}
    for i, phi in snapshot.items():
        others = [(snapshot[j] - phi) % T for j in topology.within_two_hops(i) if j != i and j in snapshot]
        gaps[i] = min(others) if others else T
    return gaps


def desync_error(
    snapshot: Mapping[int, float],
    topology: Topology,
    T: float,
    groups: Mapping[int, int] | None = None,
) -> tuple[float, float]:
    """Mean and max deviation (ms) of each node's next-neighbour gap from T/N_i."""
    if not snapshot:
        return 0.0, 0.0
    if groups is None:
        groups = phase_groups(topology, set(snapshot))
    gaps = next_gaps(snapshot, topology, T)
    errs = []
    for i, gap in gaps.items():
        if groups[i] <= 1:
            errs.append(0.0)
        else:
            errs.append(abs(gap - T / groups[i]))
    return math.fsum(errs) / len(errs), max(errs)


def snapshots(trace: Trace, periods: int | None = None) -> list[dict[int, float] | None]:
    """Latest firing phase of every active node at the end of each period.

    ``None`` marks periods in which some active node has not fired yet.
    """
    T = trace.T
    if periods is None:
        periods = trace.periods
    latest: dict[int, float] = {}
    out = []
    k = 0
    firings = trace.firings
    for p in range(periods):
        bound = (p + 1) * T
        while k < len(firings) and firings[k].time < bound:
            latest[firings[k].node] = firings[k].phase
            k += 1
        active = [i for i, (on, off) in trace.active.items() if on <= p and (off is None or p < off)]
        if any(i not in latest for i in active):
            out.append(None)
        else:
            out.append({i: latest[i] for i in active})
    return out


def fairness(slot_widths: Sequence[float]) -> float:
    """Jain's index of the slot widths."""
    if len(slot_widths) == 0:
        raise ValueError("fairness of an empty set of slots")
    if any(w <= 0 for w in slot_widths):
        raise ValueError("slot widths must be positive")
    s = math.fsum(slot_widths)
    return s * s / (len(slot_widths) * math.fsum(w * w for w in slot_widths))


def convergence_period(max_errors: Sequence[float], epsilon: float, window: int, start: int = 0) -> int | None:
    """First period from which ``window`` consecutive max errors stay within ``epsilon``."""
    if epsilon <= 0 or window < 1:
        raise ValueError("epsilon must be > 0 and window >= 1")
    run = 0
    for p in range(start, len(max_errors)):
        e = max_errors[p]
        if e is not None and not math.isnan(e) and e <= epsilon:
            run += 1
            if run == window:
                return p - window + 1
        else:
            run = 0
    return None


@dataclass
class MetricsReport:
    T: float
    per_period_error: list[tuple[int, float, float]] = field(default_factory=list)
    convergence_period: int | None = None
    fairness: float = NAN
    collisions_per_period: list[int] = field(default_factory=list)
    final_phases: dict[int, float] = field(default_factory=dict)

    @property
    def max_errors(self) -> list[float]:
        return [m for _, _, m in self.per_period_error]

    @property
    def final_error(self) -> tuple[float, float]:
        for _, mean, mx in reversed(self.per_period_error):
            if not math.isnan(mx):
                return mean, mx
        return NAN, NAN

    @property
    def total_collisions(self) -> int:
        return sum(self.collisions_per_period)


def evaluate(
    trace: Trace,
    topology: Topology,
    epsilon: float | None = None,
    window: int = 10,
    start: int = 0,
) -> MetricsReport:
    T = trace.T
    if epsilon is None:
        epsilon = 0.02 * T
    periods = trace.periods
    report = MetricsReport(T=T)
    groups_cache: dict[frozenset, dict[int, int]] = {}
    last = None
    for p, snap in enumerate(snapshots(trace, periods)):
        if snap is None:
            report.per_period_error.append((p, NAN, NAN))
            continue
        key = frozenset(snap)
        if key not in groups_cache:
            groups_cache[key] = phase_groups(topology, set(key))
        mean, mx = desync_error(snap, topology, T, groups_cache[key])
        report.per_period_error.append((p, mean, mx))
        last = snap
    report.convergence_period = convergence_period(report.max_errors, epsilon, window, start)
    counts = [0] * periods
    for c in trace.collisions:
        p = int(c.time // T)
        if p < periods:
            counts[p] += 1
    report.collisions_per_period = counts
    if last:
        report.final_phases = dict(last)
        widths = [w for w in next_gaps(last, topology, T).values() if w > 0]
        report.fairness = fairness(widths) if widths else NAN
    return report


def _fmt(x: float) -> str:
    return "" if x is None or math.isnan(x) else f"{x:.6f}"


def _open(path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_firings_csv(trace: Trace, path: str | os.PathLike) -> None:
    # the engine runs a start window past the last period; those firings are not reported
    limit = trace.periods if trace.periods > 0 else math.inf
    rows = sorted((f for f in trace.firings if f.period < limit), key=lambda f: (f.period, f.node, f.time))
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period", "node", "time_ms", "phase_ms"])
        for f in rows:
            w.writerow([f.period, f.node, _fmt(f.time), _fmt(f.phase)])


def write_metrics_csv(report: MetricsReport, path: str | os.PathLike) -> None:
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period", "mean_err_ms", "max_err_ms", "collisions"])
        for (p, mean, mx), c in zip(report.per_period_error, report.collisions_per_period):
            w.writerow([p, _fmt(mean), _fmt(mx), c])


def write_csv(obj: Trace | MetricsReport, path: str | os.PathLike) -> None:
    if isinstance(obj, Trace):
        write_firings_csv(obj, path)
    elif isinstance(obj, MetricsReport):
        write_metrics_csv(obj, path)
    else:
        raise TypeError(f"cannot write {type(obj).__name__} as CSV")

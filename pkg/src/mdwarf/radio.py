"""Deterministic discrete-event simulation of broadcast firings.

Loss model: a reception fails if the receiver is itself transmitting, or
if any other one-hop neighbour of the receiver transmits with overlapping
airtime. Nothing else is ever lost.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

from .node import FiringMessage, NodeState, ProtocolConfig
from .topology import Topology

TIMER_FIRE = 0
DELIVERY_CHECK = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RadioConfig:
    airtime: float = 2.0
    # initial firing offsets are drawn uniformly from [0, start_window); None means one period
    start_window: float | None = None

    def window(self, T: float) -> float:
        return T if self.start_window is None else self.start_window

    def validate(self, T: float) -> None:
        if not T > 0:
            raise ConfigError(f"period must be positive, got {T}")
        if not 0 < self.airtime < T / 10:
            raise ConfigError(f"airtime must be in (0, T/10) = (0, {T / 10}), got {self.airtime}")
        if self.window(T) < 0:
            raise ConfigError("start window must be non-negative")


class SimEvent(NamedTuple):
    time: float
    seq: int
    kind: int
    # firing node for TIMER_FIRE, sender for DELIVERY_CHECK
    node: int
    tx: "Transmission | None" = None


@dataclass
class Transmission:
    sender: int
    start: float
    end: float
    payload: FiringMessage


class Firing(NamedTuple):
    period: int
    node: int
    time: float
    phase: float


class Collision(NamedTuple):
    time: float
    receiver: int
    senders: tuple[int, ...]


@dataclass
class Trace:
    T: float
    node_count: int
    firings: list[Firing] = field(default_factory=list)
    collisions: list[Collision] = field(default_factory=list)
    # node -> (first period it is on, first period it is off or None)
    active: dict[int, tuple[int, int | None]] = field(default_factory=dict)
    messages: list[tuple[float, str]] = field(default_factory=list)
    delivered: int = 0
    lost: int = 0
    config: dict = field(default_factory=dict)
    # node state machines as they stood when the run ended
    final_states: list[NodeState] = field(default_factory=list, repr=False)

    @property
    def periods(self) -> int:
        return self.config.get("periods", 0)


def collision_rule(
    receiver: int,
    tx: Transmission,
    concurrent: Sequence[Transmission],
    topology: Topology,
) -> bool:
    """Whether ``tx`` reaches ``receiver`` given every other transmission
    that may overlap it."""
    nbrs = topology.one_hop(receiver)
    for other in concurrent:
        if other is tx:
            continue
        if other.start < tx.end and other.end > tx.start:
            if other.sender == receiver or other.sender in nbrs:
                return False
    return True


def initial_offsets(node_count: int, window: float, seed: int) -> list[float]:
    """First-firing offsets, one draw per node in id order from a dedicated stream."""
    rng = random.Random(seed)
    return [rng.random() * window for _ in range(node_count)]


def run_simulation(
    topology: Topology,
    proto: ProtocolConfig,
    radio: RadioConfig,
    T: float,
    periods: int,
    seed: int,
    *,
    late_start: dict[int, int] | None = None,
    stop: dict[int, int] | None = None,
    initial_phases: Sequence[float] | None = None,
    warm_start: bool = False,
    record_messages: bool = False,
) -> Trace:
    """Simulate ``periods`` periods and return the full firing trace.

    ``late_start`` maps node -> period before which the node is switched
    off; ``stop`` maps node -> period from which it is off again. A node
    starts listening one period before its first firing.

    ``initial_phases`` overrides the random offsets. With ``warm_start``
    every node begins with an exact record of its neighbours as if it had
    heard a full clean period already (used to check stationarity).
    """
    radio.validate(T)
    if periods < 1:
        raise ConfigError("periods must be >= 1")
    late_start = dict(late_start or {})
    stop = dict(stop or {})
    N = topology.node_count
    for node in (*late_start, *stop):
        if not 0 <= node < N:
            raise ConfigError(f"node {node} not in topology")

    window = radio.window(T)
    offsets = initial_offsets(N, window, seed)
    if initial_phases is not None:
        if len(initial_phases) != N:
            raise ConfigError("initial_phases must give one phase per node")
        offsets = [float(p) for p in initial_phases]

    airtime = radio.airtime
    end_time = periods * T + window
    first_fire = [late_start.get(i, 0) * T + offsets[i] for i in range(N)]
    listen_from = [max(0.0, f - T) for f in first_fire]
    stop_at = [stop[i] * T if i in stop else math.inf for i in range(N)]

    nodes = []
    for i in range(N):
        st = NodeState(id=i, T=T, config=proto, airtime=airtime)
        st.last_firing_time = first_fire[i] - T
        st.phase = phase_of(first_fire[i], T)
        nodes.append(st)
    if warm_start:
        _prime_buffers(nodes, topology, first_fire, T, proto.relay)

    trace = Trace(T=T, node_count=N)
    trace.active = {i: (late_start.get(i, 0), stop.get(i)) for i in range(N)}
    trace.config = {
        "T": T,
        "periods": periods,
        "seed": seed,
        "protocol": asdict(proto),
        "radio": asdict(radio),
        "late_start": late_start,
        "stop": stop,
    }

    nbrs = [sorted(topology.one_hop(i)) for i in range(N)]
    recent: list[list[Transmission]] = [[] for _ in range(N)]
    heap: list[SimEvent] = []
    seq = 0
    for i in range(N):
        if first_fire[i] < stop_at[i]:
            heapq.heappush(heap, SimEvent(first_fire[i], seq, TIMER_FIRE, i))
            seq += 1

    firings = trace.firings
    collisions = trace.collisions
    last_time = -math.inf
    while heap:
        ev = heapq.heappop(heap)
        now = ev.time
        if now >= end_time:
            break
        assert now >= last_time, "event causality violated"
        last_time = now
        if ev.kind == TIMER_FIRE:
            i = ev.node
            st = nodes[i]
            msg, next_at = st.on_timer_fire(now)
            firings.append(Firing(int(now // T), i, now, st.phase))
            tx = Transmission(i, now, now + airtime, msg)
            if record_messages:
                trace.messages.append((now, msg.to_wire()))
            r = recent[i]
            r.append(tx)
            if len(r) > 2:
                del r[0]
            # one event checks every receiver, in id order
            if nbrs[i]:
                heapq.heappush(heap, SimEvent(tx.end, seq, DELIVERY_CHECK, i, tx))
                seq += 1
            if next_at < stop_at[i]:
                heapq.heappush(heap, SimEvent(next_at, seq, TIMER_FIRE, i))
                seq += 1
        else:
            tx = ev.tx
            start, end = tx.start, tx.end
            sender = tx.sender
            for j in nbrs[sender]:
                if not (listen_from[j] <= start and now < stop_at[j]):
                    trace.lost += 1
                    continue
                clash = []
                for other in recent[j]:
                    if other.start < end and other.end > start:
                        clash.append(j)
                        break
                for k in nbrs[j]:
                    if k == sender:
                        continue
                    for other in recent[k]:
                        if other.start < end and other.end > start:
                            clash.append(k)
                            break
                if clash:
                    trace.lost += 1
                    collisions.append(Collision(now, j, tuple(sorted({sender, *clash}))))
                    continue
                trace.delivered += 1
                nodes[j].on_receive(tx.payload, now)
    trace.final_states = nodes
    return trace


def phase_of(t: float, T: float) -> float:
    r = math.fmod(t, T)
    return r + T if r < 0 else r


def _prime_buffers(nodes, topology, first_fire, T, relay) -> None:
    from .node import ONE_HOP, TWO_HOP, NeighborRecord

    for st in nodes:
        i = st.id
        anchor = st.last_firing_time
        for j in topology.one_hop(i):
            rel = phase_of(first_fire[j] - T - anchor, T)
            st.buffer[j] = NeighborRecord(j, rel, -1, ONE_HOP)
        if relay:
            for j in topology.two_hop(i):
                rel = phase_of(first_fire[j] - T - anchor, T)
                st.buffer[j] = NeighborRecord(j, rel, -1, TWO_HOP)
        st.n = 1 + len(st.buffer)

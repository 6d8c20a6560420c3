"""Per-node desynchronization state machines.

One class covers four protocols through two feature flags and an
adjustment rule:

=============  =====  ======  ========
preset         relay  absorb  rule
=============  =====  ======  ========
dwarf          no     no      force
m-dwarf        yes    yes     force
desync         no     no      midpoint
ext-desync     yes    no      midpoint
=============  =====  ======  ========
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .forces import (
    absorbed_force_sorted,
    coupling_k,
    phase_mod,
    signed_shift,
    total_force_simple,
    update_phase,
)

ONE_HOP = 1
TWO_HOP = 2

FORCE = "force"
MIDPOINT = "midpoint"


@dataclass(frozen=True)
class ProtocolConfig:
    relay: bool = True
    absorb: bool = True
    rule: str = FORCE
    alpha: float = 0.95
    # records not refreshed for this many of the node's own periods are dropped
    expiry: int = 2

    def __post_init__(self):
        if self.rule not in (FORCE, MIDPOINT):
            raise ValueError(f"unknown adjustment rule {self.rule!r}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.expiry < 1:
            raise ValueError("expiry must be at least one period")

    @classmethod
    def preset(cls, name: str, **overrides) -> "ProtocolConfig":
        try:
            base = PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(PRESETS)}") from None
        return replace(base, **overrides)


PRESETS = {
    "dwarf": ProtocolConfig(relay=False, absorb=False, rule=FORCE),
    "m-dwarf": ProtocolConfig(relay=True, absorb=True, rule=FORCE),
    "relay-dwarf": ProtocolConfig(relay=True, absorb=False, rule=FORCE),
    "desync": ProtocolConfig(relay=False, absorb=False, rule=MIDPOINT),
    "ext-desync": ProtocolConfig(relay=True, absorb=False, rule=MIDPOINT),
}


@dataclass
class NeighborRecord:
    node: int
    rel_phase: float  # offset from the owner's last firing, in [0, T)
    last_updated: int  # owner's period index at reception
    hop: int


@dataclass(frozen=True)
class FiringMessage:
    sender: int
    entries: tuple[tuple[int, float], ...] = ()

    def to_wire(self) -> str:
        """``sender;count;id:rel;id:rel...`` with six-decimal offsets."""
        parts = [str(self.sender), str(len(self.entries))]
        parts += [f"{k}:{r:.6f}" for k, r in self.entries]
        return ";".join(parts)

    @classmethod
    def from_wire(cls, text: str) -> "FiringMessage":
        parts = text.split(";")
        if len(parts) < 2:
            raise ValueError(f"truncated firing message {text!r}")
        sender, count = int(parts[0]), int(parts[1])
        if len(parts) != 2 + count:
            raise ValueError(f"firing message declares {count} entries, carries {len(parts) - 2}")
        entries = []
        for p in parts[2:]:
            k, r = p.split(":")
            entries.append((int(k), float(r)))
        return cls(sender, tuple(entries))


def midpoint_shift(rel_phases: list[float], T: float, alpha: float) -> float:
    """Signed move towards the middle of the gap the node sits in.

    The next phase neighbour is the smallest offset, the previous one the
    largest. A lone neighbour is treated as both, which sends the node to
    the opposite side of the circle.
    """
    if not rel_phases:
        return 0.0
    nxt = min(rel_phases)
    prev = max(rel_phases)
    return alpha * (nxt + prev - T) / 2


@dataclass
class NodeState:
    id: int
    T: float
    config: ProtocolConfig = field(default_factory=ProtocolConfig)
    phase: float = 0.0
    last_firing_time: float = 0.0
    buffer: dict[int, NeighborRecord] = field(default_factory=dict)
    n: int = 1
    period: int = 0
    # frame duration; receptions are back-dated by this to the sender's firing
    airtime: float = 0.0
    last_force: float = 0.0

    def rel_phases(self) -> list[float]:
        return [r.rel_phase for r in self.buffer.values()]

    def compute_midpoint_phase(self) -> float:
        rels = [r for r in self.rel_phases() if r > 0]
        shift = midpoint_shift(rels, self.T, self.config.alpha)
        return phase_mod(self.phase + shift, self.T)

    def compute_force(self) -> float:
        rels = [r for r in self.rel_phases() if r > 0]
        if self.config.absorb:
            rels.sort()
            return absorbed_force_sorted(rels, self.T)
        return total_force_simple(rels, self.T)

    def on_timer_fire(self, now: float) -> tuple[FiringMessage, float]:
        """Broadcast, adjust phase, and return the message and next firing time."""
        T = self.T
        cfg = self.config
        offset = self.last_firing_time - now
        oldest = self.period - cfg.expiry + 1
        kept = {}
        for k, rec in self.buffer.items():
            if rec.last_updated >= oldest:
                r = (rec.rel_phase + offset) % T
                rec.rel_phase = 0.0 if r >= T else r
                kept[k] = rec
        self.buffer = kept
        self.last_firing_time = now
        self.phase = phase_mod(now, T)
        self.period += 1

        if cfg.relay:
            entries = tuple(sorted((k, r.rel_phase) for k, r in kept.items() if r.hop == ONE_HOP))
        else:
            entries = ()
        msg = FiringMessage(self.id, entries)

        self.n = 1 + len(kept)
        if cfg.rule == MIDPOINT:
            self.last_force = 0.0
            shift = signed_shift(self.phase, self.compute_midpoint_phase(), T)
        else:
            F = self.compute_force()
            self.last_force = F
            K = coupling_k(self.n, T)
            shift = signed_shift(self.phase, update_phase(self.phase, F, K, T), T)
        return msg, now + T + shift

    def on_receive(self, msg: FiringMessage, now: float) -> None:
        T = self.T
        period = self.period
        buf = self.buffer
        reference = (now - self.airtime - self.last_firing_time) % T
        if reference >= T:
            reference = 0.0
        rec = buf.get(msg.sender)
        if rec is None:
            buf[msg.sender] = NeighborRecord(msg.sender, reference, period, ONE_HOP)
        else:
            rec.rel_phase, rec.last_updated, rec.hop = reference, period, ONE_HOP
        if not self.config.relay:
            return
        me = self.id
        for k, r in msg.entries:
            if k == me:
                continue
            rel = (r + reference) % T
            if rel >= T:
                rel = 0.0
            cur = buf.get(k)
            if cur is None:
                buf[k] = NeighborRecord(k, rel, period, TWO_HOP)
            elif cur.hop != ONE_HOP or cur.last_updated != period:
                cur.rel_phase, cur.last_updated, cur.hop = rel, period, TWO_HOP

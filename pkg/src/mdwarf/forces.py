"""Artificial force field on the phase circle.

All phases and differences are in milliseconds; forces are dimensionless.
Positive force pushes a node clockwise (later), negative pushes it back.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

K_SCALE = 38.597
K_EXPONENT = 1.874


def _check_period(T: float) -> None:
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"period must be positive and finite, got {T!r}")


def wrap_phase_diff(rel: float, T: float) -> float:
    """Map a relative phase in [0, T) onto the signed interval (-T/2, T/2]."""
    _check_period(T)
    if not 0 <= rel < T:
        raise ValueError(f"relative phase {rel!r} outside [0, {T})")
    return rel if rel <= T / 2 else rel - T


def repulsive_force(delta: float, T: float) -> float:
    """Force exerted on a node by a neighbour ``delta`` ms ahead of it.

    A neighbour exactly opposite (``|delta| == T/2``) is balanced and
    exerts nothing.
    """
    _check_period(T)
    if delta == 0:
        raise ValueError("co-phased neighbour: phase difference must be non-zero")
    if abs(delta) > T / 2:
        raise ValueError(f"phase difference {delta!r} outside [-T/2, T/2]")
    if abs(delta) == T / 2:
        return 0.0
    return -T / delta


def total_force_simple(rel_phases: Iterable[float], T: float) -> float:
    """Plain sum of repulsive forces (single-hop DWARF)."""
    return math.fsum(repulsive_force(wrap_phase_diff(r, T), T) for r in rel_phases)


def _end_force(r: float, T: float) -> float:
    half = T / 2
    if r < half:
        return -T / r
    if r > half:
        return T / (T - r)
    return 0.0


def absorbed_force_sorted(phases: Sequence[float], T: float) -> float:
    """Unchecked core of :func:`total_force_absorbed`; ``phases`` sorted, all in (0, T)."""
    m = len(phases)
    if m == 0:
        return 0.0
    total = _end_force(phases[0], T)
    if m == 1:
        return total
    total += _end_force(phases[-1], T)
    half = T / 2
    for i in range(1, m - 1):
        r = phases[i]
        if r > half:
            total += T / (T - phases[i + 1]) - T / (T - r)
        elif r < half:
            total -= T / phases[i - 1] - T / r
    return total


def total_force_absorbed(rel_phases: Sequence[float], T: float) -> float:
    """Total force with absorption of same-side neighbours.

    The nearest neighbour ahead (smallest offset) and the nearest behind
    (largest offset) push with full force. Every entry in between is
    absorbed by its neighbour on the node's side: an entry ahead of the
    node contributes ``f(prev) - f(own)`` against the next-smaller entry,
    one behind contributes ``f(next) - f(own)`` against the next-larger
    entry. Co-phased entries therefore cancel exactly, and an entry
    sitting at T/2 contributes nothing.
    """
    _check_period(T)
    phases = sorted(rel_phases)
    for r in phases:
        if not 0 < r < T:
            raise ValueError(f"relative phase {r!r} outside (0, {T})")
    return absorbed_force_sorted(phases, T)


def coupling_k(n: int, T: float) -> float:
    """Step size turning total force into a phase shift (ms)."""
    _check_period(T)
    if n < 1:
        raise ValueError(f"neighbourhood size must be >= 1, got {n!r}")
    return K_SCALE * n ** (-K_EXPONENT) * T / 1000.0


def update_phase(phi: float, F: float, K: float, T: float) -> float:
    """New phase after moving ``K * F`` ms around the circle, in [0, T)."""
    _check_period(T)
    if not (math.isfinite(phi) and math.isfinite(F) and math.isfinite(K)):
        raise ValueError("phase update inputs must be finite")
    new = math.fmod(phi + K * F, T)
    if new < 0:
        new += T
    # fmod of a value just below zero can round back up to T
    if new >= T:
        new = 0.0
    return new


def signed_shift(old: float, new: float, T: float) -> float:
    """Shortest signed move from ``old`` to ``new`` on the circle, in (-T/2, T/2]."""
    d = math.fmod(new - old, T)
    if d < 0:
        d += T
    if d >= T:
        d = 0.0
    return d if d <= T / 2 else d - T


def phase_mod(x: float, T: float) -> float:
    """``x mod T`` normalised into [0, T)."""
    r = math.fmod(x, T)
    if r < 0:
        r += T
    if r >= T:
        r = 0.0
    return r

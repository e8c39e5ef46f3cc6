"""Alternating up/down renewal links with capacity, delay and loss."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .engine import EventKind, SimulationError, millis, seconds


class Distribution(str, Enum):
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"


class Phase(str, Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class LinkAvailabilityParams:
    """Mean uptime ``psi`` and mean downtime ``gamma``, both in seconds."""

    psi: float
    gamma: float
    distribution: Distribution = Distribution.EXPONENTIAL

    def __post_init__(self):
        if not self.psi > 0:
            raise ValueError(f"psi must be > 0, got {self.psi}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    @property
    def never_fails(self) -> bool:
        return self.gamma == 0


def sample_phase(params: LinkAvailabilityParams, phase: Phase, rng: np.random.Generator) -> float:
    """Duration in seconds of the next up or down phase."""
    mean = params.psi if phase is Phase.UP else params.gamma
    if mean == 0:
        return 0.0
    if params.distribution is Distribution.DETERMINISTIC:
        return float(mean)
    return float(rng.exponential(mean))


class Outcome(str, Enum):
    DELIVERED = "delivered"
    LOST = "lost"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class TransmitResult:
    outcome: Outcome
    at: Optional[int] = None  # delivery time (us) when delivered, end of serialization when lost


@dataclass
class LinkState:
    """Mutable state of one link.  ``epoch`` counts down-transitions."""

    id: str
    capacity_mbps: float
    delay_ms: float
    loss: float = 0.0
    up: bool = True
    next_transition: Optional[int] = None
    busy_until: int = 0
    epoch: int = 0
    transitions: list = field(default_factory=list)

    def __post_init__(self):
        if not self.capacity_mbps > 0:
            raise ValueError(f"link {self.id}: capacity must be > 0")
        if not 0.0 <= self.loss <= 1.0:
            raise ValueError(f"link {self.id}: loss must be in [0, 1]")
        if self.delay_ms < 0:
            raise ValueError(f"link {self.id}: delay must be >= 0")
        self.delay_us = millis(self.delay_ms)

    @property
    def effective_capacity(self) -> float:
        return self.capacity_mbps if self.up else 0.0

    def serialization_us(self, nbytes: int) -> int:
        # Mbit/s == bit/us
        return int(round(nbytes * 8 / self.capacity_mbps))


def advance_link(link: LinkState, event: EventKind, params: LinkAvailabilityParams,
                 rng: np.random.Generator, now: int) -> LinkState:
    """Apply a scheduled link-up/link-down transition and draw the next one.

    ``link.next_transition`` is left as the absolute time of the following
    transition, or ``None`` when the link never fails again.
    """
    if event is EventKind.LINK_DOWN:
        if not link.up:
            raise SimulationError(f"link {link.id}: link-down while already down at t={now}us")
        link.up = False
        link.epoch += 1
        link.transitions.append((now, False))
        link.next_transition = now + seconds(sample_phase(params, Phase.DOWN, rng))
    elif event is EventKind.LINK_UP:
        if link.up:
            raise SimulationError(f"link {link.id}: link-up while already up at t={now}us")
        link.up = True
        link.transitions.append((now, True))
        link.next_transition = None if params.never_fails else now + seconds(sample_phase(params, Phase.UP, rng))
    else:
        raise SimulationError(f"link {link.id}: {event!r} is not a link transition")
    return link


def force_link(link: LinkState, up: bool, now: int) -> LinkState:
    """Scripted transition; suspends the renewal schedule (caller reschedules)."""
    if link.up == up:
        state = "up" if up else "down"
        raise SimulationError(f"link {link.id}: scripted transition to {state} but link is already {state}")
    link.up = up
    if not up:
        link.epoch += 1
    link.transitions.append((now, up))
    link.next_transition = None
    return link


def transmit(link: LinkState, nbytes: int, rng: Optional[np.random.Generator], now: int) -> TransmitResult:
    """Send ``nbytes`` over the link starting no earlier than ``now``.

    The link is a FIFO serializer: a packet starts when the previous one has
    finished, then propagates for ``delay_ms``.
    """
    if not link.up:
        return TransmitResult(Outcome.BLOCKED)
    start = max(now, link.busy_until)
    done = start + link.serialization_us(nbytes)
    link.busy_until = done
    if link.loss > 0.0 and (link.loss >= 1.0 or rng.random() < link.loss):
        return TransmitResult(Outcome.LOST, done)
    return TransmitResult(Outcome.DELIVERED, done + link.delay_us)


def uptime_fraction(link: LinkState, start: int, end: int, initially_up: bool = True) -> float:
    """Exact time-weighted fraction of ``[start, end]`` the link spent up."""
    if end <= start:
        raise ValueError("empty interval")
    up = initially_up
    last = start
    total = 0
    for t, state in link.transitions:
        if t > end:
            break
        if t > last:
            if up:
                total += t - last
            last = t
        up = state
    if up:
        total += end - last
    return total / (end - start)

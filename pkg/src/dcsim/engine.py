"""Deterministic discrete-event core.

Time is an integer number of microseconds.  Events with equal time run in
the order they were scheduled (a monotone sequence counter breaks ties), so
a run is fully determined by its configuration and master seed.
"""
from __future__ import annotations

import hashlib
import heapq
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional

import numpy as np

log = logging.getLogger(__name__)

US_PER_S = 1_000_000


def seconds(value: float) -> int:
    """Convert seconds to integer microseconds (round half to even)."""
    if value != value or value < 0:
        raise ValueError(f"simulation time must be a non-negative number, got {value!r}")
    return int(round(value * US_PER_S))


def millis(value: float) -> int:
    return seconds(value / 1000.0)


def to_seconds(us: int) -> float:
    return us / US_PER_S


class SimulationError(RuntimeError):
    """Raised when the engine detects a logic error or a handler fails.

    ``event`` is set once the error has been tagged with the event being processed.
    """

    def __init__(self, message: str, event: Optional["SimEvent"] = None):
        super().__init__(message)
        self.event = event


class EventKind(str, Enum):
    LINK_UP = "link-up"
    LINK_DOWN = "link-down"
    PACKET_ARRIVAL = "packet-arrival"
    PACKET_DELIVERY = "packet-delivery"
    SAMPLE_TICK = "sample-tick"
    SN_CHANGE = "sn-change"
    SCENARIO_END = "scenario-end"
    TIMER = "timer"


class SimEvent:
    """A scheduled state change.

    ``sequence`` is assigned by :meth:`Engine.schedule`; ``action`` is called
    with the event when it is dequeued.
    """

    __slots__ = ("time", "sequence", "kind", "action", "data", "cancelled")

    def __init__(self, time: int, kind: EventKind, action: Optional[Callable[["SimEvent"], Any]] = None,
                 data: Any = None):
        self.time = int(time)
        self.sequence = -1
        self.kind = kind
        self.action = action
        self.data = data
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True

    def __repr__(self) -> str:
        return f"SimEvent(t={self.time}us, seq={self.sequence}, kind={self.kind.value})"


class RngStreams:
    """Per-consumer random streams derived from one master seed.

    Each stream is keyed by a stable text label, so adding a consumer never
    shifts the draws seen by another one.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
        self._streams: dict[str, np.random.Generator] = {}

    def stream(self, label: str) -> np.random.Generator:
        gen = self._streams.get(label)
        if gen is None:
            digest = hashlib.sha256(label.encode("utf-8")).digest()
            key = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
            gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))
            self._streams[label] = gen
        return gen


@dataclass
class SimulationReport:
    end: int
    events_processed: int
    counters: dict[str, int] = field(default_factory=dict)

    @property
    def end_s(self) -> float:
        return to_seconds(self.end)


class Engine:
    """Virtual clock plus priority event queue."""

    def __init__(self, seed: int = 0):
        self.now = 0
        self.rng = RngStreams(seed)
        self.events_processed = 0
        self.counters: dict[str, int] = {}
        self._queue: list[tuple[int, int, SimEvent]] = []
        self._seq = itertools.count()

    def schedule(self, event: SimEvent) -> SimEvent:
        if event.time < self.now:
            raise SimulationError(
                f"cannot schedule {event.kind.value} at t={event.time}us before clock t={self.now}us")
        event.sequence = next(self._seq)
        heapq.heappush(self._queue, (event.time, event.sequence, event))
        return event

    def at(self, time: int, kind: EventKind, action=None, data=None) -> SimEvent:
        return self.schedule(SimEvent(time, kind, action, data))

    def after(self, delay: int, kind: EventKind, action=None, data=None) -> SimEvent:
        return self.schedule(SimEvent(self.now + delay, kind, action, data))

    def count(self, name: str, n: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + n

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._queue if not ev.cancelled)

    def peek_time(self) -> Optional[int]:
        while self._queue and self._queue[0][2].cancelled:
            heapq.heappop(self._queue)
        return self._queue[0][0] if self._queue else None

    def run_until(self, end: int) -> SimulationReport:
        """Process every event with ``time <= end`` and leave the clock at ``end``."""
        if end < self.now:
            raise SimulationError(f"run_until({end}us) is before the clock ({self.now}us)")
        queue = self._queue
        pop = heapq.heappop
        while queue and queue[0][0] <= end:
            time, _, event = pop(queue)
            if event.cancelled:
                continue
            self.now = time
            self.events_processed += 1
            if event.action is None:
                continue
            try:
                event.action(event)
            except Exception as exc:
                if isinstance(exc, SimulationError) and exc.event is not None:
                    raise
                raise SimulationError(
                    f"handler for {event.kind.value} event at t={time / US_PER_S:.6f}s "
                    f"(seq {event.sequence}) failed: {exc}", event) from exc
        self.now = end
        return SimulationReport(end=end, events_processed=self.events_processed, counters=dict(self.counters))

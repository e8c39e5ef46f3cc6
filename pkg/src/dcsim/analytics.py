"""Closed-form path availability, empirical estimators and the throughput sampler."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .engine import to_seconds


class Source(str, Enum):
    ANALYTIC = "Analytic"
    EMPIRICAL = "Empirical"


def path_availability(psi: float, gamma: float) -> float:
    """Long-run fraction of time a path with mean uptime ``psi`` and mean downtime ``gamma`` is up."""
    if not psi > 0:
        raise ValueError(f"mean uptime must be > 0, got {psi}")
    if not gamma >= 0:
        raise ValueError(f"mean downtime must be >= 0, got {gamma}")
    return psi / (psi + gamma)


def _check_unit(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return float(value)


def dc_availability(theta_mn: float, theta_sn: float) -> float:
    """Availability of two paths carrying the same traffic: it fails only if both fail."""
    return multi_path_availability([_check_unit("theta_mn", theta_mn), _check_unit("theta_sn", theta_sn)])


def multi_path_availability(thetas: Sequence[float]) -> float:
    """1 - prod(1 - theta_i).

    Dead paths are skipped and the result is floored at the best single path,
    so rounding can never make a redundant path look worse than one alone.
    """
    thetas = [_check_unit(f"thetas[{i}]", t) for i, t in enumerate(thetas)]
    if not thetas:
        raise ValueError("need at least one path")
    live = [t for t in thetas if t > 0.0]
    if len(live) <= 1:
        return live[0] if live else 0.0
    down = 1.0
    for t in live:
        down *= 1.0 - t
    return max(1.0 - down, max(live))


@dataclass(frozen=True)
class AvailabilityReport:
    per_path: Mapping[str, float]
    theta_dc: float
    source: Source

    @property
    def theta_mn(self) -> float:
        return list(self.per_path.values())[0]

    @property
    def theta_sn(self) -> Optional[float]:
        values = list(self.per_path.values())
        return values[1] if len(values) > 1 else None

    def to_dict(self) -> dict:
        return {"per_path": dict(self.per_path), "theta_dc": self.theta_dc, "source": self.source.value}


def analytic_report(params: Mapping[str, tuple]) -> AvailabilityReport:
    """``params`` maps path id to (psi, gamma)."""
    per_path = {pid: path_availability(psi, gamma) for pid, (psi, gamma) in params.items()}
    return AvailabilityReport(per_path, multi_path_availability(list(per_path.values())), Source.ANALYTIC)


@dataclass
class PathSample:
    up: bool
    throughput_mbps: float
    active: bool
    redundant_mbps: float = 0.0
    useful_bytes: int = 0
    redundant_bytes: int = 0


@dataclass
class TraceSample:
    t: int  # microseconds, end of the sampled interval
    paths: dict = field(default_factory=dict)  # path id -> PathSample

    @property
    def t_s(self) -> float:
        return to_seconds(self.t)

    @property
    def aggregate_mbps(self) -> float:
        return sum(p.throughput_mbps for p in self.paths.values())

    @property
    def active_subflows(self) -> list:
        return [pid for pid, p in self.paths.items() if p.active]

    def throughput(self, path_id: str) -> float:
        return self.paths[path_id].throughput_mbps


def sample_throughput(t: int, interval_s: float, useful: Mapping[str, int], redundant: Mapping[str, int],
                      up: Mapping[str, bool], active: Mapping[str, bool]) -> TraceSample:
    """Turn per-path byte counts for the last interval into a sample (Mbit/s)."""
    paths = {}
    for pid in useful:
        ub, rb = useful[pid], redundant.get(pid, 0)
        paths[pid] = PathSample(up=bool(up[pid]), throughput_mbps=ub * 8 / interval_s / 1e6,
                                active=bool(active[pid]), redundant_mbps=rb * 8 / interval_s / 1e6,
                                useful_bytes=ub, redundant_bytes=rb)
    return TraceSample(t, paths)


def empirical_availability(trace: Sequence[TraceSample], mode: str = "Duplicate") -> AvailabilityReport:
    """Fraction of samples each path was up, and fraction with at least one path up."""
    if str(getattr(mode, "value", mode)) != "Duplicate":
        raise ValueError("empirical availability is defined for Duplicate-mode traces")
    if not trace:
        raise ValueError("empty trace")
    ids = list(trace[0].paths)
    counts = dict.fromkeys(ids, 0)
    any_up = 0
    for s in trace:
        hit = False
        for pid in ids:
            if s.paths[pid].up:
                counts[pid] += 1
                hit = True
        any_up += hit
    n = len(trace)
    return AvailabilityReport({pid: c / n for pid, c in counts.items()}, any_up / n, Source.EMPIRICAL)


def time_weighted_availability(transitions: Mapping[str, Iterable[tuple]], start: int, end: int,
                               initially_up: Optional[Mapping[str, bool]] = None) -> AvailabilityReport:
    """Exact availability from per-path (time, up) transition logs over ``[start, end]``."""
    if end <= start:
        raise ValueError("empty interval")
    initially_up = initially_up or {}
    ids = list(transitions)
    # sweep all transitions in time order, tracking how many paths are up
    state = {pid: bool(initially_up.get(pid, True)) for pid in ids}
    events = sorted((t, i, pid, up) for i, pid in enumerate(ids) for t, up in transitions[pid])
    uptime = dict.fromkeys(ids, 0)
    any_time = 0
    last = start
    for t, _, pid, up in events + [(end, len(ids), None, None)]:
        t = min(max(t, start), end)
        span = t - last
        if span > 0:
            for p in ids:
                if state[p]:
                    uptime[p] += span
            if any(state.values()):
                any_time += span
            last = t
        if pid is not None:
            state[pid] = up
    total = end - start
    return AvailabilityReport({p: u / total for p, u in uptime.items()}, any_time / total, Source.EMPIRICAL)


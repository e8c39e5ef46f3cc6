"""Scenario runs, availability sweeps, trace/report files and the canned catalog."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .analytics import (AvailabilityReport, Source, TraceSample, dc_availability, empirical_availability,
                        multi_path_availability, path_availability, time_weighted_availability)
from .config import ScenarioConfig, config_to_dict
from .engine import to_seconds
from .scenarios import CATALOG, canned, duplicate_reliability
from .simulation import Simulation

TRACE_HEADER = ("t_s", "path_id", "up", "throughput_mbps", "active", "redundant_mbps")
SWEEP_HEADER = ("psi_s", "gamma_s", "theta_single", "theta_dc_analytic", "theta_dc_empirical")


@dataclass
class RunReport:
    config: dict
    totals: dict
    availability: dict
    trace_path: Optional[str] = None
    report_path: Optional[str] = None
    trace: list = field(default_factory=list, repr=False)
    simulation: Optional[Simulation] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"config": self.config, "totals": self.totals, "availability": self.availability,
                "trace_path": self.trace_path}


def trace_rows(trace: Iterable[TraceSample]) -> list:
    rows = []
    for s in trace:
        t = f"{s.t_s:.6f}"
        for pid, p in s.paths.items():
            rows.append((t, pid, int(p.up), f"{p.throughput_mbps:.6f}", int(p.active), f"{p.redundant_mbps:.6f}"))
    return rows


def trace_csv(trace: Iterable[TraceSample]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    writer.writerows(trace_rows(trace))
    return buf.getvalue()


def trace_json(trace: Iterable[TraceSample]) -> str:
    rows = [dict(zip(TRACE_HEADER, r)) for r in trace_rows(trace)]
    return json.dumps(rows, indent=1) + "\n"


def _analytic(sim: Simulation) -> AvailabilityReport:
    per_path = {}
    for sf in sim.conn.subflows:
        theta = 1.0
        for lid in sf.path.link_ids:
            p = sim.params[lid]
            theta *= path_availability(p.psi, p.gamma)
        per_path[sf.id] = theta
    return AvailabilityReport(per_path, multi_path_availability(list(per_path.values())), Source.ANALYTIC)


def summarize(sim: Simulation) -> tuple:
    conn = sim.conn
    trace = sim.trace
    useful = sum(p.useful_bytes for s in trace for p in s.paths.values())
    redundant = sum(p.redundant_bytes for s in trace for p in s.paths.values())
    totals = {
        "bytes_delivered": useful,
        "redundant_bytes": redundant,
        "app_bytes_in_order": conn.app_bytes,
        "segments_lost": conn.segments_lost,
        "reorder_overflow_drops": len(conn.reorder.skipped),
        "stall_time_s": to_seconds(conn.stall_us),
        "events_processed": sim.report.events_processed if sim.report else 0,
        "samples": len(trace),
        "sn_interruptions_ms": [to_seconds(us) * 1000.0 for _, us in sim.interruptions],
        "cost_by_path": {sf.id: sf.bytes_sent * sum(sim.config.link(l).cost_per_byte for l in sf.path.link_ids)
                         for sf in conn.subflows},
    }
    exact = time_weighted_availability(sim.path_transitions, 0, sim.end_us, sim.path_initially_up)
    availability = {"analytic": _analytic(sim).to_dict(), "time_weighted": exact.to_dict()}
    if conn.mode.value == "Duplicate" and trace:
        availability["sampled"] = empirical_availability(trace).to_dict()
    return totals, availability


def _write(report: RunReport, sim: Simulation, out_dir: Union[str, Path], fmt: str, stem: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        trace_path = out / f"{stem}.csv"
        trace_path.write_text(trace_csv(sim.trace))
    elif fmt == "json":
        trace_path = out / f"{stem}.trace.json"
        trace_path.write_text(trace_json(sim.trace))
    else:
        raise ValueError(f"unknown trace format {fmt!r}")
    report.trace_path = str(trace_path)
    report_path = out / f"{stem}.report.json"
    report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    report.report_path = str(report_path)


def run_scenario(config: ScenarioConfig, out_dir: Union[str, Path, None] = None, *, seed: Optional[int] = None,
                 fmt: str = "csv", stem: Optional[str] = None) -> RunReport:
    """Run one scenario; when ``out_dir`` is given, write the trace and a JSON report next to it."""
    sim = Simulation(config, seed=seed).run()
    totals, availability = summarize(sim)
    echo = config_to_dict(config)
    echo["seed"] = sim.seed
    report = RunReport(echo, totals, availability, trace=sim.trace, simulation=sim)
    if out_dir is not None:
        _write(report, sim, out_dir, fmt, stem or config.name)
    return report


@dataclass(frozen=True)
class SweepRow:
    psi_s: float
    gamma_s: float
    theta_single: float
    theta_dc_analytic: float
    theta_dc_empirical: float


def _sweep_point(args) -> SweepRow:
    base, psi, gamma, seed = args
    links = [l.__class__(**{**l.__dict__, "psi_s": float(psi), "gamma_s": float(gamma)}) for l in base.links]
    cfg = base.replace(links=links, sweep=None, seed=seed)
    sim = Simulation(cfg).run()
    theta = path_availability(psi, gamma)
    return SweepRow(float(psi), float(gamma), theta, dc_availability(theta, theta),
                    empirical_availability(sim.trace).theta_dc)


def run_availability_sweep(grid: Sequence[Sequence[float]], base: Optional[ScenarioConfig] = None, *,
                           duration_s: Optional[float] = None, seed: Optional[int] = None,
                           jobs: int = 1) -> list:
    """One row per (psi, gamma): single-path and dual-path availability, analytic and Monte-Carlo.

    The Monte-Carlo column comes from a Duplicate-mode run in which every link
    of ``base`` gets the grid point's mean uptime and downtime.
    """
    base = base or duplicate_reliability(duration_s=1.0e5)
    if duration_s is not None:
        base = base.replace(duration_s=float(duration_s))
    if base.mptcp.mode != "Duplicate":
        raise ValueError("availability sweeps need a Duplicate-mode base scenario")
    seed = base.seed if seed is None else seed
    work = [(base, psi, gamma, seed + i) for i, (psi, gamma) in enumerate(grid)]
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, work))
    return [_sweep_point(w) for w in work]


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([f"{r.psi_s:.6f}", f"{r.gamma_s:.6f}", f"{r.theta_single:.6f}",
                         f"{r.theta_dc_analytic:.6f}", f"{r.theta_dc_empirical:.6f}"])
    return buf.getvalue()


def run_sweep_config(config: ScenarioConfig, out_dir: Union[str, Path, None] = None, *,
                     seed: Optional[int] = None, jobs: int = 1, fmt: str = "csv") -> list:
    if config.sweep is None or not config.sweep.points:
        raise ValueError(f"scenario {config.name!r} has no sweep points")
    rows = run_availability_sweep(config.sweep.points, config, seed=seed, jobs=jobs)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            (out / f"{config.name}.json").write_text(json.dumps([r.__dict__ for r in rows], indent=2) + "\n")
        else:
            (out / f"{config.name}.csv").write_text(sweep_csv(rows))
    return rows


@dataclass(frozen=True)
class ScenarioInfo:
    name: str
    description: str
    anchor: str
    kind: str


def list_scenarios() -> list:
    return [ScenarioInfo(c.name, c.description, c.anchor, c.kind) for c in CATALOG]


PAIR_TERMINATIONS = ("AtSGW", "AtMN")


def run_canned(name: str, out_dir: Union[str, Path, None] = None, *, seed: Optional[int] = None,
               fmt: str = "csv", jobs: int = 1) -> dict:
    """Run a catalog entry; returns output stem -> RunReport (or sweep rows)."""
    entry = canned(name)
    cfg = entry.factory()
    if entry.kind == "sweep":
        return {name: run_sweep_config(cfg, out_dir, seed=seed, jobs=jobs, fmt=fmt)}
    if entry.kind == "pair":
        out = {}
        for term in PAIR_TERMINATIONS:
            variant = cfg.replace(mptcp=cfg.mptcp.__class__(**{**cfg.mptcp.__dict__, "termination": term}))
            stem = f"{name}-{term}"
            out[stem] = run_scenario(variant, out_dir, seed=seed, fmt=fmt, stem=stem)
        return out
    return {name: run_scenario(cfg, out_dir, seed=seed, fmt=fmt)}


def throughput_series(trace: Sequence[TraceSample], path_id: str) -> list:
    return [(s.t_s, s.paths[path_id].throughput_mbps) for s in trace]


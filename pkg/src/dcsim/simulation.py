"""One scenario run: builds links, topology and the MPTCP connection, then drives the engine."""
from __future__ import annotations

import logging
from typing import Optional

from .analytics import TraceSample, sample_throughput
from .config import ConfigError, ScenarioConfig
from .engine import Engine, EventKind, SimulationReport, seconds
from .links import Distribution, LinkAvailabilityParams, LinkState, Phase, advance_link, force_link, sample_phase
from .mptcp import ConnectionParams, MptcpConnection, SchedulerMode, TerminationPoint, open_connection
from .topology import Role, Topology, build_topology, path_up

log = logging.getLogger(__name__)

ACTIONS = ("link_down", "link_up", "sn_change")


def validate_scalars(cfg: ScenarioConfig) -> None:
    """Checks that do not need the topology."""
    if not cfg.duration_s > 0:
        raise ConfigError("duration_s", "must be > 0")
    if not cfg.sample_interval_s > 0:
        raise ConfigError("sample_interval_s", "must be > 0")
    if cfg.backhaul_delay_ms < 0:
        raise ConfigError("backhaul_delay_ms", "must be >= 0")
    if cfg.core_delay_ms < 0:
        raise ConfigError("core_delay_ms", "must be >= 0")
    m = cfg.mptcp
    for name, enum in (("mode", SchedulerMode), ("termination", TerminationPoint)):
        try:
            enum(getattr(m, name))
        except ValueError:
            allowed = ", ".join(e.value for e in enum)
            raise ConfigError(f"mptcp.{name}", f"{getattr(m, name)!r} is not one of: {allowed}") from None
    if m.detection_latency_ms < 0:
        raise ConfigError("mptcp.detection_latency_ms", "must be >= 0")
    if m.t_interrupt_ms < 0:
        raise ConfigError("mptcp.t_interrupt_ms", "must be >= 0")
    if m.segment_bytes <= 0:
        raise ConfigError("mptcp.segment_bytes", "must be > 0")
    if m.buffer_segments <= 0:
        raise ConfigError("mptcp.buffer_segments", "must be > 0")
    if not m.queue_limit_ms > 0:
        raise ConfigError("mptcp.queue_limit_ms", "must be > 0")
    if m.demand_mbps is not None and not m.demand_mbps > 0:
        raise ConfigError("mptcp.demand_mbps", "must be > 0 (omit for a saturated sender)")
    link_ids = {ln.id for ln in cfg.links}
    for i, ev in enumerate(cfg.events):
        where = f"events[{i}]"
        if not 0 <= ev.t_s <= cfg.duration_s:
            raise ConfigError(f"{where}.t_s", f"must lie within [0, {cfg.duration_s}]")
        if ev.action not in ACTIONS:
            raise ConfigError(f"{where}.action", f"must be one of {', '.join(ACTIONS)}")
        if ev.action in ("link_down", "link_up") and ev.link not in link_ids:
            raise ConfigError(f"{where}.link", f"unknown link {ev.link!r}")
        if ev.action == "sn_change" and ev.target_link not in link_ids:
            raise ConfigError(f"{where}.target_link", f"unknown link {ev.target_link!r}")
    if cfg.sweep is not None:
        for i, point in enumerate(cfg.sweep.points):
            if not (isinstance(point, (list, tuple)) and len(point) == 2):
                raise ConfigError(f"sweep.points[{i}]", "expected [psi_s, gamma_s]")
            if not point[0] > 0 or not point[1] >= 0:
                raise ConfigError(f"sweep.points[{i}]", "need psi_s > 0 and gamma_s >= 0")


class Simulation:
    def __init__(self, config: ScenarioConfig, seed: Optional[int] = None):
        validate_scalars(config)
        self.config = config
        self.seed = config.seed if seed is None else int(seed)
        self.topo: Topology = build_topology(config)
        self.engine = Engine(self.seed)
        self.links: dict[str, LinkState] = {}
        self.params: dict[str, LinkAvailabilityParams] = {}
        self._generation: dict[str, int] = {}
        for lc in config.links:
            self.links[lc.id] = LinkState(lc.id, lc.capacity_mbps, lc.delay_ms, lc.loss, up=lc.initially_up)
            self.params[lc.id] = LinkAvailabilityParams(lc.psi_s, lc.gamma_s, Distribution(lc.distribution))
            self._generation[lc.id] = 0

        m = config.mptcp
        if m.bearer not in self.topo.bearers:
            raise ConfigError("mptcp.bearer", f"unknown bearer {m.bearer!r}")
        params = ConnectionParams(m.detection_latency_ms, m.t_interrupt_ms, m.segment_bytes, m.buffer_segments,
                                  m.queue_limit_ms, m.demand_mbps)
        self.conn: MptcpConnection = open_connection(
            TerminationPoint(m.termination), SchedulerMode(m.mode), self.topo.bearers[m.bearer], self.topo,
            engine=self.engine, links=self.links, params=params, paths=m.subflows, backup=m.backup)
        for i, ev in enumerate(config.events):
            if ev.action == "sn_change":
                self._target_sn(ev.target_link, f"events[{i}].target_link")

        self.interval_us = seconds(config.sample_interval_s)
        self.end_us = seconds(config.duration_s)
        self.trace: list[TraceSample] = []
        self.interruptions: list = []
        self.path_transitions: dict[str, list] = {sf.id: [] for sf in self.conn.subflows}
        self.path_initially_up = {sf.id: self.conn.path_up(sf) for sf in self.conn.subflows}
        self._path_state = dict(self.path_initially_up)
        self.report: Optional[SimulationReport] = None

    # -- setup --------------------------------------------------------------

    def _target_sn(self, link_id: str, where: str) -> str:
        ln = self.config.link(link_id)
        ends = {ln.a, ln.b}
        if self.topo.ue not in ends:
            raise ConfigError(where, f"SN change target {link_id} must be a radio link to the UE")
        (other,) = ends - {self.topo.ue}
        if self.topo.nodes[other].role is not Role.SN:
            raise ConfigError(where, f"SN change target {link_id} does not end at an SN")
        return other

    def _rng(self, link_id: str):
        return self.engine.rng.stream(f"link:{link_id}:phase")

    def _schedule_next(self, link_id: str) -> None:
        link = self.links[link_id]
        if link.next_transition is None:
            return
        kind = EventKind.LINK_UP if not link.up else EventKind.LINK_DOWN
        self.engine.at(link.next_transition, kind, self._on_renewal, (link_id, self._generation[link_id]))

    def _start_renewal(self, link_id: str) -> None:
        """Begin an up phase at the current time (renewal is suspended while a link sits scripted-down)."""
        link, params = self.links[link_id], self.params[link_id]
        if params.never_fails:
            link.next_transition = None
            return
        link.next_transition = self.engine.now + seconds(sample_phase(params, Phase.UP, self._rng(link_id)))
        self._schedule_next(link_id)

    def start(self) -> None:
        for link_id, link in self.links.items():
            if link.up:
                self._start_renewal(link_id)
        for ev in self.config.events:
            self.engine.at(seconds(ev.t_s), EventKind.TIMER, self._on_scripted, ev)
        self.conn.start()
        self.engine.at(self.interval_us, EventKind.SAMPLE_TICK, self._on_tick)
        self.engine.at(self.end_us, EventKind.SCENARIO_END, lambda ev: self.conn.finish())

    # -- handlers -----------------------------------------------------------

    def _notify(self, link_id: str) -> None:
        now = self.engine.now
        if self.links[link_id].up:
            self.conn.on_link_up(link_id)
        else:
            self.conn.on_link_down(link_id)
        for sf in self.conn.subflows:
            up = self.conn.path_up(sf)
            if up != self._path_state[sf.id]:
                self._path_state[sf.id] = up
                self.path_transitions[sf.id].append((now, up))

    def _on_renewal(self, event) -> None:
        link_id, generation = event.data
        if generation != self._generation[link_id]:
            return
        advance_link(self.links[link_id], event.kind, self.params[link_id], self._rng(link_id), self.engine.now)
        self._schedule_next(link_id)
        self._notify(link_id)

    def _on_scripted(self, event) -> None:
        ev = event.data
        if ev.action == "sn_change":
            self._sn_change(ev.target_link)
            return
        up = ev.action == "link_up"
        self._generation[ev.link] += 1
        force_link(self.links[ev.link], up, self.engine.now)
        if up:
            self._start_renewal(ev.link)
        self._notify(ev.link)

    def _sn_change(self, target_link: str) -> None:
        sf = self.conn.sn_subflow()
        new_sn = self._target_sn(target_link, "events")
        if sf is None:
            self.interruptions.append((self.engine.now, 0))
            return
        old = self.conn.serving_sn
        nodes = [new_sn if n == old else n for n in sf.path.nodes]
        new_path = self.topo.route(sf.id, sf.path.variant, nodes, sf.path.overhead_bytes)
        applied = self.conn.sn_change(new_path)
        self.interruptions.append((self.engine.now, applied))
        # the path now runs over a different radio link; resync the path-state log
        up = self.conn.path_up(sf)
        if up != self._path_state[sf.id]:
            self._path_state[sf.id] = up
            self.path_transitions[sf.id].append((self.engine.now, up))

    def _on_tick(self, event) -> None:
        conn = self.conn
        up = {sf.id: path_up(sf.path, self.links) for sf in conn.subflows}
        active = {sf.id: sf.state.value == "Active" for sf in conn.subflows}
        self.trace.append(sample_throughput(self.engine.now, self.config.sample_interval_s,
                                            conn.interval_useful, conn.interval_redundant, up, active))
        for sid in conn.interval_useful:
            conn.interval_useful[sid] = 0
            conn.interval_redundant[sid] = 0
        nxt = self.engine.now + self.interval_us
        if nxt <= self.end_us:
            self.engine.at(nxt, EventKind.SAMPLE_TICK, self._on_tick)

    # -- run ----------------------------------------------------------------

    def run(self) -> "Simulation":
        self.start()
        self.report = self.engine.run_until(self.end_us)
        return self

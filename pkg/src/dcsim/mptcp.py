"""MPTCP connection model: sub-flows, scheduling modes, failure handling, reordering.

The sender is rate based.  Each sub-flow paces segments at its path's
bottleneck rate and keeps at most ``queue_limit`` worth of segments queued
locally; there is no congestion window.  Acknowledgements travel back over an
ideal reverse channel and only feed the RTT estimate and the unacked set.
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .config import ConfigError
from .engine import Engine, EventKind, millis
from .links import LinkState, Outcome, transmit
from .topology import (Bearer, BearerKind, Core, PathDescriptor, PathStatus, RoutingContext, Topology,
                       backhaul_delay, path_up)

log = logging.getLogger(__name__)

MIN_RTO_MS = 200.0


class TerminationPoint(str, Enum):
    AT_SGW = "AtSGW"
    AT_MN = "AtMN"
    END_TO_END = "EndToEnd_IPv6MultiHoming"


class SchedulerMode(str, Enum):
    AGGREGATE = "Aggregate"
    BACKUP = "Backup"
    DUPLICATE = "Duplicate"


class SubflowState(str, Enum):
    ESTABLISHING = "Establishing"
    ACTIVE = "Active"
    DEGRADED = "Degraded"
    CLOSED = "Closed"


class Priority(str, Enum):
    REGULAR = "Regular"
    BACKUP = "Backup"


@dataclass
class ConnectionParams:
    detection_latency_ms: float = 200.0
    t_interrupt_ms: float = 50.0
    segment_bytes: int = 1500
    buffer_segments: int = 1024
    queue_limit_ms: float = 50.0
    demand_mbps: Optional[float] = None  # None: saturated sender


@dataclass(eq=False)
class Transmission:
    seq: int
    subflow: "Subflow"
    depart: int
    lost: bool = False
    arrived: bool = False


@dataclass(eq=False)
class Subflow:
    id: str
    path: PathDescriptor
    priority: Priority = Priority.REGULAR
    state: SubflowState = SubflowState.ESTABLISHING
    bytes_sent: int = 0
    bytes_acked: int = 0
    srtt: float = 0.0  # ms
    rttvar: float = 0.0
    pace_until: int = 0
    token: int = 0
    unacked: dict = field(default_factory=dict)
    backhaul_ms: float = 0.0

    @property
    def base_rtt_ms(self) -> float:
        return 2.0 * self.path.delay_ms

    def reset_rtt(self) -> None:
        self.srtt = self.base_rtt_ms
        self.rttvar = self.srtt / 2.0

    def rtt_sample(self, sample_ms: float) -> None:
        self.rttvar = 0.75 * self.rttvar + 0.25 * abs(self.srtt - sample_ms)
        self.srtt = 0.875 * self.srtt + 0.125 * sample_ms

    @property
    def rto_ms(self) -> float:
        return max(MIN_RTO_MS, self.srtt + 4.0 * self.rttvar)


class ReorderBuffer:
    """Receive-side resequencing keyed by data sequence number."""

    def __init__(self, capacity: int = 1024):
        if capacity < 1:
            raise ValueError("reorder buffer capacity must be >= 1")
        self.capacity = capacity
        self.expected = 0
        self.held: set[int] = set()
        self.skipped: list[int] = []
        self.released = 0

    def has(self, seq: int) -> bool:
        return seq < self.expected or seq in self.held

    def _drain(self) -> list:
        out = []
        while self.expected in self.held:
            self.held.discard(self.expected)
            out.append(self.expected)
            self.expected += 1
        return out

    def insert(self, seq: int) -> list:
        """Accept one segment; return the sequence numbers released in order.

        When the buffer is full and a gap blocks the head of line, the missing
        segment is given up on (recorded in ``skipped``) so delivery can resume.
        """
        if self.has(seq):
            return []
        out: list[int] = []
        while seq > self.expected and len(self.held) >= self.capacity:
            log.warning("reorder buffer full: giving up on segment %d", self.expected)
            self.skipped.append(self.expected)
            self.expected += 1
            out.extend(self._drain())
        if seq == self.expected:
            self.expected += 1
            out.append(seq)
            out.extend(self._drain())
        elif seq > self.expected:
            self.held.add(seq)
        self.released += len(out)
        return out


def _rank(sf: Subflow, ctx: RoutingContext, index: int):
    st = ctx[sf.id]
    return (sf.srtt / 1000.0 + st.queue_s, -st.capacity_mbps, index)


def scheduling_pool(conn: "MptcpConnection") -> list:
    """(index, sub-flow) pairs the current mode may draw from."""
    active = [(i, sf) for i, sf in enumerate(conn.subflows) if sf.state is SubflowState.ACTIVE]
    if conn.mode is SchedulerMode.BACKUP:
        regular = [(i, sf) for i, sf in active if sf.priority is Priority.REGULAR]
        return regular or active
    return active


def select_subflow(conn: "MptcpConnection", segment_bytes: int, ctx: RoutingContext) -> list:
    """Sub-flows that should carry the next segment; empty means wait.

    A sub-flow only takes data while its local queue is below the
    connection's queue limit, which plays the role of send-window space.
    """
    limit = conn.queue_limit_s
    pool = scheduling_pool(conn)
    if not pool:
        return []
    if conn.mode is SchedulerMode.DUPLICATE:
        if all(ctx[sf.id].queue_s < limit for _, sf in pool):
            return [sf for _, sf in pool]
        return []
    room = [(i, sf) for i, sf in pool if ctx[sf.id].queue_s < limit]
    if not room:
        return []
    return [min(room, key=lambda item: _rank(item[1], ctx, item[0]))[1]]


def connection_paths(term: TerminationPoint, bearer: Bearer, topo: Topology) -> list:
    """Paths the terminating endpoint opens sub-flows on."""
    bearer_paths = list(topo.bearer_paths[bearer.id])
    if term is TerminationPoint.END_TO_END:
        seen = {p.id for p in bearer_paths}
        return bearer_paths + [p for p in topo.access_paths if p.id not in seen]
    if term is TerminationPoint.AT_MN:
        if bearer.kind not in (BearerKind.MCG, BearerKind.MCG_SPLIT):
            raise ConfigError("mptcp.termination", f"the MN does not carry {bearer.kind.value} bearer traffic")
        if not topo.dual_connectivity:
            return [topo.mn_path()]
        return [topo.mn_path(), topo.mn_to_sn_path()]
    if not topo.dual_connectivity:
        return bearer_paths
    return [topo.mn_path(), topo.sn_path()]


class MptcpConnection:
    def __init__(self, engine: Engine, topo: Topology, links: Mapping[str, LinkState],
                 termination: TerminationPoint, mode: SchedulerMode, bearer: Bearer,
                 subflows: Sequence[Subflow], params: ConnectionParams):
        self.engine = engine
        self.topo = topo
        self.links = links
        self.termination = termination
        self.mode = mode
        self.bearer = bearer
        self.subflows = list(subflows)
        self.params = params
        self.segment_bytes = params.segment_bytes
        self.queue_limit_s = params.queue_limit_ms / 1000.0
        self.queue_limit_us = millis(params.queue_limit_ms)
        self.detection_us = millis(params.detection_latency_ms)
        self.interrupt_us = millis(params.t_interrupt_ms)
        self.reorder = ReorderBuffer(params.buffer_segments)
        self.serving_sn = topo.sn

        self.next_seq = 0
        self.new_available: Optional[int] = None if params.demand_mbps is None else 0
        self._retx: list[int] = []
        self._retx_set: set[int] = set()
        self._wake = None
        self._pumping = False

        self.app_bytes = 0
        self.useful_bytes = 0
        self.redundant_bytes = 0
        self.segments_lost = 0
        self.interval_useful: dict[str, int] = {sf.id: 0 for sf in self.subflows}
        self.interval_redundant: dict[str, int] = {sf.id: 0 for sf in self.subflows}
        self.record_assignments = False
        self.assignments: list = []
        self.stall_us = 0
        self._stall_since: Optional[int] = 0
        self._loss_rng = {lid: engine.rng.stream(f"link:{lid}:loss") for lid in links}
        for sf in self.subflows:
            sf.backhaul_ms = backhaul_delay(sf.path, topo)
            sf.reset_rtt()

    # -- lookup helpers -----------------------------------------------------

    def subflow(self, sid: str) -> Subflow:
        for sf in self.subflows:
            if sf.id == sid:
                return sf
        raise KeyError(sid)

    def subflows_on_link(self, link_id: str) -> list:
        return [sf for sf in self.subflows if link_id in sf.path.link_ids]

    def path_up(self, sf: Subflow) -> bool:
        return path_up(sf.path, self.links)

    def active(self) -> list:
        return [sf for sf in self.subflows if sf.state is SubflowState.ACTIVE]

    def sn_subflow(self) -> Optional[Subflow]:
        if self.serving_sn is None:
            return None
        for sf in self.subflows:
            if sf.path.radio_node == self.serving_sn:
                return sf
        return None

    def routing_context(self) -> RoutingContext:
        now = self.engine.now
        status = {}
        for sf in self.subflows:
            up = path_up(sf.path, self.links)
            cap = self._nominal_capacity(sf) if up else 0.0
            status[sf.id] = PathStatus(sf.id, up, cap, max(0, sf.pace_until - now) / 1e6,
                                       sf.path.delay_ms, sf.backhaul_ms)
        return RoutingContext(now, status)

    def _nominal_capacity(self, sf: Subflow) -> float:
        caps = [self.links[l].capacity_mbps for l in sf.path.link_ids]
        return min(caps) if caps else math.inf

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        for sf in self.subflows:
            if self.path_up(sf):
                self._handshake(sf)
        if self.params.demand_mbps:
            interval = max(1, int(round(self.segment_bytes * 8 / self.params.demand_mbps)))
            self.engine.after(0, EventKind.TIMER, self._source, interval)

    def _source(self, event) -> None:
        self.new_available += 1
        self.engine.after(event.data, EventKind.TIMER, self._source, event.data)
        self.pump()

    def _handshake(self, sf: Subflow) -> None:
        sf.state = SubflowState.ESTABLISHING
        sf.token += 1
        token = sf.token
        self.engine.after(millis(sf.base_rtt_ms), EventKind.TIMER,
                          lambda ev: self._established(sf, token))
        self._update_stall()

    def _established(self, sf: Subflow, token: int) -> None:
        if sf.token != token:
            return
        if not self.path_up(sf):
            sf.state = SubflowState.DEGRADED
            self._update_stall()
            return
        sf.state = SubflowState.ACTIVE
        sf.reset_rtt()
        sf.pace_until = max(sf.pace_until, self.engine.now)
        self._update_stall()
        self.pump()

    def _update_stall(self) -> None:
        now = self.engine.now
        stalled = not any(sf.state is SubflowState.ACTIVE for sf in self.subflows)
        if stalled and self._stall_since is None:
            self._stall_since = now
        elif not stalled and self._stall_since is not None:
            self.stall_us += now - self._stall_since
            self._stall_since = None

    def finish(self) -> None:
        if self._stall_since is not None:
            self.stall_us += self.engine.now - self._stall_since
            self._stall_since = self.engine.now

    # -- sending ------------------------------------------------------------

    def _requeue(self, seq: int) -> None:
        if self.reorder.has(seq) or seq in self._retx_set:
            return
        heapq.heappush(self._retx, seq)
        self._retx_set.add(seq)

    def _requeue_lost(self, sf: Subflow, everything: bool = False) -> int:
        n = 0
        for seq, rec in list(sf.unacked.items()):
            if rec.lost or (everything and not rec.arrived):
                rec.lost = True
                del sf.unacked[seq]
                self._requeue(seq)
                n += 1
        return n

    def _next_seq(self) -> Optional[int]:
        while self._retx:
            seq = self._retx[0]
            if self.reorder.has(seq):
                heapq.heappop(self._retx)
                self._retx_set.discard(seq)
                continue
            return seq
        if self.new_available is None or self.new_available > 0:
            return self.next_seq
        return None

    def _take(self, seq: int) -> None:
        if self._retx and self._retx[0] == seq:
            heapq.heappop(self._retx)
            self._retx_set.discard(seq)
        else:
            self.next_seq += 1
            if self.new_available is not None:
                self.new_available -= 1

    def pump(self) -> None:
        """Hand queued data to sub-flows until the scheduler says wait."""
        if self._pumping:
            return
        self._pumping = True
        try:
            while True:
                seq = self._next_seq()
                if seq is None:
                    return
                chosen = select_subflow(self, self.segment_bytes, self.routing_context())
                if not chosen:
                    self._arm_wake()
                    return
                self._take(seq)
                if self.record_assignments:
                    self.assignments.append((self.engine.now, seq, tuple(sf.id for sf in chosen)))
                for sf in chosen:
                    self._send(sf, seq)
        finally:
            self._pumping = False

    def _arm_wake(self) -> None:
        pool = scheduling_pool(self)
        if not pool:
            return
        now = self.engine.now
        times = [sf.pace_until - self.queue_limit_us for _, sf in pool]
        when = max(times) if self.mode is SchedulerMode.DUPLICATE else min(times)
        when = max(when, now + 1)
        if self._wake is not None and not self._wake.cancelled:
            if now < self._wake.time <= when:
                return
            self._wake.cancel()
        self._wake = self.engine.at(when, EventKind.TIMER, self._on_wake)

    def _on_wake(self, event) -> None:
        self._wake = None
        self.pump()

    def _send(self, sf: Subflow, seq: int) -> None:
        now = self.engine.now
        nbytes = self.segment_bytes + sf.path.overhead_bytes
        start = max(now, sf.pace_until)
        sf.pace_until = start + int(round(nbytes * 8 / self._nominal_capacity(sf)))
        sf.bytes_sent += self.segment_bytes
        rec = Transmission(seq, sf, start)
        sf.unacked[seq] = rec
        t = start
        outcome = Outcome.DELIVERED
        for hop in sf.path.hops:
            if hop.link is None:
                t += millis(hop.delay_ms)
                continue
            res = transmit(self.links[hop.link], nbytes, self._loss_rng[hop.link], t)
            if res.outcome is not Outcome.DELIVERED:
                outcome = res.outcome
                break
            t = res.at
        if outcome is Outcome.DELIVERED:
            self.engine.at(t, EventKind.PACKET_ARRIVAL, self._on_arrival, rec)
            return
        rec.lost = True
        self.segments_lost += 1
        self.engine.count("packets_dropped")
        if outcome is Outcome.LOST:
            token = sf.token
            self.engine.after(millis(sf.rto_ms), EventKind.TIMER, lambda ev: self._on_rto(rec, token))

    def _on_rto(self, rec: Transmission, token: int) -> None:
        sf = rec.subflow
        if sf.token != token or sf.unacked.get(rec.seq) is not rec:
            return
        del sf.unacked[rec.seq]
        self._requeue(rec.seq)
        self.pump()

    # -- receiving ----------------------------------------------------------

    def _on_arrival(self, event) -> None:
        rec: Transmission = event.data
        if rec.lost:
            self.segments_lost += 1
            self.engine.count("packets_dropped")
            return
        rec.arrived = True
        self.engine.count("packets_delivered")
        self.deliver(rec.seq, rec.subflow)
        self.engine.after(millis(rec.subflow.path.delay_ms), EventKind.PACKET_DELIVERY, self._on_ack, rec)

    def deliver(self, seq: int, sf: Subflow) -> int:
        """Receiver side: resequence and return the bytes released to the application."""
        seg = self.segment_bytes
        if self.reorder.has(seq):
            self.redundant_bytes += seg
            self.interval_redundant[sf.id] += seg
            return 0
        self.useful_bytes += seg
        self.interval_useful[sf.id] += seg
        released = len(self.reorder.insert(seq)) * seg
        self.app_bytes += released
        return released

    def _on_ack(self, event) -> None:
        rec: Transmission = event.data
        sf = rec.subflow
        if sf.unacked.get(rec.seq) is rec:
            del sf.unacked[rec.seq]
        sf.bytes_acked += self.segment_bytes
        sf.rtt_sample((self.engine.now - rec.depart) / 1000.0)

    # -- path events --------------------------------------------------------

    def on_link_down(self, link_id: str) -> None:
        for sf in self.subflows_on_link(link_id):
            for rec in sf.unacked.values():
                if not rec.arrived:
                    rec.lost = True
            if sf.state in (SubflowState.ACTIVE, SubflowState.ESTABLISHING):
                self.on_path_failure(sf, self.detection_us)

    def on_link_up(self, link_id: str) -> None:
        for sf in self.subflows_on_link(link_id):
            if self.path_up(sf) and sf.state is not SubflowState.CLOSED:
                self.on_path_recovery(sf)

    def on_path_failure(self, sf: Subflow, detection_latency: int) -> None:
        """Declare the sub-flow degraded after ``detection_latency`` us and reschedule its lost data."""
        sf.token += 1
        token = sf.token

        def detect(event):
            if sf.token != token:
                return
            sf.state = SubflowState.DEGRADED
            self._requeue_lost(sf)
            self._update_stall()
            self.pump()

        self.engine.after(detection_latency, EventKind.TIMER, detect)

    def on_path_recovery(self, sf: Subflow) -> None:
        """Re-establish the sub-flow (one path RTT) once its path is back up."""
        self._requeue_lost(sf)
        sf.pace_until = self.engine.now
        self._handshake(sf)
        self.pump()

    def sn_change(self, new_sn_path: PathDescriptor) -> int:
        """Move the SN sub-flow to ``new_sn_path``; return the interruption in microseconds."""
        sf = self.sn_subflow()
        if sf is None or len(self.subflows) < 2:
            return 0
        old_sn = self.serving_sn
        if self.termination is TerminationPoint.AT_MN:
            self.serving_sn = new_sn_path.radio_node
            # PDUs are steered via the MN: nothing in flight is lost
            sf.path = PathDescriptor(sf.id, new_sn_path.variant, new_sn_path.hops, new_sn_path.entry,
                                     new_sn_path.radio_node, new_sn_path.overhead_bytes)
            sf.backhaul_ms = backhaul_delay(sf.path, self.topo)
            if not self.path_up(sf) and sf.state is SubflowState.ACTIVE:
                self.on_path_failure(sf, self.detection_us)
            log.debug("SN change %s -> %s without interruption", old_sn, self.serving_sn)
            return 0

        sf.token += 1
        token = sf.token
        sf.state = SubflowState.ESTABLISHING
        self._requeue_lost(sf, everything=True)
        self._update_stall()

        def switched(event):
            if sf.token != token:
                return
            sf.path = new_sn_path
            self.serving_sn = new_sn_path.radio_node
            sf.backhaul_ms = backhaul_delay(sf.path, self.topo)
            sf.pace_until = self.engine.now
            if self.path_up(sf):
                sf.state = SubflowState.ACTIVE
                sf.reset_rtt()
            else:
                sf.state = SubflowState.DEGRADED
            self._update_stall()
            self.pump()

        self.engine.after(self.interrupt_us, EventKind.SN_CHANGE, switched)
        self.pump()
        return self.interrupt_us


def open_connection(term: TerminationPoint, mode: SchedulerMode, bearer: Bearer, topo: Topology, *,
                    engine: Engine, links: Mapping[str, LinkState], params: Optional[ConnectionParams] = None,
                    paths: Optional[Sequence[str]] = None, backup: Sequence[str] = ()) -> MptcpConnection:
    """Create a connection with one sub-flow per path, each starting in Establishing."""
    term = TerminationPoint(term)
    mode = SchedulerMode(mode)
    params = params or ConnectionParams()
    if term in (TerminationPoint.AT_SGW, TerminationPoint.AT_MN) and topo.core is not Core.EPC:
        raise ConfigError("mptcp.termination",
                          f"{term.value} termination needs an EPC option (Opt3/3A/3x), not {topo.option.value}")
    candidates = connection_paths(term, bearer, topo)
    if paths is not None:
        pool = {p.id: p for p in candidates}
        pool.update({p.id: p for p in topo.all_paths() if p.id not in pool})
        missing = [pid for pid in paths if pid not in pool]
        if missing:
            raise ConfigError("mptcp.subflows", f"unknown path {missing[0]!r}")
        chosen = [pool[pid] for pid in paths]
    else:
        chosen = candidates
    if not chosen:
        raise ConfigError("mptcp", "connection has no path")
    ue = topo.nodes[topo.ue]
    if len(chosen) > 1:
        if term is TerminationPoint.END_TO_END and not ue.multihoming:
            raise ConfigError("mptcp.termination",
                              "end-to-end MPTCP needs two independently routable IPv6 prefixes at the UE "
                              "(set multihoming on the UE)")
        if term is not TerminationPoint.END_TO_END and not ue.multi_carrier_api:
            raise ConfigError("mptcp.termination", "UE upper layers are not aware of multiple carriers")
    ids = [p.id for p in chosen]
    backup = list(backup)
    for b in backup:
        if b not in ids:
            raise ConfigError("mptcp.backup", f"{b!r} is not one of the connection's paths")
    if mode is SchedulerMode.BACKUP and not backup and len(ids) > 1:
        backup = ids[1:]
    if mode is SchedulerMode.BACKUP and len(backup) == len(ids) and len(ids) > 1:
        raise ConfigError("mptcp.backup", "backup mode needs at least one regular path")
    subflows = [Subflow(p.id, p, Priority.BACKUP if p.id in backup else Priority.REGULAR) for p in chosen]
    return MptcpConnection(engine, topo, links, term, mode, bearer, subflows, params)

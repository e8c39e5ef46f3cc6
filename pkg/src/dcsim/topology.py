"""Architecture options, nodes, bearers and the paths a bearer may use."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional

from .config import ConfigError, ScenarioConfig
from .links import LinkState


class ArchOption(str, Enum):
    OPT2 = "Opt2_SA_NR"
    OPT3 = "Opt3"
    OPT3A = "Opt3A"
    OPT3X = "Opt3x"
    OPT4 = "Opt4"
    OPT4A = "Opt4A"
    OPT5 = "Opt5"
    OPT7 = "Opt7"
    OPT7A = "Opt7A"
    OPT7X = "Opt7x"


class Core(str, Enum):
    EPC = "EPC"
    FIVE_GC = "5GC"


class Role(str, Enum):
    UE = "UE"
    MN = "MN"
    SN = "SN"
    CORE_GATEWAY = "CoreGateway"
    APP_SERVER = "AppServer"
    WLAN_TERMINATION = "WlanTermination"


class RadioTech(str, Enum):
    LTE = "LTE"
    ELTE = "eLTE"
    NR = "NR"
    WIFI = "WiFi"
    WIGIG = "WiGig"


class BearerKind(str, Enum):
    MCG = "MCG"
    SCG = "SCG"
    MCG_SPLIT = "MCG_Split"
    SCG_SPLIT = "SCG_Split"
    SWITCHED_LWA = "SwitchedLWA"
    SPLIT_LWA = "SplitLWA"


class SplitPoint(str, Enum):
    NONE = "None"
    AT_GATEWAY = "AtGateway_PacketLevel"
    AT_MN = "AtMN"
    AT_SN = "AtSN"


class PathVariant(str, Enum):
    CELLULAR_MN = "CellularMN"
    CELLULAR_SN = "CellularSN"
    WLAN_TRUSTED = "WlanViaCoreTrusted"
    WLAN_UNTRUSTED = "WlanViaCoreUntrusted"
    WLAN_ELWA = "WlanViaAnchor_eLWA"


@dataclass(frozen=True)
class OptionProfile:
    core: Core
    mn_radio: RadioTech
    sn_radio: Optional[RadioTech]
    sn_direct_user_plane: bool

    @property
    def dual_connectivity(self) -> bool:
        return self.sn_radio is not None


# (core, anchor radio, secondary radio, SN has its own user-plane link to the core)
OPTION_PROFILES: dict[ArchOption, OptionProfile] = {
    ArchOption.OPT2: OptionProfile(Core.FIVE_GC, RadioTech.NR, None, False),
    ArchOption.OPT5: OptionProfile(Core.FIVE_GC, RadioTech.ELTE, None, False),
    ArchOption.OPT3: OptionProfile(Core.EPC, RadioTech.LTE, RadioTech.NR, False),
    ArchOption.OPT3A: OptionProfile(Core.EPC, RadioTech.LTE, RadioTech.NR, True),
    ArchOption.OPT3X: OptionProfile(Core.EPC, RadioTech.LTE, RadioTech.NR, True),
    ArchOption.OPT4: OptionProfile(Core.FIVE_GC, RadioTech.NR, RadioTech.ELTE, False),
    ArchOption.OPT4A: OptionProfile(Core.FIVE_GC, RadioTech.NR, RadioTech.ELTE, True),
    ArchOption.OPT7: OptionProfile(Core.FIVE_GC, RadioTech.ELTE, RadioTech.NR, False),
    ArchOption.OPT7A: OptionProfile(Core.FIVE_GC, RadioTech.ELTE, RadioTech.NR, True),
    ArchOption.OPT7X: OptionProfile(Core.FIVE_GC, RadioTech.ELTE, RadioTech.NR, True),
}

GATEWAY_SPLIT_OPTIONS = frozenset({ArchOption.OPT3, ArchOption.OPT7})
SN_SPLIT_OPTIONS = frozenset({ArchOption.OPT3X, ArchOption.OPT7X})
_UNSPLIT_KINDS = frozenset({BearerKind.MCG, BearerKind.SCG, BearerKind.SWITCHED_LWA})

# Combinations that may not be configured on the same UE.
EXCLUSIVE_BEARER_PAIRS = (
    frozenset({BearerKind.MCG_SPLIT, BearerKind.SCG_SPLIT}),
    frozenset({BearerKind.MCG_SPLIT, BearerKind.SCG}),
)


def bearer_violation(option: ArchOption, kind: BearerKind, split: SplitPoint) -> Optional[str]:
    """Reason the (option, bearer kind, split point) combination is invalid, or None."""
    profile = OPTION_PROFILES[option]
    if kind in _UNSPLIT_KINDS and split is not SplitPoint.NONE:
        return f"{kind.value} bearer carries no split point (got {split.value})"
    if kind not in _UNSPLIT_KINDS and split is SplitPoint.NONE:
        return f"{kind.value} bearer needs a split point"
    if split is SplitPoint.AT_SN and option not in SN_SPLIT_OPTIONS:
        return f"split at SN is only available under Opt3x/Opt7x, not {option.value}"
    if split is SplitPoint.AT_GATEWAY and option not in GATEWAY_SPLIT_OPTIONS:
        return f"packet-level split at the gateway is only available under Opt3/Opt7, not {option.value}"

    if kind is BearerKind.MCG:
        return None
    if kind in (BearerKind.SWITCHED_LWA, BearerKind.SPLIT_LWA):
        if profile.dual_connectivity:
            return f"{kind.value} needs a standalone anchor, {option.value} is a DC option"
        if kind is BearerKind.SPLIT_LWA and split is not SplitPoint.AT_MN:
            return "SplitLWA is split at the anchor's PDCP (AtMN)"
        return None
    if not profile.dual_connectivity:
        return f"{kind.value} needs a secondary node, {option.value} is standalone"
    if kind is BearerKind.SCG:
        if not profile.sn_direct_user_plane:
            return f"SCG bearer needs a direct SN user-plane connection, which {option.value} lacks"
        return None
    if kind is BearerKind.MCG_SPLIT:
        if split not in (SplitPoint.AT_MN, SplitPoint.AT_GATEWAY):
            return f"MCG_Split is split at the MN or the gateway, not {split.value}"
        return None
    # SCG_Split
    if split is not SplitPoint.AT_SN:
        return f"SCG_Split is split at the SN, not {split.value}"
    return None


@dataclass(frozen=True)
class Node:
    id: str
    role: Role
    radio: Optional[RadioTech] = None
    multihoming: bool = False
    multi_carrier_api: bool = True
    standby: bool = False


@dataclass(frozen=True)
class Bearer:
    id: str
    kind: BearerKind
    split_point: SplitPoint = SplitPoint.NONE
    qos_class: int = 9


@dataclass(frozen=True)
class Hop:
    src: str
    dst: str
    link: Optional[str]  # None: ideal wired hop (fixed delay, unlimited capacity, never fails)
    delay_ms: float


@dataclass(frozen=True)
class PathDescriptor:
    id: str
    variant: PathVariant
    hops: tuple
    entry: str
    radio_node: str
    overhead_bytes: int = 0

    @property
    def link_ids(self) -> tuple:
        return tuple(h.link for h in self.hops if h.link is not None)

    @property
    def nodes(self) -> tuple:
        return (self.hops[0].src,) + tuple(h.dst for h in self.hops)

    @property
    def delay_ms(self) -> float:
        return sum(h.delay_ms for h in self.hops)

    def hop_delay(self, src: str, dst: str) -> Optional[float]:
        for h in self.hops:
            if h.src == src and h.dst == dst:
                return h.delay_ms
        return None


@dataclass(frozen=True)
class Topology:
    option: ArchOption
    nodes: Mapping[str, Node]
    links: Mapping  # link id -> LinkConfig
    bearers: Mapping[str, Bearer]
    bearer_paths: Mapping[str, tuple]
    access_paths: tuple
    ue: str
    gateway: str
    server: str
    mn: str
    sn: Optional[str]
    backhaul_delay_ms: float
    core_delay_ms: float
    wlan: Mapping  # WT node id -> WlanConfig

    @property
    def profile(self) -> OptionProfile:
        return OPTION_PROFILES[self.option]

    @property
    def core(self) -> Core:
        return self.profile.core

    @property
    def dual_connectivity(self) -> bool:
        return self.sn is not None

    def all_paths(self) -> list:
        seen: dict[str, PathDescriptor] = {}
        for paths in self.bearer_paths.values():
            for p in paths:
                seen.setdefault(p.id, p)
        for p in self.access_paths:
            seen.setdefault(p.id, p)
        return list(seen.values())

    def path(self, path_id: str) -> PathDescriptor:
        for p in self.all_paths():
            if p.id == path_id:
                return p
        raise KeyError(path_id)

    # -- route construction -------------------------------------------------

    def _link_between(self, a: str, b: str) -> Optional[str]:
        for ln in self.links.values():
            if {ln.a, ln.b} == {a, b}:
                return ln.id
        return None

    def _hop(self, a: str, b: str) -> Hop:
        link_id = self._link_between(a, b)
        if link_id is not None:
            return Hop(a, b, link_id, float(self.links[link_id].delay_ms))
        if b == self.ue:
            raise ConfigError("links", f"no radio link declared between {a} and {self.ue}")
        roles = {self.nodes[n].role if n in self.nodes else None for n in (a, b)}
        if roles == {Role.MN, Role.SN}:
            delay = self.backhaul_delay_ms
        elif a == self.gateway:
            delay = self.core_delay_ms
        elif b in self.wlan:
            delay = float(self.wlan[b].extra_delay_ms)
        else:
            delay = 0.0
        return Hop(a, b, None, delay)

    def route(self, path_id: str, variant: PathVariant, nodes: Iterable[str], overhead: int = 0) -> PathDescriptor:
        nodes = list(nodes)
        hops = tuple(self._hop(a, b) for a, b in zip(nodes, nodes[1:]))
        return PathDescriptor(path_id, variant, hops, entry=nodes[1], radio_node=nodes[-2],
                              overhead_bytes=overhead)

    def mn_path(self) -> PathDescriptor:
        return self.route(self.mn, PathVariant.CELLULAR_MN, [self.gateway, self.mn, self.ue])

    def sn_path(self, sn: Optional[str] = None) -> PathDescriptor:
        """SN radio leg reached from the core: directly, or through the anchor when the option has no SN user plane."""
        sn = sn or self.sn
        if self.profile.sn_direct_user_plane:
            return self.route(sn, PathVariant.CELLULAR_SN, [self.gateway, sn, self.ue])
        return self.route(sn, PathVariant.CELLULAR_SN, [self.gateway, self.mn, sn, self.ue])

    def mn_to_sn_path(self, sn: Optional[str] = None, path_id: Optional[str] = None) -> PathDescriptor:
        sn = sn or self.sn
        return self.route(path_id or f"{self.mn}>{sn}", PathVariant.CELLULAR_SN,
                          [self.gateway, self.mn, sn, self.ue])

    def sn_to_mn_path(self) -> PathDescriptor:
        return self.route(f"{self.sn}>{self.mn}", PathVariant.CELLULAR_MN,
                          [self.gateway, self.sn, self.mn, self.ue])

    def wlan_path(self, wt: str) -> PathDescriptor:
        access = self.wlan[wt]
        variant = PathVariant(access.variant)
        if variant is PathVariant.WLAN_TRUSTED:
            return self.route(wt, variant, [self.gateway, wt, self.ue], access.overhead_bytes)
        if variant is PathVariant.WLAN_UNTRUSTED:
            hops = (Hop(self.gateway, "ePDG", None, float(access.extra_delay_ms)),
                    Hop("ePDG", wt, None, self.core_delay_ms),
                    self._hop(wt, self.ue))
            return PathDescriptor(wt, variant, hops, entry="ePDG", radio_node=wt,
                                  overhead_bytes=access.overhead_bytes)
        # eLWA: PDCP PDUs originate at the anchor, then cross the WT hop
        return self.route(f"{self.mn}>{wt}", variant, [self.gateway, self.mn, wt, self.ue], access.overhead_bytes)

    def elwa_wt(self) -> str:
        wts = [w for w, access in self.wlan.items() if access.variant == PathVariant.WLAN_ELWA.value]
        if len(wts) != 1:
            raise ConfigError("wlan", f"LWA bearers need exactly one eLWA WLAN termination, found {len(wts)}")
        return wts[0]


def paths_for_bearer(bearer: Bearer, topo: Topology) -> list:
    """Ordered physical paths a bearer's traffic may take."""
    if bearer.id not in topo.bearers:
        raise KeyError(f"unknown bearer {bearer.id!r}")
    kind = bearer.kind
    if kind is BearerKind.MCG:
        return [topo.mn_path()]
    if kind is BearerKind.SCG:
        return [topo.sn_path()]
    if kind is BearerKind.MCG_SPLIT:
        return [topo.mn_path(), topo.mn_to_sn_path()]
    if kind is BearerKind.SCG_SPLIT:
        return [topo.sn_path(), topo.sn_to_mn_path()]
    wt = topo.elwa_wt()
    if kind is BearerKind.SWITCHED_LWA:
        return [topo.wlan_path(wt)]
    return [topo.mn_path(), topo.wlan_path(wt)]


def _enum(enum_cls, value, path: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ConfigError(path, f"{value!r} is not one of: {allowed}") from None


def build_topology(config: ScenarioConfig) -> Topology:
    """Validate the node/link/bearer declarations and resolve every bearer's paths."""
    option = _enum(ArchOption, config.arch_option, "arch_option")
    profile = OPTION_PROFILES[option]

    nodes: dict[str, Node] = {}
    for i, nc in enumerate(config.nodes):
        where = f"nodes[{i}]"
        if nc.id in nodes:
            raise ConfigError(f"{where}.id", f"duplicate node id {nc.id!r}")
        role = _enum(Role, nc.role, f"{where}.role")
        radio = None if nc.radio is None else _enum(RadioTech, nc.radio, f"{where}.radio")
        if role in (Role.MN, Role.SN, Role.WLAN_TERMINATION) and radio is None:
            raise ConfigError(f"{where}.radio", f"{role.value} node needs a radio technology")
        nodes[nc.id] = Node(nc.id, role, radio, nc.multihoming, nc.multi_carrier_api, nc.standby)

    def only(role: Role, count_standby: bool = False) -> list:
        return [n for n in nodes.values() if n.role is role and (count_standby or not n.standby)]

    for role in (Role.UE, Role.APP_SERVER, Role.CORE_GATEWAY):
        if len(only(role)) != 1:
            raise ConfigError("nodes", f"exactly one {role.value} node required, found {len(only(role))}")
    mns, sns = only(Role.MN), only(Role.SN)
    if len(mns) != 1:
        raise ConfigError("nodes", f"exactly one MN required, found {len(mns)}")
    if profile.dual_connectivity and len(sns) != 1:
        raise ConfigError("nodes", f"{option.value} is a DC option: exactly one SN required, found {len(sns)}")
    if not profile.dual_connectivity and only(Role.SN, True):
        raise ConfigError("nodes", f"{option.value} is standalone: no SN allowed")
    mn = mns[0]
    if mn.radio is not profile.mn_radio:
        raise ConfigError("nodes", f"{option.value} anchors on {profile.mn_radio.value}, MN {mn.id} is {mn.radio.value}")
    for sn in only(Role.SN, True):
        if sn.radio is not profile.sn_radio:
            raise ConfigError("nodes", f"{option.value} needs an {profile.sn_radio.value} SN, {sn.id} is {sn.radio.value}")
    for wt in only(Role.WLAN_TERMINATION, True):
        if wt.radio not in (RadioTech.WIFI, RadioTech.WIGIG):
            raise ConfigError("nodes", f"WLAN termination {wt.id} must be WiFi or WiGig")

    links = {}
    for i, lc in enumerate(config.links):
        where = f"links[{i}]"
        if lc.id in links:
            raise ConfigError(f"{where}.id", f"duplicate link id {lc.id!r}")
        for end in ("a", "b"):
            if getattr(lc, end) not in nodes:
                raise ConfigError(f"{where}.{end}", f"unknown node {getattr(lc, end)!r}")
        if not lc.capacity_mbps > 0:
            raise ConfigError(f"{where}.capacity_mbps", "must be > 0")
        if lc.delay_ms < 0:
            raise ConfigError(f"{where}.delay_ms", "must be >= 0")
        if not 0.0 <= lc.loss <= 1.0:
            raise ConfigError(f"{where}.loss", "must be in [0, 1]")
        if not lc.psi_s > 0:
            raise ConfigError(f"{where}.psi_s", "must be > 0")
        if lc.gamma_s < 0:
            raise ConfigError(f"{where}.gamma_s", "must be >= 0")
        if lc.distribution not in ("exponential", "deterministic"):
            raise ConfigError(f"{where}.distribution", "must be exponential or deterministic")
        links[lc.id] = lc

    wlan = {}
    for i, wc in enumerate(config.wlan):
        where = f"wlan[{i}]"
        node = nodes.get(wc.node)
        if node is None or node.role is not Role.WLAN_TERMINATION:
            raise ConfigError(f"{where}.node", f"{wc.node!r} is not a WlanTermination node")
        variant = _enum(PathVariant, wc.variant, f"{where}.variant")
        if variant in (PathVariant.CELLULAR_MN, PathVariant.CELLULAR_SN):
            raise ConfigError(f"{where}.variant", "WLAN access must use a Wlan* variant")
        wlan[wc.node] = wc

    bearers: dict[str, Bearer] = {}
    for i, bc in enumerate(config.bearers):
        where = f"bearers[{i}]"
        if bc.id in bearers:
            raise ConfigError(f"{where}.id", f"duplicate bearer id {bc.id!r}")
        kind = _enum(BearerKind, bc.kind, f"{where}.kind")
        split = _enum(SplitPoint, bc.split_point, f"{where}.split_point")
        reason = bearer_violation(option, kind, split)
        if reason:
            raise ConfigError(where, reason)
        bearers[bc.id] = Bearer(bc.id, kind, split, bc.qos_class)
    kinds = {b.kind for b in bearers.values()}
    for pair in EXCLUSIVE_BEARER_PAIRS:
        if pair <= kinds:
            a, b = sorted(k.value for k in pair)
            raise ConfigError("bearers", f"{a} and {b} bearers cannot be configured simultaneously")

    topo = Topology(
        option=option, nodes=nodes, links=links, bearers=bearers, bearer_paths={}, access_paths=(),
        ue=only(Role.UE)[0].id, gateway=only(Role.CORE_GATEWAY)[0].id, server=only(Role.APP_SERVER)[0].id,
        mn=mn.id, sn=sns[0].id if profile.dual_connectivity else None,
        backhaul_delay_ms=float(config.backhaul_delay_ms), core_delay_ms=float(config.core_delay_ms), wlan=wlan,
    )
    bearer_paths = {b.id: tuple(paths_for_bearer(b, topo)) for b in bearers.values()}
    access = tuple(topo.wlan_path(w) for w, wc in wlan.items()
                   if wc.variant != PathVariant.WLAN_ELWA.value)
    object.__setattr__(topo, "bearer_paths", bearer_paths)
    object.__setattr__(topo, "access_paths", access)
    for bid, paths in bearer_paths.items():
        if not paths:
            raise ConfigError("bearers", f"bearer {bid} resolves to no path")
    return topo


@dataclass(frozen=True)
class PathStatus:
    path_id: str
    up: bool
    capacity_mbps: float
    queue_s: float
    delay_ms: float
    backhaul_delay_ms: float

    @property
    def feasible(self) -> bool:
        return self.up and self.capacity_mbps > 0


@dataclass(frozen=True)
class RoutingContext:
    t: int
    paths: Mapping[str, PathStatus]

    def feasible(self) -> list:
        return [pid for pid, st in self.paths.items() if st.feasible]

    def __getitem__(self, path_id: str) -> PathStatus:
        return self.paths[path_id]


def path_capacity(path: PathDescriptor, links: Mapping[str, LinkState]) -> float:
    caps = [links[l].effective_capacity for l in path.link_ids]
    return min(caps) if caps else math.inf


def path_up(path: PathDescriptor, links: Mapping[str, LinkState]) -> bool:
    return all(links[l].up for l in path.link_ids)


def backhaul_delay(path: PathDescriptor, topo: Topology) -> float:
    total = 0.0
    for h in path.hops:
        roles = {topo.nodes[n].role if n in topo.nodes else None for n in (h.src, h.dst)}
        if roles == {Role.MN, Role.SN}:
            total += h.delay_ms
    return total


def split_decision_inputs(topo: Topology, links: Mapping[str, LinkState], t: int,
                          queues: Optional[Mapping[str, float]] = None,
                          paths: Optional[Iterable[PathDescriptor]] = None) -> RoutingContext:
    """Snapshot of the routing inputs: up/down, capacity, queue occupancy and backhaul delay per path."""
    queues = queues or {}
    status = {}
    for p in (topo.all_paths() if paths is None else paths):
        up = path_up(p, links)
        status[p.id] = PathStatus(p.id, up, path_capacity(p, links) if up else 0.0,
                                  float(queues.get(p.id, 0.0)), p.delay_ms, backhaul_delay(p, topo))
    return RoutingContext(t, status)

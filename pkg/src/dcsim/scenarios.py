"""Canned scenarios.

Capacities are desk-scale values chosen so runs finish in seconds; the
shapes (step up, fallback, switch-over, reactivation) are what matter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .config import (BearerConfig, LinkConfig, MptcpConfig, NodeConfig, ScenarioConfig, ScriptedEvent,
                     SweepConfig, WlanConfig)

NEVER = 1.0e9  # mean uptime for links that only fail when scripted


def _core_nodes() -> list:
    return [NodeConfig("ue", "UE", multihoming=True), NodeConfig("gw", "CoreGateway"),
            NodeConfig("server", "AppServer")]


def lte_wifi_aggregation() -> ScenarioConfig:
    """LTE regular path; Wi-Fi appears at 10 s and fails at 20 s."""
    return ScenarioConfig(
        name="fig5b-aggregation",
        description="MPTCP over LTE + Wi-Fi in aggregation mode: Wi-Fi joins at 10 s, fails at 20 s",
        arch_option="Opt5",
        seed=5,
        duration_s=30.0,
        nodes=_core_nodes() + [NodeConfig("lte", "MN", radio="eLTE"), NodeConfig("wifi", "WlanTermination", radio="WiFi")],
        links=[
            LinkConfig("lte-radio", "lte", "ue", capacity_mbps=10.0, delay_ms=20.0, psi_s=NEVER, gamma_s=0.0),
            LinkConfig("wifi-radio", "wifi", "ue", capacity_mbps=20.0, delay_ms=5.0, psi_s=NEVER, gamma_s=0.0,
                       initially_up=False),
        ],
        wlan=[WlanConfig("wifi", "WlanViaCoreTrusted")],
        bearers=[BearerConfig("drb1", "MCG")],
        mptcp=MptcpConfig(bearer="drb1", mode="Aggregate", termination="EndToEnd_IPv6MultiHoming"),
        events=[ScriptedEvent(10.0, "link_up", link="wifi-radio"),
                ScriptedEvent(20.0, "link_down", link="wifi-radio")],
    )


def wigig_wifi_backup() -> ScenarioConfig:
    """WiGig regular + Wi-Fi backup; WiGig fails at 10 s and returns at 20 s."""
    return ScenarioConfig(
        name="fig5b-backup",
        description="MPTCP backup mode over WiGig (regular) and Wi-Fi (backup) non-3GPP access",
        arch_option="Opt2_SA_NR",
        seed=6,
        duration_s=30.0,
        nodes=_core_nodes() + [NodeConfig("gnb", "MN", radio="NR"),
                               NodeConfig("wigig", "WlanTermination", radio="WiGig"),
                               NodeConfig("wifi", "WlanTermination", radio="WiFi")],
        links=[
            LinkConfig("nr-radio", "gnb", "ue", capacity_mbps=20.0, delay_ms=10.0, psi_s=NEVER, gamma_s=0.0),
            LinkConfig("wigig-radio", "wigig", "ue", capacity_mbps=40.0, delay_ms=2.0, psi_s=NEVER, gamma_s=0.0),
            LinkConfig("wifi-radio", "wifi", "ue", capacity_mbps=10.0, delay_ms=5.0, psi_s=NEVER, gamma_s=0.0),
        ],
        wlan=[WlanConfig("wigig", "WlanViaCoreTrusted"), WlanConfig("wifi", "WlanViaCoreTrusted")],
        bearers=[BearerConfig("drb1", "MCG")],
        mptcp=MptcpConfig(bearer="drb1", mode="Backup", termination="EndToEnd_IPv6MultiHoming",
                          subflows=["wigig", "wifi"], backup=["wifi"]),
        events=[ScriptedEvent(10.0, "link_down", link="wigig-radio"),
                ScriptedEvent(20.0, "link_up", link="wigig-radio")],
    )


def _en_dc_nodes(standby_sn: bool = False) -> list:
    nodes = _core_nodes() + [NodeConfig("enb", "MN", radio="LTE"), NodeConfig("gnb", "SN", radio="NR")]
    if standby_sn:
        nodes.append(NodeConfig("gnb2", "SN", radio="NR", standby=True))
    return nodes


def opt3x_scg_split() -> ScenarioConfig:
    """SCG split bearer under Option 3x: both legs enter at the gNB."""
    return ScenarioConfig(
        name="opt3x-scg-split",
        description="Option 3x SCG split bearer with end-to-end MPTCP over the SN and SN->MN legs",
        arch_option="Opt3x",
        seed=3,
        duration_s=60.0,
        nodes=_en_dc_nodes(),
        links=[
            LinkConfig("lte-radio", "enb", "ue", capacity_mbps=10.0, delay_ms=20.0, psi_s=NEVER, gamma_s=0.0),
            LinkConfig("nr-radio", "gnb", "ue", capacity_mbps=30.0, delay_ms=4.0, psi_s=20.0, gamma_s=2.0),
        ],
        bearers=[BearerConfig("drb1", "SCG_Split", split_point="AtSN")],
        mptcp=MptcpConfig(bearer="drb1", mode="Aggregate", termination="EndToEnd_IPv6MultiHoming"),
    )


def sn_change(termination: str = "AtSGW", t_interrupt_ms: float = 50.0) -> ScenarioConfig:
    """EN-DC (Option 3A) with an SN change at 10 s."""
    return ScenarioConfig(
        name="sn-change-atsgw-vs-atmn",
        description="SN change under Option 3A with MPTCP terminated at the SGW or at the MN",
        arch_option="Opt3A",
        seed=7,
        duration_s=20.0,
        nodes=_en_dc_nodes(standby_sn=True),
        links=[
            LinkConfig("lte-radio", "enb", "ue", capacity_mbps=10.0, delay_ms=20.0, psi_s=NEVER, gamma_s=0.0),
            LinkConfig("nr-radio", "gnb", "ue", capacity_mbps=30.0, delay_ms=4.0, psi_s=NEVER, gamma_s=0.0),
            LinkConfig("nr2-radio", "gnb2", "ue", capacity_mbps=30.0, delay_ms=4.0, psi_s=NEVER, gamma_s=0.0),
        ],
        bearers=[BearerConfig("drb1", "MCG_Split", split_point="AtMN")],
        mptcp=MptcpConfig(bearer="drb1", mode="Aggregate", termination=termination, t_interrupt_ms=t_interrupt_ms),
        events=[ScriptedEvent(10.0, "sn_change", target_link="nr2-radio")],
    )


def duplicate_reliability(psi_s: float = 9.0, gamma_s: float = 1.0, duration_s: float = 2000.0) -> ScenarioConfig:
    """Same data on the MN and SN paths, both failing as renewal processes."""
    return ScenarioConfig(
        name="duplicate-reliability",
        description="Duplicate-mode MPTCP over MN and SN paths with exponential up/down renewal",
        arch_option="Opt3A",
        seed=11,
        duration_s=duration_s,
        nodes=_en_dc_nodes(),
        links=[
            LinkConfig("lte-radio", "enb", "ue", capacity_mbps=10.0, delay_ms=20.0, psi_s=psi_s, gamma_s=gamma_s),
            LinkConfig("nr-radio", "gnb", "ue", capacity_mbps=30.0, delay_ms=4.0, psi_s=psi_s, gamma_s=gamma_s),
        ],
        bearers=[BearerConfig("drb1", "MCG_Split", split_point="AtMN")],
        # one segment every 5 s keeps 1e5-second runs cheap
        mptcp=MptcpConfig(bearer="drb1", mode="Duplicate", termination="AtSGW", demand_mbps=0.0024),
    )


SWEEP_POINTS = [[5.0, 5.0], [6.0, 4.0], [7.0, 3.0], [8.0, 2.0], [9.0, 1.0], [9.9, 0.1]]


def availability_sweep() -> ScenarioConfig:
    cfg = duplicate_reliability(duration_s=1.0e5)
    return cfg.replace(name="fig5a-sweep",
                       description="Dual-path availability versus single-path availability (analytic and Monte-Carlo)",
                       sweep=SweepConfig(points=[list(p) for p in SWEEP_POINTS]))


@dataclass(frozen=True)
class CannedScenario:
    name: str
    description: str
    anchor: str  # the experiment this scenario reproduces
    kind: str  # "run", "sweep" or "pair" (run once per termination point)
    factory: Callable[[], ScenarioConfig]


CATALOG = [
    CannedScenario("fig5a-sweep", "Availability of one path vs. two paths carrying duplicate traffic",
                   "availability curve: one path vs. dual paths with duplicate traffic", "sweep", availability_sweep),
    CannedScenario("fig5b-aggregation", "LTE + Wi-Fi aggregation, Wi-Fi joins then fails (fallback to LTE)",
                   "throughput trace: MPTCP carrier aggregation over LTE/Wi-Fi", "run", lte_wifi_aggregation),
    CannedScenario("fig5b-backup", "WiGig regular + Wi-Fi backup, WiGig fails then recovers",
                   "throughput trace: MPTCP backup mode over WiGig/Wi-Fi", "run", wigig_wifi_backup),
    CannedScenario("opt3x-scg-split", "Option 3x SCG split bearer, both legs entering at the SN",
                   "EN-DC bearer types: SCG split bearer at the gNB (Option 3x)", "run", opt3x_scg_split),
    CannedScenario("sn-change-atsgw-vs-atmn", "SN change with MPTCP terminated at the SGW vs. at the MN",
                   "MPTCP over EN-DC: SGW vs. anchor-MN termination trade-off", "pair", sn_change),
    CannedScenario("duplicate-reliability", "Duplicate transmission over MN and SN paths under random failures",
                   "robustness of duplicate transmission over dual paths", "run", duplicate_reliability),
]


def canned(name: str) -> CannedScenario:
    for entry in CATALOG:
        if entry.name == name:
            return entry
    raise KeyError(f"no canned scenario named {name!r}")

import pytest

from dcsim.config import BearerConfig, LinkConfig, MptcpConfig, NodeConfig, ScenarioConfig, WlanConfig

# Filled by tests/test_acceptance.py, printed at the end of the session.
ACCEPTANCE_RESULTS: dict = {}

# anchor / secondary radio per option, written out independently of dcsim.topology
RADIOS = {
    "Opt2_SA_NR": ("NR", None),
    "Opt5": ("eLTE", None),
    "Opt3": ("LTE", "NR"),
    "Opt3A": ("LTE", "NR"),
    "Opt3x": ("LTE", "NR"),
    "Opt4": ("NR", "eLTE"),
    "Opt4A": ("NR", "eLTE"),
    "Opt7": ("eLTE", "NR"),
    "Opt7A": ("eLTE", "NR"),
    "Opt7x": ("eLTE", "NR"),
}


def make_config(option="Opt3A", bearers=(("drb1", "MCG", "None"),), *, mode="Aggregate",
                termination="EndToEnd_IPv6MultiHoming", mn_link=None, sn_link=None, **kw) -> ScenarioConfig:
    """Smallest valid scenario for ``option``; standalone options get an eLWA WLAN termination."""
    mn_radio, sn_radio = RADIOS[option]
    nodes = [NodeConfig("ue", "UE", multihoming=True), NodeConfig("gw", "CoreGateway"),
             NodeConfig("srv", "AppServer"), NodeConfig("mn", "MN", radio=mn_radio)]
    links = [mn_link or LinkConfig("mn-ue", "mn", "ue", capacity_mbps=10.0, delay_ms=10.0)]
    wlan = []
    if sn_radio:
        nodes.append(NodeConfig("sn", "SN", radio=sn_radio))
        links.append(sn_link or LinkConfig("sn-ue", "sn", "ue", capacity_mbps=20.0, delay_ms=5.0))
    else:
        nodes.append(NodeConfig("wt", "WlanTermination", radio="WiFi"))
        links.append(LinkConfig("wt-ue", "wt", "ue", capacity_mbps=20.0, delay_ms=5.0))
        wlan.append(WlanConfig("wt", "WlanViaAnchor_eLWA", extra_delay_ms=1.0, overhead_bytes=2))
    return ScenarioConfig(
        name=kw.pop("name", "test"), arch_option=option, nodes=nodes, links=links, wlan=wlan,
        bearers=[BearerConfig(b, k, split_point=s) for b, k, s in bearers],
        mptcp=MptcpConfig(bearer=bearers[0][0], mode=mode, termination=termination,
                          **kw.pop("mptcp", {})),
        **kw)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {line}")

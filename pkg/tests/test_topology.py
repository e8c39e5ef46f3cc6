import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dcsim.config import ConfigError, LinkConfig, NodeConfig, WlanConfig
from dcsim.links import LinkState
from dcsim.topology import (ArchOption, BearerKind, PathVariant, SplitPoint, bearer_violation, build_topology,
                            paths_for_bearer, split_decision_inputs)

from conftest import RADIOS, make_config

OPTIONS = [o.value for o in ArchOption]
KINDS = [k.value for k in BearerKind]
SPLITS = [s.value for s in SplitPoint]

# Accepted (bearer kind, split point) per option, written out by hand.
STANDALONE = {("MCG", "None"), ("SwitchedLWA", "None"), ("SplitLWA", "AtMN")}
EXPECTED = {
    "Opt2_SA_NR": STANDALONE,
    "Opt5": STANDALONE,
    "Opt3": {("MCG", "None"), ("MCG_Split", "AtMN"), ("MCG_Split", "AtGateway_PacketLevel")},
    "Opt3A": {("MCG", "None"), ("SCG", "None"), ("MCG_Split", "AtMN")},
    "Opt3x": {("MCG", "None"), ("SCG", "None"), ("MCG_Split", "AtMN"), ("SCG_Split", "AtSN")},
    "Opt4": {("MCG", "None"), ("MCG_Split", "AtMN")},
    "Opt4A": {("MCG", "None"), ("SCG", "None"), ("MCG_Split", "AtMN")},
    "Opt7": {("MCG", "None"), ("MCG_Split", "AtMN"), ("MCG_Split", "AtGateway_PacketLevel")},
    "Opt7A": {("MCG", "None"), ("SCG", "None"), ("MCG_Split", "AtMN")},
    "Opt7x": {("MCG", "None"), ("SCG", "None"), ("MCG_Split", "AtMN"), ("SCG_Split", "AtSN")},
}
FORBIDDEN_TOGETHER = [{"MCG_Split", "SCG_Split"}, {"MCG_Split", "SCG"}]


def accepts(option, bearers) -> bool:
    try:
        build_topology(make_config(option, bearers))
        return True
    except ConfigError:
        return False


def expected_set(option, kinds_splits) -> bool:
    if not all(ks in EXPECTED[option] for ks in kinds_splits):
        return False
    kinds = {k for k, _ in kinds_splits}
    return not any(pair <= kinds for pair in FORBIDDEN_TOGETHER)


def test_single_bearer_matrix_is_exhaustive():
    accepted = set()
    for option, kind, split in itertools.product(OPTIONS, KINDS, SPLITS):
        ok = accepts(option, (("b", kind, split),))
        assert ok == ((kind, split) in EXPECTED[option]), (option, kind, split)
        assert ok == (bearer_violation(ArchOption(option), BearerKind(kind), SplitPoint(split)) is None)
        if ok:
            accepted.add((option, kind, split))
    assert len(accepted) == sum(len(v) for v in EXPECTED.values())


pairs = st.tuples(st.sampled_from(KINDS), st.sampled_from(SPLITS))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(OPTIONS), st.lists(pairs, min_size=1, max_size=3))
def test_multi_bearer_sets_match_the_table(option, kinds_splits):
    bearers = tuple((f"b{i}", k, s) for i, (k, s) in enumerate(kinds_splits))
    assert accepts(option, bearers) == expected_set(option, kinds_splits)


def test_split_bearers_never_coexist():
    with pytest.raises(ConfigError, match="simultaneously"):
        build_topology(make_config("Opt3x", (("a", "MCG_Split", "AtMN"), ("b", "SCG_Split", "AtSN"))))
    with pytest.raises(ConfigError, match="simultaneously"):
        build_topology(make_config("Opt3A", (("a", "MCG_Split", "AtMN"), ("b", "SCG", "None"))))
    build_topology(make_config("Opt3x", (("a", "MCG", "None"), ("b", "SCG_Split", "AtSN"))))


def test_violation_error_names_the_bearer():
    with pytest.raises(ConfigError) as err:
        build_topology(make_config("Opt3A", (("drb", "SCG_Split", "AtSN"),)))
    assert err.value.path == "bearers[0]"
    assert "Opt3x/Opt7x" in err.value.message


def test_opt3x_scg_split_enters_at_the_sn():
    topo = build_topology(make_config("Opt3x", (("drb", "SCG_Split", "AtSN"),)))
    paths = paths_for_bearer(topo.bearers["drb"], topo)
    assert [p.entry for p in paths] == ["sn", "sn"]
    assert [p.radio_node for p in paths] == ["sn", "mn"]
    assert paths[1].nodes == ("gw", "sn", "mn", "ue")


def test_standalone_mcg_is_one_path():
    topo = build_topology(make_config("Opt2_SA_NR"))
    (path,) = paths_for_bearer(topo.bearers["drb1"], topo)
    assert path.variant is PathVariant.CELLULAR_MN
    assert path.link_ids == ("mn-ue",)
    assert not topo.dual_connectivity


@pytest.mark.parametrize("option", ["Opt3", "Opt3A", "Opt3x", "Opt7"])
def test_mcg_split_enters_at_the_mn(option):
    topo = build_topology(make_config(option, (("drb", "MCG_Split", "AtMN"),), backhaul_delay_ms=7.0))
    paths = paths_for_bearer(topo.bearers["drb"], topo)
    assert len(paths) == 2
    assert [p.entry for p in paths] == ["mn", "mn"]
    assert paths[1].hop_delay("mn", "sn") == 7.0


def test_scg_path_depends_on_sn_user_plane():
    topo = build_topology(make_config("Opt3A", (("drb", "SCG", "None"),)))
    assert paths_for_bearer(topo.bearers["drb"], topo)[0].nodes == ("gw", "sn", "ue")


def test_path_counts_by_kind():
    for option, allowed in EXPECTED.items():
        for kind, split in allowed:
            topo = build_topology(make_config(option, (("b", kind, split),)))
            n = len(paths_for_bearer(topo.bearers["b"], topo))
            assert n == (2 if split != "None" else 1), (option, kind)


def test_unknown_bearer():
    topo = build_topology(make_config())
    other = build_topology(make_config(bearers=(("zzz", "MCG", "None"),)))
    with pytest.raises(KeyError):
        paths_for_bearer(other.bearers["zzz"], topo)


def _wlan_topology(variant, extra_delay=3.0, core_delay=1.0):
    cfg = make_config("Opt2_SA_NR", core_delay_ms=core_delay)
    cfg.nodes.append(NodeConfig("ap", "WlanTermination", radio="WiGig"))
    cfg.links.append(LinkConfig("ap-ue", "ap", "ue", capacity_mbps=40.0, delay_ms=2.0))
    cfg.wlan.append(WlanConfig("ap", variant, extra_delay_ms=extra_delay, overhead_bytes=4))
    return build_topology(cfg)


def test_untrusted_wlan_adds_an_epdg_hop():
    trusted = _wlan_topology("WlanViaCoreTrusted").wlan_path("ap")
    untrusted = _wlan_topology("WlanViaCoreUntrusted").wlan_path("ap")
    assert "ePDG" in untrusted.nodes and "ePDG" not in trusted.nodes
    assert untrusted.delay_ms == pytest.approx(trusted.delay_ms + 3.0)


def test_elwa_originates_at_the_anchor():
    topo = build_topology(make_config("Opt5", (("drb", "SplitLWA", "AtMN"),)))
    mn, wlan = paths_for_bearer(topo.bearers["drb"], topo)
    assert wlan.variant is PathVariant.WLAN_ELWA
    assert wlan.entry == "mn" and wlan.nodes[:2] == ("gw", "mn")
    assert wlan.overhead_bytes == 2
    assert wlan.hop_delay("mn", "wt") == 1.0  # non-collocated WT hop


@pytest.mark.parametrize("mutate,path", [
    (lambda c: c.nodes.append(NodeConfig("ue2", "UE")), "nodes"),
    (lambda c: c.nodes.append(NodeConfig("sn2", "SN", radio="NR")), "nodes"),
    (lambda c: c.nodes.append(NodeConfig("mn", "MN", radio="LTE")), "nodes[5].id"),
    (lambda c: c.links.append(LinkConfig("x", "mn", "nowhere", 1.0)), "links[2].b"),
    (lambda c: c.links.append(LinkConfig("x", "mn", "ue", 0.0)), "links[2].capacity_mbps"),
    (lambda c: c.links.append(LinkConfig("x", "mn", "ue", 1.0, psi_s=0.0)), "links[2].psi_s"),
    (lambda c: c.links.append(LinkConfig("x", "mn", "ue", 1.0, loss=2.0)), "links[2].loss"),
])
def test_inconsistent_node_sets_are_rejected(mutate, path):
    cfg = make_config("Opt3A")
    mutate(cfg)
    with pytest.raises(ConfigError) as err:
        build_topology(cfg)
    assert err.value.path == path


def test_anchor_radio_must_match_option():
    cfg = make_config("Opt3A")
    cfg.nodes[3].radio = "NR"
    with pytest.raises(ConfigError, match="anchors on LTE"):
        build_topology(cfg)
    assert set(RADIOS) == set(OPTIONS)


def _links(topo, down=()):
    return {lid: LinkState(lid, lc.capacity_mbps, lc.delay_ms, up=lid not in down) for lid, lc in topo.links.items()}


def test_split_decision_inputs():
    topo = build_topology(make_config("Opt3A", (("drb", "MCG_Split", "AtMN"),), backhaul_delay_ms=10.0))
    paths = topo.bearer_paths["drb"]
    ctx = split_decision_inputs(topo, _links(topo), 0, paths=paths)
    assert sorted(ctx.feasible()) == sorted(p.id for p in paths)
    assert ctx["mn>sn"].backhaul_delay_ms == 10.0
    assert ctx["mn"].backhaul_delay_ms == 0.0
    assert ctx["mn>sn"].queue_s == 0.0
    ctx = split_decision_inputs(topo, _links(topo, down={"sn-ue"}), 5, {"mn": 0.01}, paths)
    assert ctx.feasible() == ["mn"]
    assert ctx["mn>sn"].capacity_mbps == 0.0
    assert ctx["mn"].queue_s == 0.01


def test_declared_backhaul_link_replaces_the_ideal_hop():
    cfg = make_config("Opt3A", (("drb", "MCG_Split", "AtMN"),), backhaul_delay_ms=5.0)
    ideal = build_topology(cfg).bearer_paths["drb"][1]
    assert ideal.link_ids == ("sn-ue",) and ideal.hop_delay("mn", "sn") == 5.0
    cfg.links.append(LinkConfig("xx", "mn", "sn", capacity_mbps=2.0, delay_ms=8.0))
    finite = build_topology(cfg).bearer_paths["drb"][1]
    assert finite.link_ids == ("xx", "sn-ue")
    assert finite.hop_delay("mn", "sn") == 8.0
